// Copyright 2026 The qfic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "golden_values.hpp"
#include "qfic/devicesim.hpp"

using namespace qfic;
using namespace qfic::devicesim;

namespace {

constexpr double kPi = std::numbers::pi;
const double kOmega0 = 2 * kPi * 4.5;
const NoiseChannels kDeviceNoise = NoiseChannels::fromTimes(150e3, 100e3);
const Qubit kGround = Qubit::pure(ket::zero());

PulseSpec fine() { return PulseSpec::resonant(kOmega0, 22.4, kPi / 2, 256); }

/// Drive-free spec: zero pulse area, no detuning.
PulseSpec idle() {
  PulseSpec s;
  s.alpha = 0.0;
  s.model = DriveModel::RotatingWave;
  return s;
}

double deviceQfi(double phi, const PulseSpec &s, const NoiseChannels &n, double dphi = 1e-4) {
  const std::vector<double> grid{phi};
  return qfiDeviceSweep(grid, dphi, kGround, s, n, 1).front().qfi.value;
}

} // namespace

TEST(Pulse, PeakAmplitudeAndEnvelope) {
  EXPECT_NEAR(peakAmplitude(kPi / 2, 22.4), golden::kPeakAmplitudeRadPerNs, 1e-16);
  const PulseSpec s;
  EXPECT_NEAR(gaussianEnvelope(s.center(), s), golden::kPeakAmplitudeRadPerNs, 1e-16);
  EXPECT_NEAR(gaussianEnvelope(s.center() + s.sigmaP, s), golden::kPeakAmplitudeRadPerNs / std::numbers::e,
              1e-16);
  EXPECT_DOUBLE_EQ(s.duration(), 8 * 22.4);
  EXPECT_THROW(peakAmplitude(1.0, 0.0), InvalidArgument);
}

TEST(Pulse, WindowedAreaQuadrature) {
  const PulseSpec s;
  const int n = 20000;
  const double h = s.duration() / n;
  double area = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    area += w * gaussianEnvelope(k * h, s);
  }
  area *= h / 3;
  EXPECT_NEAR(area, golden::kWindowArea, 1e-12);
}

TEST(Pulse, SpecValidation) {
  PulseSpec s;
  s.windowK = 2.5;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = {};
  s.dt = 0.01; // above 1/40 of the 0.222 ns carrier period
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = {};
  s.sigmaP = -1.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  EXPECT_NO_THROW(PulseSpec{}.validate());
  EXPECT_THROW(NoiseChannels::fromTimes(100.0, 250.0), InvalidArgument);
}

TEST(Hamiltonian, Examples) {
  PulseSpec s;
  EXPECT_LE(maxAbsDiff(labFrameHamiltonian(0.0, s), (0.5 * kOmega0) * pauli::z() +
                                                        gaussianEnvelope(0.0, s) * pauli::x()),
            1e-15);
  const Mat2 h = labFrameHamiltonian(s.center(), s);
  EXPECT_NEAR(h(0, 1).real(), golden::kPeakAmplitudeRadPerNs * std::cos(kOmega0 * s.center()), 1e-15);
  s.model = DriveModel::RotatingWave;
  s.omegaD = kOmega0 - 0.2;
  const Mat2 r = hamiltonian(s.center(), s);
  EXPECT_NEAR(r(0, 0).real(), 0.1, 1e-15);
  EXPECT_NEAR(r(0, 1).real(), 0.5 * golden::kPeakAmplitudeRadPerNs, 1e-16);
}

TEST(Lindblad, TraceFreeAndHermitian) {
  const PulseSpec s;
  const NoiseChannels n{0.01, 0.02};
  const Mat2 rho{0.6, cplx(0.1, 0.3), cplx(0.1, -0.3), 0.4};
  for (double t : {0.0, 10.0, 89.6}) {
    const Mat2 d = lindbladRhs(rho, t, s, n);
    ASSERT_LE(std::abs(d.trace()), 1e-16);
    ASSERT_TRUE(isHermitian(d, 1e-16));
  }
}

TEST(Lindblad, DissipatorExamples) {
  // sigma^- = |1><0|: under H = (w0/2) sz the state |1> is the lower level.
  const Mat2 upper = projector(ket::zero());
  EXPECT_LE(maxAbsDiff(dissipator(pauli::lowering(), upper), Mat2::diagonal({-1.0, 1.0})), 1e-16);
  const Mat2 plus = projector(ket::plus());
  EXPECT_LE(maxAbsDiff(dissipator(pauli::z(), plus), Mat2{0.0, -1.0, -1.0, 0.0}), 1e-15);
}

TEST(Lindblad, EnergyRelaxationAtGamma1) {
  const NoiseChannels n{1e-3, 0.0};
  const Qubit out = propagate(Qubit::pure(ket::zero()), idle(), n, 0.0, 400.0);
  EXPECT_NEAR(out(0, 0).real(), std::exp(-0.4), 1e-12);
}

TEST(Lindblad, CoherenceDecayRate) {
  // D[sz] damps rho01 at 2 gamma_phi; amplitude damping adds Gamma_1 / 2.
  const NoiseChannels n{1e-3, 2e-3};
  const Qubit out = propagate(Qubit::pure(ket::plus()), idle(), n, 0.0, 400.0);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.5 * std::exp(-(2 * 2e-3 + 0.5e-3) * 400.0), 1e-12);
  const NoiseChannels dev = kDeviceNoise;
  EXPECT_NEAR(2 * dev.gammaPhi + 0.5 * dev.gamma1, 2.0 / 100e3 - 0.5 / 150e3, 1e-18);
}

TEST(Propagate, FreePrecessionFullTurn) {
  PulseSpec s = fine();
  s.alpha = 0.0;
  const Qubit plus = Qubit::pure(ket::plus());
  const Qubit out = propagate(plus, s, NoiseChannels::none(), 0.0, 2 * kPi / kOmega0);
  EXPECT_LE(maxAbsDiff(out.matrix(), plus.matrix()), 2e-8);
  const Qubit quarter = propagate(plus, s, NoiseChannels::none(), 0.0, 0.5 * kPi / kOmega0);
  EXPECT_NEAR(blochFromRho(quarter).ry, 1.0, 1e-9);
}

TEST(Propagate, EmptyIntervalIsIdentity) {
  const Qubit plus = Qubit::pure(ket::plus());
  EXPECT_EQ(maxAbsDiff(propagate(plus, PulseSpec{}, kDeviceNoise, 3.0, 3.0).matrix(), plus.matrix()), 0.0);
}

TEST(VirtualZ, RotatesAboutZ) {
  const Qubit out = virtualZ(Qubit::pure(ket::plus()), kPi / 2);
  EXPECT_NEAR(blochFromRho(out).ry, 1.0, 1e-15);
  EXPECT_LE(maxAbsDiff(virtualZ(kGround, 1.3).matrix(), kGround.matrix()), 1e-16);
  EXPECT_LE(maxAbsDiff(toDriveFrame(pauli::x(), 2 * kPi / kOmega0, PulseSpec{}), pauli::x()), 1e-14);
}

TEST(Pulse, QuarterTurnFromGround) {
  const Qubit out = xPulse(kGround, fine(), NoiseChannels::none());
  const BlochVector r = blochFromRho(out);
  EXPECT_NEAR(r.ry, -1.0, 1e-6);
  EXPECT_NEAR(r.rz, 0.0, 1e-3);
  PulseSpec rwa = fine();
  rwa.model = DriveModel::RotatingWave;
  EXPECT_NEAR(blochFromRho(xPulse(kGround, rwa, NoiseChannels::none())).ry, -1.0, 1e-9);
}

TEST(Pulse, UnitScaleFidelity) {
  const double f = averageGateFidelity(pulseChannel(fine(), NoiseChannels::none()), rx(kPi / 2));
  EXPECT_NEAR(f, golden::kNoiselessFidelityUnitScale, 5e-7);
  const double coarse = averageGateFidelity(pulseChannel(PulseSpec{}, NoiseChannels::none()), rx(kPi / 2));
  EXPECT_GT(coarse, 0.9998);
}

TEST(Pulse, ChannelMatchesDirectPropagation) {
  const PulseChannel ch = pulseChannel(PulseSpec{}, kDeviceNoise);
  const Qubit plus = Qubit::pure(ket::plus());
  EXPECT_LE(maxAbsDiff(ch.apply(plus.matrix()), xPulse(plus, PulseSpec{}, kDeviceNoise).matrix()), 1e-12);
}

TEST(Calibration, LabFrameNearUnitScale) {
  const auto c = calibrate(PulseSpec{});
  EXPECT_NEAR(c.ampScale, 1.0, 1e-3);
  EXPECT_GE(c.fidelity, 0.999);
  EXPECT_GT(c.evaluations, 25);
}

TEST(Calibration, RotatingWaveNearUnitScale) {
  PulseSpec s;
  s.model = DriveModel::RotatingWave;
  const auto c = calibrate(s);
  EXPECT_NEAR(c.ampScale, 1.0, 0.02);
  EXPECT_GE(c.fidelity, 0.999999);
}

TEST(Calibration, HalvedAreaDoublesScale) {
  PulseSpec s;
  s.model = DriveModel::RotatingWave;
  s.alpha = kPi / 4;
  EXPECT_NEAR(calibrate(s).ampScale, 2.0, 0.04);
}

TEST(Calibration, UnreachableTargetThrows) {
  PulseSpec s;
  s.model = DriveModel::RotatingWave;
  EXPECT_THROW(calibrate(s, rz(kPi / 2)), CalibrationError);
}

TEST(DeviceChannel, NoiselessIsPhaseRotation) {
  // Ideal sequence maps |0> to populations ((1 + cos phi)/2, (1 - cos phi)/2);
  // the counter-rotating term of the lab-frame drive leaves a few 1e-4.
  for (double phi : {0.0, kPi / 3, kPi / 2, kPi}) {
    const Qubit out = deviceChannel(phi, kGround, fine(), NoiseChannels::none());
    ASSERT_NEAR(out(0, 0).real(), 0.5 * (1 + std::cos(phi)), 5e-4) << "phi = " << phi;
  }
}

TEST(DeviceChannel, NoisyGoldenFineStep) {
  const Qubit half = deviceChannel(kPi / 2, kGround, fine(), kDeviceNoise);
  EXPECT_NEAR(half.purity(), golden::kNoisyPurityHalfPi, 2e-6);
  const Qubit pi = deviceChannel(kPi, kGround, fine(), kDeviceNoise);
  EXPECT_NEAR(pi(1, 1).real(), golden::kNoisyP1Pi, 1e-5);
  EXPECT_NEAR(deviceQfi(kPi / 2, fine(), kDeviceNoise), golden::kNoisyDeviceQfiHalfPi, 2e-6);
  EXPECT_NEAR(deviceQfi(kPi, fine(), kDeviceNoise), golden::kNoisyDeviceQfiPi, 2e-6);
}

TEST(DeviceChannel, NoisyGoldenDefaultStep) {
  EXPECT_NEAR(deviceQfi(kPi / 2, PulseSpec{}, kDeviceNoise), golden::kNoisyDeviceQfiHalfPi, 1e-3);
  EXPECT_NEAR(deviceQfi(kPi, PulseSpec{}, kDeviceNoise), golden::kNoisyDeviceQfiPi, 1e-3);
}

TEST(DeviceSweep, NoiselessIsFlat) {
  // RK4 at 64 steps per carrier period shrinks |r| by ~6e-9 per step.
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(2 * kPi * k / 8);
  for (const auto &p : qfiDeviceSweep(grid, 1e-4, kGround, PulseSpec{}, NoiseChannels::none())) {
    ASSERT_NEAR(p.qfi.value, 1.0, 1e-3) << "phi = " << p.phi;
    ASSERT_NEAR(p.purity, 1.0, 1e-3);
  }
}

TEST(DeviceSweep, StepHalvingAgrees) {
  const double a = deviceQfi(1.1, PulseSpec{}, kDeviceNoise, 1e-4);
  const double b = deviceQfi(1.1, PulseSpec{}, kDeviceNoise, 5e-5);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(DeviceSweep, ThreadCountDoesNotChangeResults) {
  const std::vector<double> grid{0.2, 1.0, 2.5, 4.0};
  const auto one = qfiDeviceSweep(grid, 1e-4, kGround, PulseSpec{}, kDeviceNoise, 1);
  const auto many = qfiDeviceSweep(grid, 1e-4, kGround, PulseSpec{}, kDeviceNoise, 3);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].phi, grid[i]);
    EXPECT_EQ(one[i].qfi.value, many[i].qfi.value);
    EXPECT_EQ(one[i].purity, many[i].purity);
  }
}

TEST(Trajectory, SamplesAndEndpoint) {
  const PulseSpec s;
  const auto tr = blochTrajectory(kGround, s, kDeviceNoise, 64);
  const std::size_t steps = integrate::stepCount(0.0, s.duration(), s.dt);
  EXPECT_EQ(tr.times.size(), steps / 64 + 1 + (steps % 64 ? 1 : 0));
  EXPECT_EQ(tr.times.front(), 0.0);
  EXPECT_NEAR(tr.times.back(), s.duration(), 1e-9);
  EXPECT_NEAR(tr.blochPoints.front().rz, 1.0, 1e-15);
  EXPECT_NEAR(tr.blochPoints.back().rz, 0.0, 2e-2);
  for (std::size_t i = 1; i < tr.purities.size(); ++i) ASSERT_LE(tr.purities[i], tr.purities[i - 1] + 1e-12);
  EXPECT_THROW(blochTrajectory(kGround, s, kDeviceNoise, 0), InvalidArgument);
}
