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

/// \file
/// Device-level simulation of the noisy H-phase-H sequence on an effective
/// two-level transmon.
///
/// The Hadamard is compiled as Rz(pi/2) Rx(pi/2) Rz(pi/2). Z rotations are
/// ideal frame updates; each Rx(pi/2) is a Gaussian-enveloped drive
/// integrated under a time-dependent Lindblad equation with amplitude
/// damping (sigma^-) and pure dephasing (sigma_z).
///
/// Units: time in ns, angular frequency in rad/ns.
///
/// Frame convention: a pulse is integrated in the lab frame over
/// [0, 2 windowK sigmaP] and the result is expressed in the frame rotating
/// at the drive frequency, in which the virtual Z gates act. Both pictures
/// coincide at t = 0.

#ifndef QFIC_DEVICESIM_HPP
#define QFIC_DEVICESIM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qfic/errors.hpp"
#include "qfic/fisher.hpp"
#include "qfic/integrate.hpp"
#include "qfic/parallel.hpp"
#include "qfic/qmath.hpp"

namespace qfic::devicesim {

enum class DriveModel {
  LabFrame,    ///< (w0/2) sz + Omega(t) cos(wD t) sx
  RotatingWave ///< ((w0 - wD)/2) sz + (Omega(t)/2) sx, no counter-rotating term
};

inline double peakAmplitude(double alpha, double sigmaP) {
  detail::require(sigmaP > 0.0, "peakAmplitude: sigmaP must be positive");
  return alpha / (std::sqrt(std::numbers::pi) * sigmaP);
}

struct PulseSpec {
  double omega0 = 2.0 * std::numbers::pi * 4.5; ///< rad/ns
  double omegaD = 2.0 * std::numbers::pi * 4.5; ///< rad/ns
  double sigmaP = 22.4;                         ///< ns
  double alpha = std::numbers::pi / 2;          ///< pulse area, rad
  double windowK = 4.0;                         ///< half-window in units of sigmaP
  double dt = (1.0 / 4.5) / 64.0;               ///< ns, 64 steps per carrier period
  double ampScale = 1.0;
  DriveModel model = DriveModel::LabFrame;

  void validate() const {
    detail::require(sigmaP > 0.0, "PulseSpec: sigmaP must be positive");
    detail::require(omegaD > 0.0, "PulseSpec: omegaD must be positive");
    detail::require(windowK >= 3.0, "PulseSpec: windowK must be >= 3");
    detail::require(dt > 0.0, "PulseSpec: dt must be positive");
    detail::require(dt <= (2.0 * std::numbers::pi / omegaD) / 40.0 * (1.0 + 1e-12),
                    "PulseSpec: dt exceeds 1/40 of the drive period");
  }

  double duration() const { return 2.0 * windowK * sigmaP; }
  double center() const { return windowK * sigmaP; }
  double peak() const { return ampScale * peakAmplitude(alpha, sigmaP); }

  /// Resonant drive with `stepsPerPeriod` integrator steps per carrier period.
  static PulseSpec resonant(double omega0, double sigmaP, double alpha, double stepsPerPeriod = 64) {
    PulseSpec p;
    p.omega0 = omega0;
    p.omegaD = omega0;
    p.sigmaP = sigmaP;
    p.alpha = alpha;
    p.dt = (2.0 * std::numbers::pi / omega0) / stepsPerPeriod;
    return p;
  }
};

/// Gamma_1 = 1/T1 and gamma_phi = 1/T2 - 1/(2 T1), in 1/ns.
struct NoiseChannels {
  double gamma1 = 0.0;
  double gammaPhi = 0.0;

  void validate() const {
    detail::require(gamma1 >= 0.0, "NoiseChannels: gamma1 must be >= 0");
    detail::require(gammaPhi >= 0.0, "NoiseChannels: gammaPhi must be >= 0 (requires T2 <= 2 T1)");
  }

  static NoiseChannels none() { return {}; }

  /// T1, T2 in ns.
  static NoiseChannels fromTimes(double t1, double t2) {
    detail::require(t1 > 0.0 && t2 > 0.0, "NoiseChannels: T1 and T2 must be positive");
    NoiseChannels n{1.0 / t1, 1.0 / t2 - 0.5 / t1};
    n.validate();
    return n;
  }
};

/// ampScale * Omega0 * exp(-(t - t_c)^2 / sigmaP^2), t_c = windowK sigmaP.
inline double gaussianEnvelope(double t, const PulseSpec &s) {
  const double x = (t - s.center()) / s.sigmaP;
  return s.peak() * std::exp(-x * x);
}

inline Mat2 labFrameHamiltonian(double t, const PulseSpec &s) {
  return (0.5 * s.omega0) * pauli::z() + (gaussianEnvelope(t, s) * std::cos(s.omegaD * t)) * pauli::x();
}

inline Mat2 rotatingWaveHamiltonian(double t, const PulseSpec &s) {
  return (0.5 * (s.omega0 - s.omegaD)) * pauli::z() + (0.5 * gaussianEnvelope(t, s)) * pauli::x();
}

inline Mat2 hamiltonian(double t, const PulseSpec &s) {
  return s.model == DriveModel::LabFrame ? labFrameHamiltonian(t, s) : rotatingWaveHamiltonian(t, s);
}

/// L rho L^dagger - (1/2){L^dagger L, rho}
inline Mat2 dissipator(const Mat2 &l, const Mat2 &rho) {
  const Mat2 ld = l.adjoint();
  const Mat2 ldl = ld * l;
  return l * rho * ld - 0.5 * anticommutator(ldl, rho);
}

/// -i[H(t), rho] + Gamma_1 D[sigma^-] rho + gamma_phi D[sigma_z] rho
inline Mat2 lindbladRhs(const Mat2 &rho, double t, const PulseSpec &s, const NoiseChannels &n) {
  Mat2 out = -kI * commutator(hamiltonian(t, s), rho);
  if (n.gamma1 != 0.0) out += n.gamma1 * dissipator(pauli::lowering(), rho);
  if (n.gammaPhi != 0.0) out += n.gammaPhi * dissipator(pauli::z(), rho);
  return out;
}

inline Mat2 lindbladRhs(const Qubit &rho, double t, const PulseSpec &s, const NoiseChannels &n) {
  return lindbladRhs(rho.matrix(), t, s, n);
}

namespace detail {

/// RK4 propagation of an arbitrary operator (the map is linear, so matrix
/// units may be pushed through it to build the channel).
template <typename Observe>
Mat2 propagateOperator(const Mat2 &x0, const PulseSpec &s, const NoiseChannels &n, double tStart,
                       double tEnd, Observe &&observe) {
  s.validate();
  n.validate();
  return integrate::rk4(
      x0, tStart, tEnd, s.dt,
      [&](double t, const Mat2 &x) { return lindbladRhs(x, t, s, n); },
      [](Mat2 &x) { x = x.hermitianPart(); }, observe);
}

inline Mat2 propagateOperator(const Mat2 &x0, const PulseSpec &s, const NoiseChannels &n,
                              double tStart, double tEnd) {
  return integrate::rk4(
      x0, tStart, tEnd, s.dt,
      [&](double t, const Mat2 &x) { return lindbladRhs(x, t, s, n); },
      [](Mat2 &) {});
}

inline Qubit checkedState(const Mat2 &m, double initialTrace, double traceTol) {
  if (std::abs(m.trace().real() - initialTrace) > 1e-9)
    throw NumericalError("propagate: trace drift above 1e-9");
  const double lo = eigenvaluesHermitian(m)[1];
  if (lo < -1e-6) throw NumericalError("propagate: positivity breach below -1e-6");
  Mat2 out = m;
  if (lo < 0.0) {
    // Clip round-off negativity (<= 1e-6) back onto the state space.
    auto sd = spectralDecompose(m);
    out = std::max(sd.eigenvalues[0], 0.0) * projector(sd.eigenvectors[0]) +
          std::max(sd.eigenvalues[1], 0.0) * projector(sd.eigenvectors[1]);
    out = out * (m.trace().real() / out.trace().real());
  }
  return Qubit(out, traceTol);
}

} // namespace detail

/// Fixed-step RK4 propagation of the time-dependent Lindblad equation,
/// Hermitian-symmetrized every step. Throws NumericalError on trace drift
/// above 1e-9 or eigenvalues below -1e-6.
inline Qubit propagate(const Qubit &rho0, const PulseSpec &s, const NoiseChannels &n, double tStart,
                       double tEnd) {
  s.validate();
  n.validate();
  const Mat2 out = detail::propagateOperator(rho0.matrix(), s, n, tStart, tEnd,
                                             [](std::size_t, double, const Mat2 &) {});
  return detail::checkedState(out, rho0.trace(), rho0.traceTolerance());
}

/// R_z(beta) = exp(-i beta sz / 2)
inline Mat2 rz(double beta) {
  return Mat2::diagonal({std::polar(1.0, -0.5 * beta), std::polar(1.0, 0.5 * beta)});
}

/// R_x(theta) = exp(-i theta sx / 2)
inline Mat2 rx(double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  return Mat2{c, -kI * s, -kI * s, c};
}

inline Qubit virtualZ(const Qubit &rho, double beta) {
  return Qubit(conjugate(rz(beta), rho.matrix()), rho.traceTolerance());
}

/// Lab-frame operator at time t expressed in the frame rotating at omegaD.
inline Mat2 toDriveFrame(const Mat2 &x, double t, const PulseSpec &s) {
  return conjugate(rz(-s.omegaD * t), x);
}

namespace detail {

inline Mat2 pulseOperator(const Mat2 &x, const PulseSpec &s, const NoiseChannels &n) {
  const Mat2 out = propagateOperator(x, s, n, 0.0, s.duration());
  return s.model == DriveModel::LabFrame ? toDriveFrame(out, s.duration(), s) : out;
}

} // namespace detail

/// Noisy x-pulse channel applied to a state, in the drive frame.
inline Qubit xPulse(const Qubit &rho, const PulseSpec &s, const NoiseChannels &n) {
  s.validate();
  n.validate();
  return detail::checkedState(detail::pulseOperator(rho.matrix(), s, n), rho.trace(),
                              rho.traceTolerance());
}

/// Pulse channel as images of the matrix units |i><j| (row-major index).
struct PulseChannel {
  std::array<Mat2, 4> images;

  Mat2 apply(const Mat2 &x) const {
    Mat2 out;
    for (std::size_t k = 0; k < 4; ++k) out += x(k / 2, k % 2) * images[k];
    return out;
  }
};

inline PulseChannel pulseChannel(const PulseSpec &s, const NoiseChannels &n) {
  s.validate();
  n.validate();
  PulseChannel ch;
  for (std::size_t k = 0; k < 4; ++k) {
    Mat2 e;
    e(k / 2, k % 2) = 1.0;
    // Matrix units are not Hermitian; skip the per-step symmetrization.
    const Mat2 out = detail::propagateOperator(e, s, n, 0.0, s.duration());
    ch.images[k] = s.model == DriveModel::LabFrame ? toDriveFrame(out, s.duration(), s) : out;
  }
  return ch;
}

/// Average gate fidelity of a qubit channel against the unitary `target`:
/// F = (2 F_e + 1) / 3 with F_e = (1/8) sum_P Tr[(U P U^dagger) E(P)].
inline double averageGateFidelity(const PulseChannel &ch, const Mat2 &target) {
  double fe = 0.0;
  for (const Mat2 &p : {pauli::id(), pauli::x(), pauli::y(), pauli::z()})
    fe += (conjugate(target, p).adjoint() * ch.apply(p)).trace().real();
  fe /= 8.0;
  return (2.0 * fe + 1.0) / 3.0;
}

struct CalibrationResult {
  double ampScale = 1.0;
  double fidelity = 0.0;
  int evaluations = 0;
};

/// Finds the amplitude multiplier s in [0.5, 4] that makes the noiseless
/// pulse closest (average gate fidelity) to `target`: a 25-point log grid
/// followed by golden-section refinement around the best grid point.
/// Throws CalibrationError if the optimum stays below minFidelity.
inline CalibrationResult calibrate(PulseSpec s, const Mat2 &target = rx(std::numbers::pi / 2),
                                   double minFidelity = 0.999) {
  s.validate();
  CalibrationResult res;
  auto fid = [&](double scale) {
    PulseSpec t = s;
    t.ampScale = scale;
    ++res.evaluations;
    return averageGateFidelity(pulseChannel(t, NoiseChannels::none()), target);
  };

  constexpr int kGrid = 25;
  const double lo = 0.5, hi = 4.0;
  std::array<double, kGrid> grid{}, vals{};
  std::size_t best = 0;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kGrid - 1));
    vals[i] = fid(grid[i]);
    if (vals[i] > vals[best]) best = static_cast<std::size_t>(i);
  }
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[best + 1 >= kGrid ? kGrid - 1 : best + 1];

  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invPhi * (b - a), d = a + invPhi * (b - a);
  double fc = fid(c), fd = fid(d);
  while (b - a > 1e-7 * (a + b)) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - invPhi * (b - a);
      fc = fid(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invPhi * (b - a);
      fd = fid(d);
    }
  }
  res.ampScale = fc > fd ? c : d;
  res.fidelity = std::max(fc, fd);
  if (vals[best] > res.fidelity) {
    res.ampScale = grid[best];
    res.fidelity = vals[best];
  }
  if (res.fidelity < minFidelity)
    throw CalibrationError("calibrate: best average gate fidelity " + std::to_string(res.fidelity) +
                           " at ampScale " + std::to_string(res.ampScale) + " is below " +
                           std::to_string(minFidelity));
  return res;
}

/// U_z[pi/2] o E_x o U_z[phi + pi] o E_x o U_z[pi/2] applied to rho0.
inline Qubit deviceChannel(double phi, const Qubit &rho0, const PulseSpec &s,
                           const NoiseChannels &n) {
  Qubit r = virtualZ(rho0, std::numbers::pi / 2);
  r = xPulse(r, s, n);
  r = virtualZ(r, phi + std::numbers::pi);
  r = xPulse(r, s, n);
  return virtualZ(r, std::numbers::pi / 2);
}

struct QfiPoint {
  double phi = 0.0;
  FisherResult qfi;
  double purity = 0.0;
  double excitedLoss = 0.0; ///< population of |1> at phi
};

/// QFI of the device output at every grid point, from three independent
/// device runs (phi - dphi, phi, phi + dphi) and the matrix QFI formula.
/// Results keep the grid order.
inline std::vector<QfiPoint> qfiDeviceSweep(std::span<const double> grid, double dphi,
                                            const Qubit &rho0, const PulseSpec &s,
                                            const NoiseChannels &n, unsigned threads = 0) {
  DiffSpec{dphi}.validate();
  s.validate();
  n.validate();
  std::vector<QfiPoint> out(grid.size());
  parallelFor(grid.size(), threads, [&](std::size_t i) {
    const double phi = grid[i];
    const Qubit center = deviceChannel(phi, rho0, s, n);
    const Mat2 d = centeredDiff([&](double x) { return deviceChannel(x, rho0, s, n); }, phi,
                                DiffSpec{dphi});
    out[i] = {phi, qfiQubitMatrix(center, d), center.purity(), center(1, 1).real()};
  });
  return out;
}

struct Trajectory {
  std::vector<double> times; ///< ns
  std::vector<BlochVector> blochPoints;
  std::vector<double> purities;
};

/// Lab-frame Bloch vector sampled every `sampleEvery` integrator steps across
/// one x-pulse window (the final point is always included).
inline Trajectory blochTrajectory(const Qubit &rho0, const PulseSpec &s, const NoiseChannels &n,
                                  int sampleEvery) {
  qfic::detail::require(sampleEvery >= 1, "blochTrajectory: sampleEvery must be >= 1");
  s.validate();
  n.validate();
  Trajectory tr;
  const std::size_t steps = integrate::stepCount(0.0, s.duration(), s.dt);
  auto record = [&](double t, const Mat2 &x) {
    tr.times.push_back(t);
    tr.blochPoints.push_back(blochFromRho(x));
    tr.purities.push_back((x * x).trace().real());
  };
  const Mat2 last = detail::propagateOperator(
      rho0.matrix(), s, n, 0.0, s.duration(), [&](std::size_t k, double t, const Mat2 &x) {
        if (k % static_cast<std::size_t>(sampleEvery) == 0 || k == steps) record(t, x);
      });
  detail::checkedState(last, rho0.trace(), rho0.traceTolerance());
  return tr;
}

} // namespace qfic::devicesim

#endif // QFIC_DEVICESIM_HPP
