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

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "golden_values.hpp"
#include "qfic/fisher.hpp"
#include "qfic/microme.hpp"
#include "qfic/reservoir.hpp"
#include "test_support.hpp"

using namespace qfic;
using testing_support::kPropertyInstances;
using testing_support::relErr;
using testing_support::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 blochOperator(const BlochVector &d) {
  return 0.5 * (d.rx * pauli::x() + d.ry * pauli::y() + d.rz * pauli::z());
}

const microme::RateBundle kRates{};

} // namespace

TEST(ClassicalFisher, UniformStaticDistributionIsZero) {
  const std::array<double, 2> p{0.5, 0.5}, dp{0.0, 0.0};
  EXPECT_EQ(classicalFisher(p, dp).value, 0.0);
}

TEST(ClassicalFisher, RotatedPopulationsAtQuarterTurn) {
  // p = (cos^2(l/2), sin^2(l/2)), dp = (-sin l / 2, sin l / 2) at l = pi/2.
  const double l = kPi / 2;
  const std::array<double, 2> p{std::pow(std::cos(l / 2), 2), std::pow(std::sin(l / 2), 2)};
  const std::array<double, 2> dp{-std::sin(l) / 2, std::sin(l) / 2};
  EXPECT_NEAR(classicalFisher(p, dp).value, 1.0, 1e-15);
}

TEST(ClassicalFisher, DeterministicAndDivergentCases) {
  const std::array<double, 2> p{1.0, 0.0}, still{0.0, 0.0}, moving{-0.1, 0.1};
  EXPECT_EQ(classicalFisher(p, still).value, 0.0);
  const auto div = classicalFisher(p, moving);
  EXPECT_EQ(div.status, FisherStatus::Divergent);
  EXPECT_TRUE(std::isinf(div.value));
  const std::array<double, 2> bad{0.7, 0.7};
  EXPECT_THROW(classicalFisher(bad, still), InvalidArgument);
}

TEST(QfiMatrix, ZeroDerivative) {
  EXPECT_EQ(qfiQubitMatrix(Qubit::maximallyMixed(), Mat2{}).value, 0.0);
}

TEST(QfiMatrix, MaximallyMixedWithZDerivative) {
  const double a = 0.3;
  const auto f = qfiQubitMatrix(Qubit::maximallyMixed(), (a / 2) * pauli::z());
  EXPECT_NEAR(f.value, a * a, 1e-15);
  EXPECT_EQ(f.status, FisherStatus::Ok);
}

TEST(QfiMatrix, SteadyStateAtPhiOneMatchesClosedForm) {
  const double phi = 1.0;
  const Mat2 d = centeredDiff([](double x) { return microme::steadyStateAnalytic(x, kRates); },
                              phi, DiffSpec{1e-5});
  const auto f = qfiQubitMatrix(microme::steadyStateAnalytic(phi, kRates), d);
  EXPECT_LE(relErr(f.value, microme::qfiClosedForm(phi, kRates).value), 1e-6);
  EXPECT_LE(relErr(f.value, golden::kQfiPhiOne), 1e-6);
}

TEST(QfiMatrix, LiteralTraceConventionDiffersOnSubnormalizedState) {
  const double phi = 1.0;
  const Mat2 d = microme::steadyStateAnalyticDerivative(phi, kRates);
  const Qubit rho = microme::steadyStateAnalytic(phi, kRates);
  const double literal = qfiQubitMatrix(rho, d, TraceConvention::AsGiven).value;
  const double completed = qfiQubitMatrix(rho, d).value;
  EXPECT_LE(relErr(literal, golden::kQfiPhiOneLiteral), 1e-10);
  EXPECT_LE(relErr(completed, golden::kQfiPhiOne), 1e-10);
  EXPECT_GT(relErr(literal, completed), 2e-3);
}

TEST(QfiMatrix, PureStateLimit) {
  const double phi = 0.4;
  const Qubit rho = rhoFromBloch({std::sin(phi), 0.0, std::cos(phi)});
  const Mat2 d = blochOperator({std::cos(phi), 0.0, -std::sin(phi)});
  const auto f = qfiQubitMatrix(rho, d);
  EXPECT_EQ(f.status, FisherStatus::PureStateLimit);
  EXPECT_NEAR(f.value, 1.0, 1e-12);
  const auto bad = qfiQubitMatrix(rho, blochOperator({std::sin(phi), 0.0, std::cos(phi)}));
  EXPECT_EQ(bad.status, FisherStatus::Singular);
}

TEST(QfiBloch, GreatCircleIsOneForAllPhi) {
  for (double phi = 0.0; phi < 2 * kPi; phi += 0.1) {
    const auto f = qfiBloch({std::sin(phi), 0.0, std::cos(phi)}, {std::cos(phi), 0.0, -std::sin(phi)});
    ASSERT_NEAR(f.value, 1.0, 1e-12);
    ASSERT_EQ(f.status, FisherStatus::PureStateLimit);
  }
}

TEST(QfiBloch, ShrunkCircle) {
  const double a = 0.5, phi = 0.9;
  const auto f = qfiBloch(a * BlochVector{std::sin(phi), 0.0, std::cos(phi)},
                          a * BlochVector{std::cos(phi), 0.0, -std::sin(phi)});
  EXPECT_NEAR(f.value, 0.25, 1e-15);
}

TEST(QfiBloch, ZeroDerivativeAndSingularLimit) {
  EXPECT_EQ(qfiBloch({0.1, 0.2, 0.3}, {}).value, 0.0);
  EXPECT_THROW(qfiBloch({0.0, 0.0, 1.0}, {0.0, 0.0, 0.5}), NumericalError);
  EXPECT_THROW(qfiBloch({0.0, 0.0, 1.1}, {}), InvalidArgument);
}

TEST(QfiSpectral, IdenticalInputsGiveZero) {
  const Qubit rho(Mat2{0.6, 0.1, 0.1, 0.4});
  EXPECT_EQ(qfiSpectral(rho, rho, rho, 1e-4).value, 0.0);
}

TEST(QfiSpectral, DiagonalFamilyAtQuarterTurn) {
  auto fam = [](double phi) {
    return Qubit(Mat2::diagonal({(1 + std::cos(phi)) / 2, (1 - std::cos(phi)) / 2}));
  };
  const double phi = kPi / 2, d = 1e-4;
  const auto f = qfiSpectral(fam(phi - d), fam(phi), fam(phi + d), d);
  EXPECT_NEAR(f.value, 1.0, 1e-7);
  EXPECT_EQ(f.status, FisherStatus::Degenerate);
}

TEST(QfiSpectral, SteadyStateAtPhiOneAgreesWithMatrixForm) {
  const double phi = 1.0, d = 1e-4;
  auto fam = [](double x) { return microme::steadyStateAnalytic(x, kRates); };
  const auto s = qfiSpectral(fam(phi - d), fam(phi), fam(phi + d), d);
  const auto m = qfiQubitMatrix(fam(phi), centeredDiff(fam, phi, DiffSpec{d}));
  EXPECT_LE(relErr(s.value, m.value), 1e-4);
}

TEST(CramerRao, Arithmetic) {
  EXPECT_DOUBLE_EQ(cramerRaoBound({1.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(cramerRaoBound({4.0}, 100), 0.0025);
  const auto f = microme::qfiClosedForm(kPi / 2, kRates);
  EXPECT_DOUBLE_EQ(cramerRaoBound(f, 1), 1.0 / f.value);
  EXPECT_NEAR(cramerRaoBound(f, 1), 1.0 / golden::kQfiAtHalfPi, 1e-14);
  EXPECT_TRUE(std::isinf(cramerRaoBound({0.0}, 10)));
  EXPECT_THROW(cramerRaoBound({1.0}, 0), InvalidArgument);
}

TEST(CenteredDiff, ConstantFamilyAndValidation) {
  const Qubit rho(Mat2{0.6, 0.1, 0.1, 0.4});
  EXPECT_EQ(centeredDiff([&](double) { return rho; }, 0.3).maxAbs(), 0.0);
  EXPECT_THROW(centeredDiff([&](double) { return rho; }, 0.3, DiffSpec{0.1}), InvalidArgument);
  EXPECT_THROW(centeredDiff([&](double) { return rho; }, 0.3, DiffSpec{0.0}), InvalidArgument);
}

TEST(CenteredDiff, DampedAncillaSymmetricPointAndSecondOrder) {
  auto unit = [](double phi) { return reservoir::prepareUnit({phi, 480e-9, 150e-6, 100e-6}); };
  const Mat2 d0 = centeredDiff(unit, 0.0);
  EXPECT_NEAR(std::abs(d0(0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d0(1, 1)), 0.0, 1e-15);

  const double phi = kPi / 4;
  const Mat2 exact = reservoir::prepareUnitDerivative({phi, 480e-9, 150e-6, 100e-6});
  const double e1 = maxAbsDiff(centeredDiff(unit, phi, DiffSpec{4e-3}), exact);
  const double e2 = maxAbsDiff(centeredDiff(unit, phi, DiffSpec{2e-3}), exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(FisherMethods, AgreeOnSteadyStateGrid) {
  for (int k = 0; k < 50; ++k) {
    const double phi = 2 * kPi * k / 50;
    const Qubit rho = microme::steadyStateAnalytic(phi, kRates);
    if (detail::det2(unitTraceCompletion(rho.matrix())) <= 1e-6) continue;
    const auto sb = microme::steadyBloch(phi, kRates);
    const double fm = qfiQubitMatrix(rho, microme::steadyStateAnalyticDerivative(phi, kRates)).value;
    const double fb = qfiBloch(sb.r, sb.dr).value;
    const double d = 1e-4;
    const double fs = qfiSpectral(microme::steadyStateAnalytic(phi - d, kRates), rho,
                                  microme::steadyStateAnalytic(phi + d, kRates), d)
                          .value;
    ASSERT_LE(relErr(fm, fb), 1e-4) << "phi = " << phi;
    ASSERT_LE(relErr(fs, fb), 1e-4) << "phi = " << phi;
  }
}

// ---------------------------------------------------------------------------
// Properties over random instances

TEST(FisherProperty, MatrixAndBlochFormsAgree) {
  Rng rng(21);
  for (int i = 0; i < kPropertyInstances; ++i) {
    const BlochVector r = rng.bloch(0.97);
    const BlochVector dr = rng.vec();
    const double fb = qfiBloch(r, dr).value;
    const double fm = qfiQubitMatrix(rhoFromBloch(r), blochOperator(dr)).value;
    ASSERT_LE(relErr(fm, fb), 1e-9) << "instance " << i;
    ASSERT_GE(fm, -1e-12);
  }
}

TEST(FisherProperty, SpectralFormAgreesOnLinearFamilies) {
  Rng rng(22);
  const double d = 1e-4;
  int checked = 0;
  for (int i = 0; i < kPropertyInstances; ++i) {
    const BlochVector r = rng.bloch(0.9);
    const BlochVector dr = rng.vec(0.05);
    // The spectral route drops near-degenerate pairs by design.
    if (r.norm() < 0.05) continue;
    auto fam = [&](double t) { return rhoFromBloch(r + t * dr); };
    const double fs = qfiSpectral(fam(-d), fam(0.0), fam(d), d).value;
    const double fb = qfiBloch(r, dr).value;
    ASSERT_LE(std::abs(fs - fb), 1e-4 * std::max(fb, 1e-3)) << "instance " << i;
    ++checked;
  }
  EXPECT_GE(checked, kPropertyInstances * 99 / 100);
}

TEST(FisherProperty, UnitaryCovariance) {
  Rng rng(23);
  for (int i = 0; i < kPropertyInstances; ++i) {
    const Mat2 rho = rng.densityMatrix<2>();
    const Mat2 d = rng.hermitian<2>();
    const Mat2 u = rng.unitary<2>();
    const double f0 = qfiQubitMatrix(Qubit(rho), d).value;
    const double f1 = qfiQubitMatrix(Qubit(conjugate(u, rho)), conjugate(u, d)).value;
    ASSERT_LE(std::abs(f1 - f0), 1e-10 * std::max(1.0, f0)) << "instance " << i;
  }
}

TEST(FisherProperty, NonNegativeAndClassicalBoundedByQuantum) {
  Rng rng(24);
  for (int i = 0; i < kPropertyInstances; ++i) {
    const BlochVector r = rng.bloch(0.95);
    const BlochVector dr = rng.vec();
    const double fq = qfiBloch(r, dr).value;
    // z-basis measurement: p = (1 +- rz)/2, dp = +-drz/2.
    const std::array<double, 2> p{(1 + r.rz) / 2, (1 - r.rz) / 2};
    const std::array<double, 2> dp{dr.rz / 2, -dr.rz / 2};
    const double fc = classicalFisher(p, dp).value;
    ASSERT_GE(fq, 0.0);
    ASSERT_GE(fc, 0.0);
    ASSERT_LE(fc, fq * (1 + 1e-12) + 1e-12) << "instance " << i;
  }
}
