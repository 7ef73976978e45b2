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
/// Micromaser coarse-grained description of the collision model: ancilla
/// moments, master-equation coefficients and right-hand side, fixed-step
/// evolution, the analytic steady state, and its closed-form QFI.
///
/// Operator labels: sigma^+ = |0><1|, so <sigma^+ sigma^-> is the |0><0|
/// weight of the ancilla and Gamma_+ pumps the probe towards |0>.

#ifndef QFIC_MICROME_HPP
#define QFIC_MICROME_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfic/collision.hpp"
#include "qfic/errors.hpp"
#include "qfic/fisher.hpp"
#include "qfic/integrate.hpp"
#include "qfic/qmath.hpp"
#include "qfic/reservoir.hpp"

namespace qfic::microme {

struct AncillaMoments {
  double pPlusMinus = 0.0; ///< <sigma^+ sigma^-> = rho'_00
  double pMinusPlus = 0.0; ///< <sigma^- sigma^+> = rho'_11
  cplx sMinus = 0.0;       ///< <sigma^->, taken as rho'_10
};

struct MasterEqCoeffs {
  cplx driveAmp = 0.0; ///< r tau g <sigma^->
  double gammaPlus = 0.0;
  double gammaMinus = 0.0;
};

/// gamma1 = 1/T1, gamma2 = 1/T2, zeta = r tau g, exposure = t. Any time unit
/// works as long as gamma * exposure is dimensionless.
struct RateBundle {
  double gamma1 = 1.0 / 150e-6;
  double gamma2 = 1.0 / 100e-6;
  double zeta = 0.012;
  double exposure = 480e-9;

  void validate() const {
    detail::require(gamma1 >= 0.0 && gamma2 >= 0.0 && zeta >= 0.0 && exposure >= 0.0,
                    "RateBundle: all entries must be >= 0");
  }

  static RateBundle from(const reservoir::ReservoirUnitSpec &s, double zeta) {
    s.validate();
    return {1.0 / s.t1, 1.0 / s.t2, zeta, s.exposureTime};
  }
};

inline AncillaMoments ancillaMoments(const Qubit &unit) {
  const Mat2 &m = unit.matrix();
  return {m(0, 0).real(), m(1, 1).real(), m(1, 0)};
}

inline MasterEqCoeffs meCoefficients(const AncillaMoments &m, const collision::CollisionParams &p) {
  p.validate();
  const double pref = 0.5 * p.rate * p.tau * p.tau * p.g * p.g;
  return {p.rate * p.tau * p.g * m.sMinus, pref * m.pPlusMinus, pref * m.pMinusPlus};
}

/// 2 o rho o^dagger - o^dagger o rho - rho o^dagger o
inline Mat2 lindbladSuperop(const Mat2 &o, const Mat2 &rho) {
  const Mat2 od = o.adjoint();
  const Mat2 odo = od * o;
  return 2.0 * (o * rho * od) - odo * rho - rho * odo;
}

inline Mat2 effectiveHamiltonian(const MasterEqCoeffs &c) {
  return c.driveAmp * pauli::raising() + std::conj(c.driveAmp) * pauli::lowering();
}

/// -i[H_eff, rho] + Gamma_+ L[sigma^+] rho + Gamma_- L[sigma^-] rho
inline Mat2 meRhs(const Mat2 &rho, const MasterEqCoeffs &c) {
  return -kI * commutator(effectiveHamiltonian(c), rho) +
         c.gammaPlus * lindbladSuperop(pauli::raising(), rho) +
         c.gammaMinus * lindbladSuperop(pauli::lowering(), rho);
}

inline Mat2 meRhs(const Qubit &rho, const MasterEqCoeffs &c) { return meRhs(rho.matrix(), c); }

/// Fixed-step RK4 integration of the master equation up to tMax.
/// Requires dt <= 1e-2 / max(|driveAmp|, Gamma_+ + Gamma_-).
inline Qubit evolveMe(const Qubit &rho0, const MasterEqCoeffs &c, double tMax, double dt) {
  detail::require(tMax >= 0.0, "evolveMe: tMax must be >= 0");
  detail::require(dt > 0.0, "evolveMe: dt must be positive");
  const double scale = std::max(std::abs(c.driveAmp), c.gammaPlus + c.gammaMinus);
  if (scale > 0.0 && dt > 1e-2 / scale)
    throw InvalidArgument("evolveMe: dt exceeds 1e-2 / max(|driveAmp|, Gamma_+ + Gamma_-)");
  const Mat2 out = integrate::rk4(
      rho0.matrix(), 0.0, tMax, dt, [&c](double, const Mat2 &r) { return meRhs(r, c); },
      [](Mat2 &r) { r = r.hermitianPart(); });
  return Qubit(out, rho0.traceTolerance());
}

/// Analytic steady state, subnormalized by e^{-gamma1 t}:
///   [[ (1+cos phi)/2 e^{-g1 t},            zeta/2 sin phi cos phi e^{-(g1+g2) t} ],
///    [ zeta/2 sin phi cos phi e^{-(g1+g2) t}, (1-cos phi)/2 e^{-g1 t}           ]]
inline Qubit steadyStateAnalytic(double phi, const RateBundle &r) {
  r.validate();
  const double e1 = std::exp(-r.gamma1 * r.exposure);
  const double e12 = std::exp(-(r.gamma1 + r.gamma2) * r.exposure);
  const double c = std::cos(phi), s = std::sin(phi);
  const double off = 0.5 * r.zeta * s * c * e12;
  return Qubit(Mat2{0.5 * (1.0 + c) * e1, off, off, 0.5 * (1.0 - c) * e1},
               std::max(kDefaultTraceTol, 1.0 - e1 + 1e-12));
}

inline Qubit steadyStateAnalytic(const reservoir::ReservoirUnitSpec &spec, const RateBundle &r) {
  return steadyStateAnalytic(spec.phi, r);
}

/// Analytic phi-derivative of steadyStateAnalytic.
inline Mat2 steadyStateAnalyticDerivative(double phi, const RateBundle &r) {
  const double e1 = std::exp(-r.gamma1 * r.exposure);
  const double e12 = std::exp(-(r.gamma1 + r.gamma2) * r.exposure);
  const double off = 0.5 * r.zeta * std::cos(2.0 * phi) * e12;
  const double s = std::sin(phi);
  return Mat2{-0.5 * s * e1, off, off, 0.5 * s * e1};
}

/// Bloch components of the analytic steady state and their phi-derivatives:
///   r_x = zeta/2 e^{-(g1+g2)t} sin 2phi,  r_y = 0,  r_z = e^{-g1 t} cos phi.
struct SteadyBloch {
  BlochVector r, dr;
};

inline SteadyBloch steadyBloch(double phi, const RateBundle &rb) {
  const double e1 = std::exp(-rb.gamma1 * rb.exposure);
  const double e12 = std::exp(-(rb.gamma1 + rb.gamma2) * rb.exposure);
  return {{0.5 * rb.zeta * e12 * std::sin(2.0 * phi), 0.0, e1 * std::cos(phi)},
          {rb.zeta * e12 * std::cos(2.0 * phi), 0.0, -e1 * std::sin(phi)}};
}

/// Closed-form QFI of the analytic steady state:
///   A cos^2 2phi + B sin^2 phi
///     + (1/4) sin^2 2phi (A cos 2phi - B)^2 / (1 - B cos^2 phi - (A/4) sin^2 2phi)
/// with A = zeta^2 e^{-2(g1+g2)t}, B = e^{-2 g1 t}. A vanishing denominator
/// (|r| -> 1, only reachable without damping at phi in {0, pi}) yields the
/// pure-state limit when the numerator vanishes too, otherwise Singular.
inline FisherResult qfiClosedForm(double phi, const RateBundle &rb) {
  rb.validate();
  const double a = rb.zeta * rb.zeta * std::exp(-2.0 * (rb.gamma1 + rb.gamma2) * rb.exposure);
  const double b = std::exp(-2.0 * rb.gamma1 * rb.exposure);
  const double c2 = std::cos(2.0 * phi), s2 = std::sin(2.0 * phi);
  const double s = std::sin(phi), c = std::cos(phi);
  const double head = a * c2 * c2 + b * s * s;
  const double num = 0.25 * s2 * s2 * (a * c2 - b) * (a * c2 - b);
  const double den = 1.0 - b * c * c - 0.25 * a * s2 * s2;
  if (den <= 1e-12) {
    if (num <= 1e-12)
      return {head, FisherMethod::ClosedForm, FisherStatus::PureStateLimit};
    return {std::numeric_limits<double>::infinity(), FisherMethod::ClosedForm,
            FisherStatus::Singular};
  }
  return {std::max(0.0, head + num / den), FisherMethod::ClosedForm, FisherStatus::Ok};
}

inline FisherResult qfiClosedForm(const reservoir::ReservoirUnitSpec &spec, const RateBundle &rb) {
  return qfiClosedForm(spec.phi, rb);
}

} // namespace qfic::microme

#endif // QFIC_MICROME_HPP
