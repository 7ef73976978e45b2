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
/// Reservoir ancilla preparation: the ideal H-phase-H sequence and the
/// phenomenologically damped ancilla state.

#ifndef QFIC_RESERVOIR_HPP
#define QFIC_RESERVOIR_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qfic/errors.hpp"
#include "qfic/qmath.hpp"

namespace qfic::reservoir {

/// Ancilla preparation parameters. Times in seconds (any consistent unit
/// works, only ratios t/T enter).
struct ReservoirUnitSpec {
  double phi = std::numbers::pi / 2;
  double exposureTime = 480e-9;
  double t1 = 150e-6;
  double t2 = 100e-6;

  /// Throws on hard violations, returns soft warnings.
  std::vector<std::string> validate() const {
    detail::require(t1 > 0.0, "ReservoirUnitSpec: t1 must be positive");
    detail::require(t2 > 0.0, "ReservoirUnitSpec: t2 must be positive");
    detail::require(exposureTime >= 0.0, "ReservoirUnitSpec: exposure time must be >= 0");
    std::vector<std::string> warnings;
    if (t2 > 2.0 * t1) warnings.emplace_back("t2 > 2 t1: unphysical dephasing (negative pure-dephasing rate)");
    return warnings;
  }

  double populationDamping() const { return std::exp(-exposureTime / t1); }
  double coherenceDamping() const { return std::exp(-exposureTime / t2); }
};

inline Mat2 hadamard() {
  const double s = std::numbers::sqrt2 / 2;
  return Mat2{s, s, s, -s};
}

/// diag(1, e^{i phi})
inline Mat2 phaseGate(double phi) { return Mat2::diagonal({1.0, std::polar(1.0, phi)}); }

/// (H phase H) rho0 (H phase H)^dagger
inline Qubit idealHPhiH(double phi, const Qubit &rho0) {
  const Mat2 u = hadamard() * phaseGate(phi) * hadamard();
  return Qubit(conjugate(u, rho0.matrix()), rho0.traceTolerance());
}

/// Noisy ancilla:
///   [[ (1+cos phi)/2 e^{-t/T1},  i sin phi/2 e^{-t/T2} ],
///    [ -i sin phi/2 e^{-t/T2},  (1-cos phi)/2 e^{-t/T1} ]]
/// Its trace is e^{-t/T1}; pass normalize = true to divide it out.
/// The matrix is positive semidefinite only for T2 <= T1 (or t = 0 or
/// sin phi = 0); otherwise DensityMatrix validation throws.
inline Qubit prepareUnit(const ReservoirUnitSpec &spec, bool normalize = false) {
  spec.validate();
  const double e1 = spec.populationDamping();
  const double e2 = spec.coherenceDamping();
  const double c = std::cos(spec.phi), s = std::sin(spec.phi);
  Mat2 m{0.5 * (1.0 + c) * e1, kI * (0.5 * s * e2), -kI * (0.5 * s * e2), 0.5 * (1.0 - c) * e1};
  if (normalize) return Qubit(m / m.trace().real());
  return Qubit(m, std::max(kDefaultTraceTol, 1.0 - e1 + 1e-12));
}

/// Analytic phi-derivative of the noisy ancilla (unnormalized form).
inline Mat2 prepareUnitDerivative(const ReservoirUnitSpec &spec) {
  const double e1 = spec.populationDamping();
  const double e2 = spec.coherenceDamping();
  const double c = std::cos(spec.phi), s = std::sin(spec.phi);
  return Mat2{-0.5 * s * e1, kI * (0.5 * c * e2), -kI * (0.5 * c * e2), 0.5 * s * e1};
}

} // namespace qfic::reservoir

#endif // QFIC_RESERVOIR_HPP
