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
/// Stroboscopic repeated-interaction (collision) engine. A probe qubit meets
/// a fresh, identically prepared ancilla in every step; the pair evolves
/// under the free plus partial-swap Hamiltonian for a time tau, then the
/// ancilla is discarded.

#ifndef QFIC_COLLISION_HPP
#define QFIC_COLLISION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qfic/errors.hpp"
#include "qfic/qmath.hpp"
#include "qfic/reservoir.hpp"

namespace qfic::collision {

/// Partial-swap collision parameters (hbar = 1, times in units of 1/omegaS).
struct CollisionParams {
  double g = 0.1;
  double tau = 0.12;
  double omegaS = 1.0;
  double omegaR = 1.0;
  double rate = 1.0; ///< Poisson arrival rate of the coarse-grained description

  void validate() const {
    detail::require(g >= 0.0, "CollisionParams: g must be >= 0");
    detail::require(tau > 0.0, "CollisionParams: tau must be positive");
    detail::require(rate > 0.0, "CollisionParams: rate must be positive");
  }

  double zeta() const { return rate * tau * g; }
};

/// (omegaS/2) sz x I + (omegaR/2) I x sz + g (s+ x s- + s- x s+)
inline Mat4 interactionHamiltonian(const CollisionParams &p) {
  p.validate();
  const Mat2 id = pauli::id(), sz = pauli::z(), sp = pauli::raising(), sm = pauli::lowering();
  return (0.5 * p.omegaS) * kron(sz, id) + (0.5 * p.omegaR) * kron(id, sz) +
         p.g * (kron(sp, sm) + kron(sm, sp));
}

struct CollisionOutcome {
  Qubit probe;
  double mutualInfo; ///< bits
};

/// Caches U = exp(-i H tau) for repeated collisions with one parameter set.
class CollisionPropagator {
public:
  explicit CollisionPropagator(const CollisionParams &p)
      : u_(expmHermitianGenerator(interactionHamiltonian(p), -kI * p.tau)), uDag_(u_.adjoint()) {}

  const Mat4 &unitary() const { return u_; }

  /// Joint post-collision state U (rhoS x unit) U^dagger. `unit` must have
  /// unit trace.
  Mat4 joint(const Mat2 &rhoS, const Mat2 &unit) const {
    return (u_ * kron(rhoS, unit) * uDag_).hermitianPart();
  }

  /// Collision map plus post-collision mutual information
  /// S(rho_S') + S(rho_R') - S(rho_SR'), in bits, clamped at 0.
  std::pair<Mat2, double> step(const Mat2 &rhoS, const Mat2 &unit) const {
    const Mat4 j = joint(rhoS, unit);
    const Mat2 probe = partialTrace(j, Subsystem::Probe);
    const Mat2 anc = partialTrace(j, Subsystem::Ancilla);
    const double mi = vonNeumannEntropy(probe) + vonNeumannEntropy(anc) - vonNeumannEntropy(j);
    return {probe, std::max(0.0, mi)};
  }

private:
  Mat4 u_, uDag_;
};

namespace detail {

/// The collision consumes the physical ancilla state, so a subnormalized
/// preparation is divided by its trace first; the map then preserves
/// Tr rho_S.
inline Mat2 physicalAncilla(const Qubit &unit) {
  const double t = unit.trace();
  qfic::detail::require(t > 0.0, "collision: ancilla has zero trace");
  return unit.matrix() / t;
}

} // namespace detail

/// One collision with an ancilla in state `unit`.
inline CollisionOutcome collide(const Qubit &rhoS, const Qubit &unit, const CollisionParams &p) {
  const CollisionPropagator prop(p);
  auto [probe, mi] = prop.step(rhoS.matrix(), detail::physicalAncilla(unit));
  return {Qubit(probe, rhoS.traceTolerance()), mi};
}

struct CollisionTrace {
  std::vector<Qubit> probeStates; ///< one per collision (or only the last, see RunOptions)
  std::vector<double> mutualInfo; ///< bits, one per collision
  bool converged = false;
  int stepsToConverge = -1; ///< 1-based collision index where convergence was detected
};

struct RunOptions {
  int maxSteps = 1000;
  double convTol = 1e-8;     ///< trace distance between successive probe states
  double miPlateauTol = 1e-9; ///< |Delta I| between successive collisions
  bool stopAtConvergence = true;
  bool keepAllStates = true; ///< false keeps only the final probe state

  void validate() const {
    qfic::detail::require(maxSteps >= 1, "runCollisions: maxSteps must be >= 1");
    qfic::detail::require(convTol > 0.0, "runCollisions: convTol must be positive");
    qfic::detail::require(miPlateauTol > 0.0, "runCollisions: MI plateau tolerance must be positive");
  }
};

/// Repeated collisions with freshly prepared identical ancillas. Converged
/// when both the probe trace distance and the mutual-information change
/// between successive collisions fall below their tolerances.
inline CollisionTrace runCollisions(const Qubit &rho0, const reservoir::ReservoirUnitSpec &unitSpec,
                                    const CollisionParams &params, const RunOptions &opt) {
  opt.validate();
  params.validate();
  const CollisionPropagator prop(params);
  const Mat2 unit = detail::physicalAncilla(reservoir::prepareUnit(unitSpec));

  CollisionTrace trace;
  trace.mutualInfo.reserve(static_cast<std::size_t>(opt.maxSteps));
  if (opt.keepAllStates) trace.probeStates.reserve(static_cast<std::size_t>(opt.maxSteps));

  Mat2 rho = rho0.matrix();
  double prevMi = 0.0;
  for (int n = 1; n <= opt.maxSteps; ++n) {
    auto [next, mi] = prop.step(rho, unit);
    if (opt.keepAllStates) trace.probeStates.emplace_back(next, rho0.traceTolerance());
    trace.mutualInfo.push_back(mi);
    if (n > 1 && !trace.converged && traceDistance(next, rho) < opt.convTol &&
        std::abs(mi - prevMi) < opt.miPlateauTol) {
      trace.converged = true;
      trace.stepsToConverge = n;
    }
    rho = next;
    prevMi = mi;
    if (trace.converged && opt.stopAtConvergence) break;
  }
  if (!opt.keepAllStates) trace.probeStates.emplace_back(rho, rho0.traceTolerance());
  return trace;
}

inline CollisionTrace runCollisions(const Qubit &rho0, const reservoir::ReservoirUnitSpec &unitSpec,
                                    const CollisionParams &params, int maxSteps,
                                    double convTol = 1e-8) {
  RunOptions opt;
  opt.maxSteps = maxSteps;
  opt.convTol = convTol;
  return runCollisions(rho0, unitSpec, params, opt);
}

/// Final probe state of a converged run started from |+>. Throws
/// ConvergenceError when maxSteps is exhausted first.
inline Qubit steadyStateNumeric(const reservoir::ReservoirUnitSpec &unitSpec,
                                const CollisionParams &params, int maxSteps = 1'000'000,
                                double convTol = 1e-8,
                                const std::optional<Qubit> &rho0 = std::nullopt) {
  RunOptions opt;
  opt.maxSteps = maxSteps;
  opt.convTol = convTol;
  opt.keepAllStates = false;
  const Qubit start = rho0.value_or(Qubit::pure(ket::plus()));
  auto trace = runCollisions(start, unitSpec, params, opt);
  if (!trace.converged)
    throw ConvergenceError("steadyStateNumeric: no convergence within " +
                           std::to_string(maxSteps) + " collisions");
  return trace.probeStates.back();
}

} // namespace qfic::collision

#endif // QFIC_COLLISION_HPP
