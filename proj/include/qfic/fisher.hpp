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
/// Fisher information for a single phase parameter: classical Fisher
/// information, three routes to the qubit quantum Fisher information
/// (matrix, Bloch, spectral), the Cramer-Rao bound, and centered finite
/// differences of state-valued functions.

#ifndef QFIC_FISHER_HPP
#define QFIC_FISHER_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>

#include "qfic/errors.hpp"
#include "qfic/qmath.hpp"

namespace qfic {

enum class FisherMethod { Matrix, Bloch, Spectral, Classical, ClosedForm };

enum class FisherStatus {
  Ok,
  PureStateLimit, ///< |r| -> 1, reported as |dr|^2
  Degenerate,     ///< degenerate eigenvalue pair dropped (spectral route)
  Divergent,      ///< p -> 0 with dp != 0; value is +inf
  Singular        ///< vanishing denominator without a finite limit; value is +inf
};

inline std::string_view toString(FisherStatus s) {
  switch (s) {
  case FisherStatus::Ok: return "ok";
  case FisherStatus::PureStateLimit: return "pure-state-limit";
  case FisherStatus::Degenerate: return "degenerate";
  case FisherStatus::Divergent: return "divergent";
  case FisherStatus::Singular: return "singular";
  }
  return "unknown";
}

struct FisherResult {
  double value = 0.0;
  FisherMethod method = FisherMethod::Matrix;
  FisherStatus status = FisherStatus::Ok;
};

/// Centered-difference step in radians, 0 < delta < 1e-2.
struct DiffSpec {
  double delta = 1e-4;

  void validate() const {
    detail::require(delta > 0.0 && delta < 1e-2, "DiffSpec: delta must lie in (0, 1e-2)");
  }
};

/// How subnormalized qubit operators enter the quantum Fisher routes.
/// UnitTraceCompletion evaluates on rho + (1 - Tr rho)/2 I, the unit-trace
/// state with the same Bloch vector; it is a no-op for unit-trace input.
enum class TraceConvention { UnitTraceCompletion, AsGiven };

namespace detail {

inline constexpr double kNegligible = 1e-14;

/// Negative round-off is clamped to 0.
inline FisherResult finish(double v, FisherMethod m, FisherStatus s = FisherStatus::Ok) {
  if (std::isfinite(v) && v < 0.0) v = 0.0;
  return {v, m, s};
}

inline double det2(const Mat2 &m) { return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real(); }

} // namespace detail

/// sum (dp_i)^2 / p_i. Terms with p_i and |dp_i| both below 1e-14 are
/// skipped; p_i below 1e-14 with a non-negligible derivative is Divergent.
inline FisherResult classicalFisher(std::span<const double> p, std::span<const double> dp) {
  detail::require(p.size() == dp.size(), "classicalFisher: length mismatch");
  double total = 0.0, sum = 0.0;
  for (double x : p) {
    detail::require(x >= -detail::kNegligible, "classicalFisher: negative probability");
    sum += x;
  }
  detail::require(std::abs(sum - 1.0) <= 1e-6, "classicalFisher: probabilities do not sum to 1");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < detail::kNegligible) {
      if (std::abs(dp[i]) < detail::kNegligible) continue;
      return {std::numeric_limits<double>::infinity(), FisherMethod::Classical,
              FisherStatus::Divergent};
    }
    total += dp[i] * dp[i] / p[i];
  }
  return detail::finish(total, FisherMethod::Classical);
}

/// |dr|^2 + (r.dr)^2 / (1 - |r|^2). For 1 - |r| <= 1e-9 the pure-state limit
/// |dr|^2 is returned when r.dr vanishes (|r.dr| <= 1e-9); otherwise the
/// limit does not exist and NumericalError is thrown.
inline FisherResult qfiBloch(const BlochVector &r, const BlochVector &dr) {
  const double len = r.norm();
  detail::require(len <= 1.0 + 1e-9, "qfiBloch: |r| > 1");
  const double rdr = r.dot(dr);
  if (len >= 1.0 - 1e-9) {
    if (std::abs(rdr) > 1e-9)
      throw NumericalError("qfiBloch: pure state with r.dr != 0 has no finite limit");
    return detail::finish(dr.norm2(), FisherMethod::Bloch, FisherStatus::PureStateLimit);
  }
  return detail::finish(dr.norm2() + rdr * rdr / (1.0 - r.norm2()), FisherMethod::Bloch);
}

/// Tr[(d rho)^2] + Tr[(rho d rho)^2] / det rho.
///
/// For det rho <= 1e-12 the expression is evaluated through the Bloch-form
/// pure-state limit |dr|^2 (status PureStateLimit). Finite-difference
/// derivatives satisfy r.dr = 0 only to O(delta^2), so the limit is accepted
/// for |r.dr| <= 1e-6; beyond that the result is Singular.
inline FisherResult qfiQubitMatrix(const Qubit &rho, const Mat2 &drho,
                                   TraceConvention conv = TraceConvention::UnitTraceCompletion) {
  Mat2 r = rho.matrix();
  Mat2 d = drho.hermitianPart();
  if (conv == TraceConvention::UnitTraceCompletion) {
    r = unitTraceCompletion(r);
    d = unitTraceCompletionDerivative(d);
  }
  const double det = detail::det2(r);
  if (det <= 1e-12) {
    const BlochVector rb = blochFromRho(r), db = blochFromRho(d);
    if (std::abs(rb.dot(db)) > 1e-6)
      return {std::numeric_limits<double>::infinity(), FisherMethod::Matrix,
              FisherStatus::Singular};
    return detail::finish(db.norm2(), FisherMethod::Matrix, FisherStatus::PureStateLimit);
  }
  const Mat2 rd = r * d;
  const double v = (d * d).trace().real() + (rd * rd).trace().real() / det;
  return detail::finish(v, FisherMethod::Matrix);
}

/// Spectral form from states at phi - delta, phi, phi + delta:
///   sum_i (dp_i)^2/p_i + sum_{i != j} 2 (p_i - p_j)^2/(p_i + p_j) |<psi_i|d psi_j>|^2.
/// Eigenpairs at phi +- delta are matched to the phi eigenvectors by overlap
/// (to each other when the phi spectrum is degenerate, so a level crossing is
/// followed through) and phase-aligned before differencing. Pairs with
/// |p_i - p_j| < 1e-8 are dropped and flagged Degenerate.
inline FisherResult qfiSpectral(const Qubit &minus, const Qubit &center, const Qubit &plus,
                                double delta,
                                TraceConvention conv = TraceConvention::UnitTraceCompletion) {
  DiffSpec{delta}.validate();
  auto prep = [conv](const Qubit &q) {
    return conv == TraceConvention::UnitTraceCompletion ? unitTraceCompletion(q.matrix())
                                                        : q.matrix();
  };
  const auto s0 = spectralDecompose(prep(center));
  auto sm = spectralDecompose(prep(minus));
  auto sp = spectralDecompose(prep(plus));

  auto match = [](SpectralDecomp<2> &s, const SpectralDecomp<2> &ref) {
    if (std::abs(inner(ref.eigenvectors[0], s.eigenvectors[1])) >
        std::abs(inner(ref.eigenvectors[0], s.eigenvectors[0]))) {
      std::swap(s.eigenvalues[0], s.eigenvalues[1]);
      std::swap(s.eigenvectors[0], s.eigenvectors[1]);
    }
  };
  auto align = [&](SpectralDecomp<2> &s) {
    for (std::size_t i = 0; i < 2; ++i) {
      const cplx ov = inner(s0.eigenvectors[i], s.eigenvectors[i]);
      if (std::abs(ov) == 0.0) continue;
      const cplx phase = std::conj(ov) / std::abs(ov);
      for (auto &c : s.eigenvectors[i]) c *= phase;
    }
  };
  if (std::abs(s0.eigenvalues[0] - s0.eigenvalues[1]) < 1e-8) {
    match(sm, s0);
    match(sp, sm);
  } else {
    match(sm, s0);
    match(sp, s0);
  }
  align(sm);
  align(sp);

  const double inv2d = 1.0 / (2.0 * delta);
  FisherStatus status = FisherStatus::Ok;
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double p = s0.eigenvalues[i];
    const double dp = (sp.eigenvalues[i] - sm.eigenvalues[i]) * inv2d;
    if (p < detail::kNegligible) {
      if (std::abs(dp) < detail::kNegligible) continue;
      return {std::numeric_limits<double>::infinity(), FisherMethod::Spectral,
              FisherStatus::Divergent};
    }
    total += dp * dp / p;
  }
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      if (i == j) continue;
      const double pi = s0.eigenvalues[i], pj = s0.eigenvalues[j];
      if (std::abs(pi - pj) < 1e-8) {
        status = FisherStatus::Degenerate;
        continue;
      }
      Ket<2> dpsi;
      for (std::size_t k = 0; k < 2; ++k)
        dpsi[k] = (sp.eigenvectors[j][k] - sm.eigenvectors[j][k]) * inv2d;
      total += 2.0 * (pi - pj) * (pi - pj) / (pi + pj) * std::norm(inner(s0.eigenvectors[i], dpsi));
    }
  return detail::finish(total, FisherMethod::Spectral, status);
}

/// 1 / (M F); +inf when F is zero.
inline double cramerRaoBound(const FisherResult &f, long repetitions) {
  detail::require(repetitions >= 1, "cramerRaoBound: repetitions must be positive");
  detail::require(!(f.value < 0.0), "cramerRaoBound: negative Fisher information");
  if (f.value == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (static_cast<double>(repetitions) * f.value);
}

// ---------------------------------------------------------------------------
// Finite differences

namespace detail {

template <std::size_t N>
const Matrix<N> &asMatrix(const Matrix<N> &m) {
  return m;
}
template <std::size_t N>
const Matrix<N> &asMatrix(const DensityMatrix<N> &m) {
  return m.matrix();
}

} // namespace detail

/// (f(phi + delta) - f(phi - delta)) / (2 delta), Hermitian-symmetrized.
/// `f` maps radians to a Matrix<N> or DensityMatrix<N>.
template <typename F>
auto centeredDiff(F &&f, double phi, DiffSpec spec = {}) {
  spec.validate();
  const auto hi = f(phi + spec.delta);
  const auto lo = f(phi - spec.delta);
  auto d = detail::asMatrix(hi) - detail::asMatrix(lo);
  return (d / (2.0 * spec.delta)).hermitianPart();
}

/// Centered difference of a Bloch-vector-valued function.
template <typename F>
  requires std::same_as<std::invoke_result_t<F, double>, BlochVector>
BlochVector centeredDiffBloch(F &&f, double phi, DiffSpec spec = {}) {
  spec.validate();
  return (1.0 / (2.0 * spec.delta)) * (f(phi + spec.delta) - f(phi - spec.delta));
}

} // namespace qfic

#endif // QFIC_FISHER_HPP
