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
/// Fixed-size dense complex linear algebra for one qubit (2x2) and a
/// probe-ancilla pair (4x4): operators, density matrices, Bloch vectors,
/// tensor products, partial traces, Hermitian spectral decomposition,
/// matrix exponentials of Hermitian generators, and von Neumann entropy.
///
/// Basis convention: |0> is the +1 eigenstate of sigma_z. Two-qubit states
/// are ordered (probe, ancilla), i.e. |00>, |01>, |10>, |11>.

#ifndef QFIC_QMATH_HPP
#define QFIC_QMATH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>

#include "qfic/errors.hpp"

namespace qfic {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

template <std::size_t N>
concept QubitRegisterDim = (N == 2 || N == 4);

template <std::size_t N>
using Ket = std::array<cplx, N>;

/// Dense N x N complex matrix, row-major, value semantics.
template <std::size_t N>
  requires QubitRegisterDim<N>
class Matrix {
public:
  static constexpr std::size_t dim = N;

  constexpr Matrix() = default;

  Matrix(std::initializer_list<cplx> rowMajor) {
    detail::require(rowMajor.size() == N * N, "Matrix: expected dim*dim entries");
    std::copy(rowMajor.begin(), rowMajor.end(), a_.begin());
  }

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::array<cplx, N> &d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  cplx &operator()(std::size_t r, std::size_t c) { return a_[r * N + c]; }
  const cplx &operator()(std::size_t r, std::size_t c) const { return a_[r * N + c]; }

  std::span<const cplx, N * N> entries() const { return a_; }

  Matrix adjoint() const {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  /// (A + A^dagger) / 2
  Matrix hermitianPart() const {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c)
        m(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
    return m;
  }

  double maxAbs() const {
    double m = 0.0;
    for (const auto &x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  Matrix &operator+=(const Matrix &o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Matrix &operator-=(const Matrix &o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Matrix &operator*=(cplx s) {
    for (auto &x : a_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator/(Matrix a, double s) { return a *= 1.0 / s; }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    Matrix m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx ark = a(r, k);
        if (ark == 0.0) continue;
        for (std::size_t c = 0; c < N; ++c) m(r, c) += ark * b(k, c);
      }
    return m;
  }

  friend Ket<N> operator*(const Matrix &a, const Ket<N> &v) {
    Ket<N> out{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out[r] += a(r, c) * v[c];
    return out;
  }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::array<cplx, N * N> a_{};
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;

template <std::size_t N>
double maxAbsDiff(const Matrix<N> &a, const Matrix<N> &b) {
  return (a - b).maxAbs();
}

template <std::size_t N>
Matrix<N> commutator(const Matrix<N> &a, const Matrix<N> &b) {
  return a * b - b * a;
}

template <std::size_t N>
Matrix<N> anticommutator(const Matrix<N> &a, const Matrix<N> &b) {
  return a * b + b * a;
}

/// U rho U^dagger
template <std::size_t N>
Matrix<N> conjugate(const Matrix<N> &u, const Matrix<N> &rho) {
  return u * rho * u.adjoint();
}

template <std::size_t N>
bool isHermitian(const Matrix<N> &m, double tol = 1e-12) {
  return maxAbsDiff(m, m.adjoint()) <= tol;
}

/// |psi><psi|
template <std::size_t N>
Matrix<N> projector(const Ket<N> &psi) {
  Matrix<N> m;
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return m;
}

template <std::size_t N>
cplx inner(const Ket<N> &a, const Ket<N> &b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

namespace pauli {

inline Mat2 id() { return Mat2::identity(); }
inline Mat2 x() { return Mat2{0.0, 1.0, 1.0, 0.0}; }
inline Mat2 y() { return Mat2{0.0, -kI, kI, 0.0}; }
inline Mat2 z() { return Mat2{1.0, 0.0, 0.0, -1.0}; }
/// sigma^+ = |0><1|, so sigma^+ sigma^- = |0><0|.
inline Mat2 raising() { return Mat2{0.0, 1.0, 0.0, 0.0}; }
/// sigma^- = |1><0|
inline Mat2 lowering() { return Mat2{0.0, 0.0, 1.0, 0.0}; }

} // namespace pauli

namespace ket {

inline Ket<2> zero() { return {1.0, 0.0}; }
inline Ket<2> one() { return {0.0, 1.0}; }
inline Ket<2> plus() { return {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}; }
inline Ket<2> minus() { return {std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}; }

} // namespace ket

/// Kronecker product, subsystem order (probe, ancilla).
inline Mat4 kron(const Mat2 &a, const Mat2 &b) {
  Mat4 m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) m(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return m;
}

enum class Subsystem { Probe, Ancilla };

/// Reduced operator of the `keep` subsystem.
inline Mat2 partialTrace(const Mat4 &m, Subsystem keep) {
  Mat2 out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        if (keep == Subsystem::Probe)
          out(i, j) += m(2 * i + k, 2 * j + k);
        else
          out(i, j) += m(2 * k + i, 2 * k + j);
      }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral decomposition

/// Eigenvalues in descending order, eigenvectors[i] belongs to eigenvalues[i].
template <std::size_t N>
struct SpectralDecomp {
  std::array<double, N> eigenvalues{};
  std::array<Ket<N>, N> eigenvectors{};

  Matrix<N> reconstruct() const {
    Matrix<N> m;
    for (std::size_t i = 0; i < N; ++i) m += eigenvalues[i] * projector(eigenvectors[i]);
    return m;
  }
};

namespace detail {

inline void normalize(Ket<2> &v) {
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  v[0] /= n;
  v[1] /= n;
}

/// Closed-form eigen-decomposition of a 2x2 Hermitian [[a, b], [b*, d]].
/// Returns (lambda_hi, v_hi, lambda_lo, v_lo).
struct Eig2 {
  double hi, lo;
  Ket<2> vhi, vlo;
};

inline Eig2 eigHermitian2(double a, cplx b, double d) {
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  const double radius = std::hypot(half, std::abs(b));
  Eig2 e{mean + radius, mean - radius, {1.0, 0.0}, {0.0, 1.0}};
  if (radius == 0.0) return e;
  if (std::abs(b) <= 1e-300) {
    if (a < d) std::swap(e.vhi, e.vlo);
    return e;
  }
  Ket<2> v;
  if (half >= 0.0)
    v = {half + radius, std::conj(b)};
  else
    v = {b, radius - half};
  normalize(v);
  e.vhi = v;
  e.vlo = {-std::conj(v[1]), std::conj(v[0])};
  return e;
}

template <std::size_t N>
void sortDescending(SpectralDecomp<N> &s) {
  std::array<std::size_t, N> idx;
  for (std::size_t i = 0; i < N; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return s.eigenvalues[x] > s.eigenvalues[y];
  });
  SpectralDecomp<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out.eigenvalues[i] = s.eigenvalues[idx[i]];
    out.eigenvectors[i] = s.eigenvectors[idx[i]];
  }
  s = out;
}

/// Cyclic complex Jacobi; stops when the off-diagonal Frobenius norm drops
/// below `threshold` times max(1, ||A||).
template <std::size_t N>
SpectralDecomp<N> jacobiHermitian(Matrix<N> a, double threshold = 1e-13) {
  Matrix<N> v = Matrix<N>::identity();
  double scale = 1.0;
  for (const auto &x : a.entries()) scale = std::max(scale, std::abs(x));

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) < threshold * scale) break;

    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        Eig2 e = eigHermitian2(a(p, p).real(), a(p, q), a(q, q).real());
        // Assign the eigenvector closer to e_p to column p so the rotation
        // stays near the identity.
        Ket<2> cp = e.vhi, cq = e.vlo;
        if (std::abs(cp[0]) < std::abs(cq[0])) std::swap(cp, cq);
        const cplx php = std::abs(cp[0]) > 0 ? std::conj(cp[0]) / std::abs(cp[0]) : 1.0;
        const cplx phq = std::abs(cq[1]) > 0 ? std::conj(cq[1]) / std::abs(cq[1]) : 1.0;
        cp[0] *= php; cp[1] *= php;
        cq[0] *= phq; cq[1] *= phq;
        const cplx gpp = cp[0], gqp = cp[1], gpq = cq[0], gqq = cq[1];

        for (std::size_t k = 0; k < N; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }

  SpectralDecomp<N> s;
  for (std::size_t i = 0; i < N; ++i) {
    s.eigenvalues[i] = a(i, i).real();
    for (std::size_t k = 0; k < N; ++k) s.eigenvectors[i][k] = v(k, i);
  }
  sortDescending(s);
  return s;
}

} // namespace detail

/// Spectral decomposition of a Hermitian matrix. Closed form for 2x2,
/// cyclic Jacobi (threshold 1e-13) for 4x4. Degenerate spectra return an
/// arbitrary orthonormal basis of the eigenspace.
template <std::size_t N>
SpectralDecomp<N> spectralDecompose(const Matrix<N> &h) {
  if constexpr (N == 2) {
    auto e = detail::eigHermitian2(h(0, 0).real(), h(0, 1), h(1, 1).real());
    return {{e.hi, e.lo}, {e.vhi, e.vlo}};
  } else {
    return detail::jacobiHermitian(h);
  }
}

template <std::size_t N>
std::array<double, N> eigenvaluesHermitian(const Matrix<N> &h) {
  return spectralDecompose(h).eigenvalues;
}

/// exp(scale * h) for Hermitian h, via its eigenbasis.
template <std::size_t N>
Matrix<N> expmHermitianGenerator(const Matrix<N> &h, cplx scale) {
  const double tol = 1e-12 * std::max(1.0, h.maxAbs());
  if (!isHermitian(h, tol))
    throw InvalidArgument("expmHermitianGenerator: generator is not Hermitian");
  const auto s = spectralDecompose(h.hermitianPart());
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out += std::exp(scale * s.eigenvalues[i]) * projector(s.eigenvectors[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Density matrices

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNegativeEigTol = 1e-10;
inline constexpr double kDefaultTraceTol = 1e-2;

/// Validated density matrix. The trace check is loose by default because the
/// noisy ancilla and the analytic steady state carry a trace of
/// exp(-t/T1) < 1.
template <std::size_t N>
class DensityMatrix {
public:
  explicit DensityMatrix(const Matrix<N> &m, double traceTolerance = kDefaultTraceTol)
      : mat_(m), traceTol_(traceTolerance) {
    if (!isHermitian(m, kHermitianTol))
      throw InvalidArgument("DensityMatrix: matrix is not Hermitian");
    mat_ = m.hermitianPart();
    const auto ev = eigenvaluesHermitian(mat_);
    if (ev[N - 1] < -kNegativeEigTol)
      throw InvalidArgument("DensityMatrix: negative eigenvalue " + std::to_string(ev[N - 1]));
    if (std::abs(mat_.trace().real() - 1.0) > traceTol_)
      throw InvalidArgument("DensityMatrix: trace " + std::to_string(mat_.trace().real()) +
                            " outside tolerance");
  }

  static DensityMatrix pure(const Ket<N> &psi) { return DensityMatrix(projector(psi)); }
  static DensityMatrix maximallyMixed() { return DensityMatrix(Matrix<N>::identity() / double(N)); }

  const Matrix<N> &matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }
  double traceTolerance() const { return traceTol_; }
  double purity() const { return (mat_ * mat_).trace().real(); }
  const cplx &operator()(std::size_t r, std::size_t c) const { return mat_(r, c); }

private:
  Matrix<N> mat_;
  double traceTol_;
};

using Qubit = DensityMatrix<2>;
using QubitPair = DensityMatrix<4>;

inline QubitPair kron(const Qubit &a, const Qubit &b) {
  return QubitPair(kron(a.matrix(), b.matrix()),
                   std::max(a.traceTolerance(), b.traceTolerance()));
}

inline Qubit partialTrace(const QubitPair &rho, Subsystem keep) {
  return Qubit(partialTrace(rho.matrix(), keep), rho.traceTolerance());
}

template <std::size_t N>
SpectralDecomp<N> spectralDecompose(const DensityMatrix<N> &rho) {
  return spectralDecompose(rho.matrix());
}

/// -sum p log2 p over the eigenvalues, negatives within round-off clamped.
template <std::size_t N>
double vonNeumannEntropy(const Matrix<N> &rho) {
  double s = 0.0;
  for (double p : eigenvaluesHermitian(rho)) {
    if (p <= 0.0) continue;
    s -= p * std::log2(p);
  }
  return s;
}

template <std::size_t N>
double vonNeumannEntropy(const DensityMatrix<N> &rho) {
  return vonNeumannEntropy(rho.matrix());
}

/// (1/2) ||a - b||_1
template <std::size_t N>
double traceDistance(const Matrix<N> &a, const Matrix<N> &b) {
  double s = 0.0;
  for (double e : eigenvaluesHermitian((a - b).hermitianPart())) s += std::abs(e);
  return 0.5 * s;
}

template <std::size_t N>
double traceDistance(const DensityMatrix<N> &a, const DensityMatrix<N> &b) {
  return traceDistance(a.matrix(), b.matrix());
}

// ---------------------------------------------------------------------------
// Bloch representation

struct BlochVector {
  double rx = 0.0, ry = 0.0, rz = 0.0;

  double dot(const BlochVector &o) const { return rx * o.rx + ry * o.ry + rz * o.rz; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  friend BlochVector operator+(const BlochVector &a, const BlochVector &b) {
    return {a.rx + b.rx, a.ry + b.ry, a.rz + b.rz};
  }
  friend BlochVector operator-(const BlochVector &a, const BlochVector &b) {
    return {a.rx - b.rx, a.ry - b.ry, a.rz - b.rz};
  }
  friend BlochVector operator*(double s, const BlochVector &a) {
    return {s * a.rx, s * a.ry, s * a.rz};
  }
};

/// r_k = Tr(rho sigma_k)
inline BlochVector blochFromRho(const Mat2 &rho) {
  return {(rho * pauli::x()).trace().real(), (rho * pauli::y()).trace().real(),
          (rho * pauli::z()).trace().real()};
}

inline BlochVector blochFromRho(const Qubit &rho) { return blochFromRho(rho.matrix()); }

/// (I + r.sigma) / 2, requires |r| <= 1 + 1e-9.
inline Qubit rhoFromBloch(const BlochVector &r) {
  if (r.norm() > 1.0 + 1e-9) throw InvalidArgument("rhoFromBloch: |r| > 1");
  Mat2 m = 0.5 * (pauli::id() + r.rx * pauli::x() + r.ry * pauli::y() + r.rz * pauli::z());
  return Qubit(m);
}

/// Unit-trace qubit operator with the same Bloch vector: rho + (1 - Tr rho)/2 I.
inline Mat2 unitTraceCompletion(const Mat2 &rho) {
  return rho + (0.5 * (1.0 - rho.trace().real())) * pauli::id();
}

/// Derivative counterpart: removes the trace part of d rho.
inline Mat2 unitTraceCompletionDerivative(const Mat2 &drho) {
  return drho - (0.5 * drho.trace().real()) * pauli::id();
}

} // namespace qfic

#endif // QFIC_QMATH_HPP
