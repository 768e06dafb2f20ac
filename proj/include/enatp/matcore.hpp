#pragma once

// Exact-shape dense complex linear algebra for the two-qubit simulator:
// 2x2 / 4x4 complex matrices, real 3-vectors and 3x3 matrices, Kronecker
// products, partial transpose/trace, determinants, and the small eigen/SVD
// solvers everything else is built on.  All types are plain values and all
// operations are pure functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "enatp/errors.hpp"

namespace enatp {

using cx = std::complex<double>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// ---------------------------------------------------------------------------
// Vec3 / Mat3 (real)
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Mat3 {
  std::array<double, 9> e{};  // row-major

  double& operator()(std::size_t i, std::size_t j) { return e[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return e[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static Mat3 zero() { return {}; }
  static Mat3 diag(double a, double b, double c) {
    Mat3 m;
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
  }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.e[k] = e[k] + o.e[k];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.e[k] = e[k] - o.e[k];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.e[k] = e[k] * s;
    return r;
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
};

inline Mat3 operator*(double s, const Mat3& m) { return m * s; }

inline Mat3 transpose(const Mat3& m) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

/// Outer product a b^T.
inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

inline double frobenius(const Mat3& m) {
  double s = 0.0;
  for (double v : m.e) s += v * v;
  return std::sqrt(s);
}

inline double det3(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// ---------------------------------------------------------------------------
// Mat2 (complex 2x2)
// ---------------------------------------------------------------------------

struct Mat2 {
  std::array<cx, 4> e{};  // row-major

  cx& operator()(std::size_t i, std::size_t j) { return e[2 * i + j]; }
  cx operator()(std::size_t i, std::size_t j) const { return e[2 * i + j]; }

  static Mat2 identity() { return {{cx{1}, cx{0}, cx{0}, cx{1}}}; }
  static Mat2 zero() { return {}; }
  static Mat2 diag(cx a, cx b) { return {{a, cx{0}, cx{0}, b}}; }

  Mat2 operator+(const Mat2& o) const {
    Mat2 r;
    for (std::size_t k = 0; k < 4; ++k) r.e[k] = e[k] + o.e[k];
    return r;
  }
  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (std::size_t k = 0; k < 4; ++k) r.e[k] = e[k] - o.e[k];
    return r;
  }
  Mat2 operator*(cx s) const {
    Mat2 r;
    for (std::size_t k = 0; k < 4; ++k) r.e[k] = e[k] * s;
    return r;
  }
  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    r(0, 0) = (*this)(0, 0) * o(0, 0) + (*this)(0, 1) * o(1, 0);
    r(0, 1) = (*this)(0, 0) * o(0, 1) + (*this)(0, 1) * o(1, 1);
    r(1, 0) = (*this)(1, 0) * o(0, 0) + (*this)(1, 1) * o(1, 0);
    r(1, 1) = (*this)(1, 0) * o(0, 1) + (*this)(1, 1) * o(1, 1);
    return r;
  }
};

inline Mat2 operator*(cx s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * cx{s}; }

inline Mat2 adjoint(const Mat2& m) {
  Mat2 r;
  r(0, 0) = std::conj(m(0, 0));
  r(0, 1) = std::conj(m(1, 0));
  r(1, 0) = std::conj(m(0, 1));
  r(1, 1) = std::conj(m(1, 1));
  return r;
}

inline Mat2 transpose(const Mat2& m) {
  Mat2 r = m;
  std::swap(r(0, 1), r(1, 0));
  return r;
}

inline Mat2 conjugate(const Mat2& m) {
  Mat2 r;
  for (std::size_t k = 0; k < 4; ++k) r.e[k] = std::conj(m.e[k]);
  return r;
}

inline cx trace(const Mat2& m) { return m(0, 0) + m(1, 1); }

/// Standard 2x2 determinant.
inline cx det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline double frobenius(const Mat2& m) {
  double s = 0.0;
  for (const cx& v : m.e) s += std::norm(v);
  return std::sqrt(s);
}

inline Mat2 pauli_x() { return {{cx{0}, cx{1}, cx{1}, cx{0}}}; }
inline Mat2 pauli_y() { return {{cx{0}, cx{0, -1}, cx{0, 1}, cx{0}}}; }
inline Mat2 pauli_z() { return {{cx{1}, cx{0}, cx{0}, cx{-1}}}; }
inline Mat2 pauli(std::size_t i) { return i == 0 ? pauli_x() : (i == 1 ? pauli_y() : pauli_z()); }

/// n . sigma for a real 3-vector n.
inline Mat2 pauli_dot(const Vec3& n) {
  Mat2 r;
  r(0, 0) = cx{n.z};
  r(0, 1) = cx{n.x, -n.y};
  r(1, 0) = cx{n.x, n.y};
  r(1, 1) = cx{-n.z};
  return r;
}

/// Largest singular value of a 2x2 complex matrix (closed form via A^dag A).
inline double spectral_norm(const Mat2& a) {
  const Mat2 g = adjoint(a) * a;  // Hermitian PSD
  const double t = g(0, 0).real() + g(1, 1).real();
  const double d = std::max(0.0, std::real(det2(g)));
  const double disc = std::max(0.0, t * t / 4.0 - d);
  return std::sqrt(std::max(0.0, t / 2.0 + std::sqrt(disc)));
}

/// Eigenvalues of a Hermitian 2x2, descending.
inline std::array<double, 2> hermitian_eigenvalues(const Mat2& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const double m = (a + d) / 2.0;
  const double r = std::sqrt(std::max(0.0, (a - d) * (a - d) / 4.0 + std::norm(h(0, 1))));
  return {m + r, m - r};
}

// ---------------------------------------------------------------------------
// Mat4 (complex 4x4) and Vec4c
// ---------------------------------------------------------------------------

using Vec4c = std::array<cx, 4>;

struct Mat4 {
  std::array<cx, 16> e{};  // row-major

  cx& operator()(std::size_t i, std::size_t j) { return e[4 * i + j]; }
  cx operator()(std::size_t i, std::size_t j) const { return e[4 * i + j]; }

  static Mat4 identity() {
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = cx{1};
    return m;
  }
  static Mat4 zero() { return {}; }

  Mat4 operator+(const Mat4& o) const {
    Mat4 r;
    for (std::size_t k = 0; k < 16; ++k) r.e[k] = e[k] + o.e[k];
    return r;
  }
  Mat4 operator-(const Mat4& o) const {
    Mat4 r;
    for (std::size_t k = 0; k < 16; ++k) r.e[k] = e[k] - o.e[k];
    return r;
  }
  Mat4 operator*(cx s) const {
    Mat4 r;
    for (std::size_t k = 0; k < 16; ++k) r.e[k] = e[k] * s;
    return r;
  }
  Mat4 operator*(const Mat4& o) const {
    Mat4 r;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        cx s{};
        for (std::size_t k = 0; k < 4; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
};

inline Mat4 operator*(cx s, const Mat4& m) { return m * s; }
inline Mat4 operator*(double s, const Mat4& m) { return m * cx{s}; }

inline Mat4 adjoint(const Mat4& m) {
  Mat4 r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r(i, j) = std::conj(m(j, i));
  return r;
}

inline Mat4 transpose(const Mat4& m) {
  Mat4 r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r(i, j) = m(j, i);
  return r;
}

inline Mat4 conjugate(const Mat4& m) {
  Mat4 r;
  for (std::size_t k = 0; k < 16; ++k) r.e[k] = std::conj(m.e[k]);
  return r;
}

inline cx trace(const Mat4& m) { return m(0, 0) + m(1, 1) + m(2, 2) + m(3, 3); }

inline double frobenius(const Mat4& m) {
  double s = 0.0;
  for (const cx& v : m.e) s += std::norm(v);
  return std::sqrt(s);
}

inline double max_abs(const Mat4& m) {
  double s = 0.0;
  for (const cx& v : m.e) s = std::max(s, std::abs(v));
  return s;
}

inline Vec4c operator*(const Mat4& m, const Vec4c& v) {
  Vec4c r{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r[i] += m(i, j) * v[j];
  return r;
}

/// 4x4 determinant by Gaussian elimination with partial pivoting.
inline cx det4(const Mat4& m) {
  Mat4 a = m;
  cx det{1.0};
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) == 0.0) return cx{0.0};
    if (piv != col) {
      for (std::size_t j = 0; j < 4; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < 4; ++r) {
      const cx f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < 4; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Two-qubit structure maps.  Basis order is fixed everywhere as
// |00>, |01>, |10>, |11> with the first tensor factor the system qubit.
// ---------------------------------------------------------------------------

/// Kronecker product A (x) B; A acts on the system, B on the environment.
inline Mat4 tensor(const Mat2& a, const Mat2& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + j, 2 * k + l) = a(i, k) * b(j, l);
  return r;
}

/// Transpose on the second (environment) tensor factor.
inline Mat4 partial_transpose(const Mat4& rho) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + j, 2 * k + l) = rho(2 * i + l, 2 * k + j);
  return r;
}

/// Trace out the environment (second factor).
inline Mat2 partial_trace_env(const Mat4& rho) {
  Mat2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 2; ++k) r(i, k) = rho(2 * i + 0, 2 * k + 0) + rho(2 * i + 1, 2 * k + 1);
  return r;
}

/// Trace out the system (first factor).
inline Mat2 partial_trace_sys(const Mat4& rho) {
  Mat2 r;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t l = 0; l < 2; ++l) r(j, l) = rho(0 + j, 0 + l) + rho(2 + j, 2 + l);
  return r;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic complex Jacobi, 4x4)
// ---------------------------------------------------------------------------

struct HermitianEigen {
  std::array<double, 4> values{};  // descending
  Mat4 vectors;                    // unitary; column i pairs with values[i]
};

/// Full eigensystem of a Hermitian 4x4 matrix.  Off-Hermitian parts of the
/// input are symmetrized away first.
inline HermitianEigen hermitian_eigensystem(const Mat4& h_in) {
  Mat4 h;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) h(i, j) = (h_in(i, j) + std::conj(h_in(j, i))) / 2.0;
  Mat4 v = Mat4::identity();

  const double scale = std::max(frobenius(h), 1e-300);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = p + 1; q < 4; ++q) off += std::norm(h(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = p + 1; q < 4; ++q) {
        const cx hpq = h(p, q);
        const double r = std::abs(hpq);
        if (r <= 1e-300) continue;
        const cx phase = hpq / r;
        const double tau = (h(q, q).real() - h(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Columns: M <- M J with J(p,p)=c, J(q,p)=-s conj(phase), J(p,q)=s phase, J(q,q)=c.
        for (std::size_t k = 0; k < 4; ++k) {
          const cx hkp = h(k, p), hkq = h(k, q);
          h(k, p) = c * hkp - s * std::conj(phase) * hkq;
          h(k, q) = s * phase * hkp + c * hkq;
          const cx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v(k, q) = s * phase * vkp + c * vkq;
        }
        // Rows: M <- J^dag M.
        for (std::size_t k = 0; k < 4; ++k) {
          const cx hpk = h(p, k), hqk = h(q, k);
          h(p, k) = c * hpk - s * phase * hqk;
          h(q, k) = s * std::conj(phase) * hpk + c * hqk;
        }
      }
  }

  HermitianEigen out;
  std::array<std::size_t, 4> idx{0, 1, 2, 3};
  std::array<double, 4> d{h(0, 0).real(), h(1, 1).real(), h(2, 2).real(), h(3, 3).real()};
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  for (std::size_t i = 0; i < 4; ++i) {
    out.values[i] = d[idx[i]];
    for (std::size_t k = 0; k < 4; ++k) out.vectors(k, i) = v(k, idx[i]);
  }
  return out;
}

/// Eigenvalues only, descending.
inline std::array<double, 4> hermitian_eigenvalues(const Mat4& h) {
  return hermitian_eigensystem(h).values;
}

/// Hermitian PSD square root.  Eigenvalues below rel_cut * lambda_max are
/// treated as exact zeros so that numerically rank-deficient inputs keep an
/// exactly rank-deficient root.
inline Mat4 sqrt_psd(const Mat4& rho, double rel_cut = 1e-14) {
  const HermitianEigen es = hermitian_eigensystem(rho);
  const double lmax = std::max(es.values[0], 0.0);
  std::array<double, 4> s{};
  for (std::size_t i = 0; i < 4; ++i)
    s[i] = (es.values[i] > rel_cut * lmax) ? std::sqrt(es.values[i]) : 0.0;
  Mat4 r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      cx acc{};
      for (std::size_t k = 0; k < 4; ++k) acc += es.vectors(i, k) * s[k] * std::conj(es.vectors(j, k));
      r(i, j) = acc;
    }
  return r;
}

// ---------------------------------------------------------------------------
// Singular values of a complex 4x4 (one-sided Jacobi on columns)
// ---------------------------------------------------------------------------

/// All four singular values, descending.  One-sided Jacobi keeps small
/// singular values at full absolute accuracy, which the concurrence of
/// rank-deficient states depends on.
inline std::array<double, 4> singular_values(const Mat4& a_in) {
  std::array<std::array<cx, 4>, 4> col;  // col[j][i] = A(i,j)
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i) col[j][i] = a_in(i, j);

  auto cdot = [](const std::array<cx, 4>& x, const std::array<cx, 4>& y) {
    cx s{};
    for (std::size_t i = 0; i < 4; ++i) s += std::conj(x[i]) * y[i];
    return s;
  };

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = p + 1; q < 4; ++q) {
        const double app = cdot(col[p], col[p]).real();
        const double aqq = cdot(col[q], col[q]).real();
        const cx apq = cdot(col[p], col[q]);
        const double r = std::abs(apq);
        if (r <= 1e-15 * std::sqrt(app * aqq) || r <= 1e-300) continue;
        rotated = true;
        const cx phase = apq / r;
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < 4; ++i) {
          const cx xp = col[p][i], xq = col[q][i];
          col[p][i] = c * xp - s * std::conj(phase) * xq;
          col[q][i] = s * phase * xp + c * xq;
        }
      }
    if (!rotated) break;
  }

  std::array<double, 4> sv{};
  for (std::size_t j = 0; j < 4; ++j) sv[j] = std::sqrt(cdot(col[j], col[j]).real());
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// ---------------------------------------------------------------------------
// Real symmetric 3x3 eigensolver and 3x3 SVD
// ---------------------------------------------------------------------------

struct SymmetricEigen3 {
  std::array<double, 3> values{};  // descending
  Mat3 vectors;                    // orthogonal; column i pairs with values[i]
};

inline SymmetricEigen3 symmetric_eigensystem(const Mat3& s_in) {
  Mat3 a;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = (s_in(i, j) + s_in(j, i)) / 2.0;
  Mat3 v = Mat3::identity();
  const double scale = std::max(frobenius(a), 1e-300);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
    if (off <= 1e-15 * scale) break;
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < 3; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  SymmetricEigen3 out;
  std::array<std::size_t, 3> idx{0, 1, 2};
  std::array<double, 3> d{a(0, 0), a(1, 1), a(2, 2)};
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  for (std::size_t i = 0; i < 3; ++i) {
    out.values[i] = d[idx[i]];
    for (std::size_t k = 0; k < 3; ++k) out.vectors(k, i) = v(k, idx[i]);
  }
  return out;
}

struct Svd3 {
  Mat3 u;                          // orthogonal
  std::array<double, 3> sigma{};   // descending, nonnegative
  Mat3 v;                          // orthogonal; T = u diag(sigma) v^T
};

/// SVD of a real 3x3 matrix via the eigensystem of T^T T, with left vectors
/// rebuilt from T itself and completed orthonormally in the null space.
inline Svd3 svd3(const Mat3& t) {
  const SymmetricEigen3 es = symmetric_eigensystem(transpose(t) * t);
  Svd3 out;
  out.v = es.vectors;
  const double smax2 = std::max(es.values[0], 0.0);
  const double cutoff = std::sqrt(smax2) * 1e-13;

  std::array<Vec3, 3> u_cols;
  std::array<bool, 3> filled{false, false, false};
  for (std::size_t i = 0; i < 3; ++i) {
    out.sigma[i] = std::sqrt(std::max(es.values[i], 0.0));
    Vec3 qi{es.vectors(0, i), es.vectors(1, i), es.vectors(2, i)};
    Vec3 ti = t * qi;
    // Re-orthogonalize against earlier left vectors before normalizing.
    for (std::size_t j = 0; j < i; ++j)
      if (filled[j]) ti = ti - u_cols[j] * dot(u_cols[j], ti);
    const double n = norm(ti);
    if (out.sigma[i] > cutoff && n > 1e-300) {
      u_cols[i] = ti / n;
      filled[i] = true;
    }
  }
  // Complete any null-space columns.
  for (std::size_t i = 0; i < 3; ++i) {
    if (filled[i]) continue;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Vec3 c{axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0, axis == 2 ? 1.0 : 0.0};
      for (std::size_t j = 0; j < 3; ++j)
        if (filled[j]) c = c - u_cols[j] * dot(u_cols[j], c);
      const double n = norm(c);
      if (n > 0.5) {
        u_cols[i] = c / n;
        filled[i] = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) out.u(k, i) = u_cols[i][k];
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial and the nonnegative-spectrum eigenvalue solver
// ---------------------------------------------------------------------------

/// Coefficients c of det(lambda I - M) = lambda^4 + c[0] lambda^3 + c[1]
/// lambda^2 + c[2] lambda + c[3], by Faddeev-LeVerrier.
inline std::array<cx, 4> characteristic_polynomial(const Mat4& m) {
  std::array<cx, 4> c{};
  Mat4 b = m;
  c[0] = -trace(b);
  for (std::size_t k = 1; k < 4; ++k) {
    Mat4 shifted = b;
    for (std::size_t i = 0; i < 4; ++i) shifted(i, i) += c[k - 1];
    b = m * shifted;
    c[k] = -trace(b) / static_cast<double>(k + 1);
  }
  return c;
}

namespace detail {

/// Eigenvalues of the (complex upper-Hessenberg) companion matrix of a monic
/// polynomial, by single-shift QR with deflation.  coeffs are ordered from
/// the leading non-monic term down to the constant.
inline void companion_qr_roots(const std::vector<cx>& coeffs, std::vector<cx>& roots) {
  const std::size_t n = coeffs.size();
  if (n == 0) return;
  if (n == 1) {
    roots.push_back(-coeffs[0]);
    return;
  }
  if (n == 2) {
    // Stable complex quadratic: x^2 + b x + c.
    const cx b = coeffs[0], c = coeffs[1];
    const cx disc = std::sqrt(b * b - 4.0 * c);
    const cx bp = (std::real(std::conj(b) * disc) >= 0.0) ? (b + disc) : (b - disc);
    if (std::abs(bp) < 1e-300) {
      roots.push_back(cx{0});
      roots.push_back(cx{0});
      return;
    }
    const cx r1 = -bp / 2.0;
    roots.push_back(r1);
    roots.push_back(c / r1);
    return;
  }

  // Companion matrix, upper Hessenberg with unit subdiagonal.
  std::array<std::array<cx, 4>, 4> h{};
  for (std::size_t i = 0; i + 1 < n; ++i) h[i + 1][i] = cx{1.0};
  for (std::size_t i = 0; i < n; ++i) h[i][n - 1] = -coeffs[n - 1 - i];

  double scale = 0.0;
  for (const cx& c : coeffs) scale = std::max(scale, std::abs(c));
  scale = std::max(scale, 1.0);

  std::size_t hi = n - 1;
  int iter = 0;
  while (true) {
    // Deflate converged subdiagonals.
    while (hi > 0 &&
           std::abs(h[hi][hi - 1]) <= 1e-16 * (std::abs(h[hi - 1][hi - 1]) + std::abs(h[hi][hi]) + scale * 1e-3)) {
      roots.push_back(h[hi][hi]);
      --hi;
    }
    if (hi == 0) {
      roots.push_back(h[0][0]);
      break;
    }
    std::size_t lo = hi;
    while (lo > 0 && std::abs(h[lo][lo - 1]) >
                         1e-16 * (std::abs(h[lo - 1][lo - 1]) + std::abs(h[lo][lo]) + scale * 1e-3))
      --lo;

    if (++iter > 500) throw ConvergenceFailure("companion QR did not converge");

    // Wilkinson shift from the trailing 2x2 of the active block.
    const cx a = h[hi - 1][hi - 1], b = h[hi - 1][hi], c = h[hi][hi - 1], d = h[hi][hi];
    const cx tr2 = (a + d) / 2.0;
    const cx disc = std::sqrt(tr2 * tr2 - (a * d - b * c));
    cx mu = (std::abs(tr2 + disc - d) < std::abs(tr2 - disc - d)) ? tr2 + disc : tr2 - disc;
    if (iter % 17 == 0) mu += cx{0.5, 0.25} * std::abs(h[hi][hi - 1]);  // exceptional shift

    // Explicit QR step on the active block via Givens rotations.
    std::array<cx, 4> cg{}, sg{};
    for (std::size_t i = lo; i <= hi; ++i) h[i][i] -= mu;
    for (std::size_t i = lo; i < hi; ++i) {
      const cx f = h[i][i], g = h[i + 1][i];
      const double nn = std::sqrt(std::norm(f) + std::norm(g));
      if (nn < 1e-300) {
        cg[i] = cx{1.0};
        sg[i] = cx{0.0};
        continue;
      }
      cg[i] = std::conj(f) / nn;  // rotation [cg, sg; -conj(sg), conj(cg)] zeroes the subdiagonal
      sg[i] = std::conj(g) / nn;
      for (std::size_t j = i; j <= hi; ++j) {
        const cx x = h[i][j], y = h[i + 1][j];
        h[i][j] = cg[i] * x + sg[i] * y;
        h[i + 1][j] = -std::conj(sg[i]) * x + std::conj(cg[i]) * y;
      }
    }
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = lo; j <= hi; ++j) {
        const cx x = h[j][i], y = h[j][i + 1];
        h[j][i] = x * std::conj(cg[i]) + y * std::conj(sg[i]);
        h[j][i + 1] = -x * sg[i] + y * cg[i];
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) h[i][i] += mu;
  }
}

}  // namespace detail

/// Eigenvalues of a 4x4 matrix whose spectrum is (up to numerical noise) real
/// and nonnegative -- e.g. products of two PSD matrices.  The characteristic
/// quartic from Faddeev-LeVerrier is solved by companion-matrix QR iteration
/// with Newton polishing; near-zero trailing coefficients are deflated as
/// exact zero roots first.
///
/// Returns the four eigenvalues sorted descending.  Imaginary parts and
/// negative real parts of magnitude at most tol are clamped to zero; anything
/// larger raises NonRealSpectrum.
inline std::array<double, 4> eigenvalues_nonneg(const Mat4& zeta, double tol = 1e-12) {
  const std::array<cx, 4> cpoly = characteristic_polynomial(zeta);
  const double s = std::max(frobenius(zeta), 1e-300);

  std::vector<cx> coeffs{cpoly[0], cpoly[1], cpoly[2], cpoly[3]};
  std::vector<cx> roots;
  roots.reserve(4);

  // Deflate exact/near-exact zero roots: constant term below the noise floor
  // of the degree-d elementary symmetric function.
  while (!coeffs.empty()) {
    const double floor_d = 64.0 * kEps * std::pow(s, static_cast<double>(coeffs.size()));
    if (std::abs(coeffs.back()) > floor_d) break;
    roots.push_back(cx{0.0});
    coeffs.pop_back();
  }

  detail::companion_qr_roots(coeffs, roots);

  // Newton polish on the original quartic.
  auto eval = [&](cx x, cx& p, cx& dp) {
    p = (((x + cpoly[0]) * x + cpoly[1]) * x + cpoly[2]) * x + cpoly[3];
    dp = ((4.0 * x + 3.0 * cpoly[0]) * x + 2.0 * cpoly[1]) * x + cpoly[2];
  };
  for (cx& r : roots) {
    if (std::abs(r) == 0.0) continue;
    for (int it = 0; it < 3; ++it) {
      cx p, dp;
      eval(r, p, dp);
      if (std::abs(dp) < 1e-30 * s * s * s) break;
      const cx step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      r -= step;
    }
  }

  std::array<double, 4> out{};
  std::sort(roots.begin(), roots.end(), [](const cx& a, const cx& b) { return a.real() > b.real(); });
  for (std::size_t i = 0; i < 4; ++i) {
    const cx r = roots[i];
    if (std::abs(r.imag()) > tol)
      throw NonRealSpectrum("eigenvalue has imaginary part beyond tolerance");
    if (r.real() < -tol) throw NonRealSpectrum("eigenvalue has negative real part beyond tolerance");
    out[i] = std::max(0.0, r.real());
  }
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

}  // namespace enatp
