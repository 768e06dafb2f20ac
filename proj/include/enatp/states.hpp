#pragma once

// Two-qubit states: construction and validation, Bloch/correlation-matrix
// decomposition and reconstruction, local diagonalization of the correlation
// matrix, and seeded random-state generation.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "enatp/matcore.hpp"

namespace enatp {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Normalized two-qubit pure state a|00> + b|01> + c|10> + d|11>.
struct PureState2Q {
  Vec4c amp{};

  static PureState2Q from_amplitudes(const Vec4c& a, double tol = 1e-12) {
    double n2 = 0.0;
    for (const cx& v : a) n2 += std::norm(v);
    if (std::abs(n2 - 1.0) > tol) throw NotNormalized("pure state norm differs from 1");
    return PureState2Q{a};
  }

  /// Normalizes the given amplitudes (rejects the zero vector).
  static PureState2Q normalized(const Vec4c& a) {
    double n2 = 0.0;
    for (const cx& v : a) n2 += std::norm(v);
    if (n2 < 1e-300) throw NotNormalized("cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    Vec4c out = a;
    for (cx& v : out) v *= inv;
    return PureState2Q{out};
  }
};

/// Validated two-qubit density matrix: Hermitian, unit trace, PSD.
class DensityMatrix2Q {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPsdTol = 1e-10;

  static DensityMatrix2Q from_matrix(const Mat4& m) {
    double herm = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) herm = std::max(herm, std::abs(m(i, j) - std::conj(m(j, i))));
    if (herm > kHermitianTol) throw InvalidState("matrix is not Hermitian");
    if (std::abs(trace(m) - cx{1.0}) > kTraceTol) throw InvalidState("trace differs from 1");
    const auto ev = hermitian_eigenvalues(m);
    if (ev[3] < -kPsdTol) throw InvalidState("matrix has a negative eigenvalue");
    return DensityMatrix2Q(m);
  }

  /// For internal construction of states that are valid by construction
  /// (channel outputs, normalized branches).
  static DensityMatrix2Q unchecked(const Mat4& m) { return DensityMatrix2Q(m); }

  const Mat4& matrix() const { return m_; }
  cx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  explicit DensityMatrix2Q(const Mat4& m) : m_(m) {}
  Mat4 m_;
};

/// Pauli decomposition of a two-qubit state: local Bloch vectors and the
/// 3x3 correlation matrix T_ij = tr((sigma_i x sigma_j) rho).
struct BlochForm {
  Vec3 a;  // system Bloch vector
  Vec3 b;  // environment Bloch vector
  Mat3 t;  // correlation matrix
};

/// Pair of local unitaries (system, environment).
struct LocalFrame {
  Mat2 u = Mat2::identity();
  Mat2 v = Mat2::identity();
};

// ---------------------------------------------------------------------------
// Construction and Pauli decomposition
// ---------------------------------------------------------------------------

inline DensityMatrix2Q from_pure(const PureState2Q& psi) {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = psi.amp[i] * std::conj(psi.amp[j]);
  return DensityMatrix2Q::unchecked(m);
}

inline BlochForm bloch_decompose(const DensityMatrix2Q& rho, double imag_tol = 1e-10) {
  BlochForm f;
  const Mat4& m = rho.matrix();
  const Mat2 id = Mat2::identity();
  auto take_real = [&](cx v) {
    if (std::abs(v.imag()) > imag_tol) throw InvalidState("Pauli expectation has imaginary part");
    return v.real();
  };
  for (std::size_t i = 0; i < 3; ++i) {
    f.a[i] = take_real(trace(tensor(pauli(i), id) * m));
    f.b[i] = take_real(trace(tensor(id, pauli(i)) * m));
    for (std::size_t j = 0; j < 3; ++j) f.t(i, j) = take_real(trace(tensor(pauli(i), pauli(j)) * m));
  }
  return f;
}

/// Assemble rho = (I + a.sigma x I + I x b.sigma + sum_ij T_ij sigma_i x sigma_j) / 4
/// and validate the result.
inline DensityMatrix2Q bloch_reconstruct(const BlochForm& f) {
  const Mat2 id = Mat2::identity();
  Mat4 m = Mat4::identity();
  for (std::size_t i = 0; i < 3; ++i) {
    m = m + f.a[i] * tensor(pauli(i), id);
    m = m + f.b[i] * tensor(id, pauli(i));
    for (std::size_t j = 0; j < 3; ++j) m = m + f.t(i, j) * tensor(pauli(i), pauli(j));
  }
  m = m * 0.25;
  try {
    return DensityMatrix2Q::from_matrix(m);
  } catch (const InvalidState& e) {
    throw NonPhysical(std::string("Bloch form does not describe a state: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// SU(2) <-> SO(3)
// ---------------------------------------------------------------------------

/// Bloch rotation of a single-qubit unitary: the R with U (n.sigma) U^dag =
/// (R n).sigma, via R_ij = tr(sigma_i U sigma_j U^dag) / 2.
inline Mat3 bloch_rotation(const Mat2& u) {
  Mat3 r;
  const Mat2 ud = adjoint(u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = 0.5 * trace(pauli(i) * u * pauli(j) * ud).real();
  return r;
}

/// Lift a rotation R in SO(3) to the SU(2) element with bloch_rotation(U) = R.
/// The global phase is fixed so Re(U(0,0)) >= 0 (ties broken toward
/// Im(U(0,0)) >= 0, then Re(U(0,1)) >= 0).
inline Mat2 su2_from_rotation(const Mat3& r) {
  // Quaternion (w, x, y, z) via Shepperd's method.
  double w, x, y, z;
  const double tr = r(0, 0) + r(1, 1) + r(2, 2);
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  const double qn = std::sqrt(w * w + x * x + y * y + z * z);
  w /= qn;
  x /= qn;
  y /= qn;
  z /= qn;

  // U = w I - i (x sx + y sy + z sz).
  Mat2 u;
  u(0, 0) = cx{w, -z};
  u(0, 1) = cx{-y, -x};
  u(1, 0) = cx{y, -x};
  u(1, 1) = cx{w, z};

  const cx u00 = u(0, 0);
  bool flip = u00.real() < 0.0;
  if (u00.real() == 0.0) {
    if (u00.imag() != 0.0)
      flip = u00.imag() < 0.0;
    else
      flip = u(0, 1).real() < 0.0;
  }
  if (flip) u = u * cx{-1.0};
  return u;
}

// ---------------------------------------------------------------------------
// Correlation-matrix diagonalization
// ---------------------------------------------------------------------------

struct DiagonalizedState {
  LocalFrame frame;
  DensityMatrix2Q state;  // (U x V) rho (U^dag x V^dag), diagonal correlation matrix
};

/// Find local unitaries U, V such that (U x V) rho (U x V)^dag has a diagonal
/// correlation matrix.  Works through the real SVD of T with both orthogonal
/// factors forced into SO(3) (signs are absorbed into the diagonal), each then
/// lifted to SU(2).
inline DiagonalizedState diagonalize_correlation(const DensityMatrix2Q& rho) {
  const BlochForm f = bloch_decompose(rho);
  Svd3 svd = svd3(f.t);

  // Force det = +1, moving signs into the (now possibly negative) diagonal.
  if (det3(svd.u) < 0.0) {
    for (std::size_t k = 0; k < 3; ++k) svd.u(k, 2) = -svd.u(k, 2);
    svd.sigma[2] = -svd.sigma[2];
  }
  if (det3(svd.v) < 0.0) {
    for (std::size_t k = 0; k < 3; ++k) svd.v(k, 2) = -svd.v(k, 2);
    svd.sigma[2] = -svd.sigma[2];
  }

  // T = U_3 D V_3^T, so rotations P = U_3^T (system) and Q = V_3^T
  // (environment) take T to D.
  LocalFrame frame;
  frame.u = su2_from_rotation(transpose(svd.u));
  frame.v = su2_from_rotation(transpose(svd.v));

  const Mat4 big = tensor(frame.u, frame.v);
  const Mat4 rotated = big * rho.matrix() * adjoint(big);
  return DiagonalizedState{frame, DensityMatrix2Q::unchecked(rotated)};
}

// ---------------------------------------------------------------------------
// Seeded random states
// ---------------------------------------------------------------------------

/// Deterministic 64-bit generator (splitmix64) with a Box-Muller normal
/// sampler on top, so seeded draws are identical across platforms and
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  cx normal_cx() { return cx{normal(), normal()}; }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class StateKind { Pure, Mixed };

/// Seeded random state.  Pure states are Haar-style normalized Gaussian
/// 4-vectors; mixed states use the Ginibre construction G G^dag / tr(G G^dag),
/// which is full rank almost surely.
inline DensityMatrix2Q random_state(StateKind kind, std::uint64_t seed) {
  Rng rng(seed);
  if (kind == StateKind::Pure) {
    Vec4c a;
    for (cx& v : a) v = rng.normal_cx();
    return from_pure(PureState2Q::normalized(a));
  }
  Mat4 g;
  for (cx& v : g.e) v = rng.normal_cx();
  Mat4 m = g * adjoint(g);
  m = m * (1.0 / trace(m).real());
  return DensityMatrix2Q::unchecked(m);
}

/// Seeded Haar-ish random single-qubit unitary (random axis and angle).
inline Mat2 random_su2(Rng& rng) {
  Vec3 n{rng.normal(), rng.normal(), rng.normal()};
  const double nn = norm(n);
  if (nn < 1e-12) return Mat2::identity();
  n = n / nn;
  const double half = rng.uniform() * 2.0 * std::numbers::pi;
  Mat2 u = Mat2::identity() * cx{std::cos(half)};
  u = u - cx{0.0, std::sin(half)} * pauli_dot(n);
  return u;
}

// ---------------------------------------------------------------------------
// Named preset states
// ---------------------------------------------------------------------------

inline PureState2Q bell_phi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState2Q{{cx{r}, cx{0}, cx{0}, cx{r}}};
}

inline PureState2Q bell_phi_minus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState2Q{{cx{r}, cx{0}, cx{0}, cx{-r}}};
}

/// cos(theta/2)|00> + sin(theta/2)|11>.
inline PureState2Q schmidt_state(double theta) {
  return PureState2Q{{cx{std::cos(theta / 2.0)}, cx{0}, cx{0}, cx{std::sin(theta / 2.0)}}};
}

/// X-shaped state with 0.5 populations on |00>, |11> and real coherence a.
inline DensityMatrix2Q example1_state(double a) {
  Mat4 m;
  m(0, 0) = cx{0.5};
  m(3, 3) = cx{0.5};
  m(0, 3) = cx{a};
  m(3, 0) = cx{a};
  return DensityMatrix2Q::from_matrix(m);
}

/// (5 |Phi+><Phi+| + 3 |Phi-><Phi-|) / 8.
inline DensityMatrix2Q example2_initial_state() {
  const Mat4 p = from_pure(bell_phi_plus()).matrix();
  const Mat4 q = from_pure(bell_phi_minus()).matrix();
  return DensityMatrix2Q::unchecked(p * (5.0 / 8.0) + q * (3.0 / 8.0));
}

/// Werner state p |Phi+><Phi+| + (1-p) I/4.
inline DensityMatrix2Q werner_state(double p) {
  const Mat4 bell = from_pure(bell_phi_plus()).matrix();
  const Mat4 m = bell * p + Mat4::identity() * ((1.0 - p) / 4.0);
  return DensityMatrix2Q::from_matrix(m);
}

}  // namespace enatp
