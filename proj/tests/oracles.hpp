#pragma once

// Independent oracles used only by the test suites.  These deliberately avoid
// the implementation paths they are checking: the binomial post-state is the
// explicit combinatorial sum (not the iterated channel), and the companion
// concurrence goes through the characteristic-quartic eigenvalue route (not
// the Hermitian SVD route used by concurrence()).

#include <array>
#include <vector>

#include "enatp/enatp.hpp"

namespace oracles {

using namespace enatp;

inline std::vector<double> binomial_row(int n) {
  std::vector<double> row{1.0};
  for (int k = 1; k <= n; ++k) row.push_back(row.back() * (n - k + 1) / k);
  return row;
}

inline Mat2 mat2_pow(const Mat2& a, int n) {
  Mat2 r = Mat2::identity();
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

/// Explicit mixed post-measurement state after n rounds of the commuting
/// two-outcome pair {a0, a1} on the system qubit:
///   sum_m C(n,m) (a0^m a1^(n-m) x I) |psi><psi| (a0^m a1^(n-m) x I)^dag.
inline Mat4 binomial_post_state(const PureState2Q& psi, const Mat2& a0, const Mat2& a1, int n) {
  const Mat4 rho = from_pure(psi).matrix();
  const std::vector<double> binom = binomial_row(n);
  Mat4 out = Mat4::zero();
  for (int m = 0; m <= n; ++m) {
    const Mat4 k = tensor(mat2_pow(a0, m) * mat2_pow(a1, n - m), Mat2::identity());
    out = out + binom[m] * (k * rho * adjoint(k));
  }
  return out;
}

/// Concurrence via the characteristic-quartic eigenvalues of rho * rho~.
inline double companion_concurrence(const DensityMatrix2Q& rho, double tol = 1e-8) {
  const Mat4 zeta = rho.matrix() * spin_flip(rho);
  const auto eigs = eigenvalues_nonneg(zeta, tol);
  const double c = std::sqrt(eigs[0]) - std::sqrt(eigs[1]) - std::sqrt(eigs[2]) - std::sqrt(eigs[3]);
  return std::max(0.0, c);
}

/// Deterministic random product state rho_S x rho_E.
inline DensityMatrix2Q random_product_state(Rng& rng) {
  auto qubit = [&] {
    Mat2 g;
    for (cx& v : g.e) v = rng.normal_cx();
    Mat2 m = g * adjoint(g);
    return m * (cx{1.0} / trace(m));
  };
  return DensityMatrix2Q::unchecked(tensor(qubit(), qubit()));
}

}  // namespace oracles
