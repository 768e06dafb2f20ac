#pragma once

// Entanglement and correlation quantifiers: spin flip, Wootters concurrence,
// PPT separability check, and the product-state (correlation-annihilation)
// test.

#include <algorithm>
#include <cmath>

#include "enatp/matcore.hpp"
#include "enatp/states.hpp"

namespace enatp {

/// sigma_y x sigma_y.
inline const Mat4& spin_flip_operator() {
  static const Mat4 y = tensor(pauli_y(), pauli_y());
  return y;
}

/// Wootters spin flip (sy x sy) rho^* (sy x sy).  Hermitian, PSD and
/// trace-preserving whenever rho is a state.
inline Mat4 spin_flip(const DensityMatrix2Q& rho) {
  const Mat4& y = spin_flip_operator();
  return y * conjugate(rho.matrix()) * y;
}

struct ConcurrenceResult {
  double value = 0.0;                  // in [0, 1]
  std::array<double, 4> sqrt_eigs{};   // descending square roots of eig(rho rho~)
};

/// Wootters concurrence max(0, l1 - l2 - l3 - l4) over the descending square
/// roots l_i of the eigenvalues of rho * spin_flip(rho).
///
/// The square roots are computed as the singular values of
/// sqrt(rho) (sy x sy) conj(sqrt(rho)), which carries the same spectrum as
/// rho rho~ but stays accurate for the rank-deficient states produced by
/// projective boundaries and long measurement sequences, where the spectrum
/// degenerates to exact-zero clusters.  rank_cut is the relative eigenvalue
/// cutoff used when forming sqrt(rho).
inline ConcurrenceResult concurrence(const DensityMatrix2Q& rho, double rank_cut = 1e-14) {
  const Mat4 a = sqrt_psd(rho.matrix(), rank_cut);
  const Mat4 m = a * spin_flip_operator() * conjugate(a);
  ConcurrenceResult out;
  out.sqrt_eigs = singular_values(m);
  const double c =
      out.sqrt_eigs[0] - out.sqrt_eigs[1] - out.sqrt_eigs[2] - out.sqrt_eigs[3];
  out.value = std::clamp(c, 0.0, 1.0);
  return out;
}

struct SeparabilityVerdict {
  bool concurrence_zero = false;
  bool ppt = false;
  double min_pt_eigenvalue = 0.0;
  double product_gap = 0.0;  // || T - a b^T ||_F
};

/// PPT check plus the correlation-factorization gap.  For two-qubit states
/// PPT is equivalent to separability, so concurrence_zero and ppt agree up to
/// tolerance on valid inputs.
inline SeparabilityVerdict ppt_check(const DensityMatrix2Q& rho, double tol = 1e-9) {
  SeparabilityVerdict v;
  const auto pt_eigs = hermitian_eigenvalues(partial_transpose(rho.matrix()));
  v.min_pt_eigenvalue = pt_eigs[3];
  v.ppt = v.min_pt_eigenvalue >= -tol;
  v.concurrence_zero = concurrence(rho).value < tol;
  const BlochForm f = bloch_decompose(rho);
  v.product_gap = frobenius(f.t - outer(f.a, f.b));
  return v;
}

struct ProductStateResult {
  bool is_product = false;
  double gap = 0.0;  // max of the correlation gap and the factorization gap
};

/// True iff rho factorizes as rho_S x rho_E: requires both the correlation
/// gap ||T - a b^T||_F and the explicit factorization residual
/// ||rho - rho_S x rho_E||_F below tol.
inline ProductStateResult product_state_test(const DensityMatrix2Q& rho, double tol = 1e-9) {
  const BlochForm f = bloch_decompose(rho);
  const double corr_gap = frobenius(f.t - outer(f.a, f.b));
  const Mat2 rs = partial_trace_env(rho.matrix());
  const Mat2 re = partial_trace_sys(rho.matrix());
  const double factor_gap = frobenius(rho.matrix() - tensor(rs, re));
  ProductStateResult r;
  r.gap = std::max(corr_gap, factor_gap);
  r.is_product = corr_gap < tol && factor_gap < tol;
  return r;
}

}  // namespace enatp
