#pragma once

// Constructors and validators for the two-outcome measurement families used
// throughout the library, plus completeness and weakness checks.

#include <cmath>
#include <string>

#include "enatp/matcore.hpp"

namespace enatp {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Parameters of the special weak measurement family
/// M_pm(eps, n) = (eps_plus I +- eps_minus n.sigma) / 2.
struct SpecialWeakParams {
  double epsilon = 0.0;
  Vec3 n_hat{0.0, 0.0, 1.0};

  static SpecialWeakParams make(double eps, const Vec3& n, double axis_tol = 1e-12) {
    if (!(eps >= -1.0 && eps <= 1.0)) throw BadEpsilon("epsilon must lie in [-1, 1]");
    const double nn = norm(n);
    if (std::abs(nn - 1.0) > axis_tol) throw BadAxis("axis must be a unit vector");
    return {eps, n};
  }

  double eps_plus() const {
    return std::sqrt((1.0 + epsilon) / 2.0) + std::sqrt((1.0 - epsilon) / 2.0);
  }
  double eps_minus() const {
    return std::sqrt((1.0 + epsilon) / 2.0) - std::sqrt((1.0 - epsilon) / 2.0);
  }
};

/// A complete two-outcome measurement {plus, minus} with
/// plus^dag plus + minus^dag minus = I.
struct TwoOutcomeMeasurement {
  Mat2 plus;
  Mat2 minus;
  std::string label;

  /// Max-abs deviation of plus^dag plus + minus^dag minus from the identity.
  double completeness_defect() const {
    const Mat2 s = adjoint(plus) * plus + adjoint(minus) * minus;
    double d = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        d = std::max(d, std::abs(s(i, j) - (i == j ? cx{1.0} : cx{0.0})));
    return d;
  }
};

/// One outcome operator written in the weak form Omega = q (I + e).
struct GeneralWeakOperator {
  double q = 1.0;
  Mat2 eps_op;      // the perturbation e
  double strength;  // spectral norm of eps_op

  static GeneralWeakOperator make(double q, const Mat2& eps_op) {
    return {q, eps_op, spectral_norm(eps_op)};
  }
};

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// M_pm(eps, n) = (eps_plus I +- eps_minus n.sigma) / 2.  The two outcomes
/// commute, and M_minus(eps, n) = M_plus(eps, -n).
inline TwoOutcomeMeasurement special_weak(const SpecialWeakParams& p) {
  const Mat2 ns = pauli_dot(p.n_hat);
  const Mat2 id = Mat2::identity();
  const double ep = p.eps_plus(), em = p.eps_minus();
  TwoOutcomeMeasurement m;
  m.plus = (ep * id + em * ns) * cx{0.5};
  m.minus = (ep * id - em * ns) * cx{0.5};
  m.label = "special(" + std::to_string(p.epsilon) + ")";
  return m;
}

inline TwoOutcomeMeasurement special_weak(double eps, const Vec3& n_hat) {
  return special_weak(SpecialWeakParams::make(eps, n_hat));
}

/// Asymptotically projective pair A0 = sqrt(eps) P- + sqrt(1-eps) P+,
/// A1 = sqrt(1-eps) P- + sqrt(eps) P+ for orthogonal projectors P+- summing
/// to the identity.  Both operators stay rank 2 for 0 < eps < 1 with
/// det = sqrt(eps (1-eps)).
inline TwoOutcomeMeasurement asymptotically_projective(double eps, const Mat2& p_plus,
                                                       const Mat2& p_minus) {
  if (!(eps > 0.0 && eps < 1.0)) throw EpsOutOfRange("eps must lie strictly in (0, 1)");
  auto is_projector = [](const Mat2& p) {
    return frobenius(p * p - p) < 1e-10 && frobenius(p - adjoint(p)) < 1e-10;
  };
  if (!is_projector(p_plus) || !is_projector(p_minus) ||
      frobenius(p_plus + p_minus - Mat2::identity()) > 1e-10)
    throw NotProjectors("P+ and P- must be orthogonal projectors summing to I");

  TwoOutcomeMeasurement m;
  m.plus = std::sqrt(eps) * p_minus + std::sqrt(1.0 - eps) * p_plus;   // A0
  m.minus = std::sqrt(1.0 - eps) * p_minus + std::sqrt(eps) * p_plus;  // A1
  m.label = "asymproj(" + std::to_string(eps) + ")";
  return m;
}

/// A0/A1 in the computational basis (P+ = |0><0|).
inline TwoOutcomeMeasurement asymptotically_projective(double eps) {
  return asymptotically_projective(eps, Mat2::diag(cx{1.0}, cx{0.0}), Mat2::diag(cx{0.0}, cx{1.0}));
}

/// K_pm = sqrt((1 -+ eps)/2) (I +- eps (I + sigma_x)).
inline TwoOutcomeMeasurement example3_K(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw EpsOutOfRange("eps must lie in [0, 1]");
  const Mat2 base = Mat2::identity() + pauli_x();
  TwoOutcomeMeasurement m;
  m.plus = std::sqrt((1.0 - eps) / 2.0) * (Mat2::identity() + eps * base);
  m.minus = std::sqrt((1.0 + eps) / 2.0) * (Mat2::identity() - eps * base);
  m.label = "example3K(" + std::to_string(eps) + ")";
  return m;
}

/// The written weak form of K_pm: q = sqrt((1 -+ eps)/2), e = +- eps (I + sigma_x).
inline std::array<GeneralWeakOperator, 2> example3_K_weak_form(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw EpsOutOfRange("eps must lie in [0, 1]");
  const Mat2 base = Mat2::identity() + pauli_x();
  return {GeneralWeakOperator::make(std::sqrt((1.0 - eps) / 2.0), base * cx{eps}),
          GeneralWeakOperator::make(std::sqrt((1.0 + eps) / 2.0), base * cx{-eps})};
}

/// M_pm = [[2, +-1], [+-1, 2]] / sqrt(10); equals the special weak pair at
/// eps = 0.8 along the x axis.
inline TwoOutcomeMeasurement example2_M() {
  const double r = 1.0 / std::sqrt(10.0);
  TwoOutcomeMeasurement m;
  m.plus = {{cx{2.0 * r}, cx{r}, cx{r}, cx{2.0 * r}}};
  m.minus = {{cx{2.0 * r}, cx{-r}, cx{-r}, cx{2.0 * r}}};
  m.label = "example2";
  return m;
}

// ---------------------------------------------------------------------------
// Weakness classification
// ---------------------------------------------------------------------------

struct OutcomeWeakness {
  double q = 0.0;
  double strength = 0.0;  // spectral norm of the extracted perturbation
};

struct WeaknessReport {
  bool is_weak = false;
  OutcomeWeakness plus;
  OutcomeWeakness minus;
  double threshold = 0.25;
};

namespace detail {

/// Extract Omega = q (I + e) with q the smallest eigenvalue modulus of Omega.
/// This normalization reproduces the written form of the K family (e.g.
/// e = eps (I + sigma_x)) and leaves e finite exactly when Omega is rank 2.
inline OutcomeWeakness decompose_weak(const Mat2& omega) {
  const cx tr = trace(omega);
  const cx dt = det2(omega);
  const cx disc = std::sqrt(tr * tr - 4.0 * dt);
  const cx l1 = (tr + disc) / 2.0;
  const cx l2 = (tr - disc) / 2.0;
  const double big = std::max(std::abs(l1), std::abs(l2));
  const double q = std::min(std::abs(l1), std::abs(l2));
  if (q <= 1e-12 * std::max(big, 1e-300)) throw NonDecomposable("outcome operator is singular (rank 1)");
  const Mat2 eps_op = omega * (cx{1.0} / q) - Mat2::identity();
  return {q, spectral_norm(eps_op)};
}

}  // namespace detail

/// Decompose both outcomes of a complete measurement as q (I + e) and report
/// the perturbation strengths.  The weak flag is advisory: the measurement is
/// labelled weak when every strength is below the threshold.
inline WeaknessReport classify_weakness(const TwoOutcomeMeasurement& m, double threshold = 0.25) {
  if (m.completeness_defect() > 1e-10) throw Error("measurement is not complete");
  WeaknessReport rep;
  rep.threshold = threshold;
  rep.plus = detail::decompose_weak(m.plus);
  rep.minus = detail::decompose_weak(m.minus);
  rep.is_weak = rep.plus.strength < threshold && rep.minus.strength < threshold;
  return rep;
}

}  // namespace enatp
