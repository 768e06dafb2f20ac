#include <catch2/catch.hpp>

#include "enatp/measurements.hpp"
#include "enatp/states.hpp"

using namespace enatp;

namespace {

Vec3 random_axis(Rng& rng) {
  Vec3 n{rng.normal(), rng.normal(), rng.normal()};
  while (norm(n) < 1e-6) n = Vec3{rng.normal(), rng.normal(), rng.normal()};
  return n / norm(n);
}

}  // namespace

TEST_CASE("special weak family", "[measurements]") {
  // eps = 0: both outcomes are I/sqrt(2).
  const TwoOutcomeMeasurement flat = special_weak(0.0, Vec3{0.0, 1.0, 0.0});
  const Mat2 expected = Mat2::identity() * (1.0 / std::sqrt(2.0));
  CHECK(frobenius(flat.plus - expected) < 1e-15);
  CHECK(frobenius(flat.minus - expected) < 1e-15);

  // eps = 1 along z: the projectors onto |0> and |1>.
  const TwoOutcomeMeasurement proj = special_weak(1.0, Vec3{0.0, 0.0, 1.0});
  CHECK(frobenius(proj.plus - Mat2::diag(cx{1.0}, cx{0.0})) < 1e-15);
  CHECK(frobenius(proj.minus - Mat2::diag(cx{0.0}, cx{1.0})) < 1e-15);

  // The example-1 operators: eps = 0.1 along x, det = sqrt(1 - eps^2)/2.
  const TwoOutcomeMeasurement ex1 = special_weak(0.1, Vec3{1.0, 0.0, 0.0});
  CHECK(ex1.completeness_defect() < 1e-15);
  CHECK(std::abs(det2(ex1.plus) - cx{std::sqrt(0.99) / 2.0}) < 1e-15);

  CHECK_THROWS_AS(special_weak(1.5, Vec3{0.0, 0.0, 1.0}), BadEpsilon);
  CHECK_THROWS_AS(special_weak(0.5, Vec3{0.0, 0.0, 2.0}), BadAxis);
}

TEST_CASE("special weak invariants", "[measurements]") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const double eps = rng.uniform() * 2.0 - 1.0;
    const Vec3 n = random_axis(rng);
    const TwoOutcomeMeasurement m = special_weak(eps, n);

    CHECK(m.completeness_defect() < 1e-10);
    // The outcomes commute.
    CHECK(frobenius(m.plus * m.minus - m.minus * m.plus) < 1e-12);
    // Minus is plus with the axis reversed.
    const TwoOutcomeMeasurement rev = special_weak(eps, -n);
    CHECK(frobenius(m.minus - rev.plus) < 1e-12);
    CHECK(frobenius(m.plus - rev.minus) < 1e-12);
  }
}

TEST_CASE("special weak rotation covariance", "[measurements]") {
  Rng rng(32);
  for (int t = 0; t < 40; ++t) {
    const double eps = rng.uniform() * 2.0 - 1.0;
    const Vec3 n = random_axis(rng);
    const Mat2 u = random_su2(rng);
    const Vec3 rn = bloch_rotation(u) * n;

    const TwoOutcomeMeasurement m = special_weak(eps, n);
    const TwoOutcomeMeasurement rotated = special_weak(eps, rn / norm(rn));
    CHECK(frobenius(u * m.plus * adjoint(u) - rotated.plus) < 1e-10);
    CHECK(frobenius(u * m.minus * adjoint(u) - rotated.minus) < 1e-10);
  }
}

TEST_CASE("asymptotically projective family", "[measurements]") {
  // A0^2 + A1^2 = I for the computational-basis projectors at any eps.
  for (double eps : {0.1, 0.3, 0.7, 0.9}) {
    const TwoOutcomeMeasurement m = asymptotically_projective(eps);
    CHECK(m.completeness_defect() < 1e-14);
    CHECK(std::abs(det2(m.plus) - cx{std::sqrt(eps * (1.0 - eps))}) < 1e-14);
    CHECK(std::abs(det2(m.minus) - cx{std::sqrt(eps * (1.0 - eps))}) < 1e-14);
  }

  // eps = 1/2 degenerates to I/sqrt(2) on both outcomes.
  const TwoOutcomeMeasurement half = asymptotically_projective(0.5);
  CHECK(frobenius(half.plus - Mat2::identity() * (1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(frobenius(half.minus - half.plus) < 1e-15);

  // det = sqrt(0.16) = 0.4 at eps = 0.2.
  CHECK(std::abs(det2(asymptotically_projective(0.2).plus) - cx{0.4}) < 1e-14);

  CHECK_THROWS_AS(asymptotically_projective(0.0), EpsOutOfRange);
  CHECK_THROWS_AS(asymptotically_projective(1.0), EpsOutOfRange);
  CHECK_THROWS_AS(asymptotically_projective(0.3, pauli_x(), pauli_z()), NotProjectors);
}

TEST_CASE("example 3 K family", "[measurements]") {
  const TwoOutcomeMeasurement flat = example3_K(0.0);
  CHECK(frobenius(flat.plus - Mat2::identity() * (1.0 / std::sqrt(2.0))) < 1e-15);

  Rng rng(33);
  for (int t = 0; t < 20; ++t) {
    const double eps = rng.uniform();
    CHECK(example3_K(eps).completeness_defect() < 1e-14);
  }

  // At eps = 1/sqrt(2) the determinants are +-1/(2 sqrt(2)): rank 2, not
  // projective.  (det K_pm = (1 -+ eps)(1 +- 2 eps)/2; the sanity anchor is
  // det K_pm(0) = 1/2.)
  const double root_half = 1.0 / std::sqrt(2.0);
  const TwoOutcomeMeasurement k = example3_K(root_half);
  CHECK(std::abs(det2(k.plus) - cx{1.0 / (2.0 * std::sqrt(2.0))}) < 1e-14);
  CHECK(std::abs(det2(k.minus) + cx{1.0 / (2.0 * std::sqrt(2.0))}) < 1e-14);
  CHECK(std::abs(det2(example3_K(0.0).plus) - cx{0.5}) < 1e-15);

  // The written weak form at eps = 0.01: strengths |eps| * ||I + sigma_x|| = 0.02.
  const auto weak = example3_K_weak_form(0.01);
  CHECK(weak[0].strength == Approx(0.02).margin(1e-12));
  CHECK(weak[1].strength == Approx(0.02).margin(1e-12));
  CHECK(weak[0].q == Approx(std::sqrt(0.99 / 2.0)).margin(1e-15));

  CHECK_THROWS_AS(example3_K(-0.1), EpsOutOfRange);
  CHECK_THROWS_AS(example3_K(1.1), EpsOutOfRange);
}

TEST_CASE("example 2 measurement", "[measurements]") {
  const TwoOutcomeMeasurement m = example2_M();
  CHECK(m.completeness_defect() < 1e-12);
  CHECK(std::abs(det2(m.plus) - cx{0.3}) < 1e-15);
  CHECK(std::abs(det2(m.minus) - cx{0.3}) < 1e-15);

  // M+ - M- = (2/sqrt(10)) sigma_x.
  CHECK(frobenius(m.plus - m.minus - (2.0 / std::sqrt(10.0)) * pauli_x()) < 1e-15);

  // The pair is the special weak measurement at eps = 0.8 along x.
  const TwoOutcomeMeasurement special = special_weak(0.8, Vec3{1.0, 0.0, 0.0});
  CHECK(frobenius(m.plus - special.plus) < 1e-12);
  CHECK(frobenius(m.minus - special.minus) < 1e-12);
}

TEST_CASE("weakness classification", "[measurements]") {
  // A gentle special weak measurement is weak.
  const WeaknessReport gentle = classify_weakness(special_weak(0.05, Vec3{0.0, 0.0, 1.0}));
  CHECK(gentle.is_weak);
  // Strength is sqrt((1+eps)/(1-eps)) - 1 for this family.
  CHECK(gentle.plus.strength == Approx(std::sqrt(1.05 / 0.95) - 1.0).margin(1e-12));

  // Projectors are rank 1: no weak form exists.
  CHECK_THROWS_AS(classify_weakness(special_weak(1.0, Vec3{0.0, 0.0, 1.0})), NonDecomposable);

  // The K pair at eps = 0.01 reports strengths within 5% of 0.02.
  const WeaknessReport k = classify_weakness(example3_K(0.01));
  CHECK(k.is_weak);
  CHECK(k.plus.strength == Approx(0.02).epsilon(0.05));
  CHECK(k.minus.strength == Approx(0.02).epsilon(0.05));

  // Example 2 at full strength is not weak.
  CHECK_FALSE(classify_weakness(example2_M()).is_weak);

  // Asymptotically projective operators change some inputs drastically.
  CHECK_FALSE(classify_weakness(asymptotically_projective(0.05)).is_weak);
}
