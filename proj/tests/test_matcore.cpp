#include <catch2/catch.hpp>

#include "enatp/matcore.hpp"
#include "enatp/states.hpp"
#include "oracles.hpp"

using namespace enatp;

namespace {

Mat4 bell_plus_matrix() {
  Mat4 m;
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = cx{0.5};
  return m;
}

Mat2 random_mat2(Rng& rng) {
  Mat2 r;
  for (cx& v : r.e) v = rng.normal_cx();
  return r;
}

Mat4 random_mat4(Rng& rng) {
  Mat4 r;
  for (cx& v : r.e) v = rng.normal_cx();
  return r;
}

}  // namespace

TEST_CASE("tensor product basics", "[matcore]") {
  const Mat4 id4 = tensor(Mat2::identity(), Mat2::identity());
  CHECK(frobenius(id4 - Mat4::identity()) == 0.0);

  // sy x sy conjugation leaves the Bell state fixed.
  const Mat4 y = tensor(pauli_y(), pauli_y());
  const Mat4 bell = bell_plus_matrix();
  CHECK(frobenius(y * bell * y - bell) < 1e-15);

  // Kronecker determinant identity for a diagonal first factor.
  const Mat4 d = tensor(Mat2::diag(cx{2.0}, cx{3.0}), Mat2::identity());
  CHECK(std::abs(det4(d) - cx{36.0}) < 1e-12);
}

TEST_CASE("tensor product properties", "[matcore]") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Mat2 a = random_mat2(rng), b = random_mat2(rng);
    const Mat2 c = random_mat2(rng), d = random_mat2(rng);
    // Mixed product rule.
    CHECK(frobenius(tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)) < 1e-12);
    // Scalars move freely across the product.
    const cx s = rng.normal_cx();
    CHECK(frobenius(tensor(s * a, b) - s * tensor(a, b)) < 1e-13);
    CHECK(frobenius(tensor(a, s * b) - s * tensor(a, b)) < 1e-13);
    // det(A x B) = det(A)^2 det(B)^2 for 2x2 factors.
    const cx lhs = det4(tensor(a, b));
    const cx rhs = det2(a) * det2(a) * det2(b) * det2(b);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("partial transpose", "[matcore]") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const Mat4 m = random_mat4(rng);
    CHECK(frobenius(partial_transpose(partial_transpose(m)) - m) == 0.0);
  }

  // Product states stay PSD under partial transpose.
  for (int t = 0; t < 20; ++t) {
    const Mat4 prod = oracles::random_product_state(rng).matrix();
    const auto ev = hermitian_eigenvalues(partial_transpose(prod));
    CHECK(ev[3] >= -1e-12);
    // And the transpose lands on the environment factor only.
    const Mat2 rs = partial_trace_env(prod);
    const Mat2 re = partial_trace_sys(prod);
    CHECK(frobenius(partial_transpose(prod) - tensor(rs, transpose(re))) < 1e-12);
  }

  // Bell state: minimum PT eigenvalue is exactly -1/2.
  const auto ev = hermitian_eigenvalues(partial_transpose(bell_plus_matrix()));
  CHECK(ev[3] == Approx(-0.5).margin(1e-14));
}

TEST_CASE("determinants", "[matcore]") {
  CHECK(det2(Mat2::identity()) == cx{1.0});

  // sy R^T sy R = det(R) I.
  Rng rng(13);
  const Mat2 sy = pauli_y();
  for (int t = 0; t < 200; ++t) {
    const Mat2 r = random_mat2(rng);
    const Mat2 lhs = sy * transpose(r) * sy * r;
    CHECK(frobenius(lhs - det2(r) * Mat2::identity()) < 1e-12);
  }
}

TEST_CASE("characteristic polynomial", "[matcore]") {
  Mat4 d;
  d(0, 0) = cx{1.0};
  d(1, 1) = cx{2.0};
  d(2, 2) = cx{3.0};
  d(3, 3) = cx{4.0};
  const auto c = characteristic_polynomial(d);
  CHECK(std::abs(c[0] - cx{-10.0}) < 1e-12);
  CHECK(std::abs(c[1] - cx{35.0}) < 1e-12);
  CHECK(std::abs(c[2] - cx{-50.0}) < 1e-12);
  CHECK(std::abs(c[3] - cx{24.0}) < 1e-12);
}

TEST_CASE("eigenvalues_nonneg on reference spectra", "[matcore]") {
  // Zero matrix.
  const auto zero = eigenvalues_nonneg(Mat4::zero());
  for (double v : zero) CHECK(v == 0.0);

  // Bell state: rho rho~ = rho with spectrum (1, 0, 0, 0).
  const Mat4 bell = bell_plus_matrix();
  const auto bell_eigs = eigenvalues_nonneg(bell * bell);
  CHECK(bell_eigs[0] == Approx(1.0).margin(1e-12));
  CHECK(bell_eigs[1] == Approx(0.0).margin(1e-12));
  CHECK(bell_eigs[2] == Approx(0.0).margin(1e-12));
  CHECK(bell_eigs[3] == Approx(0.0).margin(1e-12));

  // Example-2 initial state: spectrum (25/64, 9/64, 0, 0), so the square-root
  // differences give concurrence 1/4.
  const DensityMatrix2Q ex2 = example2_initial_state();
  const Mat4 zeta = ex2.matrix() * ex2.matrix();  // spin flip fixes this state
  const auto eigs = eigenvalues_nonneg(zeta);
  CHECK(eigs[0] == Approx(25.0 / 64.0).margin(1e-13));
  CHECK(eigs[1] == Approx(9.0 / 64.0).margin(1e-13));
  CHECK(eigs[2] == Approx(0.0).margin(1e-13));
  CHECK(eigs[3] == Approx(0.0).margin(1e-13));
  const double conc = std::sqrt(eigs[0]) - std::sqrt(eigs[1]) - std::sqrt(eigs[2]) - std::sqrt(eigs[3]);
  CHECK(conc == Approx(0.25).margin(1e-12));
}

TEST_CASE("eigenvalues_nonneg sums to the trace", "[matcore]") {
  Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    // zeta built the way the concurrence uses it: rho times its spin flip.
    const Mat4 g = random_mat4(rng);
    Mat4 rho = g * adjoint(g);
    rho = rho * (1.0 / trace(rho).real());
    const Mat4 y = tensor(pauli_y(), pauli_y());
    const Mat4 zeta = rho * (y * conjugate(rho) * y);
    const auto eigs = eigenvalues_nonneg(zeta, 1e-9);
    const double sum = eigs[0] + eigs[1] + eigs[2] + eigs[3];
    CHECK(sum == Approx(trace(zeta).real()).margin(1e-10));
  }
}

TEST_CASE("eigenvalues_nonneg rejects complex spectra", "[matcore]") {
  Mat4 m;
  m(0, 1) = cx{1.0};
  m(1, 0) = cx{-1.0};  // eigenvalues +-i on this block
  CHECK_THROWS_AS(eigenvalues_nonneg(m), NonRealSpectrum);

  Mat4 neg;
  neg(0, 0) = cx{-1.0};
  neg(1, 1) = cx{1.0};
  CHECK_THROWS_AS(eigenvalues_nonneg(neg), NonRealSpectrum);
}

TEST_CASE("hermitian eigensystem", "[matcore]") {
  Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    const Mat4 g = random_mat4(rng);
    const Mat4 h = g + adjoint(g);
    const HermitianEigen es = hermitian_eigensystem(h);

    CHECK(es.values[0] >= es.values[1]);
    CHECK(es.values[1] >= es.values[2]);
    CHECK(es.values[2] >= es.values[3]);

    // Unitary eigenvectors reproducing H.
    CHECK(frobenius(adjoint(es.vectors) * es.vectors - Mat4::identity()) < 1e-13);
    Mat4 lam;
    for (std::size_t i = 0; i < 4; ++i) lam(i, i) = cx{es.values[i]};
    CHECK(frobenius(es.vectors * lam * adjoint(es.vectors) - h) < 1e-12 * std::max(1.0, frobenius(h)));
  }
}

TEST_CASE("psd square root", "[matcore]") {
  Rng rng(16);
  for (int t = 0; t < 30; ++t) {
    const Mat4 g = random_mat4(rng);
    Mat4 rho = g * adjoint(g);
    rho = rho * (1.0 / trace(rho).real());
    const Mat4 a = sqrt_psd(rho);
    CHECK(frobenius(a * a - rho) < 1e-13);
    CHECK(frobenius(a - adjoint(a)) < 1e-13);
  }
  // Rank-deficient input keeps an exactly rank-deficient root.
  Mat4 proj;
  proj(0, 0) = cx{1.0};
  const Mat4 a = sqrt_psd(proj);
  CHECK(frobenius(a - proj) < 1e-15);
}

TEST_CASE("singular values", "[matcore]") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Mat4 m = random_mat4(rng);
    const auto sv = singular_values(m);
    const auto ev = hermitian_eigenvalues(adjoint(m) * m);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(sv[i] * sv[i] == Approx(std::max(0.0, ev[i])).margin(1e-10));
  }
  Mat4 d;
  d(0, 0) = cx{3.0};
  d(1, 1) = cx{0.0, -2.0};  // modulus 2
  d(2, 2) = cx{1.0};
  const auto sv = singular_values(d);
  CHECK(sv[0] == Approx(3.0).margin(1e-14));
  CHECK(sv[1] == Approx(2.0).margin(1e-14));
  CHECK(sv[2] == Approx(1.0).margin(1e-14));
  CHECK(sv[3] == Approx(0.0).margin(1e-14));
}

TEST_CASE("2x2 helpers", "[matcore]") {
  CHECK(spectral_norm(pauli_x()) == Approx(1.0).margin(1e-14));
  CHECK(spectral_norm(Mat2::identity() + pauli_x()) == Approx(2.0).margin(1e-13));
  const auto ev = hermitian_eigenvalues(pauli_z());
  CHECK(ev[0] == Approx(1.0).margin(1e-14));
  CHECK(ev[1] == Approx(-1.0).margin(1e-14));
}

TEST_CASE("real 3x3 eigensystem and svd", "[matcore]") {
  Rng rng(18);
  for (int t = 0; t < 50; ++t) {
    Mat3 m;
    for (double& v : m.e) v = rng.normal();

    const Svd3 svd = svd3(m);
    CHECK(frobenius(transpose(svd.u) * svd.u - Mat3::identity()) < 1e-13);
    CHECK(frobenius(transpose(svd.v) * svd.v - Mat3::identity()) < 1e-13);
    const Mat3 recon = svd.u * Mat3::diag(svd.sigma[0], svd.sigma[1], svd.sigma[2]) * transpose(svd.v);
    CHECK(frobenius(recon - m) < 1e-12);
    CHECK(svd.sigma[0] >= svd.sigma[1]);
    CHECK(svd.sigma[1] >= svd.sigma[2]);
    CHECK(svd.sigma[2] >= 0.0);
  }

  // Rank-1 and zero corner cases.
  const Vec3 a{1.0, 2.0, -1.0}, b{0.5, 0.0, 2.0};
  const Svd3 svd = svd3(outer(a, b));
  const Mat3 recon = svd.u * Mat3::diag(svd.sigma[0], svd.sigma[1], svd.sigma[2]) * transpose(svd.v);
  CHECK(frobenius(recon - outer(a, b)) < 1e-12);
  CHECK(svd.sigma[1] < 1e-12);

  const Svd3 zero = svd3(Mat3::zero());
  CHECK(zero.sigma[0] == 0.0);
  CHECK(frobenius(transpose(zero.u) * zero.u - Mat3::identity()) < 1e-13);
}
