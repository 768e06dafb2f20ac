#include <catch2/catch.hpp>

#include "enatp/entanglement.hpp"
#include "oracles.hpp"

using namespace enatp;

TEST_CASE("spin flip", "[entanglement]") {
  // Bell state is a fixed point.
  const DensityMatrix2Q bell = from_pure(bell_phi_plus());
  CHECK(frobenius(spin_flip(bell) - bell.matrix()) < 1e-15);

  // |00><00| flips to |11><11|.
  Mat4 ground, excited;
  ground(0, 0) = cx{1.0};
  excited(3, 3) = cx{1.0};
  CHECK(frobenius(spin_flip(DensityMatrix2Q::unchecked(ground)) - excited) == 0.0);

  // Maximally mixed is invariant; the flip preserves Hermiticity and trace.
  const Mat4 mixed = Mat4::identity() * 0.25;
  CHECK(frobenius(spin_flip(DensityMatrix2Q::unchecked(mixed)) - mixed) == 0.0);

  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
    const Mat4 flipped = spin_flip(rho);
    CHECK(frobenius(flipped - adjoint(flipped)) < 1e-14);
    CHECK(std::abs(trace(flipped) - cx{1.0}) < 1e-13);
    CHECK(hermitian_eigenvalues(flipped)[3] > -1e-12);
  }
}

TEST_CASE("concurrence reference values", "[entanglement]") {
  CHECK(concurrence(from_pure(bell_phi_plus())).value == Approx(1.0).margin(1e-14));
  CHECK(concurrence(example2_initial_state()).value == Approx(0.25).margin(1e-13));

  // Pure states: C = 2 |ad - bc|.
  Rng rng(42);
  for (int t = 0; t < 60; ++t) {
    Vec4c amp;
    for (cx& v : amp) v = rng.normal_cx();
    const PureState2Q psi = PureState2Q::normalized(amp);
    const double expected = 2.0 * std::abs(psi.amp[0] * psi.amp[3] - psi.amp[1] * psi.amp[2]);
    CHECK(concurrence(from_pure(psi)).value == Approx(expected).margin(1e-13));
  }

  // The result's value is recomputable from its own square roots.
  const ConcurrenceResult r = concurrence(random_state(StateKind::Mixed, 7));
  const double recombined = r.sqrt_eigs[0] - r.sqrt_eigs[1] - r.sqrt_eigs[2] - r.sqrt_eigs[3];
  CHECK(r.value == Approx(std::max(0.0, recombined)).margin(1e-12));
}

TEST_CASE("concurrence agrees with the companion-quartic route", "[entanglement]") {
  Rng rng(43);
  for (int t = 0; t < 100; ++t) {
    const DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
    CHECK(concurrence(rho).value == Approx(oracles::companion_concurrence(rho)).margin(1e-7));
  }
}

TEST_CASE("concurrence is invariant under local unitaries", "[entanglement]") {
  Rng rng(44);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix2Q rho =
        random_state(t % 2 ? StateKind::Pure : StateKind::Mixed, rng.next_u64());
    const Mat4 big = tensor(random_su2(rng), random_su2(rng));
    const DensityMatrix2Q rotated =
        DensityMatrix2Q::unchecked(big * rho.matrix() * adjoint(big));
    CHECK(std::abs(concurrence(rotated).value - concurrence(rho).value) < 1e-9);
  }
}

TEST_CASE("measurement scaling law", "[entanglement]") {
  // C(rho_R / tr rho_R) = |det R| C(rho) / tr(rho_R) for local invertible R.
  Rng rng(45);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
    Mat2 r;
    for (cx& v : r.e) v = rng.normal_cx();
    if (std::abs(det2(r)) < 1e-3) continue;
    const Mat4 k = tensor(r, Mat2::identity());
    const Mat4 un = k * rho.matrix() * adjoint(k);
    const double tr = trace(un).real();
    const double post = concurrence(DensityMatrix2Q::unchecked(un * (1.0 / tr))).value;
    const double predicted = std::abs(det2(r)) * concurrence(rho).value / tr;
    CHECK(std::abs(post - predicted) < 1e-9);
  }
}

TEST_CASE("ppt check", "[entanglement]") {
  const SeparabilityVerdict bell = ppt_check(from_pure(bell_phi_plus()));
  CHECK_FALSE(bell.ppt);
  CHECK_FALSE(bell.concurrence_zero);
  CHECK(bell.min_pt_eigenvalue == Approx(-0.5).margin(1e-12));
  CHECK(bell.product_gap == Approx(std::sqrt(3.0)).margin(1e-12));

  Rng rng(46);
  for (int t = 0; t < 20; ++t) {
    const SeparabilityVerdict v = ppt_check(oracles::random_product_state(rng));
    CHECK(v.ppt);
    CHECK(v.concurrence_zero);
    CHECK(v.product_gap < 1e-10);
  }
}

TEST_CASE("peres-horodecki coherence", "[entanglement]") {
  // Concurrence-zero and PPT verdicts agree for two qubits.
  Rng rng(47);
  for (int t = 0; t < 2000; ++t) {
    const SeparabilityVerdict v = ppt_check(random_state(StateKind::Mixed, rng.next_u64()), 1e-9);
    CHECK(v.concurrence_zero == v.ppt);
  }
}

TEST_CASE("product state test", "[entanglement]") {
  Rng rng(48);
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix2Q prod = oracles::random_product_state(rng);
    const ProductStateResult r = product_state_test(prod);
    CHECK(r.is_product);
    CHECK(r.gap < 1e-12);
    // Product implies separable.
    CHECK(concurrence(prod).value < 1e-9);
  }

  const ProductStateResult bell = product_state_test(from_pure(bell_phi_plus()));
  CHECK_FALSE(bell.is_product);
  CHECK(bell.gap == Approx(std::sqrt(3.0)).margin(1e-12));

  // T = a b^T forces the full factorization: assembling a Bloch form from the
  // marginals of any state yields its product of marginals.
  Rng rng3(50);
  for (int t = 0; t < 20; ++t) {
    const BlochForm f = bloch_decompose(random_state(StateKind::Mixed, rng3.next_u64()));
    BlochForm g;
    g.a = f.a;
    g.b = f.b;
    g.t = outer(f.a, f.b);
    const DensityMatrix2Q assembled = bloch_reconstruct(g);
    CHECK(product_state_test(assembled).is_product);
    CHECK(concurrence(assembled).value < 1e-9);
  }

  // A projective (eps = 1) outcome on any correlated input is a product state.
  Rng rng2(49);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix2Q rho = random_state(StateKind::Mixed, rng2.next_u64());
    const Mat2 proj = Mat2::diag(cx{1.0}, cx{0.0});
    const Mat4 k = tensor(proj, Mat2::identity());
    const Mat4 un = k * rho.matrix() * adjoint(k);
    const double tr = trace(un).real();
    if (tr < 1e-6) continue;
    CHECK(product_state_test(DensityMatrix2Q::unchecked(un * (1.0 / tr))).is_product);
  }
}
