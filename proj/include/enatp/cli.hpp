#pragma once

// Command implementations behind the CLI front end.  Exit code contract:
// 0 success, 1 usage/config/io error, 2 numerical-invariant violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "enatp/experiment.hpp"
#include "enatp/sequences.hpp"

namespace enatp {

/// Concurrence-zero tolerance: ENATP_TOL when set, else 1e-9.
inline double default_concurrence_tol() {
  if (const char* env = std::getenv("ENATP_TOL")) {
    try {
      const double v = std::stod(env);
      if (v > 0.0) return v;
    } catch (...) {
    }
    std::cerr << "warning: ignoring unparseable ENATP_TOL\n";
  }
  return 1e-9;
}

namespace cli_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct CheckList {
  std::ostream& out;
  bool all_pass = true;

  /// One pass/fail line per invariant, with the worst margin observed.
  void check(const std::string& name, bool ok, double worst) {
    out << (ok ? "PASS " : "FAIL ") << name << "  worst=" << fmt(worst) << "\n";
    all_pass = all_pass && ok;
  }
};

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

inline int cmd_run(const std::string& config_path, const std::string& out_path,
                   std::ostream& diag = std::cerr) {
  try {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();

    ExperimentConfig cfg = parse_experiment_config(buf.str());
    if (!cfg.tol_concurrence_zero) cfg.tol_concurrence_zero = default_concurrence_tol();
    const std::vector<ResultRecord> rows = run_experiment(cfg);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open output file '" + out_path + "'");
    out << to_csv(rows);
    if (!out) throw IoError("failed writing '" + out_path + "'");
    return 0;
  } catch (const ConfigParse& e) {
    diag << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    diag << "io error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantViolation& e) {
    diag << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    diag << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

inline int cmd_sweep(const SweepSpec& spec_in, const std::string& out_path,
                     std::ostream& diag = std::cerr) {
  try {
    SweepSpec spec = spec_in;
    spec.tol_concurrence_zero = default_concurrence_tol();
    const std::vector<ResultRecord> rows = run_sweep(spec);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open output file '" + out_path + "'");
    out << to_csv(rows);
    if (!out) throw IoError("failed writing '" + out_path + "'");
    return 0;
  } catch (const BadRange& e) {
    diag << "range error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigParse& e) {
    diag << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    diag << "io error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantViolation& e) {
    diag << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    diag << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

namespace cli_detail {

inline void suite_theorem1(std::uint64_t seed, int trials, CheckList& c) {
  // Determinant identity sy R^T sy R = det(R) I for random operators.
  {
    Rng rng(seed ^ 0x7431u);
    double worst = 0.0;
    const Mat2 sy = pauli_y();
    for (int t = 0; t < 10000; ++t) {
      Mat2 r;
      for (cx& v : r.e) v = rng.normal_cx();
      const Mat2 lhs = sy * transpose(r) * sy * r - det2(r) * Mat2::identity();
      worst = std::max(worst, frobenius(lhs));
    }
    c.check("theorem1/determinant-identity", worst < 1e-12, worst);
  }
  // Ratio law and strict positivity over random invertible sequences.
  {
    const Theorem1Report rep = verify_theorem1(seed, trials, 4);
    c.check("theorem1/ratio-law", rep.max_ratio_error < 1e-8, rep.max_ratio_error);
    c.check("theorem1/branches-entangled", rep.all_entangled, rep.min_branch_concurrence);
  }
  // Composition: system-only rounds followed by environment-only rounds.
  {
    Rng rng(seed ^ 0x90f2u);
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < std::max(1, trials / 4); ++t) {
      DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
      double cval = concurrence(rho).value;
      while (cval < 0.05) {
        rho = random_state(StateKind::Mixed, rng.next_u64());
        cval = concurrence(rho).value;
      }
      for (int r = 0; r < 4; ++r) {
        const bool system_side = r < 2;
        const Mat2 op = detail::random_invertible(rng);
        const Mat2 id = Mat2::identity();
        const auto [p, next] = system_side ? apply_outcome(rho, op, id) : apply_outcome(rho, id, op);
        const double predicted = std::abs(det2(op)) * cval / p;
        const double actual = concurrence(next).value;
        worst = std::max(worst, std::abs(actual - predicted));
        ok = ok && actual > 0.0;
        rho = next;
        cval = actual;
      }
    }
    c.check("theorem1/composition-ratio-law", ok && worst < 1e-8, worst);
  }
}

inline void suite_theorem2(std::uint64_t seed, int trials, CheckList& c) {
  Rng rng(seed ^ 0x51c3u);
  auto random_axis = [&] {
    Vec3 n{rng.normal(), rng.normal(), rng.normal()};
    while (norm(n) < 1e-6) n = Vec3{rng.normal(), rng.normal(), rng.normal()};
    return n / norm(n);
  };
  auto random_correlated = [&] {
    for (;;) {
      DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
      if (product_state_test(rho, 1e-3).gap > 1e-3) return rho;
    }
  };

  // Forward direction: eps = +-1 outcomes are product states.
  {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const DensityMatrix2Q rho = random_correlated();
      const Vec3 n = random_axis();
      for (double eps : {1.0, -1.0}) {
        const TwoOutcomeMeasurement m = special_weak(eps, n);
        for (const Mat2& op : {m.plus, m.minus}) {
          const Mat4 k = tensor(op, Mat2::identity());
          const Mat4 un = k * rho.matrix() * adjoint(k);
          const double p = trace(un).real();
          if (p < 1e-6) continue;  // outcome essentially impossible; skip
          const auto post = DensityMatrix2Q::unchecked(un * (1.0 / p));
          const ProductStateResult res = product_state_test(post, 1e-9);
          worst = std::max(worst, res.gap);
        }
      }
    }
    c.check("theorem2/forward-product-at-unit-eps", worst < 1e-9, worst);
  }
  // Converse: |eps| < 1 leaves every outcome correlated.
  {
    double worst_min = 1.0;
    for (double eps : {0.999, -0.999, 0.9, -0.9, 0.5, -0.5, 0.1, -0.1}) {
      for (int t = 0; t < std::max(1, trials / 8); ++t) {
        const DensityMatrix2Q rho = random_correlated();
        const CnatpReport rep =
            cnatp_certificate(rho, SpecialWeakParams::make(eps, random_axis()));
        worst_min = std::min({worst_min, rep.gap_plus, rep.gap_minus});
      }
    }
    c.check("theorem2/converse-gap-positive", worst_min > 1e-10, worst_min);
  }
  // Closed-form Bloch update against full conjugation plus decomposition.
  {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const DensityMatrix2Q rho = random_state(StateKind::Mixed, rng.next_u64());
      const DiagonalizedState diag = diagonalize_correlation(rho);
      const BlochForm f = bloch_decompose(diag.state);
      const Vec3 n = random_axis();
      const double eps = (rng.uniform() * 2.0 - 1.0) * 0.98;
      const SpecialWeakParams p = SpecialWeakParams::make(eps, n);
      if (1.0 + eps * dot(n, f.a) < 1e-3) continue;
      const UpdateTriple u = bloch_update_Mplus(f, p);
      const TwoOutcomeMeasurement m = special_weak(p);
      const auto [prob, post] = apply_outcome(diag.state, m.plus, Mat2::identity());
      const BlochForm g = bloch_decompose(post);
      worst = std::max({worst, norm(u.a_prime - g.a), norm(u.b_prime - g.b),
                        frobenius(u.t_prime - g.t), std::abs(u.eta - 2.0 * prob)});
    }
    c.check("theorem2/bloch-update-oracle", worst < 1e-10, worst);
  }
}

inline void suite_lemma2(std::uint64_t seed, int trials, CheckList& c) {
  Rng rng(seed ^ 0xabc1u);
  double worst = 0.0;
  for (int t = 0; t < std::max(1, trials / 10); ++t) {
    const DensityMatrix2Q psi =
        t == 0 ? from_pure(bell_phi_plus()) : random_state(StateKind::Pure, rng.next_u64());
    const double c0 = concurrence(psi).value;
    for (int e = 0; e <= 9; ++e) {
      const double eps = e / 10.0;
      const TwoOutcomeMeasurement m = special_weak(eps, Vec3{0.0, 0.0, 1.0});
      DensityMatrix2Q state = psi;
      for (int n = 1; n <= 10; ++n) {
        state = run_unknown(state, {{m, Target::System, 1}});
        const double sim = concurrence(state).value;
        worst = std::max(worst, std::abs(sim - closed_form_concurrence(c0, eps, n)));
      }
    }
  }
  c.check("lemma2/decay-law", worst < 1e-9, worst);

  // eps = 1 is the projective boundary: the assigned state disentangles in
  // one round.
  double worst_proj = 0.0;
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix2Q psi = random_state(StateKind::Pure, rng.next_u64());
    const TwoOutcomeMeasurement m = special_weak(1.0, Vec3{0.0, 0.0, 1.0});
    const DensityMatrix2Q state = run_unknown(psi, {{m, Target::System, 1}});
    worst_proj = std::max(worst_proj, concurrence(state).value);
  }
  c.check("lemma2/projective-boundary", worst_proj < 1e-9, worst_proj);
}

inline void suite_corollary3(std::uint64_t seed, int trials, CheckList& c) {
  Rng rng(seed ^ 0x33e9u);
  auto random_axis = [&] {
    Vec3 n{rng.normal(), rng.normal(), rng.normal()};
    while (norm(n) < 1e-6) n = Vec3{rng.normal(), rng.normal(), rng.normal()};
    return n / norm(n);
  };

  // Two-sided closed form.  The Schmidt-form reduction behind it requires
  // each qubit's measurement axis to match that qubit's Schmidt axis, so the
  // covered family is schmidt(theta) with z-axis measurements, together with
  // every locally rotated copy (state and axes rotated by the same U x V).
  double worst = 0.0;
  for (int t = 0; t < std::max(1, trials / 10); ++t) {
    const double theta = 0.1 + rng.uniform() * (std::numbers::pi - 0.2);
    const double e1 = rng.uniform() * 0.9;
    const double e2 = rng.uniform() * 0.9;
    const Mat2 u = random_su2(rng), v = random_su2(rng);
    const Vec3 n1 = bloch_rotation(u) * Vec3{0.0, 0.0, 1.0};
    const Vec3 n2 = bloch_rotation(v) * Vec3{0.0, 0.0, 1.0};
    const Mat4 big = tensor(u, v);
    const DensityMatrix2Q psi = DensityMatrix2Q::unchecked(
        big * from_pure(schmidt_state(theta)).matrix() * adjoint(big));
    const double c0 = concurrence(psi).value;
    const TwoOutcomeMeasurement m1 = special_weak(e1, n1 / norm(n1));
    const TwoOutcomeMeasurement m2 = special_weak(e2, n2 / norm(n2));
    for (int n = 0; n <= 4; ++n) {
      for (int y = 0; y <= 4; ++y) {
        Schedule schedule;
        if (n > 0) schedule.push_back({m1, Target::System, n});
        if (y > 0) schedule.push_back({m2, Target::Environment, y});
        const double sim = concurrence(run_unknown(psi, schedule)).value;
        worst = std::max(worst, std::abs(sim - closed_form_concurrence(c0, e1, n, e2, y)));
      }
    }
  }
  c.check("corollary3/schmidt-aligned-decay-law", worst < 1e-9, worst);

  // For axes that do not match the Schmidt basis the assigned state can
  // disentangle, but every recorded branch must stay entangled: all the
  // outcome operators are rank 2.
  double min_branch = 1.0;
  for (int t = 0; t < std::max(1, trials / 20); ++t) {
    DensityMatrix2Q psi = random_state(StateKind::Pure, rng.next_u64());
    while (concurrence(psi).value < 0.1) psi = random_state(StateKind::Pure, rng.next_u64());
    const double e1 = rng.uniform() * 0.9;
    const double e2 = rng.uniform() * 0.9;
    Schedule schedule;
    schedule.push_back({special_weak(e1, random_axis()), Target::System, 3});
    schedule.push_back({special_weak(e2, random_axis()), Target::Environment, 3});
    const BranchEnsemble branches = run_known(psi, schedule);
    for (const Branch& b : branches.branches)
      min_branch = std::min(min_branch, concurrence(b.state).value);
  }
  c.check("corollary3/generic-axes-branches-entangled", min_branch > 1e-9, min_branch);
}

inline void suite_examples(std::uint64_t seed, CheckList& c) {
  const double tol = default_concurrence_tol();
  // Example 1.
  {
    const ExampleReport rep = run_example(ExampleId::One, {}, tol);
    c.check("examples/1-initial-concurrence", std::abs(rep.initial_concurrence - 0.004) < 1e-12,
            std::abs(rep.initial_concurrence - 0.004));
    const bool separable = rep.final_concurrence < tol && rep.final_verdict.ppt;
    c.check("examples/1-assigned-state-separable", separable, rep.final_concurrence);
    c.check("examples/1-branches-entangled", rep.min_branch_concurrence > 1e-8,
            rep.min_branch_concurrence);
  }
  // Example 2.
  {
    const ExampleReport rep = run_example(ExampleId::Two, {}, tol);
    c.check("examples/2-initial-concurrence", std::abs(rep.initial_concurrence - 0.25) < 1e-12,
            std::abs(rep.initial_concurrence - 0.25));
    const bool separable = rep.final_concurrence < tol && rep.final_verdict.ppt;
    c.check("examples/2-assigned-state-separable", separable, rep.final_concurrence);
    c.check("examples/2-branches-entangled", rep.min_branch_concurrence > 1e-8,
            rep.min_branch_concurrence);
  }
  // Example 3 and the closed-form final state.
  {
    const ExampleReport rep = run_example(ExampleId::Three, {}, tol);
    c.check("examples/3-closed-form-state", rep.matrix_residual < 1e-12, rep.matrix_residual);
    c.check("examples/3-pt-determinant-zero", std::abs(rep.pt_determinant) < 1e-10,
            std::abs(rep.pt_determinant));
    c.check("examples/3-branches-entangled", rep.min_branch_concurrence > 1e-8,
            rep.min_branch_concurrence);

    const ExampleReport app = run_example(ExampleId::Appendix, {}, tol);
    c.check("examples/appendix-closed-form-state", app.matrix_residual < 1e-12,
            app.matrix_residual);
    c.check("examples/appendix-pt-determinant-zero", std::abs(app.pt_determinant) < 1e-10,
            std::abs(app.pt_determinant));

    // Off the special strength the entanglement survives.
    Rng rng(seed ^ 0x77aau);
    double min_c = 1.0;
    for (double eps : {0.3, 0.5, 0.8}) {
      const double theta = 0.2 + rng.uniform() * (std::numbers::pi - 0.4);
      ExampleOverrides ov;
      ov.theta = theta;
      ov.eps = eps;
      const ExampleReport r = run_example(ExampleId::Appendix, ov, tol);
      min_c = std::min(min_c, r.final_concurrence);
    }
    c.check("examples/3-survives-off-special-eps", min_c > 1e-9, min_c);

    // Weak-form strength of the K family at eps = 0.01.
    const auto weak = example3_K_weak_form(0.01);
    const double worst_strength =
        std::max(std::abs(weak[0].strength - 0.02), std::abs(weak[1].strength - 0.02));
    const auto report = classify_weakness(example3_K(0.01));
    const double worst_report = std::max(std::abs(report.plus.strength - 0.02),
                                         std::abs(report.minus.strength - 0.02));
    c.check("examples/3-weakness-strength", worst_strength < 0.001 && worst_report < 0.001,
            std::max(worst_strength, worst_report));
  }
}

}  // namespace cli_detail

/// Run the named property suite(s); one pass/fail line per invariant.
inline int cmd_verify(const std::string& suite, std::uint64_t seed, int trials,
                      std::ostream& out = std::cout) {
  if (trials < 1) {
    out << "trials must be positive\n";
    return 1;
  }
  cli_detail::CheckList checks{out};
  bool known = false;
  if (suite == "all" || suite == "theorem1") {
    cli_detail::suite_theorem1(seed, trials, checks);
    known = true;
  }
  if (suite == "all" || suite == "theorem2") {
    cli_detail::suite_theorem2(seed, trials, checks);
    known = true;
  }
  if (suite == "all" || suite == "lemma2") {
    cli_detail::suite_lemma2(seed, trials, checks);
    known = true;
  }
  if (suite == "all" || suite == "corollary3") {
    cli_detail::suite_corollary3(seed, trials, checks);
    known = true;
  }
  if (suite == "all" || suite == "examples") {
    cli_detail::suite_examples(seed, checks);
    known = true;
  }
  if (!known) {
    out << "unknown suite '" << suite
        << "' (expected all|theorem1|theorem2|lemma2|corollary3|examples)\n";
    return 1;
  }
  return checks.all_pass ? 0 : 2;
}

/// Rebuild and report one of the worked examples.
inline int cmd_examples(const std::string& which, std::ostream& out = std::cout) {
  ExampleId id;
  if (which == "1")
    id = ExampleId::One;
  else if (which == "2")
    id = ExampleId::Two;
  else if (which == "3")
    id = ExampleId::Three;
  else if (which == "appendix")
    id = ExampleId::Appendix;
  else {
    out << "unknown example '" << which << "' (expected 1, 2, 3, or appendix)\n";
    return 1;
  }
  const ExampleReport rep = run_example(id, {}, default_concurrence_tol());
  out << rep.which << "\n";
  out << "  recorded interpretation: measure " << rep.interpretation << "\n";
  out << "  initial concurrence:     " << fmt17(rep.initial_concurrence) << "\n";
  out << "  assigned-state concurrence after one round: " << fmt17(rep.final_concurrence) << "\n";
  out << "  assigned state PPT:      " << (rep.final_verdict.ppt ? "yes" : "no")
      << "  (min PT eigenvalue " << cli_detail::fmt(rep.final_verdict.min_pt_eigenvalue) << ")\n";
  out << "  min branch concurrence:  " << fmt17(rep.min_branch_concurrence) << "\n";
  for (const std::string& note : rep.notes) out << "  note: " << note << "\n";
  return 0;
}

}  // namespace enatp
