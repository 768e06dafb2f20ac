// Minimal library walkthrough: start from a Bell pair, repeatedly apply a
// special weak measurement with unrecorded outcomes, and watch the assigned
// state's concurrence follow (1 - eps^2)^(n/2) while every recorded branch
// stays entangled.

#include <cstdio>

#include "enatp/enatp.hpp"

int main() {
  using namespace enatp;

  const DensityMatrix2Q bell = from_pure(bell_phi_plus());
  const double eps = 0.6;
  const TwoOutcomeMeasurement m = special_weak(eps, Vec3{0.0, 0.0, 1.0});

  std::printf("unknown outcomes: concurrence of the assigned state\n");
  std::printf("%6s  %12s  %12s\n", "rounds", "simulated", "closed form");
  DensityMatrix2Q state = bell;
  for (int n = 0; n <= 8; ++n) {
    if (n > 0) state = run_unknown(state, {{m, Target::System, 1}});
    std::printf("%6d  %12.9f  %12.9f\n", n, concurrence(state).value,
                closed_form_concurrence(1.0, eps, n));
  }

  std::printf("\nknown outcomes after 3 rounds: every branch stays entangled\n");
  const BranchEnsemble branches = run_known(bell, {{m, Target::System, 3}});
  for (const Branch& b : branches.branches)
    std::printf("  branch %-4s p=%.6f concurrence=%.6f\n", b.outcome_string.c_str(),
                b.probability, concurrence(b.state).value);
  return 0;
}
