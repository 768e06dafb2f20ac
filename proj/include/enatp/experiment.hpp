#pragma once

// Experiment configs (flat key = value files), the experiment runner, and
// CSV result emission.  Identical (config, seed) pairs produce byte-identical
// CSV output: doubles are printed with 17 significant digits and rows are
// emitted in a fixed order.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "enatp/presets.hpp"
#include "enatp/sequences.hpp"

namespace enatp {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

enum class OutcomeMode { Known, Unknown };

struct ScheduleEntryConfig {
  std::string measurement;  // measurement preset text
  Target target = Target::System;
  int rounds = 1;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::string state = "bell-phi-plus";
  OutcomeMode mode = OutcomeMode::Unknown;
  std::uint64_t seed = 0;
  std::vector<ScheduleEntryConfig> schedule;
  /// Empty means "use the caller's default" (1e-9, or ENATP_TOL in the CLI).
  std::optional<double> tol_concurrence_zero;
  double tol_prune = 1e-14;
};

/// Parse the flat key = value config grammar.  Recognized keys:
///   experiment_id, state, mode, seed,
///   schedule.<k>.measurement | .target | .rounds   (k = 1, 2, ...),
///   tolerance.concurrence_zero, tolerance.prune
/// '#' starts a comment.  Errors carry the offending line number.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<int, ScheduleEntryConfig> entries;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigParse("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = detail::strip(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = detail::strip(stripped.substr(0, eq));
    const std::string value = detail::strip(stripped.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for key '" + key + "'");

    try {
      if (key == "experiment_id") {
        cfg.experiment_id = value;
      } else if (key == "state") {
        cfg.state = value;
      } else if (key == "mode") {
        if (value == "known")
          cfg.mode = OutcomeMode::Known;
        else if (value == "unknown")
          cfg.mode = OutcomeMode::Unknown;
        else
          fail("mode must be 'known' or 'unknown'");
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "tolerance.concurrence_zero") {
        cfg.tol_concurrence_zero = detail::parse_real(value);
        if (*cfg.tol_concurrence_zero <= 0.0) fail("tolerances must be positive");
      } else if (key == "tolerance.prune") {
        cfg.tol_prune = detail::parse_real(value);
        if (cfg.tol_prune <= 0.0) fail("tolerances must be positive");
      } else if (key.rfind("schedule.", 0) == 0) {
        const std::string rest = key.substr(9);
        const std::size_t dot = rest.find('.');
        if (dot == std::string::npos) fail("schedule keys look like schedule.<k>.<field>");
        int index = 0;
        try {
          index = std::stoi(rest.substr(0, dot));
        } catch (...) {
          fail("bad schedule index '" + rest.substr(0, dot) + "'");
        }
        if (index < 1) fail("schedule indices start at 1");
        const std::string field = rest.substr(dot + 1);
        ScheduleEntryConfig& e = entries[index];
        if (field == "measurement") {
          e.measurement = value;
        } else if (field == "target") {
          if (value == "system")
            e.target = Target::System;
          else if (value == "environment")
            e.target = Target::Environment;
          else if (value == "both")
            e.target = Target::Both;
          else
            fail("target must be system, environment, or both");
        } else if (field == "rounds") {
          try {
            e.rounds = std::stoi(value);
          } catch (...) {
            fail("bad round count '" + value + "'");
          }
          if (e.rounds < 0) fail("rounds must be nonnegative");
        } else {
          fail("unknown schedule field '" + field + "'");
        }
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const ConfigParse&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  int expected = 1;
  for (const auto& [index, entry] : entries) {
    if (index != expected)
      throw ConfigParse("schedule indices must be contiguous from 1; missing schedule." +
                        std::to_string(expected));
    if (entry.measurement.empty())
      throw ConfigParse("schedule." + std::to_string(index) + " has no measurement");
    cfg.schedule.push_back(entry);
    ++expected;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct ResultRecord {
  std::string experiment_id;
  double epsilon = 0.0;
  int rounds = 0;
  double initial_concurrence = 0.0;
  double final_concurrence = 0.0;
  std::optional<double> predicted_concurrence;
  std::optional<double> abs_error;
  bool separable = false;
  std::optional<double> min_branch_concurrence;
};

/// Round-trip-exact double formatting for CSV cells.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_header() {
  return "experiment_id,epsilon,rounds,initial_concurrence,final_concurrence,"
         "predicted_concurrence,abs_error,separable,min_branch_concurrence";
}

inline std::string csv_row(const ResultRecord& r) {
  std::string out = r.experiment_id;
  out += ',';
  out += fmt17(r.epsilon);
  out += ',';
  out += std::to_string(r.rounds);
  out += ',';
  out += fmt17(r.initial_concurrence);
  out += ',';
  out += fmt17(r.final_concurrence);
  out += ',';
  if (r.predicted_concurrence) out += fmt17(*r.predicted_concurrence);
  out += ',';
  if (r.abs_error) out += fmt17(*r.abs_error);
  out += ',';
  out += r.separable ? "true" : "false";
  out += ',';
  if (r.min_branch_concurrence) out += fmt17(*r.min_branch_concurrence);
  return out;
}

/// Every probability- or concurrence-valued field must land in [0, 1].
inline void validate_record(const ResultRecord& r, double slack = 1e-12) {
  auto in_unit = [&](double v) { return v >= -slack && v <= 1.0 + slack; };
  if (!in_unit(r.initial_concurrence) || !in_unit(r.final_concurrence))
    throw InvariantViolation("concurrence outside [0, 1] in row for " + r.experiment_id);
  if (r.predicted_concurrence && !in_unit(*r.predicted_concurrence))
    throw InvariantViolation("predicted concurrence outside [0, 1]");
  if (r.min_branch_concurrence && !in_unit(*r.min_branch_concurrence))
    throw InvariantViolation("branch concurrence outside [0, 1]");
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace detail {

struct PredictionTracker {
  bool valid = true;
  std::optional<double> eps_sys;  // common strength of measurements on each side
  std::optional<double> eps_env;
  int n_sys = 0;
  int n_env = 0;

  void absorb(const MeasurementPreset& preset, Target target, int rounds) {
    if (!valid) return;
    if (!preset.special_equivalent_eps) {
      valid = false;
      return;
    }
    const double eps = *preset.special_equivalent_eps;
    auto merge = [&](std::optional<double>& slot, int& count) {
      if (slot && std::abs(*slot - eps) > 1e-15) {
        valid = false;
        return;
      }
      slot = eps;
      count += rounds;
    };
    if (target == Target::System || target == Target::Both) merge(eps_sys, n_sys);
    if (valid && (target == Target::Environment || target == Target::Both)) merge(eps_env, n_env);
  }

  std::optional<double> predict(double c0) const {
    if (!valid) return std::nullopt;
    // The one-sided law covers any pure input and any fixed axis; the
    // two-sided law additionally needs the axes to match the input's Schmidt
    // basis, which a flat schedule cannot promise, so such rows carry no
    // prediction.
    if (n_sys > 0 && n_env > 0) return std::nullopt;
    return closed_form_concurrence(c0, eps_sys.value_or(0.0), n_sys, eps_env.value_or(0.0), n_env);
  }
};

inline bool is_pure(const DensityMatrix2Q& rho, double tol = 1e-10) {
  return std::abs(trace(rho.matrix() * rho.matrix()).real() - 1.0) < tol;
}

}  // namespace detail

/// Execute a parsed config; one row per schedule entry, reporting the
/// cumulative evolution up to and including that entry.  Closed-form
/// predictions are attached when the initial state is pure and the schedule
/// stays inside the special-weak family with one fixed measurement per side.
inline std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  const DensityMatrix2Q initial = state_preset(cfg.state);
  const double c0 = concurrence(initial).value;
  const bool pure_input = detail::is_pure(initial);
  const double ctol = cfg.tol_concurrence_zero.value_or(1e-9);

  std::vector<ResultRecord> rows;
  DensityMatrix2Q assigned = initial;
  Schedule cumulative;
  detail::PredictionTracker prediction;
  prediction.valid = pure_input;
  int total_rounds = 0;

  for (const ScheduleEntryConfig& entry : cfg.schedule) {
    const MeasurementPreset preset = measurement_preset(entry.measurement);
    const ScheduleStep step{preset.meas, entry.target, entry.rounds};
    assigned = run_unknown(assigned, {step});
    cumulative.push_back(step);
    prediction.absorb(preset, entry.target, entry.rounds);
    total_rounds += entry.rounds;

    ResultRecord rec;
    rec.experiment_id = cfg.experiment_id;
    rec.epsilon = preset.epsilon;
    rec.rounds = total_rounds;
    rec.initial_concurrence = c0;
    rec.final_concurrence = concurrence(assigned).value;
    rec.predicted_concurrence = prediction.predict(c0);
    if (rec.predicted_concurrence)
      rec.abs_error = std::abs(rec.final_concurrence - *rec.predicted_concurrence);
    const SeparabilityVerdict verdict = ppt_check(assigned, ctol);
    rec.separable = verdict.concurrence_zero && verdict.ppt;
    if (cfg.mode == OutcomeMode::Known) {
      const BranchEnsemble branches = run_known(initial, cumulative, cfg.tol_prune);
      double total = branches.dropped_mass;
      double min_c = 1.0;
      for (const Branch& b : branches.branches) {
        total += b.probability;
        min_c = std::min(min_c, concurrence(b.state).value);
      }
      if (std::abs(total - 1.0) > 1e-10)
        throw InvariantViolation("branch probabilities do not sum to 1");
      rec.min_branch_concurrence = branches.branches.empty() ? 0.0 : min_c;
    }
    validate_record(rec);
    rows.push_back(rec);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepSpec {
  double eps_min = 0.0;
  double eps_max = 1.0;
  int eps_steps = 11;
  int rounds_max = 10;
  std::string state = "bell-phi-plus";
  double tol_concurrence_zero = 1e-9;
};

/// Decay-surface sweep: a grid of (eps, rounds) cells for repeated
/// special(eps, z) measurements of the system qubit with unknown outcomes.
/// Rows are emitted in eps-major, rounds-minor order.
inline std::vector<ResultRecord> run_sweep(const SweepSpec& spec) {
  if (!(spec.eps_min >= 0.0 && spec.eps_min <= spec.eps_max && spec.eps_max <= 1.0))
    throw BadRange("need 0 <= eps_min <= eps_max <= 1");
  if (spec.eps_steps < 1) throw BadRange("eps_steps must be at least 1");
  if (spec.rounds_max < 0) throw BadRange("rounds_max must be nonnegative");

  const DensityMatrix2Q initial = state_preset(spec.state);
  const double c0 = concurrence(initial).value;
  const bool pure_input = detail::is_pure(initial);
  const std::string id = "sweep(" + spec.state + ")";

  std::vector<ResultRecord> rows;
  for (int i = 0; i < spec.eps_steps; ++i) {
    const double eps =
        spec.eps_steps == 1
            ? spec.eps_min
            : spec.eps_min + (spec.eps_max - spec.eps_min) * i / (spec.eps_steps - 1);
    const TwoOutcomeMeasurement meas = special_weak(eps, Vec3{0.0, 0.0, 1.0});
    DensityMatrix2Q state = initial;
    for (int n = 0; n <= spec.rounds_max; ++n) {
      if (n > 0) state = run_unknown(state, {{meas, Target::System, 1}});
      ResultRecord rec;
      rec.experiment_id = id;
      rec.epsilon = eps;
      rec.rounds = n;
      rec.initial_concurrence = c0;
      rec.final_concurrence = concurrence(state).value;
      if (pure_input) {
        rec.predicted_concurrence = closed_form_concurrence(c0, eps, n);
        rec.abs_error = std::abs(rec.final_concurrence - *rec.predicted_concurrence);
      }
      const SeparabilityVerdict verdict = ppt_check(state, spec.tol_concurrence_zero);
      rec.separable = verdict.concurrence_zero && verdict.ppt;
      validate_record(rec);
      rows.push_back(rec);
    }
  }

  // The decay surface must be monotone nonincreasing in rounds, and in eps
  // for pure inputs.
  const int per_eps = spec.rounds_max + 1;
  for (int i = 0; i < spec.eps_steps; ++i)
    for (int n = 1; n <= spec.rounds_max; ++n)
      if (rows[i * per_eps + n].final_concurrence >
          rows[i * per_eps + n - 1].final_concurrence + 1e-10)
        throw InvariantViolation("final concurrence increased with rounds");
  if (pure_input) {
    for (int i = 1; i < spec.eps_steps; ++i)
      for (int n = 0; n <= spec.rounds_max; ++n)
        if (rows[i * per_eps + n].final_concurrence >
            rows[(i - 1) * per_eps + n].final_concurrence + 1e-10)
          throw InvariantViolation("final concurrence increased with eps");
  }
  return rows;
}

inline std::string to_csv(const std::vector<ResultRecord>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const ResultRecord& r : rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace enatp
