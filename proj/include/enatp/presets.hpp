#pragma once

// Named presets addressable from configs and the command line:
//   states:        bell-phi-plus, bell-phi-minus, example1(a), example2-initial,
//                  schmidt(theta), werner(p), matrix(z11, ..., z44)
//   measurements:  special(eps,nx,ny,nz), asymproj(eps), example2, example3K(eps)

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "enatp/errors.hpp"
#include "enatp/measurements.hpp"
#include "enatp/states.hpp"

namespace enatp {

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Split "name(arg1, arg2, ...)" into name and raw argument strings.
/// A bare "name" yields an empty argument list.
inline std::pair<std::string, std::vector<std::string>> split_call(const std::string& text) {
  const std::string t = strip(text);
  const std::size_t open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw ConfigParse("missing ')' in '" + t + "'");
  const std::string name = strip(t.substr(0, open));
  const std::string body = t.substr(open + 1, t.size() - open - 2);
  std::vector<std::string> args;
  std::string cur;
  for (char c : body) {
    if (c == ',') {
      args.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!strip(cur).empty() || !args.empty()) args.push_back(strip(cur));
  return {name, args};
}

inline double parse_real(const std::string& s) {
  const std::string t = strip(s);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (...) {
    throw ConfigParse("expected a real number, got '" + t + "'");
  }
  if (pos != t.size()) throw ConfigParse("trailing characters in number '" + t + "'");
  return v;
}

/// Complex literal: "0.5", "-1.25e-3", "0.5+0.25i", "-2i", "i".
inline cx parse_complex(const std::string& s) {
  std::string t = strip(s);
  if (t.empty()) throw ConfigParse("empty complex literal");
  double re = 0.0, im = 0.0;

  auto read_num = [&](std::size_t& pos) -> double {
    const std::size_t start = pos;
    if (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) ++pos;
    if (pos < t.size() && (t[pos] == 'i' || t[pos] == 'I')) {
      // bare +-i
      return t[start] == '-' ? -1.0 : 1.0;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t.substr(start), &used);
    } catch (...) {
      throw ConfigParse("bad complex literal '" + t + "'");
    }
    pos = start + used;
    return v;
  };

  std::size_t pos = 0;
  double first = read_num(pos);
  if (pos < t.size() && (t[pos] == 'i' || t[pos] == 'I')) {
    im = first;
    ++pos;
    if (pos != t.size()) throw ConfigParse("bad complex literal '" + t + "'");
    return {re, im};
  }
  re = first;
  if (pos == t.size()) return {re, 0.0};
  if (t[pos] != '+' && t[pos] != '-') throw ConfigParse("bad complex literal '" + t + "'");
  im = read_num(pos);
  if (pos >= t.size() || (t[pos] != 'i' && t[pos] != 'I') || pos + 1 != t.size())
    throw ConfigParse("bad complex literal '" + t + "'");
  return {re, im};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// State presets
// ---------------------------------------------------------------------------

/// Build a state from a preset name.  Throws ConfigParse for unknown names or
/// malformed arguments, InvalidState/NotNormalized for unphysical input.
inline DensityMatrix2Q state_preset(const std::string& text) {
  const auto [name, args] = detail::split_call(text);
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw ConfigParse("state preset '" + name + "' expects " + std::to_string(n) +
                        " argument(s), got " + std::to_string(args.size()));
  };
  if (name == "bell-phi-plus") {
    want(0);
    return from_pure(bell_phi_plus());
  }
  if (name == "bell-phi-minus") {
    want(0);
    return from_pure(bell_phi_minus());
  }
  if (name == "example1") {
    want(1);
    return example1_state(detail::parse_real(args[0]));
  }
  if (name == "example2-initial") {
    want(0);
    return example2_initial_state();
  }
  if (name == "schmidt") {
    want(1);
    return from_pure(schmidt_state(detail::parse_real(args[0])));
  }
  if (name == "werner") {
    want(1);
    return werner_state(detail::parse_real(args[0]));
  }
  if (name == "matrix") {
    want(16);
    Mat4 m;
    for (std::size_t k = 0; k < 16; ++k) m.e[k] = detail::parse_complex(args[k]);
    return DensityMatrix2Q::from_matrix(m);
  }
  throw ConfigParse("unknown state preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Measurement presets
// ---------------------------------------------------------------------------

struct MeasurementPreset {
  TwoOutcomeMeasurement meas;
  /// Strength parameter of the preset, for reporting.
  double epsilon = 0.0;
  /// The eps of the equivalent special weak measurement, when the preset is a
  /// member of that family (drives closed-form concurrence predictions).
  std::optional<double> special_equivalent_eps;
};

inline MeasurementPreset measurement_preset(const std::string& text) {
  const auto [name, args] = detail::split_call(text);
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw ConfigParse("measurement preset '" + name + "' expects " + std::to_string(n) +
                        " argument(s), got " + std::to_string(args.size()));
  };
  if (name == "special") {
    want(4);
    const double eps = detail::parse_real(args[0]);
    Vec3 n{detail::parse_real(args[1]), detail::parse_real(args[2]), detail::parse_real(args[3])};
    const double nn = norm(n);
    if (nn < 1e-12) throw ConfigParse("special(...) axis must be nonzero");
    n = n / nn;
    MeasurementPreset p;
    p.meas = special_weak(eps, n);
    p.epsilon = eps;
    p.special_equivalent_eps = eps;
    return p;
  }
  if (name == "asymproj") {
    want(1);
    const double eps = detail::parse_real(args[0]);
    MeasurementPreset p;
    p.meas = asymptotically_projective(eps);
    p.epsilon = eps;
    // A0/A1 in the computational basis coincide with the special pair at
    // strength 1 - 2 eps along z.
    p.special_equivalent_eps = 1.0 - 2.0 * eps;
    return p;
  }
  if (name == "example2") {
    want(0);
    MeasurementPreset p;
    p.meas = example2_M();
    p.epsilon = 0.8;
    p.special_equivalent_eps = 0.8;
    return p;
  }
  if (name == "example3K") {
    want(1);
    const double eps = detail::parse_real(args[0]);
    MeasurementPreset p;
    p.meas = example3_K(eps);
    p.epsilon = eps;
    return p;
  }
  throw ConfigParse("unknown measurement preset '" + name + "'");
}

}  // namespace enatp
