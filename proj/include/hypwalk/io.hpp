#pragma once

// Document formats used by the command line tool: polygon / measure /
// report JSON and the histogram CSV.  Writers are hand-rolled so that
// every floating-point number is printed with up to 17 significant
// digits; that many digits always parse back to the identical double,
// which is what makes document round-trips bit-exact.  Parsing is done
// with the vendored nlohmann header.

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hypwalk/coxeter.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/freewalk.hpp"
#include "hypwalk/fuchswalk.hpp"
#include "hypwalk/inequality.hpp"
#include "hypwalk/polygon.hpp"

namespace hypwalk::io {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline void append_doubles(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  out += ']';
}

inline void append_ints(std::string& out, const std::vector<int>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  out += ']';
}

inline void append_points(std::string& out,
                          const std::vector<std::array<double, 2>>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += '[';
    out += format_number(v[i][0]);
    out += ", ";
    out += format_number(v[i][1]);
    out += ']';
  }
  out += ']';
}

// Field accessors over a parsed nlohmann value; every shape violation
// turns into a domain error so the CLI reports it as data, not usage.

inline const nlohmann::json& member(const nlohmann::json& j,
                                    const std::string& key) {
  auto it = j.find(key);
  require(it != j.end(), ErrorCode::invalid_argument,
          "document is missing the \"" + key + "\" field");
  return *it;
}

inline int get_int(const nlohmann::json& j, const std::string& key) {
  const auto& v = member(j, key);
  require(v.is_number_integer(), ErrorCode::invalid_argument,
          "field \"" + key + "\" must be an integer");
  return v.get<int>();
}

inline double as_double(const nlohmann::json& v, const std::string& key) {
  require(v.is_number(), ErrorCode::invalid_argument,
          "field \"" + key + "\" must hold numbers");
  return v.get<double>();
}

inline std::vector<double> get_doubles(const nlohmann::json& j,
                                       const std::string& key,
                                       std::size_t expected) {
  const auto& v = member(j, key);
  require(v.is_array() && (expected == 0 || v.size() == expected),
          ErrorCode::invalid_argument,
          "field \"" + key + "\" must be an array" +
              (expected ? " of " + std::to_string(expected) + " numbers" : ""));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_double(e, key));
  return out;
}

inline std::vector<std::array<double, 2>> get_points(const nlohmann::json& j,
                                                     const std::string& key,
                                                     std::size_t expected) {
  const auto& v = member(j, key);
  require(v.is_array() && v.size() == expected, ErrorCode::invalid_argument,
          "field \"" + key + "\" must be an array of " +
              std::to_string(expected) + " points");
  std::vector<std::array<double, 2>> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    require(e.is_array() && e.size() == 2, ErrorCode::invalid_argument,
            "field \"" + key + "\" must hold [x, y] pairs");
    out.push_back({as_double(e[0], key), as_double(e[1], key)});
  }
  return out;
}

inline nlohmann::json parse_text(const std::string& text,
                                 const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::invalid_argument,
          what + ": not valid JSON");
  require(j.is_object(), ErrorCode::invalid_argument,
          what + ": top level must be an object");
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------
// Polygon documents.

struct PolygonDocument {
  int m = 0;
  std::optional<int> k;
  std::vector<double> alpha;     // m central angles, feet convention
  std::vector<double> apothems;  // m
  std::vector<double> gamma;     // m interior angles
  std::vector<std::array<double, 2>> vertices;   // 2m
  std::vector<std::array<double, 2>> midpoints;  // 2m
  std::optional<std::vector<int>> k_values;      // m reflection orders
};

inline PolygonDocument document_of(
    const SymmetricPolygon& P,
    std::optional<std::vector<int>> k_values = std::nullopt) {
  PolygonDocument d;
  d.m = P.m;
  d.k = P.k;
  d.alpha = P.central_angles;
  d.apothems = P.apothems;
  d.gamma = P.gamma;
  d.vertices.reserve(P.vertices.size());
  for (const DiskPoint& p : P.vertices) d.vertices.push_back({p.re(), p.im()});
  d.midpoints.reserve(P.midpoints.size());
  for (const DiskPoint& q : P.midpoints) d.midpoints.push_back({q.re(), q.im()});
  d.k_values = std::move(k_values);
  return d;
}

inline std::string polygon_json(const PolygonDocument& d) {
  std::string out = "{\n";
  out += "  \"m\": " + std::to_string(d.m) + ",\n";
  out += "  \"k\": " + (d.k ? std::to_string(*d.k) : std::string("null")) + ",\n";
  out += "  \"alpha\": ";
  detail::append_doubles(out, d.alpha);
  out += ",\n  \"apothems\": ";
  detail::append_doubles(out, d.apothems);
  out += ",\n  \"gamma\": ";
  detail::append_doubles(out, d.gamma);
  out += ",\n  \"vertices\": ";
  detail::append_points(out, d.vertices);
  out += ",\n  \"midpoints\": ";
  detail::append_points(out, d.midpoints);
  if (d.k_values) {
    out += ",\n  \"k_values\": ";
    detail::append_ints(out, *d.k_values);
  }
  out += "\n}\n";
  return out;
}

inline PolygonDocument parse_polygon(const std::string& text) {
  nlohmann::json j = detail::parse_text(text, "polygon document");
  PolygonDocument d;
  d.m = detail::get_int(j, "m");
  require(d.m >= 2, ErrorCode::invalid_argument,
          "polygon document: m must be at least 2");
  const std::size_t m = static_cast<std::size_t>(d.m);
  if (j.contains("k") && !j["k"].is_null()) d.k = detail::get_int(j, "k");
  d.alpha = detail::get_doubles(j, "alpha", m);
  d.apothems = detail::get_doubles(j, "apothems", m);
  d.gamma = detail::get_doubles(j, "gamma", m);
  d.vertices = detail::get_points(j, "vertices", 2 * m);
  d.midpoints = detail::get_points(j, "midpoints", 2 * m);
  if (j.contains("k_values") && !j["k_values"].is_null()) {
    const auto& kv = j["k_values"];
    require(kv.is_array() && kv.size() == m, ErrorCode::invalid_argument,
            "polygon document: k_values must hold m integers");
    std::vector<int> orders;
    for (const auto& e : kv) {
      require(e.is_number_integer(), ErrorCode::invalid_argument,
              "polygon document: k_values must hold integers");
      orders.push_back(e.get<int>());
    }
    d.k_values = std::move(orders);
  }
  return d;
}

// Rebuilds the live polygon from the document's (apothems, alpha); the
// remaining fields are derived and serve as cross-checks, not inputs.
inline SymmetricPolygon to_polygon(const PolygonDocument& d) {
  std::vector<std::pair<double, double>> frames(d.m);
  double foot = 0.0;
  for (int i = 0; i < d.m; ++i) {
    frames[i] = {d.apothems[i], foot};
    foot += d.alpha[i];
  }
  SymmetricPolygon P = build_from_sides(std::move(frames));
  P.k = d.k;
  return P;
}

// ---------------------------------------------------------------------
// Dual polygon document.

inline std::string dual_json(const DualPolygon& D) {
  std::vector<std::array<double, 2>> verts;
  verts.reserve(D.vertices.size());
  for (const DiskPoint& p : D.vertices) verts.push_back({p.re(), p.im()});
  std::string out = "{\n";
  out += "  \"m\": " + std::to_string(D.m) + ",\n";
  out += "  \"side_lengths\": ";
  detail::append_doubles(out, D.side_lengths);
  out += ",\n  \"angles\": ";
  detail::append_doubles(out, D.angles);
  out += ",\n  \"vertices\": ";
  detail::append_points(out, verts);
  out += ",\n  \"basepoint\": [" + format_number(D.basepoint.re()) + ", " +
         format_number(D.basepoint.im()) + "]";
  out += ",\n  \"closure_residual\": " + format_number(D.closure_residual);
  // Each dual side stands for a pairing and its inverse, so the weight
  // sum over all 2m primal generators counts every side twice.
  out += ",\n  \"sigma_hat\": " +
         format_number(2.0 * sigma_of_lengths(D.side_lengths));
  out += "\n}\n";
  return out;
}

// ---------------------------------------------------------------------
// Measure documents.

inline std::string measure_json(const StepDistribution& mu) {
  std::string out = "{\n";
  out += "  \"kind\": \"" + std::string(step_kind_name(mu.kind)) + "\",\n";
  out += "  \"probabilities\": ";
  detail::append_doubles(out, mu.probabilities);
  out += "\n}\n";
  return out;
}

inline StepDistribution parse_measure(const std::string& text) {
  nlohmann::json j = detail::parse_text(text, "measure document");
  const auto& kind = detail::member(j, "kind");
  require(kind.is_string(), ErrorCode::invalid_argument,
          "measure document: kind must be a string");
  std::string name = kind.get<std::string>();
  StepKind k;
  if (name == "free")
    k = StepKind::free_group;
  else if (name == "involutive")
    k = StepKind::involutive;
  else
    fail(ErrorCode::invalid_argument,
         "measure document: kind must be \"free\" or \"involutive\"");
  return step_distribution(k, detail::get_doubles(j, "probabilities", 0));
}

// ---------------------------------------------------------------------
// Report documents.  One schema covers the criterion, witness, and walk
// reports; absent optional fields are simply omitted.

struct ReportDocument {
  double sigma = 0.0;
  double margin = 0.0;
  std::string verdict;
  std::vector<double> lengths;
  std::optional<WitnessReport> witness;
  std::optional<double> drift;
  std::optional<std::vector<double>> entropy_bounds;
  std::optional<double> dimension_bound;
};

inline std::string report_json(const ReportDocument& r) {
  std::string out = "{\n";
  out += "  \"sigma\": " + format_number(r.sigma) + ",\n";
  out += "  \"margin\": " + format_number(r.margin) + ",\n";
  out += "  \"verdict\": \"" + r.verdict + "\",\n";
  out += "  \"lengths\": ";
  detail::append_doubles(out, r.lengths);
  if (r.witness) {
    out += ",\n  \"witness\": {\n";
    out += "    \"index\": " + std::to_string(r.witness->witness_index) + ",\n";
    out += "    \"e_pow_length\": " + format_number(r.witness->e_pow_length) +
           ",\n";
    out += "    \"threshold\": " + format_number(r.witness->threshold) + ",\n";
    out += "    \"witnesses\": ";
    detail::append_ints(out, r.witness->witnesses);
    out += ",\n    \"thresholds\": ";
    detail::append_doubles(out, r.witness->thresholds);
    out += "\n  }";
  }
  if (r.drift) out += ",\n  \"drift\": " + format_number(*r.drift);
  if (r.entropy_bounds) {
    out += ",\n  \"entropy_bounds\": ";
    detail::append_doubles(out, *r.entropy_bounds);
  }
  if (r.dimension_bound)
    out += ",\n  \"dimension_bound\": " + format_number(*r.dimension_bound);
  out += "\n}\n";
  return out;
}

// ---------------------------------------------------------------------
// Solver outputs.

inline std::string first_passage_json(const FirstPassage& fp) {
  std::string out = "{\n";
  out += "  \"kind\": \"" + std::string(step_kind_name(fp.kind)) + "\",\n";
  if (fp.kind == StepKind::free_group) {
    const std::size_t m = fp.x.size() / 2;
    std::vector<double> x(fp.x.begin(), fp.x.begin() + m);
    std::vector<double> xc(fp.x.begin() + m, fp.x.end());
    out += "  \"x\": ";
    detail::append_doubles(out, x);
    out += ",\n  \"x_check\": ";
    detail::append_doubles(out, xc);
  } else {
    out += "  \"x\": ";
    detail::append_doubles(out, fp.x);
  }
  out += ",\n  \"residual\": " + format_number(fp.residual);
  out += ",\n  \"iterations\": " + std::to_string(fp.iterations);
  out += "\n}\n";
  return out;
}

inline std::string cylinders_json(const CylinderMeasures& cm) {
  std::string out = "{\n";
  out += "  \"kind\": \"" + std::string(step_kind_name(cm.kind)) + "\",\n";
  out += "  \"nu\": ";
  detail::append_doubles(out, cm.nu);
  out += ",\n  \"total\": " + format_number(cm.total());
  out += "\n}\n";
  return out;
}

inline std::string opt_report_json(const OptReport& r) {
  std::string out = "{\n";
  out += "  \"minimum_found\": " + format_number(r.minimum_found) + ",\n";
  out += "  \"argmin\": ";
  detail::append_doubles(out, r.argmin);
  out += ",\n  \"samples_used\": " + std::to_string(r.samples_used);
  out += ",\n  \"violations\": [";
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const Violation& v = r.violations[i];
    if (i) out += ", ";
    out += "{\"what\": \"" + detail::escape(v.what) + "\", \"x\": ";
    detail::append_doubles(out, v.x);
    out += ", \"lhs\": " + format_number(v.lhs);
    out += ", \"rhs\": " + format_number(v.rhs) + "}";
  }
  out += "]";
  out += ",\n  \"equality_cases_checked\": [";
  for (std::size_t i = 0; i < r.equality_cases_checked.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + detail::escape(r.equality_cases_checked[i]) + "\"";
  }
  out += "]\n}\n";
  return out;
}

inline std::string drift_json(const DriftEstimate& d) {
  std::string out = "{\n";
  out += "  \"drift\": " + format_number(d.drift) + ",\n";
  out += "  \"ci_half_width\": " + format_number(d.ci_half_width) + ",\n";
  out += "  \"steps\": " + std::to_string(d.steps) + ",\n";
  out += "  \"paths\": " + std::to_string(d.paths);
  out += "\n}\n";
  return out;
}

inline std::string entropy_json(const std::vector<double>& bounds) {
  std::string out = "{\n  \"entropy_bounds\": ";
  detail::append_doubles(out, bounds);
  out += "\n}\n";
  return out;
}

// ---------------------------------------------------------------------
// Tables.

inline std::string histogram_csv(const MeasureHistogram& h) {
  std::string out = "bin_start_rad,bin_end_rad,count,frequency\n";
  for (int i = 0; i < h.bins; ++i) {
    double lo = 2.0 * kPi * i / h.bins;
    double hi = 2.0 * kPi * (i + 1) / h.bins;
    out += format_number(lo) + "," + format_number(hi) + "," +
           std::to_string(h.counts[i]) + "," + format_number(h.frequencies[i]) +
           "\n";
  }
  return out;
}

inline std::string sample_csv(const WalkSample& s) {
  std::string out = "path,distance,boundary_angle\n";
  for (long i = 0; i < s.paths(); ++i)
    out += std::to_string(i) + "," + format_number(s.distance[i]) + "," +
           format_number(s.boundary_angle[i]) + "\n";
  return out;
}

inline std::string plot_series(
    const std::vector<std::pair<double, double>>& xy) {
  std::string out;
  for (const auto& [x, y] : xy)
    out += format_number(x) + " " + format_number(y) + "\n";
  return out;
}

// ---------------------------------------------------------------------
// Files.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::invalid_argument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::invalid_argument, "cannot write " + path);
  out << content;
  out.flush();
  require(out.good(), ErrorCode::invalid_argument, "short write to " + path);
}

}  // namespace hypwalk::io
