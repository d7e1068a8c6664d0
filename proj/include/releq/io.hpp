#pragma once

// JSON/CSV (de)serialization. JSON output is canonical: keys sorted, doubles
// with 17 significant digits, non-finite numbers rejected.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "releq/ansatz.hpp"
#include "releq/cell.hpp"
#include "releq/dynamics.hpp"
#include "releq/equilibria.hpp"
#include "releq/errors.hpp"
#include "releq/kinetic.hpp"
#include "releq/rng.hpp"

namespace releq {

using json = nlohmann::json;

inline constexpr const char *kToolName = "releq";
inline constexpr const char *kToolVersion = "0.1.0";

inline std::string format_double(double v) {
  if (!std::isfinite(v))
    throw ValidationError("refusing to serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::string &out, const json &j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first)
        out += ",\n";
      first = false;
      out += inner + json(it.key()).dump() + ": ";
      write_json(out, it.value(), indent + 1);
    }
    out += "\n" + pad + "}";
    return;
  }
  case json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    // Arrays of scalars stay on one line.
    bool flat = true;
    for (const auto &e : j)
      flat = flat && !e.is_structured();
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i)
          out += ", ";
        write_json(out, j[i], indent + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i)
        out += ",\n";
      out += inner;
      write_json(out, j[i], indent + 1);
    }
    out += "\n" + pad + "]";
    return;
  }
  case json::value_t::number_float:
    out += format_double(j.get<double>());
    return;
  default:
    out += j.dump();
    return;
  }
}

} // namespace detail

inline std::string canonical_json(const json &j) {
  std::string out;
  detail::write_json(out, j, 0);
  out += "\n";
  return out;
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw ValidationError("cannot open output file " + path);
  f << text;
  if (!f)
    throw ValidationError("failed writing output file " + path);
}

inline std::string read_text(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw ValidationError("cannot open input file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string &text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    throw ValidationError("malformed JSON in " + what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Domain objects

inline json json_of(const PlanarConfiguration &c) {
  json pts = json::array();
  for (const Vec2 &p : c.points())
    pts.push_back({p.x(), p.y()});
  return {{"masses", c.masses().vector()}, {"points", pts}};
}

inline std::vector<Vec2> points_from_json(const json &j) {
  if (!j.is_array())
    throw ValidationError("points must be an array of [x, y] pairs");
  std::vector<Vec2> pts;
  for (const auto &p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ValidationError("each point must be a pair of numbers [x, y]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

inline std::vector<double> numbers_from_json(const json &j, const std::string &what) {
  if (!j.is_array())
    throw ValidationError(what + " must be an array of numbers");
  std::vector<double> v;
  for (const auto &x : j) {
    if (!x.is_number())
      throw ValidationError(what + " must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

inline PlanarConfiguration configuration_from_json(const json &j) {
  if (!j.is_object() || !j.contains("masses") || !j.contains("points"))
    throw ValidationError("configuration JSON needs \"masses\" and \"points\"");
  return PlanarConfiguration(points_from_json(j.at("points")), MassVector(numbers_from_json(j.at("masses"), "masses")));
}

inline json json_of(const SpectrumReport &s) {
  return {{"eigenvalues", s.eigenvalues},
          {"negative_count", s.negative_count},
          {"positive_count", s.positive_count},
          {"zero_count", s.zero_count},
          {"tolerance", s.tolerance}};
}

inline json json_of(const EquilibriumClass &c) {
  json tags = json::array();
  for (ShapeTag t : c.detected_tags)
    tags.push_back(to_string(t));
  return {{"representative", json_of(c.representative)},
          {"potential_value", c.potential_value},
          {"gradient_norm", c.gradient_norm},
          {"index_report", json_of(c.index_report)},
          {"nondegenerate_up_to_rotations", c.nondegenerate_up_to_rotations},
          {"singular_value_ratio", c.singular_value_ratio},
          {"pivot", c.pivot},
          {"shape_tag", to_string(c.shape_tag)},
          {"detected_tags", tags},
          {"multiplicity", c.multiplicity}};
}

inline json json_of(const FindDiagnostics &d) {
  return {{"starts", d.starts},
          {"certified", d.certified},
          {"descent_failed", d.descent_failed},
          {"polish_failed", d.polish_failed},
          {"certify_failed", d.certify_failed},
          {"max_newton_iterations_used", d.max_newton_iterations_used}};
}

inline json json_of(const FindResult &r) {
  json classes = json::array();
  for (const auto &c : r.classes)
    classes.push_back(json_of(c));
  return {{"classes", classes}, {"num_classes", r.classes.size()}, {"diagnostics", json_of(r.diagnostics)}};
}

inline json json_of(const CensusRecord &c) {
  json hist = json::array();
  for (const auto &[key, count] : c.index_histogram)
    hist.push_back({{"negative_count", key.first}, {"positive_count", key.second}, {"classes", count}});
  return {{"classes_found", c.classes_found},
          {"lower_bound", c.lower_bound},
          {"satisfied", c.satisfied},
          {"index_histogram", hist},
          {"search", json_of(c.search)}};
}

inline json json_of(const HessianBlockReport &r) {
  return {{"alpha", r.alpha},
          {"alpha_alpha", r.alpha_alpha},
          {"alpha_alpha_confinement", r.alpha_alpha_confinement},
          {"alpha_alpha_expected", r.alpha_alpha_expected},
          {"shift_eigenvalues", r.shift_eigenvalues},
          {"total_mass", r.total_mass},
          {"cross_alpha_shift", r.cross_alpha_shift},
          {"cross_alpha_shape", r.cross_alpha_shape},
          {"cross_shift_shape", r.cross_shift_shape},
          {"block_scale", r.block_scale},
          {"shape_eigenvalues", r.shape_eigenvalues},
          {"predicted_shape_eigenvalues", r.predicted_shape_eigenvalues},
          {"shape_max_rel_deviation", r.shape_max_rel_deviation}};
}

/// Scalar summary of a profile (no sampled grid).
inline json json_summary(const CellProfile &c) {
  return {{"p", c.p},
          {"w0", c.w0},
          {"R", c.R},
          {"m_star", c.m_star},
          {"e_star", c.e_star},
          {"grad_energy", c.grad_energy},
          {"nonlinear_integral", c.nonlinear_integral},
          {"tolerance", c.tolerance}};
}

inline json json_of(const CellProfile &c) {
  json j = json_summary(c);
  j["radial_grid"] = c.radial_grid;
  j["w_values"] = c.w_values;
  j["w_derivative_values"] = c.w_derivative_values;
  return j;
}

inline CellProfile profile_from_json(const json &j) {
  CellProfile c;
  try {
    c.p = j.at("p").get<double>();
    c.w0 = j.at("w0").get<double>();
    c.R = j.at("R").get<double>();
    c.m_star = j.at("m_star").get<double>();
    c.e_star = j.at("e_star").get<double>();
    c.grad_energy = j.at("grad_energy").get<double>();
    c.nonlinear_integral = j.at("nonlinear_integral").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    c.radial_grid = j.at("radial_grid").get<std::vector<double>>();
    c.w_values = j.at("w_values").get<std::vector<double>>();
    c.w_derivative_values = j.at("w_derivative_values").get<std::vector<double>>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed cell profile JSON: ") + e.what());
  }
  if (c.radial_grid.size() < 2 || c.w_values.size() != c.radial_grid.size() ||
      c.w_derivative_values.size() != c.radial_grid.size())
    throw ValidationError("cell profile grid arrays are inconsistent");
  return c;
}

inline json json_of(const CellInvariants &i) {
  return {{"w_at_R_error", i.w_at_R_error},
          {"matching_error", i.matching_error},
          {"mass_radius_error", i.mass_radius_error},
          {"mass_identity_error", i.mass_identity_error},
          {"monotone", i.monotone},
          {"passed", i.passed}};
}

inline json json_of(const ScalingReport &s) {
  return {{"lambdas", s.lambdas},
          {"masses", s.masses},
          {"energies", s.energies},
          {"mass_slope", s.mass_slope},
          {"mass_slope_expected", s.mass_slope_expected},
          {"energy_slope", s.energy_slope},
          {"energy_slope_half", s.energy_slope_half},
          {"energy_slope_printed", s.energy_slope_printed},
          {"energy_at_one_error", s.energy_at_one_error}};
}

/// Cell-energy exponent metadata: the measured slope used in predictions next
/// to the candidate closed forms.
inline json exponent_metadata(const ScalingReport &s) {
  return {{"measured", s.energy_slope}, {"half_power", s.energy_slope_half}, {"printed", s.energy_slope_printed}};
}

inline json json_of(const EnergyBreakdown &e) {
  json cross = json::array();
  for (Eigen::Index i = 0; i < e.cross_gradient.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < e.cross_gradient.cols(); ++j)
      row.push_back(e.cross_gradient(i, j));
    cross.push_back(row);
  }
  return {{"self_gradient", e.self_gradient},
          {"cross_gradient", cross},
          {"nonlinear_terms", e.nonlinear_terms},
          {"total", e.total},
          {"coarse_total", e.coarse_total},
          {"refinement_delta", e.refinement_delta}};
}

inline json json_of(const ScanTable &t) {
  json rows = json::array();
  for (const ScanRow &r : t.rows)
    rows.push_back({{"omega", r.omega},
                    {"J_total", r.j_total},
                    {"J_predicted", r.j_predicted},
                    {"residual", r.residual},
                    {"E_norm", r.e_norm},
                    {"E_norm_star", r.e_norm_star},
                    {"refinement_delta", r.refinement_delta}});
  return {{"rows", rows},
          {"residual_slope", t.residual_slope},
          {"e_norm_slope", t.e_norm_slope},
          {"self_energy", t.self_energy},
          {"extrapolated_constant", t.extrapolated_constant},
          {"extrapolation_rel_error", t.extrapolation_rel_error}};
}

inline std::string scan_csv(const ScanTable &t) {
  std::string s = "omega,J_total,J_predicted,residual,E_norm\n";
  for (const ScanRow &r : t.rows)
    s += format_double(r.omega) + "," + format_double(r.j_total) + "," + format_double(r.j_predicted) + "," +
         format_double(r.residual) + "," + format_double(r.e_norm) + "\n";
  return s;
}

inline json json_of(const GradientComparison &g) {
  return {{"omega", g.omega},
          {"step", g.step},
          {"fd_gradient", std::vector<double>(g.fd_gradient.data(), g.fd_gradient.data() + g.fd_gradient.size())},
          {"minus_grad_v", std::vector<double>(g.minus_grad_v.data(), g.minus_grad_v.data() + g.minus_grad_v.size())},
          {"max_deviation", g.max_deviation},
          {"noise_floor", g.noise_floor}};
}

inline json json_of(const GCheck &g) {
  return {{"numeric", g.numeric}, {"closed_form", g.closed_form}, {"rel_err", g.rel_err}};
}

inline json json_of(const RigidityReport &r) {
  return {{"pairwise_drift", r.pairwise_drift},
          {"radius_drift", r.radius_drift},
          {"phase_deviation", r.phase_deviation},
          {"out_of_plane", r.out_of_plane},
          {"energy_drift", r.energy_drift},
          {"angular_momentum_drift", r.angular_momentum_drift},
          {"linear_momentum", r.linear_momentum},
          {"period", r.period},
          {"duration", r.duration}};
}

inline std::string trajectory_csv(const Trajectory &t) {
  std::string s = "t";
  const std::size_t n = t.snapshots.empty() ? 0 : t.snapshots.front().positions.size();
  for (std::size_t j = 0; j < n; ++j)
    for (const char *c : {"x", "y", "z", "vx", "vy", "vz"})
      s += "," + std::string(c) + std::to_string(j);
  s += "\n";
  for (const PhaseState &st : t.snapshots) {
    s += format_double(st.time);
    for (std::size_t j = 0; j < n; ++j) {
      for (int k = 0; k < 3; ++k)
        s += "," + format_double(st.positions[j](k));
      for (int k = 0; k < 3; ++k)
        s += "," + format_double(st.velocities[j](k));
    }
    s += "\n";
  }
  return s;
}

inline Trajectory trajectory_from_csv(const std::string &text, const MassVector &masses) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("trajectory CSV is empty");
  const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols != 1 + 6 * masses.size())
    throw ValidationError("trajectory CSV has " + std::to_string(cols) + " columns, expected " +
                          std::to_string(1 + 6 * masses.size()));
  Trajectory t;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception &) {
        throw ValidationError("trajectory CSV contains a non-numeric entry: " + cell);
      }
    }
    if (v.size() != cols)
      throw ValidationError("trajectory CSV row has the wrong number of columns");
    PhaseState s;
    s.masses = masses;
    s.time = v[0];
    for (std::size_t j = 0; j < masses.size(); ++j) {
      s.positions.emplace_back(v[1 + 6 * j], v[2 + 6 * j], v[3 + 6 * j]);
      s.velocities.emplace_back(v[4 + 6 * j], v[5 + 6 * j], v[6 + 6 * j]);
    }
    t.snapshots.push_back(std::move(s));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Run configuration

/// "a:b:Nlog" (N log-uniform points in [a, b]) or a comma-separated list.
inline std::vector<double> parse_omegas(const std::string &spec) {
  std::vector<double> out;
  auto number = [&](const std::string &s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size())
        throw ValidationError("bad number in omega list: " + s);
      return v;
    } catch (const std::logic_error &) {
      throw ValidationError("bad number in omega list: " + s);
    }
  };
  if (spec.find(':') != std::string::npos) {
    const auto c1 = spec.find(':'), c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.size() < c2 + 4 || spec.substr(spec.size() - 3) != "log")
      throw ValidationError("omega grammar is a:b:Nlog, got " + spec);
    const double a = number(spec.substr(0, c1)), b = number(spec.substr(c1 + 1, c2 - c1 - 1));
    const double nd = number(spec.substr(c2 + 1, spec.size() - c2 - 4));
    const int n = static_cast<int>(nd);
    if (n < 1 || nd != n)
      throw ValidationError("omega point count must be a positive integer");
    if (!(a > 0.0 && b >= a))
      throw ValidationError("omega range must satisfy 0 < a <= b");
    for (int k = 0; k < n; ++k)
      out.push_back(n == 1 ? a : std::exp(std::log(a) + (std::log(b) - std::log(a)) * k / (n - 1)));
    out.front() = a;
    out.back() = b;
  } else {
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
      out.push_back(number(item));
    std::sort(out.begin(), out.end());
  }
  if (out.empty())
    throw ValidationError("omega list is empty");
  for (double w : out)
    if (!(w > 0.0))
      throw ValidationError("omegas must be positive");
  return out;
}

inline std::vector<double> parse_number_list(const std::string &spec, const std::string &what) {
  std::vector<double> out;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw ValidationError("bad number in " + what + ": " + item);
    } catch (const std::logic_error &) {
      throw ValidationError("bad number in " + what + ": " + item);
    }
  }
  if (out.empty())
    throw ValidationError(what + " must not be empty");
  return out;
}

enum class MassUnit { cell, absolute };

struct RunConfig {
  std::vector<double> masses;
  std::optional<std::vector<Vec2>> zeta;
  double p = 2.5;
  std::optional<double> q;
  MassUnit mass_unit = MassUnit::cell;
  std::vector<double> omegas;
  double mu = 10.0;
  std::uint64_t seed = 42;
  std::size_t starts = 500;
  double cell_tol = 1e-10;
  double quad_tol = 1e-9;
  std::size_t steps_per_period = 100000;
  double periods = 1.0;

  json echo() const {
    json j = {{"masses", masses},
              {"p", p},
              {"mass_unit", mass_unit == MassUnit::cell ? "cell" : "absolute"},
              {"omegas", omegas},
              {"mu", mu},
              {"seed", seed},
              {"starts", starts},
              {"cell_tol", cell_tol},
              {"quad_tol", quad_tol},
              {"steps_per_period", steps_per_period},
              {"periods", periods}};
    if (q)
      j["q"] = *q;
    if (zeta) {
      json pts = json::array();
      for (const Vec2 &z : *zeta)
        pts.push_back({z.x(), z.y()});
      j["zeta"] = pts;
    }
    return j;
  }
};

/// Resolves p from p and/or q: exactly one is required, or both consistent.
inline double resolve_exponent(std::optional<double> p, std::optional<double> q) {
  if (!p && !q)
    throw ValidationError("exactly one of p or q must be given");
  if (q) {
    const double pq = make_polytrope(*q).p;
    if (p && std::abs(*p - pq) > 1e-12 * std::abs(pq))
      throw ValidationError("p and q are inconsistent: p must equal 1/(q-1) + 3/2");
    return pq;
  }
  return *p;
}

inline RunConfig run_config_from_json(const json &j) {
  if (!j.is_object())
    throw ValidationError("run configuration must be a JSON object");
  static const std::vector<std::string> known{"masses", "zeta",  "p",      "q",        "mass_unit",        "omega",
                                              "omegas", "mu",    "seed",   "starts",   "cell_tol",         "quad_tol",
                                              "periods", "steps_per_period"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ValidationError("unknown key in run configuration: " + it.key());
  RunConfig c;
  if (!j.contains("masses"))
    throw ValidationError("run configuration needs \"masses\"");
  c.masses = numbers_from_json(j.at("masses"), "masses");
  (void)MassVector(c.masses);
  if (j.contains("zeta")) {
    c.zeta = points_from_json(j.at("zeta"));
    if (c.zeta->size() != c.masses.size())
      throw ValidationError("zeta must have one point per mass");
  }
  std::optional<double> p, q;
  try {
    if (j.contains("p"))
      p = j.at("p").get<double>();
    if (j.contains("q"))
      q = j.at("q").get<double>();
    if (!p && !q)
      p = 2.5;
    c.p = resolve_exponent(p, q);
    c.q = q;
    if (j.contains("mass_unit")) {
      const std::string u = j.at("mass_unit").get<std::string>();
      if (u == "cell")
        c.mass_unit = MassUnit::cell;
      else if (u == "absolute")
        c.mass_unit = MassUnit::absolute;
      else
        throw ValidationError("mass_unit must be \"cell\" or \"absolute\"");
    }
    if (j.contains("omegas")) {
      if (j.at("omegas").is_string())
        c.omegas = parse_omegas(j.at("omegas").get<std::string>());
      else {
        c.omegas = numbers_from_json(j.at("omegas"), "omegas");
        std::sort(c.omegas.begin(), c.omegas.end());
      }
    } else if (j.contains("omega")) {
      c.omegas = {j.at("omega").get<double>()};
    }
    for (double w : c.omegas)
      if (!(w > 0.0))
        throw ValidationError("omegas must be positive");
    if (j.contains("mu"))
      c.mu = j.at("mu").get<double>();
    if (j.contains("seed"))
      c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("starts"))
      c.starts = j.at("starts").get<std::size_t>();
    if (j.contains("cell_tol"))
      c.cell_tol = j.at("cell_tol").get<double>();
    if (j.contains("quad_tol"))
      c.quad_tol = j.at("quad_tol").get<double>();
    if (j.contains("periods"))
      c.periods = j.at("periods").get<double>();
    if (j.contains("steps_per_period"))
      c.steps_per_period = j.at("steps_per_period").get<std::size_t>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed run configuration: ") + e.what());
  }
  if (!(c.mu > 0.0))
    throw ValidationError("mu must be positive");
  return c;
}

/// Masses and ζ in absolute units. In cell units masses are multiples of m⋆
/// and ζ is given for the unit-scaled problem; since critical points scale as
/// ζ ↦ c^{1/3} ζ under m ↦ c m, ζ is converted by m⋆^{1/3}.
struct AbsoluteInstance {
  MassVector masses;
  std::optional<PlanarConfiguration> zeta;
  double mass_factor = 1.0;
};

inline AbsoluteInstance to_absolute(const RunConfig &c, const CellProfile &profile) {
  AbsoluteInstance a;
  a.mass_factor = c.mass_unit == MassUnit::cell ? profile.m_star : 1.0;
  a.masses = MassVector(c.masses).scaled(a.mass_factor);
  if (c.zeta) {
    const double s = std::cbrt(a.mass_factor);
    std::vector<Vec2> pts;
    for (const Vec2 &z : *c.zeta)
      pts.push_back(s * z);
    a.zeta = PlanarConfiguration(std::move(pts), a.masses);
  }
  return a;
}

inline json metadata(std::uint64_t seed, const json &config_echo) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"rng", kRngAlgorithm}, {"seed", seed},
          {"config", config_echo}};
}

inline json error_record(const std::string &category, const std::string &message, int exit_code) {
  return {{"error", {{"category", category}, {"message", message}}}, {"exit_code", exit_code}};
}

} // namespace releq
