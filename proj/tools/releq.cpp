#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "releq/releq.hpp"

using namespace releq;

namespace {

void emit_text(const std::string &text, const std::string &out) {
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
}

void emit(const json &j, const std::string &out) { emit_text(canonical_json(j), out); }

bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

unsigned thread_count(unsigned requested) {
  if (requested > 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

MassVector masses_from(const std::string &s) { return MassVector(parse_number_list(s, "masses")); }

RunConfig load_config(const std::string &path) {
  return run_config_from_json(parse_json_text(read_text(path), path));
}

/// Exponent from optional --p/--q flags; p = 2.5 when neither is given.
double exponent_from_flags(const CLI::Option *p_opt, double p, const CLI::Option *q_opt, double q) {
  std::optional<double> po, qo;
  if (p_opt->count())
    po = p;
  if (q_opt->count())
    qo = q;
  if (!po && !qo)
    po = 2.5;
  return resolve_exponent(po, qo);
}

/// Loads a profile written by `cell solve`, or solves one at exponent p.
std::shared_ptr<const CellProfile> load_profile(const std::string &path, const RunConfig &cfg, bool exponent_given,
                                                double tol) {
  if (path.empty())
    return std::make_shared<const CellProfile>(solve_normalized(cfg.p, tol));
  const json j = parse_json_text(read_text(path), path);
  CellProfile c = profile_from_json(j.contains("profile") ? j.at("profile") : j);
  if (exponent_given && std::abs(c.p - cfg.p) > 1e-12 * cfg.p)
    throw ValidationError("cell profile exponent p = " + format_double(c.p) + " does not match the configuration p = " +
                          format_double(cfg.p));
  return std::make_shared<const CellProfile>(std::move(c));
}

bool config_names_exponent(const std::string &path) {
  const json j = parse_json_text(read_text(path), path);
  return j.contains("p") || j.contains("q");
}

json cell_meta(std::uint64_t seed, const json &echo, const ScalingReport &s) {
  json m = metadata(seed, echo);
  m["exponents"] = exponent_metadata(s);
  return m;
}

/// ζ for commands without a cell profile: taken literally from the config, or
/// the minimizing class for the config masses.
PlanarConfiguration literal_zeta(const RunConfig &cfg, unsigned threads) {
  const MassVector m(cfg.masses);
  if (cfg.zeta)
    return PlanarConfiguration(*cfg.zeta, m);
  FindOptions fo;
  fo.num_starts = cfg.starts;
  fo.seed = cfg.seed;
  fo.threads = threads;
  return minimizing_class(m, fo).representative;
}

DescentTarget parse_target(const std::string &s) {
  if (s == "potential")
    return DescentTarget::potential;
  if (s == "gradient_norm")
    return DescentTarget::gradient_norm;
  if (s == "mixed")
    return DescentTarget::mixed;
  throw ValidationError("descent target must be potential, gradient_norm or mixed");
}

std::vector<std::size_t> parse_ordering(const std::string &s, std::size_t n) {
  std::vector<std::size_t> out;
  if (s.empty()) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (double v : parse_number_list(s, "ordering")) {
    if (v < 0.0 || v != std::floor(v))
      throw ValidationError("ordering must list non-negative integer indices");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int report_error(const std::string &category, const std::string &message, int code) {
  std::cerr << error_record(category, message, code).dump() << "\n";
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"releq: relative equilibria, cell profiles and multi-bump ansatz checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  unsigned threads_flag = 0;
  app.add_option("--threads", threads_flag, "Worker threads (default: available cores)")->capture_default_str();

  std::string out;
  std::string masses_s;
  std::size_t starts = 500;
  std::uint64_t seed = 42;
  std::string target_s = "mixed";

  // equilibria ---------------------------------------------------------------
  auto *eq = app.add_subcommand("equilibria", "Critical points of the planar N-body potential");
  eq->require_subcommand(1);
  auto add_search_flags = [&](CLI::App *c) {
    c->add_option("--masses", masses_s, "Comma-separated positive masses")->required();
    c->add_option("--starts", starts, "Number of random starts")->capture_default_str();
    c->add_option("--seed", seed, "RNG seed")->capture_default_str();
    c->add_option("--target", target_s, "Descent target: potential, gradient_norm, mixed")->capture_default_str();
    c->add_option("--threads", threads_flag, "Worker threads (default: available cores)");
    c->add_option("--out", out, "Output JSON path (default: stdout)");
  };
  auto *eq_find = eq->add_subcommand("find", "Multistart search for equilibrium classes");
  add_search_flags(eq_find);
  auto *eq_census = eq->add_subcommand("census", "Class count against the lower bound for generic masses");
  add_search_flags(eq_census);

  auto *eq_closed = eq->add_subcommand("closed-form", "Closed-form equilibria");
  std::string kind;
  int n_ring = 3;
  double m_star = 1.0, m_ring = 1.0, m_center = 1.0;
  std::string ordering_s;
  bool mirrored = false;
  eq_closed->add_option("--kind", kind, "two-body | lagrange | polygon | polygon-center | moulton")
      ->required()
      ->check(CLI::IsMember({"two-body", "lagrange", "polygon", "polygon-center", "moulton"}));
  eq_closed->add_option("--masses", masses_s, "Masses (two-body, lagrange, moulton)");
  eq_closed->add_option("--n", n_ring, "Number of ring bodies (polygon, polygon-center)")->capture_default_str();
  eq_closed->add_option("--m-star", m_star, "Ring mass (polygon)")->capture_default_str();
  eq_closed->add_option("--m-ring", m_ring, "Ring mass (polygon-center)")->capture_default_str();
  eq_closed->add_option("--m-center", m_center, "Central mass (polygon-center)")->capture_default_str();
  eq_closed->add_option("--ordering", ordering_s, "0-based order of the bodies on the line (moulton)");
  eq_closed->add_flag("--mirrored", mirrored, "Opposite orientation (lagrange)");
  eq_closed->add_option("--out", out, "Output JSON path (default: stdout)");

  auto *eq_classify = eq->add_subcommand("classify", "Index and degeneracy report of a configuration");
  std::string in_path;
  eq_classify->add_option("--in", in_path, "Configuration JSON {masses, points}")->required();
  eq_classify->add_option("--out", out, "Output JSON path (default: stdout)");

  auto *eq_blocks = eq->add_subcommand("blocks", "Hessian block structure in Smale coordinates");
  eq_blocks->add_option("--in", in_path, "Critical configuration JSON (default: two-body closed form)");
  eq_blocks->add_option("--masses", masses_s, "Two-body masses when --in is absent");
  eq_blocks->add_option("--out", out, "Output JSON path (default: stdout)");

  // cell ----------------------------------------------------------------------
  auto *cell = app.add_subcommand("cell", "Normalized free-boundary cell profile");
  cell->require_subcommand(1);
  auto *cell_solve = cell->add_subcommand("solve", "Solve the cell problem");
  double p_val = 2.5, q_val = 2.0, tol = 1e-10;
  auto *cell_p = cell_solve->add_option("--p", p_val, "Spatial exponent, 1 < p < 5 (default 2.5)");
  auto *cell_q = cell_solve->add_option("--q", q_val, "Polytropic index (alternative to --p)");
  cell_solve->add_option("--tol", tol, "Solver tolerance")->capture_default_str();
  cell_solve->add_option("--out", out, "Output JSON path (default: stdout)");
  auto *cell_verify = cell->add_subcommand("verify", "Re-run the invariant suite on a stored profile");
  cell_verify->add_option("--in", in_path, "Profile JSON from `cell solve`")->required();
  cell_verify->add_option("--out", out, "Output JSON path (default: stdout)");

  // ansatz --------------------------------------------------------------------
  auto *ans = app.add_subcommand("ansatz", "Multi-bump ansatz energy and expansion checks");
  ans->require_subcommand(1);
  std::string cell_path, config_path, omegas_s;
  double omega = 0.0, quad_tol = 1e-9;
  auto add_ansatz_flags = [&](CLI::App *c, bool config_required) {
    c->add_option("--cell", cell_path, "Profile JSON from `cell solve` (default: solve at the config exponent)");
    auto *o = c->add_option("--config", config_path, "Run configuration JSON");
    if (config_required)
      o->required();
    c->add_option("--quad-tol", quad_tol, "Relative refinement tolerance of the quadrature")->capture_default_str();
    c->add_option("--threads", threads_flag, "Worker threads (default: available cores)");
    c->add_option("--out", out, "Output path (default: stdout)");
  };
  auto *ans_energy = ans->add_subcommand("energy", "Energy of the ansatz at one rotation speed");
  add_ansatz_flags(ans_energy, true);
  auto *ans_energy_omega = ans_energy->add_option("--omega", omega, "Rotation speed (default: first config omega)");
  auto *ans_scan = ans->add_subcommand("scan", "Energy expansion and error norms over an omega grid");
  add_ansatz_flags(ans_scan, true);
  ans_scan->add_option("--omegas", omegas_s, "a:b:Nlog or comma list (default: config omegas)");
  auto *ans_grad = ans->add_subcommand("grad-check", "Finite-difference energy gradient against the potential");
  add_ansatz_flags(ans_grad, false);
  std::string grad_omegas_s = "1e-3";
  ans_grad->add_option("--omega", grad_omegas_s, "Rotation speed(s), comma list")->capture_default_str();

  // kinetic -------------------------------------------------------------------
  auto *kin = app.add_subcommand("kinetic", "Polytropic kinetic dictionary");
  kin->require_subcommand(1);
  auto *kin_check = kin->add_subcommand("check", "Velocity integral of the polytrope against its closed form");
  double mu_val = -1.0, kin_tol = 1e-12;
  double kp = 2.5, kq = 2.0;
  auto *kin_p = kin_check->add_option("--p", kp, "Spatial exponent p > 3/2 (alternative to --q)");
  auto *kin_q = kin_check->add_option("--q", kq, "Polytropic index q > 1 (default 2)");
  kin_check->add_option("--mu", mu_val, "Energy level")->capture_default_str();
  kin_check->add_option("--quad-tol", kin_tol, "Quadrature tolerance")->capture_default_str();
  kin_check->add_option("--out", out, "Output JSON path (default: stdout)");

  // dynamics ------------------------------------------------------------------
  auto *dyn = app.add_subcommand("dynamics", "Rigid rotation of relative equilibria under Newtonian dynamics");
  dyn->require_subcommand(1);
  auto *dyn_sim = dyn->add_subcommand("simulate", "Integrate from the rigidly rotating initial data");
  double periods = 1.0;
  std::size_t steps_per_period = 100000, stride = 100;
  dyn_sim->add_option("--config", config_path, "Run configuration JSON")->required();
  auto *dyn_sim_omega = dyn_sim->add_option("--omega", omega, "Rotation speed (default: first config omega)");
  dyn_sim->add_option("--periods", periods, "Number of periods")->capture_default_str();
  dyn_sim->add_option("--steps-per-period", steps_per_period, "Steps per period")->capture_default_str();
  dyn_sim->add_option("--stride", stride, "Write every stride-th step")->capture_default_str();
  dyn_sim->add_option("--threads", threads_flag, "Worker threads for the equilibrium search");
  dyn_sim->add_option("--out", out, "Output CSV path (default: stdout)");
  auto *dyn_rig = dyn->add_subcommand("rigidity", "Rigidity metrics of a stored trajectory");
  dyn_rig->add_option("--in", in_path, "Trajectory CSV from `dynamics simulate`")->required();
  dyn_rig->add_option("--config", config_path, "Run configuration JSON")->required();
  auto *dyn_rig_omega = dyn_rig->add_option("--omega", omega, "Rotation speed (default: first config omega)");
  dyn_rig->add_option("--threads", threads_flag, "Worker threads for the equilibrium search");
  dyn_rig->add_option("--out", out, "Output JSON path (default: stdout)");

  // pipeline ------------------------------------------------------------------
  auto *pipe = app.add_subcommand("pipeline", "Equilibrium, cell, expansion scan and dynamics in one report");
  double pipe_p = 2.5, pipe_q = 2.0, pipe_mu = 10.0;
  std::string mass_unit_s;
  pipe->add_option("--config", config_path, "Run configuration JSON (flags override it)");
  auto *pipe_masses = pipe->add_option("--masses", masses_s, "Comma-separated positive masses");
  auto *pipe_p_opt = pipe->add_option("--p", pipe_p, "Spatial exponent (default 2.5)");
  auto *pipe_q_opt = pipe->add_option("--q", pipe_q, "Polytropic index");
  auto *pipe_omegas = pipe->add_option("--omegas", omegas_s, "a:b:Nlog or comma list (default 1e-4:1e-2:8log)");
  auto *pipe_seed = pipe->add_option("--seed", seed, "RNG seed (default 42)");
  auto *pipe_starts = pipe->add_option("--starts", starts, "Number of random starts (default 500)");
  auto *pipe_mu_opt = pipe->add_option("--mu", pipe_mu, "Constraint parameter mu (default 10)");
  auto *pipe_unit = pipe->add_option("--mass-unit", mass_unit_s, "cell (default) or absolute")
                        ->check(CLI::IsMember({"cell", "absolute"}));
  pipe->add_option("--threads", threads_flag, "Worker threads (default: available cores)");
  pipe->add_option("--out", out, "Output JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return report_error("usage", e.what(), 1);
  }

  const unsigned threads = thread_count(threads_flag);

  try {
    if (eq_find->parsed() || eq_census->parsed()) {
      FindOptions fo;
      fo.num_starts = starts;
      fo.seed = seed;
      fo.target = parse_target(target_s);
      fo.threads = threads;
      const MassVector m = masses_from(masses_s);
      const json echo = {{"masses", m.vector()}, {"starts", starts}, {"seed", seed}, {"target", to_string(fo.target)}};
      json j;
      if (eq_find->parsed())
        j = json_of(find_equilibria(m, fo));
      else
        j = json_of(palmore_census(m, fo));
      j["meta"] = metadata(seed, echo);
      emit(j, out);
    } else if (eq_closed->parsed()) {
      PlanarConfiguration c;
      json echo = {{"kind", kind}};
      auto masses_or = [&](std::vector<double> dflt) {
        return masses_s.empty() ? MassVector(std::move(dflt)) : masses_from(masses_s);
      };
      if (kind == "two-body") {
        const MassVector m = masses_or({1.0, 1.0});
        if (m.size() != 2)
          throw ValidationError("two-body needs exactly 2 masses");
        c = two_body(m[0], m[1]);
        echo["masses"] = m.vector();
      } else if (kind == "lagrange") {
        const MassVector m = masses_or({1.0, 2.0, 3.0});
        if (m.size() != 3)
          throw ValidationError("lagrange needs exactly 3 masses");
        c = lagrange_triangle(m[0], m[1], m[2], mirrored);
        echo["masses"] = m.vector();
        echo["mirrored"] = mirrored;
      } else if (kind == "polygon") {
        c = polygon(n_ring, m_star);
        echo["n"] = n_ring;
        echo["m_star"] = m_star;
      } else if (kind == "polygon-center") {
        c = polygon_with_center(n_ring, m_ring, m_center);
        echo["n"] = n_ring;
        echo["m_ring"] = m_ring;
        echo["m_center"] = m_center;
      } else {
        const MassVector m = masses_or({1.0, 1.0, 1.0});
        const auto ord = parse_ordering(ordering_s, m.size());
        c = moulton(m, ord);
        echo["masses"] = m.vector();
        echo["ordering"] = ord;
      }
      emit({{"meta", metadata(0, echo)}, {"configuration", json_of(c)}, {"class", json_of(classify(c))}}, out);
    } else if (eq_classify->parsed()) {
      const PlanarConfiguration c = configuration_from_json(parse_json_text(read_text(in_path), in_path));
      emit({{"meta", metadata(0, {{"in", in_path}})}, {"class", json_of(classify(c))}}, out);
    } else if (eq_blocks->parsed()) {
      PlanarConfiguration c;
      json echo;
      if (!in_path.empty()) {
        c = configuration_from_json(parse_json_text(read_text(in_path), in_path));
        echo["in"] = in_path;
      } else {
        const MassVector m = masses_s.empty() ? MassVector({1.0, 1.0}) : masses_from(masses_s);
        if (m.size() != 2)
          throw ValidationError("without --in, blocks uses the two-body closed form and needs 2 masses");
        c = two_body(m[0], m[1]);
        echo["masses"] = m.vector();
      }
      emit({{"meta", metadata(0, echo)}, {"blocks", json_of(hessian_block_check(c))}}, out);
    } else if (cell_solve->parsed()) {
      const double p = exponent_from_flags(cell_p, p_val, cell_q, q_val);
      const CellProfile c = solve_normalized(p, tol);
      const ScalingReport s = verify_scaling(c);
      json echo = {{"p", p}, {"tol", tol}};
      if (cell_q->count())
        echo["q"] = q_val;
      emit({{"meta", cell_meta(0, echo, s)},
            {"profile", json_of(c)},
            {"invariants", json_of(check_invariants(c))},
            {"scaling", json_of(s)}},
           out);
    } else if (cell_verify->parsed()) {
      const json j = parse_json_text(read_text(in_path), in_path);
      const CellProfile c = profile_from_json(j.contains("profile") ? j.at("profile") : j);
      const CellInvariants inv = check_invariants(c);
      const ScalingReport s = verify_scaling(c);
      emit({{"meta", cell_meta(0, {{"in", in_path}}, s)}, {"invariants", json_of(inv)}, {"scaling", json_of(s)}}, out);
      if (!inv.passed)
        return report_error("accuracy", "cell profile failed its invariant suite", 2);
    } else if (ans_energy->parsed() || ans_scan->parsed() || ans_grad->parsed()) {
      RunConfig cfg;
      bool exponent_given = false;
      if (!config_path.empty()) {
        cfg = load_config(config_path);
        exponent_given = config_names_exponent(config_path);
      } else {
        cfg.masses = {1.0, 1.0};
      }
      cfg.quad_tol = quad_tol;
      auto profile = load_profile(cell_path, cfg, exponent_given, cfg.cell_tol);
      cfg.p = profile->p;
      const ScalingReport s = verify_scaling(*profile);
      const ResolvedInstance inst = resolve_instance(cfg, *profile, threads);
      QuadratureSpec qs;
      qs.tolerance = quad_tol;
      json meta = cell_meta(cfg.seed, cfg.echo(), s);
      const json eq_json = {{"source", inst.source},
                            {"zeta", json_of(inst.zeta)},
                            {"mass_factor", inst.absolute.mass_factor}};
      if (ans_energy->parsed()) {
        double w = omega;
        if (!ans_energy_omega->count()) {
          if (cfg.omegas.empty())
            throw ValidationError("no omega: pass --omega or set omega in the configuration");
          w = cfg.omegas.front();
        }
        const Ansatz a = build(profile, inst.zeta, w, cfg.mu, s.energy_slope);
        const EnergyBreakdown e = energy_J(a, qs);
        meta["omega"] = w;
        emit({{"meta", meta},
              {"equilibrium", eq_json},
              {"energy", json_of(e)},
              {"predicted", predicted_energy(a, inst.zeta)},
              {"residual", e.total - predicted_energy(a, inst.zeta)}},
             out);
      } else if (ans_scan->parsed()) {
        std::vector<double> ws = omegas_s.empty() ? cfg.omegas : parse_omegas(omegas_s);
        if (ws.empty())
          ws = default_omegas();
        ScanOptions so;
        so.mu = cfg.mu;
        so.gamma = s.energy_slope;
        so.quadrature = qs;
        so.threads = threads;
        const ScanTable t = expansion_scan(profile, inst.zeta, ws, so);
        const json report = {{"meta", meta}, {"equilibrium", eq_json}, {"scan", json_of(t)}};
        if (ends_with(out, ".csv")) {
          write_text(out, scan_csv(t));
          emit(report, "");
        } else {
          emit(report, out);
        }
      } else {
        std::vector<double> ws = parse_number_list(grad_omegas_s, "omega");
        std::sort(ws.begin(), ws.end(), std::greater<>());
        json rows = json::array();
        std::vector<GradientComparison> gs;
        for (double w : ws) {
          gs.push_back(gradient_expansion_check(profile, inst.zeta, w, cfg.mu, s.energy_slope, qs, threads));
          rows.push_back(json_of(gs.back()));
        }
        json j = {{"meta", meta}, {"equilibrium", eq_json}, {"comparisons", rows}};
        if (gs.size() >= 2)
          j["deviation_exponent"] = deviation_exponent(gs.front(), gs.back());
        emit(j, out);
      }
    } else if (kin_check->parsed()) {
      std::optional<double> po, qo;
      if (kin_p->count())
        po = kp;
      if (kin_q->count())
        qo = kq;
      if (!po && !qo)
        qo = 2.0;
      if (po && qo)
        resolve_exponent(po, qo);
      const PolytropeSpec spec = qo ? make_polytrope(*qo) : polytrope_from_p(*po);
      const GCheck g = g_check(spec, mu_val, kin_tol);
      json j = json_of(g);
      j["meta"] = metadata(0, {{"q", spec.q}, {"p", spec.p}, {"mu", mu_val}, {"quad_tol", kin_tol}});
      j["kappa_q"] = spec.kappa_q;
      emit(j, out);
    } else if (dyn_sim->parsed() || dyn_rig->parsed()) {
      const RunConfig cfg = load_config(config_path);
      const bool has_omega = dyn_sim->parsed() ? dyn_sim_omega->count() > 0 : dyn_rig_omega->count() > 0;
      double w = omega;
      if (!has_omega) {
        if (cfg.omegas.empty())
          throw ValidationError("no omega: pass --omega or set omega in the configuration");
        w = cfg.omegas.front();
      }
      const PlanarConfiguration zeta = literal_zeta(cfg, threads);
      if (dyn_sim->parsed()) {
        if (!(periods > 0.0) || steps_per_period == 0)
          throw ValidationError("periods and steps per period must be positive");
        const double dt = 2.0 * kPi / w / static_cast<double>(steps_per_period);
        const auto steps =
            static_cast<std::size_t>(std::llround(periods * static_cast<double>(steps_per_period)));
        emit_text(trajectory_csv(integrate(releq_initial_conditions(zeta, w), dt, steps, stride)), out);
      } else {
        const Trajectory t = trajectory_from_csv(read_text(in_path), MassVector(cfg.masses));
        json meta = metadata(cfg.seed, cfg.echo());
        meta["omega"] = w;
        emit({{"meta", meta}, {"zeta", json_of(zeta)}, {"rigidity", json_of(rigidity_report(t, zeta, w))}}, out);
      }
    } else if (pipe->parsed()) {
      RunConfig cfg;
      if (!config_path.empty())
        cfg = load_config(config_path);
      else if (!pipe_masses->count())
        throw ValidationError("pipeline needs --masses or --config");
      if (pipe_masses->count()) {
        cfg.masses = parse_number_list(masses_s, "masses");
        (void)MassVector(cfg.masses);
        if (cfg.zeta && cfg.zeta->size() != cfg.masses.size())
          cfg.zeta.reset();
      }
      if (pipe_p_opt->count() || pipe_q_opt->count()) {
        cfg.p = exponent_from_flags(pipe_p_opt, pipe_p, pipe_q_opt, pipe_q);
        cfg.q.reset();
        if (pipe_q_opt->count())
          cfg.q = pipe_q;
      }
      if (pipe_omegas->count())
        cfg.omegas = parse_omegas(omegas_s);
      if (pipe_seed->count())
        cfg.seed = seed;
      if (pipe_starts->count())
        cfg.starts = starts;
      if (pipe_mu_opt->count()) {
        if (!(pipe_mu > 0.0))
          throw ValidationError("mu must be positive");
        cfg.mu = pipe_mu;
      }
      if (pipe_unit->count())
        cfg.mass_unit = mass_unit_s == "cell" ? MassUnit::cell : MassUnit::absolute;
      if (cfg.omegas.empty())
        cfg.omegas = default_omegas();
      emit(run_pipeline(cfg, threads), out);
    }
  } catch (const Error &e) {
    return report_error(e.category(), e.what(), e.exit_code());
  } catch (const std::exception &e) {
    return report_error("internal", e.what(), 2);
  }
  return 0;
}
