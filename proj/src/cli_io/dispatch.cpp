#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bufchem/cli_io.hpp"
#include "bufchem/design.hpp"
#include "bufchem/error.hpp"
#include "bufchem/multiplicity.hpp"
#include "bufchem/stability.hpp"
#include "emit.hpp"

namespace bufchem {

namespace {

using emit::json;

std::string want_format(const OutputOptions& opts, const std::string& fallback,
                        std::initializer_list<const char*> allowed) {
  const std::string f = opts.format.value_or(fallback);
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw Error(ErrorKind::Config, "format '" + f + "' is not available for this command");
}

json header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["model"] = emit::model_json(cfg.model);
  j["yield"] = cfg.yield;
  j["S_in"] = cfg.S_in;
  return j;
}

const char* case_name(PortraitCase c) {
  switch (c) {
    case PortraitCase::Case1: return "Case1";
    case PortraitCase::Case2: return "Case2";
    case PortraitCase::Case3: return "Case3";
  }
  return "Case1";
}

const char* tag_name(SingleTag t) {
  switch (t) {
    case SingleTag::WashoutAttracting: return "WashoutAttracting";
    case SingleTag::WashoutSaddle: return "WashoutSaddle";
    case SingleTag::PositiveAttracting: return "PositiveAttracting";
    case SingleTag::PositiveSaddle: return "PositiveSaddle";
  }
  return "WashoutSaddle";
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::BufferPositive: return "BufferPositive";
    case Branch::BufferWashout: return "BufferWashout";
    case Branch::BufferSaddle: return "BufferSaddle";
  }
  return "BufferWashout";
}

const char* case_name(MultiplicityCase c) {
  switch (c) {
    case MultiplicityCase::CaseI: return "CaseI";
    case MultiplicityCase::CaseII_sub1: return "CaseII_sub1";
    case MultiplicityCase::CaseII_sub2: return "CaseII_sub2";
    case MultiplicityCase::CaseII_sub3: return "CaseII_sub3";
  }
  return "CaseI";
}

void cmd_kinetics(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  want_format(opts, "json", {"json"});
  const double D = dilution(cfg);
  json j = header("kinetics", cfg);
  j["D"] = D;
  j["mu_S_in"] = eval_mu(cfg.model, cfg.S_in);
  const auto lam = lambda_interval(cfg.model, D);
  j["lambda"] = {{"empty", !lam.has_value()},
                 {"lower", lam ? json(lam->lower) : json(nullptr)},
                 {"upper", lam ? emit::number_or_null(lam->upper) : json(nullptr)}};
  const auto top = peak(cfg.model);
  j["peak"] = top ? json{{"s_hat", top->s_hat}, {"mu_hat", top->mu_hat}} : json(nullptr);
  emit::artifact(opts, "kinetics.json", emit::dump(j), out);
}

void cmd_classify(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  want_format(opts, "json", {"json"});
  const auto params = single_params(cfg);
  const auto portrait = classify_portrait(params);
  json j = header("classify", cfg);
  j["D"] = params.D;
  j["case"] = case_name(portrait.kind);
  j["equilibria"] = json::array();
  for (const auto& eq : portrait.equilibria) {
    j["equilibria"].push_back({{"S", eq.S}, {"X", eq.X * cfg.yield}, {"tag", tag_name(eq.tag)}});
  }
  emit::artifact(opts, "classify.json", emit::dump(j), out);
}

void cmd_equilibria(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  want_format(opts, "json", {"json"});
  const auto bc = buffered_config(cfg);
  const BufferGeometry geo(bc);
  json j = header("equilibria", cfg);
  j["D"] = bc.D;
  j["alpha"] = bc.alpha;
  j["r"] = bc.r;
  j["s2_star"] = geo.s2_star();
  j["underline_s"] = geo.underline_s();
  j["case"] = case_name(classify_case(bc.model, bc.S_in, bc.D, bc.alpha));
  j["equilibria"] = json::array();
  for (const auto& eq : find_equilibria(bc)) {
    json e{{"branch", branch_name(eq.branch)},
           {"S1", eq.S1()},
           {"X1", eq.X1() * cfg.yield},
           {"S2", eq.S2()},
           {"X2", eq.X2() * cfg.yield},
           {"eigenvalues", {eq.eigenvalues(0), eq.eigenvalues(1), eq.eigenvalues(2),
                            eq.eigenvalues(3)}},
           {"tag", emit::tag_name(eq.tag)},
           {"unstable_dim", eq.tag.unstable_dim}};
    j["equilibria"].push_back(e);
  }
  emit::artifact(opts, "equilibria.json", emit::dump(j), out);
}

std::vector<double> alpha_grid(const RunConfig& cfg, double D) {
  const double alpha_top = eval_mu(cfg.model, cfg.S_in) / D;
  SweepSpec s{alpha_top * 1e-3, alpha_top * (1.0 - 1e-6)};
  if (cfg.sweep) s = *cfg.sweep;
  std::vector<double> grid;
  if (s.points == 1) return {s.alpha_min};
  for (int k = 0; k < s.points; ++k) {
    const double t = double(k) / double(s.points - 1);
    grid.push_back(s.log_spaced ? s.alpha_min * std::pow(s.alpha_max / s.alpha_min, t)
                                : s.alpha_min + (s.alpha_max - s.alpha_min) * t);
  }
  return grid;
}

void cmd_domain(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  const std::string format = want_format(opts, "csv", {"csv", "json"});
  const double D = dilution(cfg);
  const auto curve = stable_domain_curve(cfg.model, cfg.S_in, D, alpha_grid(cfg, D));
  json j = header("domain", cfg);
  j["D"] = D;
  j["points"] = curve.points.size();
  j["ul_alpha"] = emit::number_or_null(curve.ul_alpha);
  j["jump"] = curve.jump ? json{{"left", curve.jump->first}, {"right", curve.jump->second}}
                         : json(nullptr);
  std::vector<std::vector<double>> rows;
  for (const auto& p : curve.points) rows.push_back({p.alpha, p.r_bar});
  if (format == "json") {
    j["curve"] = json::array();
    for (const auto& p : curve.points) j["curve"].push_back({{"alpha", p.alpha}, {"r_bar", p.r_bar}});
    emit::artifact(opts, "domain.json", emit::dump(j), out);
    return;
  }
  emit::artifact(opts, "domain.csv", emit::csv({"alpha", "r_bar"}, rows), out);
  emit::sidecar(opts, "domain.json", emit::dump(j));
}

void cmd_design(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  const std::string format = want_format(opts, "csv", {"csv", "json"});
  const double D = dilution(cfg);
  const DesignSpec spec = cfg.design.value_or(DesignSpec{});
  const auto rep = min_buffer_volume_scenario2(cfg.model, cfg.S_in, D);

  const double upper = *lambda_interval(cfg.model, D)->upper;
  if (!(spec.S_in_max > upper)) {
    throw Error(ErrorKind::Config, "design.S_in_max must exceed lambda+(D)");
  }
  std::vector<double> grid;
  for (int k = 1; k <= spec.points; ++k) {
    grid.push_back(upper + (spec.S_in_max - upper) * double(k) / double(spec.points));
  }
  const auto rows = design_sweep(cfg.model, D, grid);

  json j = header("design", cfg);
  j["D"] = D;
  j["delta_v_inf"] = rep.delta_v_inf();
  j["v2_inf"] = rep.v2_inf();
  j["d2_star"] = rep.d2_star();
  j["s_bar"] = rep.s_bar();
  j["varphi_max"] = rep.varphi_max();
  j["psi_max"] = rep.psi_max();
  if (spec.v2) {
    json comps = json::array();
    for (const auto& c : rep.d2_interval_for(*spec.v2).components()) comps.push_back({c.lo, c.hi});
    j["d2_interval"] = {{"v2", *spec.v2}, {"components", comps}};
  } else {
    j["d2_interval"] = nullptr;
  }
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) table.push_back({r.S_in, r.delta_v_inf, r.v2_inf});
  if (format == "json") {
    j["sweep"] = json::array();
    for (const auto& r : rows) {
      j["sweep"].push_back({{"S_in", r.S_in}, {"delta_v_inf", r.delta_v_inf}, {"v2_inf", r.v2_inf}});
    }
    emit::artifact(opts, "design.json", emit::dump(j), out);
    return;
  }
  emit::artifact(opts, "design.csv", emit::csv({"S_in", "delta_v_inf", "v2_inf"}, table), out);
  emit::sidecar(opts, "design.json", emit::dump(j));
}

template <int N>
std::string trajectory_json(const RunConfig& cfg, const Trajectory<N>& traj,
                            const std::vector<std::string>& columns) {
  json j = header("simulate", cfg);
  j["columns"] = columns;
  j["accepted_steps"] = traj.accepted_steps;
  j["rejected_steps"] = traj.rejected_steps;
  j["rows"] = json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    json row = json::array({traj.times[i]});
    for (int k = 0; k < N; ++k) row.push_back(k % 2 ? traj.states[i](k) * cfg.yield : traj.states[i](k));
    j["rows"].push_back(row);
  }
  return emit::dump(j);
}

void cmd_simulate(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  const std::string format = want_format(opts, "csv", {"csv", "json"});
  const bool buffered = cfg.buffered.has_value();
  const int dim = buffered ? 4 : 2;
  const double D = dilution(cfg);

  std::vector<double> x0;
  if (cfg.simulate) {
    x0 = cfg.simulate->initial;
    if (int(x0.size()) != dim) {
      throw Error(ErrorKind::Config,
                  buffered ? "simulate: buffered runs need S1, X1, S2, X2"
                           : "simulate: single-tank runs need S, X");
    }
    for (int k = 1; k < dim; k += 2) x0[k] /= cfg.yield;
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < dim; ++k) x0.push_back(cfg.S_in * unit(rng));
  }
  IntegratorSettings settings = cfg.integrator.value_or(IntegratorSettings{});
  if (!cfg.integrator) settings.t_end = 200.0 / D;

  std::ostringstream os;
  if (buffered) {
    const auto traj = integrate(buffered_config(cfg), Eigen::Vector4d(x0[0], x0[1], x0[2], x0[3]),
                                settings);
    if (format == "json") {
      emit::artifact(opts, "simulate.json",
                     trajectory_json<4>(cfg, traj, {"t", "S1", "X1", "S2", "X2"}), out);
      return;
    }
    write_csv(os, traj, cfg.yield);
  } else {
    const auto traj = integrate(single_params(cfg), Eigen::Vector2d(x0[0], x0[1]), settings);
    if (format == "json") {
      emit::artifact(opts, "simulate.json", trajectory_json<2>(cfg, traj, {"t", "S", "X"}), out);
      return;
    }
    write_csv(os, traj, cfg.yield);
  }
  emit::artifact(opts, "simulate.csv", os.str(), out);
}

void cmd_audit(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  want_format(opts, "json", {"json"});
  if (!cfg.audit) throw Error(ErrorKind::Config, "audit: section required by this command");
  const auto params = single_params(cfg);
  const auto& a = *cfg.audit;
  Topology topo = a.topology == "serial"
                      ? Topology(SerialTopology{a.volume_fractions})
                      : Topology(ParallelTopology{a.volume_fractions, a.flow_fractions});
  const auto flags = network_washout_audit(params, topo);
  json j = header("audit", cfg);
  j["D"] = params.D;
  j["topology"] = a.topology;
  const auto lam = lambda_interval(params.model, params.D);
  j["S_in_in_lambda"] = lam && lam->contains(params.S_in);
  j["vessels"] = json::array();
  bool any = false;
  for (const auto& f : flags) {
    j["vessels"].push_back({{"dilution", f.dilution}, {"washout_attracting", f.washout_attracting}});
    any = any || f.washout_attracting;
  }
  j["any_washout_attracting"] = any;
  emit::artifact(opts, "audit.json", emit::dump(j), out);
}

void report(std::ostream& err, ErrorKind kind, const std::string& message) {
  json j{{"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}};
  err << j.dump() << "\n";
}

}  // namespace

int dispatch(const std::string& command, const RunConfig& cfg, const OutputOptions& opts,
             std::ostream& out, std::ostream& err) {
  try {
    if (command == "kinetics") {
      cmd_kinetics(cfg, opts, out);
    } else if (command == "classify") {
      cmd_classify(cfg, opts, out);
    } else if (command == "equilibria") {
      cmd_equilibria(cfg, opts, out);
    } else if (command == "domain") {
      cmd_domain(cfg, opts, out);
    } else if (command == "design") {
      cmd_design(cfg, opts, out);
    } else if (command == "simulate") {
      cmd_simulate(cfg, opts, out);
    } else if (command == "audit") {
      cmd_audit(cfg, opts, out);
    } else {
      throw Error(ErrorKind::Config, "unknown command '" + command + "'");
    }
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return e.kind() == ErrorKind::Config ? 2 : 1;
  } catch (const std::exception& e) {
    report(err, ErrorKind::Consistency, e.what());
    return 1;
  }
  return 0;
}

int run_command(const std::string& command, const std::filesystem::path& config_path,
                const OutputOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return e.kind() == ErrorKind::Config ? 2 : 1;
  }
  return dispatch(command, *cfg, opts, out, err);
}

}  // namespace bufchem
