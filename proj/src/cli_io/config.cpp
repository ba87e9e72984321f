#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bufchem/cli_io.hpp"
#include "bufchem/error.hpp"

namespace bufchem {

namespace {

using boost::property_tree::ptree;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, key + ": " + what);
}

double to_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    fail(key, "expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(to_number(key, b == std::string::npos ? "" : item.substr(b, e - b + 1)));
  }
  if (out.empty()) fail(key, "expected a comma-separated list of numbers");
  return out;
}

// One section of the file, with strict key bookkeeping.
class Section {
 public:
  Section(std::string name, const ptree* node) : name_(std::move(name)), node_(node) {}

  bool present() const { return node_ != nullptr; }
  std::string key(const std::string& k) const { return name_.empty() ? k : name_ + "." + k; }

  bool has(const std::string& k) const { return node_ && node_->find(k) != node_->not_found(); }

  std::optional<std::string> text(const std::string& k) {
    allowed_.insert(k);
    if (!has(k)) return std::nullopt;
    const auto& child = node_->find(k)->second;
    if (!child.empty()) fail(key(k), "expected a value, found a section");
    return child.data();
  }

  std::optional<double> number(const std::string& k) {
    const auto t = text(k);
    if (!t) return std::nullopt;
    return to_number(key(k), *t);
  }

  double required(const std::string& k) {
    const auto v = number(k);
    if (!v) fail(key(k), "missing required key");
    return *v;
  }

  double positive(const std::string& k) {
    const double v = required(k);
    if (!(v > 0.0)) fail(key(k), "parameter must be strictly positive");
    return v;
  }

  std::optional<double> optional_positive(const std::string& k) {
    const auto v = number(k);
    if (v && !(*v > 0.0)) fail(key(k), "parameter must be strictly positive");
    return v;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, child] : *node_) {
      if (!allowed_.count(k)) fail(key(k), "unknown key");
    }
  }

 private:
  std::string name_;
  const ptree* node_;
  std::set<std::string> allowed_;
};

GrowthModel parse_growth(Section& s, double& yield) {
  if (!s.present()) fail("growth", "missing required section");
  const auto type = s.text("type");
  if (!type) fail(s.key("type"), "missing required key");
  yield = s.optional_positive("yield").value_or(1.0);
  if (*type == "haldane") {
    const double mu_bar = s.positive("mu_bar");
    const double K = s.positive("K");
    const double K_I = s.positive("K_I");
    return GrowthModel::haldane(mu_bar, K, K_I);
  }
  if (*type == "monod") {
    const double mu_max = s.positive("mu_max");
    const double K_s = s.positive("K_s");
    return GrowthModel::monod(mu_max, K_s);
  }
  fail(s.key("type"), "unknown growth type '" + *type + "' (haldane | monod)");
}

RunConfig build(const ptree& root) {
  static const std::set<std::string> known{"growth",   "operating", "buffered", "integrator",
                                           "sweep",    "simulate",  "audit",    "design"};
  auto section = [&](const std::string& name) {
    const auto it = root.find(name);
    return Section(name, it == root.not_found() ? nullptr : &it->second);
  };

  Section top("", &root);
  for (const auto& [k, child] : root) {
    if (!child.empty() && !known.count(k)) fail(k, "unknown section");
    if (child.empty() && k != "seed") fail(k, "unknown key");
  }
  std::uint64_t seed = 0;
  if (const auto t = top.text("seed")) {
    const auto res = std::from_chars(t->data(), t->data() + t->size(), seed);
    if (t->empty() || res.ec != std::errc() || res.ptr != t->data() + t->size()) {
      fail("seed", "expected a non-negative integer, got '" + *t + "'");
    }
  }

  Section growth = section("growth");
  double yield = 1.0;
  RunConfig cfg{.seed = seed, .model = parse_growth(growth, yield)};
  growth.finish();
  cfg.yield = yield;

  Section op = section("operating");
  if (!op.present()) fail("operating", "missing required section");
  cfg.S_in = op.positive("S_in");
  const auto D = op.optional_positive("D");
  const auto Q = op.optional_positive("Q");
  const auto V = op.optional_positive("V");
  if (D && (Q || V)) fail("operating", "give either D or the pair Q, V, not both");
  if (Q.has_value() != V.has_value()) fail("operating", "Q and V must be given together");
  if (D) cfg.D = *D;
  if (Q) cfg.D = *Q / *V;
  op.finish();

  Section buf = section("buffered");
  if (buf.present()) {
    BufferedSpec spec;
    spec.alpha = buf.optional_positive("alpha");
    spec.r = buf.optional_positive("r");
    const auto Q1 = buf.number("Q1");
    const auto Q2 = buf.number("Q2");
    const auto V1 = buf.number("V1");
    const auto V2 = buf.number("V2");
    const bool any_param = spec.alpha || spec.r;
    const bool any_phys = Q1 || Q2 || V1 || V2;
    if (any_param && any_phys) {
      fail("buffered", "conflict: give either alpha/r or Q1/Q2/V1/V2, not both");
    }
    if (any_param && !(spec.alpha && spec.r)) fail("buffered", "alpha and r must be given together");
    if (any_phys) {
      if (!(Q1 && Q2 && V1 && V2)) fail("buffered", "Q1, Q2, V1 and V2 must all be given");
      spec.physical = PhysicalSplit{*Q1, *Q2, *V1, *V2};
    }
    if (!any_param && !any_phys) fail("buffered", "section is empty");
    buf.finish();
    cfg.buffered = spec;
  }

  Section integ = section("integrator");
  if (integ.present()) {
    IntegratorSettings s;
    s.rel_tol = integ.number("rel_tol").value_or(s.rel_tol);
    s.abs_tol = integ.number("abs_tol").value_or(s.abs_tol);
    s.max_step = integ.number("max_step").value_or(s.max_step);
    s.t_end = integ.number("t_end").value_or(s.t_end);
    integ.finish();
    try {
      validate(s);
    } catch (const Error& e) {
      fail("integrator", e.what());
    }
    cfg.integrator = s;
  }

  Section sweep = section("sweep");
  if (sweep.present()) {
    SweepSpec s{sweep.positive("alpha_min"), sweep.positive("alpha_max")};
    if (const auto n = sweep.number("points")) {
      if (*n < 1 || *n != std::floor(*n)) fail(sweep.key("points"), "expected a positive integer");
      s.points = int(*n);
    }
    if (const auto sp = sweep.text("spacing")) {
      if (*sp != "log" && *sp != "linear") fail(sweep.key("spacing"), "expected log or linear");
      s.log_spaced = *sp == "log";
    }
    if (!(s.alpha_max > s.alpha_min) && s.points > 1) {
      fail("sweep", "alpha_max must exceed alpha_min");
    }
    sweep.finish();
    cfg.sweep = s;
  }

  Section design = section("design");
  if (design.present()) {
    DesignSpec s;
    s.S_in_max = design.optional_positive("S_in_max").value_or(s.S_in_max);
    if (const auto n = design.number("points")) {
      if (*n < 1 || *n != std::floor(*n)) fail(design.key("points"), "expected a positive integer");
      s.points = int(*n);
    }
    s.v2 = design.optional_positive("v2");
    design.finish();
    cfg.design = s;
  }

  Section sim = section("simulate");
  if (sim.present()) {
    SimulateSpec s;
    const bool single_keys = sim.has("S") || sim.has("X");
    const std::vector<std::string> keys =
        single_keys ? std::vector<std::string>{"S", "X"}
                    : std::vector<std::string>{"S1", "X1", "S2", "X2"};
    for (const auto& k : keys) {
      const double v = sim.required(k);
      if (v < 0.0) fail(sim.key(k), "initial state must be >= 0");
      s.initial.push_back(v);
    }
    s.eps = sim.optional_positive("eps").value_or(s.eps);
    sim.finish();
    cfg.simulate = s;
  }

  Section audit = section("audit");
  if (audit.present()) {
    AuditSpec s;
    const auto topo = audit.text("topology");
    if (!topo) fail(audit.key("topology"), "missing required key");
    if (*topo != "serial" && *topo != "parallel") {
      fail(audit.key("topology"), "expected serial or parallel");
    }
    s.topology = *topo;
    const auto vf = audit.text("volume_fractions");
    if (!vf) fail(audit.key("volume_fractions"), "missing required key");
    s.volume_fractions = to_list(audit.key("volume_fractions"), *vf);
    const auto ff = audit.text("flow_fractions");
    if (s.topology == "parallel") {
      if (!ff) fail(audit.key("flow_fractions"), "missing required key for parallel topology");
      s.flow_fractions = to_list(audit.key("flow_fractions"), *ff);
    } else if (ff) {
      fail(audit.key("flow_fractions"), "not used by the serial topology");
    }
    audit.finish();
    cfg.audit = s;
  }
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  ptree root;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Config, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  try {
    return build(root);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, e.what());
  }
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

double dilution(const RunConfig& cfg) {
  if (cfg.buffered && cfg.buffered->physical) {
    const auto& p = *cfg.buffered->physical;
    const double D = (p.Q1 + p.Q2) / (p.V1 + p.V2);
    if (cfg.D && std::abs(*cfg.D - D) > 1e-12 * D) {
      throw Error(ErrorKind::Config, "operating.D disagrees with the buffered Q/V split");
    }
    return D;
  }
  if (!cfg.D) throw Error(ErrorKind::Config, "operating: give D or the pair Q, V");
  return *cfg.D;
}

SingleParams single_params(const RunConfig& cfg) {
  SingleParams p{cfg.model, cfg.S_in, dilution(cfg)};
  validate(p);
  return p;
}

BufferedConfig buffered_config(const RunConfig& cfg) {
  if (!cfg.buffered) throw Error(ErrorKind::Config, "buffered: section required by this command");
  const auto& b = *cfg.buffered;
  if (b.physical) {
    const auto& p = *b.physical;
    return from_physical(p.Q1, p.Q2, p.V1, p.V2, cfg.S_in, cfg.model);
  }
  BufferedConfig c{cfg.model, cfg.S_in, dilution(cfg), *b.alpha, *b.r, std::nullopt};
  validate(c);
  return c;
}

}  // namespace bufchem
