#include "fracdecay/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fracdecay/expreval.hpp"

namespace fracdecay::scenario {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw SchemaError(path.empty() ? key : path + "." + key, "missing key");
  return obj.at(key);
}

double require_number(const json& obj, const std::string& key,
                      const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number())
    throw SchemaError(path.empty() ? key : path + "." + key,
                      "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return obj.at(key).get<double>();
}

std::string require_string(const json& obj, const std::string& key,
                           const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string())
    throw SchemaError(path.empty() ? key : path + "." + key,
                      "expected a string");
  return v.get<std::string>();
}

// coefficient entries may be numbers or expressions in x
space::Field field_entry(const json& obj, const std::string& key,
                         const std::string& path, const space::Grid1D& grid) {
  const json& v = require(obj, key, path);
  const std::string full = path.empty() ? key : path + "." + key;
  if (v.is_number()) return space::Field(grid.nx, v.get<double>());
  if (v.is_string()) {
    try {
      return expreval::eval_on_grid(v.get<std::string>(), grid);
    } catch (const expreval::ExprError& err) {
      throw SchemaError(full, err.what());
    }
  }
  throw SchemaError(full, "expected a number or an expression string");
}

double summability_entry(const json& obj, const std::string& key,
                         const std::string& path) {
  const json& v = require(obj, key, path);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw SchemaError(path + "." + key, "expected a number or \"inf\"");
  }
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return v.get<double>();
}

model::Nonlinearity nonlinearity_entry(const json& nl_cfg) {
  const std::string name = require_string(nl_cfg, "name", "nonlinearity");
  model::Nonlinearity nl;
  if (name == "cubic") {
    nl = model::Nonlinearity::cubic();
  } else if (name == "quartic") {
    nl = model::Nonlinearity::quartic();
  } else if (name == "cubic_linear") {
    nl = model::Nonlinearity::cubic_linear();
  } else if (name == "custom") {
    for (const char* key : {"f", "fp", "fpp"})
      if (!nl_cfg.contains(key))
        throw SchemaError(std::string("nonlinearity.") + key,
                          "custom nonlinearity needs f, fp, fpp expressions");
    try {
      expreval::Expr f(nl_cfg.at("f").get<std::string>());
      expreval::Expr fp(nl_cfg.at("fp").get<std::string>());
      expreval::Expr fpp(nl_cfg.at("fpp").get<std::string>());
      nl = model::Nonlinearity::custom([f](double v) { return f(v); },
                                       [fp](double v) { return fp(v); },
                                       [fpp](double v) { return fpp(v); },
                                       {});
    } catch (const expreval::ExprError& err) {
      throw SchemaError("nonlinearity.f", err.what());
    }
    nl.name = "custom";
  } else {
    throw SchemaError("nonlinearity.name",
                      "expected cubic|quartic|cubic_linear|custom");
  }
  if (nl_cfg.contains("growth")) {
    const json& g = nl_cfg.at("growth");
    nl.growth.c2 = number_or(g, "c2", nl.growth.c2);
    nl.growth.C2 = number_or(g, "C2", nl.growth.C2);
    nl.growth.kappa2 = number_or(g, "kappa2", nl.growth.kappa2);
  } else if (name == "custom") {
    throw SchemaError("nonlinearity.growth",
                      "custom nonlinearity needs growth metadata");
  }
  return nl;
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::exception& err) {
    throw SchemaError("<root>", std::string("not valid JSON: ") + err.what());
  }
  if (!cfg.is_object()) throw SchemaError("<root>", "expected an object");

  const json& domain = require(cfg, "domain", "");
  const double a = require_number(domain, "a", "domain");
  const double b = require_number(domain, "b", "domain");
  const double nx_raw = require_number(domain, "nx", "domain");
  if (!(a < b)) throw SchemaError("domain.b", "need a < b");
  if (nx_raw < 3 || nx_raw != std::floor(nx_raw))
    throw SchemaError("domain.nx", "need an integer >= 3");
  auto grid = space::Grid1D::make(a, b, static_cast<std::size_t>(nx_raw));

  const json& time_cfg = require(cfg, "time", "");
  const double T = require_number(time_cfg, "T", "time");
  const double nt_raw = require_number(time_cfg, "nt", "time");
  if (!(T > 0.0)) throw SchemaError("time.T", "need T > 0");
  if (nt_raw < 1 || nt_raw != std::floor(nt_raw))
    throw SchemaError("time.nt", "need an integer >= 1");
  std::string mesh = "uniform";
  if (time_cfg.contains("mesh")) mesh = time_cfg.at("mesh").get<std::string>();
  double gamma = number_or(time_cfg, "gamma", 1.0);
  fracops::TimeGrid tgrid = fracops::TimeGrid::uniform(T, 1);
  if (mesh == "uniform") {
    tgrid =
        fracops::TimeGrid::uniform(T, static_cast<std::size_t>(nt_raw));
  } else if (mesh == "graded") {
    if (!(gamma >= 1.0)) throw SchemaError("time.gamma", "need gamma >= 1");
    tgrid = fracops::TimeGrid::graded(T, static_cast<std::size_t>(nt_raw),
                                      gamma);
  } else {
    throw SchemaError("time.mesh", "expected uniform|graded");
  }

  const double alpha = require_number(cfg, "alpha", "");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw SchemaError("alpha", "need alpha in (0,1]");

  const json& op_cfg = require(cfg, "operator", "");
  space::Field D = field_entry(op_cfg, "D", "operator", grid);
  space::Field d = field_entry(op_cfg, "d", "operator", grid);
  const std::string bc_name = require_string(op_cfg, "bc", "operator");
  space::BoundaryCondition bc;
  if (bc_name == "dirichlet")
    bc.kind = space::BcKind::Dirichlet;
  else if (bc_name == "neumann")
    bc.kind = space::BcKind::Neumann;
  else
    throw SchemaError("operator.bc", "expected dirichlet|neumann");
  if (op_cfg.contains("a_inf")) {
    const json& ai = op_cfg.at("a_inf");
    if (!ai.is_array() || ai.size() != 2)
      throw SchemaError("operator.a_inf", "expected [left, right]");
    bc.left = ai.at(0).get<double>();
    bc.right = ai.at(1).get<double>();
  }
  std::optional<space::EllipticOp> op;
  try {
    op.emplace(std::move(D), std::move(d), bc, grid);
  } catch (const std::invalid_argument& err) {
    throw SchemaError("operator.D", err.what());
  }

  const json& coef = require(cfg, "coefficients", "");
  space::Field p = field_entry(coef, "p", "coefficients", grid);
  space::Field q = field_entry(coef, "q", "coefficients", grid);
  const double r_exp = summability_entry(coef, "r_exp", "coefficients");
  const double s_exp = number_or(coef, "s_exp", 2.0);
  if (!(s_exp >= 2.0))
    throw SchemaError("coefficients.s_exp", "s_exp >= 2 required");

  model::Nonlinearity nl = nonlinearity_entry(require(cfg, "nonlinearity", ""));

  const json& src_cfg = require(cfg, "source", "");
  model::SourceTerm source;
  source.r_inf = field_entry(src_cfg, "r_inf", "source", grid);
  if (src_cfg.contains("perturbation")) {
    const json& pert = src_cfg.at("perturbation");
    const std::string type = require_string(pert, "type", "source.perturbation");
    if (type == "none") {
      source.kind = model::SourceTerm::Kind::None;
    } else if (type == "power" || type == "exponential") {
      source.kind = type == "power" ? model::SourceTerm::Kind::Power
                                    : model::SourceTerm::Kind::Exponential;
      source.amplitude =
          require_number(pert, "amplitude", "source.perturbation");
      if (type == "power")
        source.exponent =
            require_number(pert, "exponent", "source.perturbation");
      else
        source.rate = require_number(pert, "rate", "source.perturbation");
      // built-in perturbation shape: first Dirichlet mode, unit L2 norm
      space::Field prof(grid.nx);
      for (std::size_t i = 0; i < grid.nx; ++i)
        prof[i] = std::sin(3.14159265358979323846 * (grid.x(i) - a) / (b - a));
      const double nrm = space::norm_L2(prof, grid);
      for (auto& v : prof) v /= nrm;
      source.profile = std::move(prof);
    } else {
      throw SchemaError("source.perturbation.type",
                        "expected none|power|exponential");
    }
  }

  const json& init = require(cfg, "initial", "");
  const std::string mode = require_string(init, "mode", "initial");
  if (mode != "steady_plus")
    throw SchemaError("initial.mode", "expected steady_plus");
  const double radius = require_number(init, "radius", "initial");
  const std::string profile_expr = require_string(init, "profile", "initial");
  try {
    expreval::Expr probe(profile_expr);
    (void)probe(0.5 * (a + b));
  } catch (const expreval::ExprError& err) {
    throw SchemaError("initial.profile", err.what());
  }

  // normalization (f(0) = f'(0) = 0) folds into q and r
  auto normalized = model::normalize(nl, p, q, source);

  Scenario sc{
      model::Problem{grid, std::move(*op), alpha, std::move(p),
                     std::move(normalized.q), std::move(normalized.nl),
                     std::move(normalized.source), bc,
                     space::Field(grid.nx, 0.0), std::move(tgrid), r_exp,
                     s_exp},
      {},
      0,
      false,
      radius,
      profile_expr,
      {},
  };

  if (cfg.contains("verify")) {
    const json& v = cfg.at("verify");
    if (v.contains("theorems"))
      for (const auto& th : v.at("theorems"))
        sc.verify.theorems.push_back(th.get<std::string>());
    sc.verify.s = static_cast<int>(number_or(v, "s", 1));
    if (sc.verify.s != 0 && sc.verify.s != 1)
      throw SchemaError("verify.s", "s in {0,1}");
    if (v.contains("regime"))
      sc.verify.regime = v.at("regime").get<std::string>();
    if (sc.verify.regime != "auto" && sc.verify.regime != "lo" &&
        sc.verify.regime != "hi" && sc.verify.regime != "between")
      throw SchemaError("verify.regime", "expected auto|lo|hi|between");
    sc.verify.beta_rt = number_or(v, "beta_rt", 1.0);
    sc.verify.t0 = number_or(v, "t0", 0.0);
    if (v.contains("rt_square_integrable"))
      sc.verify.rt_square_integrable =
          v.at("rt_square_integrable").get<bool>();
  } else {
    sc.verify.theorems = {"decay_usim"};
  }

  if (cfg.contains("seed")) sc.seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("history")) {
    const std::string h = cfg.at("history").get<std::string>();
    if (h == "fast")
      sc.fast_history = true;
    else if (h != "direct")
      throw SchemaError("history", "expected direct|fast");
  }
  if (cfg.contains("sweep") && cfg.at("sweep").contains("alphas"))
    for (const auto& av : cfg.at("sweep").at("alphas"))
      sc.sweep_alphas.push_back(av.get<double>());

  if (cfg.contains("gronwall")) {
    const json& g = cfg.at("gronwall");
    sc.gr_alpha = number_or(g, "alpha", sc.gr_alpha);
    sc.gr_c0 = number_or(g, "c0", sc.gr_c0);
    sc.gr_eta0 = number_or(g, "eta0", sc.gr_eta0);
    sc.gr_phi0 = number_or(g, "phi0", sc.gr_phi0);
    sc.gr_c1 = number_or(g, "c1", sc.gr_c1);
    if (g.contains("phi")) sc.gr_phi_kind = g.at("phi").get<std::string>();
  }
  if (cfg.contains("mlf")) {
    const json& m = cfg.at("mlf");
    if (m.contains("alphas")) {
      sc.mlf_alphas.clear();
      for (const auto& av : m.at("alphas"))
        sc.mlf_alphas.push_back(av.get<double>());
    }
    sc.mlf_x_min = number_or(m, "x_min", sc.mlf_x_min);
    sc.mlf_x_max = number_or(m, "x_max", sc.mlf_x_max);
    sc.mlf_count =
        static_cast<std::size_t>(number_or(m, "count", sc.mlf_count));
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("<file>", "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::optional<std::string> builtin_config(const std::string& name) {
  // the three oracle configurations of the acceptance suite plus the
  // no-smallness and forced variants
  if (name == "linear-heat") {
    return R"({
      "domain": {"a": 0.0, "b": 1.0, "nx": 200},
      "time": {"T": 1.0, "nt": 2000, "mesh": "uniform"},
      "alpha": 1.0,
      "operator": {"D": 1.0, "d": 0.0, "bc": "dirichlet", "a_inf": [0.0, 0.0]},
      "coefficients": {"p": 0.0, "q": -1.0, "r_exp": "inf", "s_exp": 2},
      "nonlinearity": {"name": "cubic"},
      "source": {"r_inf": 0.0, "perturbation": {"type": "none"}},
      "initial": {"mode": "steady_plus", "profile": "sin(pi*x)", "radius": 0.1},
      "verify": {"theorems": ["decay_usim", "decay_ut"], "s": 0,
                 "regime": "lo"},
      "seed": 1
    })";
  }
  if (name == "linear-subdiffusion") {
    return R"({
      "domain": {"a": 0.0, "b": 1.0, "nx": 200},
      "time": {"T": 1000.0, "nt": 4000, "mesh": "graded", "gamma": 3.0},
      "alpha": 0.6,
      "operator": {"D": 1.0, "d": 0.0, "bc": "dirichlet", "a_inf": [0.0, 0.0]},
      "coefficients": {"p": 0.0, "q": -1.0, "r_exp": "inf", "s_exp": 2},
      "nonlinearity": {"name": "cubic"},
      "source": {"r_inf": 0.0, "perturbation": {"type": "none"}},
      "initial": {"mode": "steady_plus", "profile": "sin(pi*x)", "radius": 0.1},
      "verify": {"theorems": ["decay_usim"], "s": 0, "regime": "lo"},
      "seed": 1
    })";
  }
  if (name == "forced-subdiffusion") {
    return R"({
      "domain": {"a": 0.0, "b": 1.0, "nx": 200},
      "time": {"T": 1000.0, "nt": 4000, "mesh": "graded", "gamma": 3.0},
      "alpha": 0.6,
      "operator": {"D": 1.0, "d": 0.0, "bc": "dirichlet", "a_inf": [0.0, 0.0]},
      "coefficients": {"p": 0.0, "q": -1.0, "r_exp": "inf", "s_exp": 2},
      "nonlinearity": {"name": "cubic"},
      "source": {"r_inf": 0.0,
                 "perturbation": {"type": "power", "amplitude": 1.0,
                                   "exponent": 0.6}},
      "initial": {"mode": "steady_plus", "profile": "sin(pi*x)",
                   "radius": 0.0},
      "verify": {"theorems": ["decay_usim"], "s": 0, "regime": "lo"},
      "seed": 1
    })";
  }
  if (name == "allen-cahn-1d") {
    return R"({
      "domain": {"a": 0.0, "b": 1.0, "nx": 200},
      "time": {"T": 100.0, "nt": 2000, "mesh": "graded", "gamma": 3.0},
      "alpha": 0.5,
      "operator": {"D": 1.0, "d": 0.0, "bc": "dirichlet", "a_inf": [0.0, 0.0]},
      "coefficients": {"p": 1.0, "q": -1.0, "r_exp": "inf", "s_exp": 2},
      "nonlinearity": {"name": "cubic"},
      "source": {"r_inf": 0.0, "perturbation": {"type": "none"}},
      "initial": {"mode": "steady_plus", "profile": "sin(pi*x)", "radius": 0.1},
      "verify": {"theorems": ["decay_usim"], "s": 1, "regime": "hi"},
      "seed": 1
    })";
  }
  if (name == "allen-cahn-nosmallness") {
    return R"({
      "domain": {"a": 0.0, "b": 1.0, "nx": 200},
      "time": {"T": 100.0, "nt": 2000, "mesh": "graded", "gamma": 3.0},
      "alpha": 0.5,
      "operator": {"D": 1.0, "d": 0.0, "bc": "dirichlet", "a_inf": [0.0, 0.0]},
      "coefficients": {"p": 1.0, "q": 0.0, "r_exp": "inf", "s_exp": 2},
      "nonlinearity": {"name": "cubic_linear"},
      "source": {"r_inf": 0.0, "perturbation": {"type": "none"}},
      "initial": {"mode": "steady_plus", "profile": "sin(pi*x)", "radius": 2.0},
      "verify": {"theorems": ["decay_usim"], "s": 1, "regime": "between"},
      "seed": 1
    })";
  }
  return std::nullopt;
}

std::vector<std::string> builtin_names() {
  return {"linear-heat", "linear-subdiffusion", "forced-subdiffusion",
          "allen-cahn-1d", "allen-cahn-nosmallness"};
}

std::string apply_override(const std::string& json_text,
                           const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw SchemaError("<override>", "expected path=value in " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json cfg = json::parse(json_text);
  json* node = &cfg;
  std::size_t start = 0;
  std::vector<std::string> keys;
  while (true) {
    const auto dot = path.find('.', start);
    keys.push_back(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (std::size_t k = 0; k + 1 < keys.size(); ++k)
    node = &((*node)[keys[k]]);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // fall back to a plain string
  }
  (*node)[keys.back()] = parsed;
  return cfg.dump(2);
}

std::string canonical_echo(const std::string& json_text) {
  return json::parse(json_text).dump(2) + "\n";
}

}  // namespace fracdecay::scenario
