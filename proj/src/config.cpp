#include "optomech/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "optomech/errors.hpp"

namespace optomech {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + where + key + "'");
    }
  }
}

const json& require_object(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError("'" + key + "' must be an object");
  return v;
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return v.get<bool>();
}

Bracket get_bracket(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError("'" + key + "' must be [lo, hi]");
  Bracket b{get_number(v[0], key + "[0]"), get_number(v[1], key + "[1]")};
  if (!(b.lo < b.hi)) throw ConfigError("'" + key + "' needs lo < hi");
  return b;
}

void read_params(const json& obj, SystemParams& p, bool& delta_a_given) {
  require_object(obj, "params");
  reject_unknown(obj, "params.",
                 {"omega_m", "J", "eps", "delta_a", "delta_b", "kappa_b", "kappa_a", "gamma_p",
                  "nbar_p", "alpha_convention"});
  auto num = [&](const char* key, double& field) {
    if (obj.contains(key)) field = get_number(obj.at(key), std::string("params.") + key);
  };
  num("omega_m", p.omega_m);
  num("J", p.J);
  num("eps", p.eps);
  num("delta_b", p.delta_b);
  num("kappa_b", p.kappa_b);
  num("gamma_p", p.gamma_p);
  num("nbar_p", p.nbar_p);
  if (obj.contains("delta_a")) {
    p.delta_a = get_number(obj.at("delta_a"), "params.delta_a");
    delta_a_given = true;
  }
  if (obj.contains("kappa_a")) p.kappa_a = get_number(obj.at("kappa_a"), "params.kappa_a");
  if (obj.contains("alpha_convention")) {
    const json& v = obj.at("alpha_convention");
    if (!v.is_string()) throw ConfigError("'params.alpha_convention' must be a string");
    try {
      p.alpha_convention = alpha_convention_from_string(v.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(std::string("'params.alpha_convention': ") + e.what());
    }
  }
}

GridSpec read_grid(const json& obj) {
  require_object(obj, "wigner");
  reject_unknown(obj, "wigner.", {"xmin", "xmax", "ymin", "ymax", "nx", "ny"});
  GridSpec g;
  if (obj.contains("xmin")) g.xmin = get_number(obj.at("xmin"), "wigner.xmin");
  if (obj.contains("xmax")) g.xmax = get_number(obj.at("xmax"), "wigner.xmax");
  if (obj.contains("ymin")) g.ymin = get_number(obj.at("ymin"), "wigner.ymin");
  if (obj.contains("ymax")) g.ymax = get_number(obj.at("ymax"), "wigner.ymax");
  if (obj.contains("nx")) g.nx = get_count(obj.at("nx"), "wigner.nx");
  if (obj.contains("ny")) g.ny = get_count(obj.at("ny"), "wigner.ny");
  if (g.nx < 2 || g.ny < 2) throw ConfigError("'wigner.nx' and 'wigner.ny' must be >= 2");
  if (!(g.xmax > g.xmin) || !(g.ymax > g.ymin)) {
    throw ConfigError("'wigner' bounds need xmin < xmax and ymin < ymax");
  }
  return g;
}

ValidationSpec read_validation(const json& obj) {
  require_object(obj, "validation");
  reject_unknown(obj, "validation.", {"n_c", "nbar_p", "kappa", "bracket"});
  ValidationSpec v;
  if (obj.contains("n_c")) v.n_c = get_count(obj.at("n_c"), "validation.n_c");
  if (obj.contains("nbar_p")) v.nbar_p = get_number(obj.at("nbar_p"), "validation.nbar_p");
  if (obj.contains("kappa")) v.kappa = get_number(obj.at("kappa"), "validation.kappa");
  if (obj.contains("bracket")) v.bracket = get_bracket(obj.at("bracket"), "validation.bracket");
  if (v.n_c < 3) throw ConfigError("'validation.n_c' must be >= 3");
  if (!(v.nbar_p >= 0.0)) throw ConfigError("'validation.nbar_p' violates nbar_p >= 0");
  if (!(v.kappa > 0.0)) throw ConfigError("'validation.kappa' violates kappa > 0");
  return v;
}

SweepSpec read_sweep(const json& obj) {
  require_object(obj, "sweep");
  reject_unknown(obj, "sweep.", {"eta", "j", "points"});
  SweepSpec s;
  if (obj.contains("points")) {
    const json& pts = obj.at("points");
    if (!pts.is_array()) throw ConfigError("'sweep.points' must be an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].is_object()) {
        throw ConfigError("'sweep.points[" + std::to_string(i) + "]' must be an object");
      }
      s.points.push_back(pts[i]);
    }
  }
  if (obj.contains("eta") || obj.contains("j")) {
    if (!s.points.empty()) throw ConfigError("'sweep' takes either points or an eta/j grid");
    if (!obj.contains("eta") || !obj.contains("j")) {
      throw ConfigError("'sweep' grid needs both 'eta' and 'j'");
    }
    const json& eta = obj.at("eta");
    const json& j = obj.at("j");
    if (!eta.is_array() || !j.is_array()) throw ConfigError("'sweep.eta' and 'sweep.j' must be arrays");
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const double e = get_number(eta[i], "sweep.eta[" + std::to_string(i) + "]");
      if (!(e > 0.0)) throw ConfigError("'sweep.eta' entries must be > 0");
      s.eta.push_back(e);
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      s.j.push_back(get_count(j[i], "sweep.j[" + std::to_string(i) + "]"));
    }
  }
  if (s.points.empty() && (s.eta.empty() || s.j.empty())) throw ConfigError("'sweep' grid is empty");
  return s;
}

}  // namespace

std::string to_string(OutputKind k) {
  switch (k) {
    case OutputKind::populations:
      return "populations";
    case OutputKind::wigner:
      return "wigner";
    case OutputKind::metrics:
      return "metrics";
    case OutputKind::selectivity:
      return "selectivity";
    case OutputKind::full_model_validation:
      return "full_model_validation";
  }
  return "metrics";
}

OutputKind output_kind_from_string(const std::string& s) {
  for (OutputKind k : {OutputKind::populations, OutputKind::wigner, OutputKind::metrics,
                       OutputKind::selectivity, OutputKind::full_model_validation}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown output '" + s + "' in 'outputs'");
}

bool ScenarioConfig::wants(OutputKind k) const {
  return std::find(outputs.begin(), outputs.end(), k) != outputs.end();
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

ScenarioConfig parse_config(const std::string& text) { return parse_config_json(parse_json_text(text)); }

ScenarioConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "",
                 {"params", "target_j", "bracket", "use_solved_detuning", "outputs", "wigner",
                  "validation", "series", "thresholds", "out_dir", "sweep"});
  ScenarioConfig cfg;
  if (doc.contains("params")) read_params(doc.at("params"), cfg.params, cfg.delta_a_given);
  if (doc.contains("target_j")) cfg.target_j = get_count(doc.at("target_j"), "target_j");
  if (doc.contains("bracket")) cfg.bracket = get_bracket(doc.at("bracket"), "bracket");
  if (doc.contains("use_solved_detuning")) {
    cfg.use_solved_detuning = get_bool(doc.at("use_solved_detuning"), "use_solved_detuning");
  }
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    if (!o.is_array()) throw ConfigError("'outputs' must be an array of names");
    cfg.outputs.clear();
    for (const auto& v : o) {
      if (!v.is_string()) throw ConfigError("'outputs' entries must be strings");
      const OutputKind k = output_kind_from_string(v.get<std::string>());
      if (!cfg.wants(k)) cfg.outputs.push_back(k);
    }
    if (cfg.outputs.empty()) throw ConfigError("'outputs' must not be empty");
  }
  if (doc.contains("wigner")) cfg.wigner = read_grid(doc.at("wigner"));
  if (doc.contains("validation")) cfg.validation = read_validation(doc.at("validation"));
  if (doc.contains("series")) {
    const json& s = require_object(doc.at("series"), "series");
    reject_unknown(s, "series.", {"max_terms", "tail_tol"});
    if (s.contains("max_terms")) {
      cfg.series.max_terms = static_cast<int>(get_count(s.at("max_terms"), "series.max_terms"));
    }
    if (s.contains("tail_tol")) cfg.series.tail_tol = get_number(s.at("tail_tol"), "series.tail_tol");
    if (cfg.series.max_terms < 1 || cfg.series.max_terms > 170) {
      throw ConfigError("'series.max_terms' must lie in [1, 170]");
    }
    if (!(cfg.series.tail_tol > 0.0)) throw ConfigError("'series.tail_tol' must be > 0");
  }
  if (doc.contains("thresholds")) {
    const json& t = require_object(doc.at("thresholds"), "thresholds");
    reject_unknown(t, "thresholds.", {"ok", "warn"});
    if (t.contains("ok")) cfg.thresholds.ok = get_number(t.at("ok"), "thresholds.ok");
    if (t.contains("warn")) cfg.thresholds.warn = get_number(t.at("warn"), "thresholds.warn");
    if (!(cfg.thresholds.ok > 0.0 && cfg.thresholds.ok <= cfg.thresholds.warn)) {
      throw ConfigError("'thresholds' need 0 < ok <= warn");
    }
  }
  if (doc.contains("out_dir")) {
    const json& d = doc.at("out_dir");
    if (!d.is_string() || d.get<std::string>().empty()) {
      throw ConfigError("'out_dir' must be a non-empty string");
    }
    cfg.out_dir = d.get<std::string>();
  }
  if (doc.contains("sweep")) cfg.sweep = read_sweep(doc.at("sweep"));

  try {
    cfg.params.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  if (!(cfg.params.eta() < 1.0)) throw ConfigError("params: eta = 1/omega_m < 1 required");
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  const SystemParams& p = cfg.params;
  json params = {{"omega_m", p.omega_m},
                 {"eta", p.eta()},
                 {"J", p.J},
                 {"eps", p.eps},
                 {"delta_a", p.delta_a},
                 {"delta_b", p.delta_b},
                 {"kappa_a", p.kappa_a_value()},
                 {"kappa_b", p.kappa_b},
                 {"gamma_p", p.gamma_p},
                 {"nbar_p", p.nbar_p},
                 {"alpha_convention", to_string(p.alpha_convention)}};
  json outputs = json::array();
  for (OutputKind k : cfg.outputs) outputs.push_back(to_string(k));
  json out = {{"params", params},
              {"target_j", cfg.target_j},
              {"use_solved_detuning", cfg.use_solved_detuning},
              {"outputs", outputs},
              {"series", {{"max_terms", cfg.series.max_terms}, {"tail_tol", cfg.series.tail_tol}}},
              {"thresholds", {{"ok", cfg.thresholds.ok}, {"warn", cfg.thresholds.warn}}},
              {"validation",
               {{"n_c", cfg.validation.n_c},
                {"nbar_p", cfg.validation.nbar_p},
                {"kappa", cfg.validation.kappa}}}};
  if (cfg.bracket) out["bracket"] = {cfg.bracket->lo, cfg.bracket->hi};
  if (cfg.validation.bracket) {
    out["validation"]["bracket"] = {cfg.validation.bracket->lo, cfg.validation.bracket->hi};
  }
  if (cfg.wigner) {
    out["wigner"] = {{"xmin", cfg.wigner->xmin}, {"xmax", cfg.wigner->xmax},
                     {"ymin", cfg.wigner->ymin}, {"ymax", cfg.wigner->ymax},
                     {"nx", cfg.wigner->nx},     {"ny", cfg.wigner->ny}};
  }
  return out;
}

}  // namespace optomech
