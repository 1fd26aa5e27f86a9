#include "optomech/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <thread>

#include "optomech/errors.hpp"
#include "optomech/format.hpp"
#include "optomech/lindblad.hpp"
#include "optomech/model.hpp"
#include "optomech/phonon.hpp"
#include "optomech/working_points.hpp"

namespace optomech {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Bracket bracket_for(const ScenarioConfig& cfg) {
  if (cfg.bracket) return *cfg.bracket;
  try {
    return default_bracket(cfg.params, cfg.target_j);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

ConditionFlag worst_flag(const SelectivityReport& r) {
  ConditionFlag w = r.truncation_flag;
  for (const auto& c : r.conditions) w = std::max(w, c.flag);
  return w;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Tracks files written by one scenario so a failure can remove them.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& bytes) {
    write_file(dir_ / name, bytes);
    written_.push_back(name);
    records_.push_back({{"name", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
  }
  void remove_all() noexcept {
    std::error_code ec;
    for (const auto& name : written_) fs::remove(dir_ / name, ec);
    fs::remove(dir_ / "manifest.json", ec);
  }
  const std::vector<std::string>& written() const { return written_; }
  const json& records() const { return records_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
  json records_ = json::array();
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string populations_csv(const PhononDistribution& dist) {
  std::string out = csv_row({"n", "p_n"});
  const std::vector<double> p = dist.materialize();
  for (std::size_t n = 0; n < p.size(); ++n) out += csv_row({std::to_string(n), format_number(p[n])});
  return out;
}

std::string wigner_csv(const WignerGrid& g) {
  std::string out = csv_row({"x", "y", "w"});
  out.reserve(g.values.size() * 72);
  for (std::size_t iy = 0; iy < g.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      out += csv_row({format_number(g.x[ix]), format_number(g.y[iy]), format_number(g.at(ix, iy))});
    }
  }
  return out;
}

json reference_comparison(const SystemParams& p, std::size_t j, const ConventionMetrics& d,
                          const ConventionMetrics& l) {
  const WorkingPoint* wp = find_working_point(p.eta(), j);
  if (!wp) return json{{"available", false}};
  json out = {{"available", true},
              {"eta", wp->eta},
              {"j", wp->j},
              {"reference_delta_a", wp->delta_a},
              {"at_reference_delta_a", std::abs(p.delta_a - wp->delta_a) < 1e-12},
              {"quoted", {{"g2", wp->g2_quoted}, {"delta", wp->delta_quoted}}},
              {"tolerance", 0.05}};
  bool any = false;
  for (const ConventionMetrics* m : {&d, &l}) {
    json c;
    if (m->error) {
      c = {{"error", *m->error}, {"within_tolerance", false}};
    } else {
      const double dg = m->g2 - wp->g2_quoted;
      const double dd = m->delta_fock - wp->delta_quoted;
      const bool ok = std::abs(dg) <= 0.05 && std::abs(dd) <= 0.05;
      any = any || ok;
      c = {{"g2", m->g2},
           {"delta", m->delta_fock},
           {"g2_deviation", dg},
           {"delta_deviation", dd},
           {"within_tolerance", ok}};
    }
    out[to_string(m->convention)] = c;
  }
  out["any_convention_within_tolerance"] = any;
  if (!any) {
    out["note"] =
        "neither alpha convention reproduces the quoted pair within 0.05 at this detuning; "
        "see the per-convention deviations";
  }
  return out;
}

}  // namespace

DetuningChoice resolve_detuning(const ScenarioConfig& cfg) {
  const SystemParams& p = cfg.params;
  auto solve = [&] {
    const auto r = solve_detuning(p, cfg.target_j, bracket_for(cfg), cfg.series, {}, cfg.thresholds);
    return DetuningChoice{r.delta_a, "solved"};
  };
  if (cfg.use_solved_detuning) return solve();
  if (cfg.delta_a_given) return {p.delta_a, "config"};
  if (const auto ref = reference_detuning(p.eta(), cfg.target_j)) return {*ref, "reference"};
  if (cfg.bracket) return solve();
  throw ConfigError("no 'params.delta_a', no reference detuning for eta = " +
                    format_number(p.eta()) + ", j = " + std::to_string(cfg.target_j) +
                    ", and no 'bracket' to solve in");
}

ConventionMetrics compute_metrics(const SystemParams& p, std::size_t j, AlphaConvention convention,
                                  const SeriesControl& ctrl) {
  ConventionMetrics m;
  m.convention = convention;
  try {
    const SelectiveDamping s = selective_damping(p, j, convention, ctrl);
    const AnalyticPopulations pops = analytic_populations(s, j + 2);
    m.alpha_j = alpha_n(p, j, convention, ctrl);
    m.gamma_j = s.rate;
    m.eps_j = pops.eps_j;
    m.omega_j = pops.varpi;
    m.rho00 = pops.rho00;
    m.nbar = mean_phonon(pops.dist);
    m.g2 = g2_zero(pops.dist);
    m.delta_fock = non_gaussianity_fock(pops.dist);
    m.delta_hs = non_gaussianity_hs(pops.dist, thermal_reference(m.nbar, j + 2));
  } catch (const Error& e) {
    m.error = e.what();
  }
  return m;
}

AnalyticPopulations scenario_populations(const SystemParams& p, std::size_t j,
                                         const SeriesControl& ctrl) {
  return analytic_populations(selective_damping(p, j, ctrl), j + 2);
}

FullModelRun run_full_model(const SystemParams& p, std::size_t j, const ValidationSpec& v) {
  if (v.n_c < j + 2) throw InvalidSpaceError("validation n_c must be >= j + 2");
  SystemParams q = p;
  q.nbar_p = v.nbar_p;
  q.kappa_a = v.kappa;
  q.kappa_b = v.kappa;
  const Operator h = build_full_hamiltonian(q, v.n_c);
  const auto channels = full_model_channels(q, v.n_c);
  const Liouvillian l = build_liouvillian(h, channels);
  const SteadyState ss = steady_state(l);

  FullModelRun r;
  r.delta_a = q.delta_a;
  r.marginal = diagonal_marginal(ss.rho, 2);
  const PhononDistribution th = thermal_reference(v.nbar_p, v.n_c);
  r.thermal.assign(th.explicit_p().begin(), th.explicit_p().end());
  for (std::size_t n = 0; n <= j; ++n) {
    r.low_engineered += r.marginal[n];
    r.low_thermal += r.thermal[n];
  }
  r.enhancement = r.low_engineered / r.low_thermal;
  r.suppression = 1.0 - r.marginal[j + 1] / r.thermal[j + 1];
  r.enhanced = r.low_engineered > r.low_thermal;
  r.suppressed = r.suppression >= 0.1;
  r.residual = ss.residual;
  r.gap_ratio = ss.gap_ratio;
  return r;
}

SelectivityReport validation_root(const SystemParams& p, std::size_t j, const ValidationSpec& v,
                                  const SeriesControl& ctrl) {
  Bracket b{0.0, 0.0};
  if (v.bracket) {
    b = *v.bracket;
  } else {
    const auto found = scan_sign_changes(p, j, {1e-6 * p.omega_m, 3.0 * p.omega_m}, 6000, ctrl);
    if (found.empty()) {
      throw BracketError("phi_" + std::to_string(j) + " has no sign change on (0, 3 omega_m)",
                         std::nan(""), std::nan(""));
    }
    b = found.front();
  }
  return solve_detuning(p, j, b, ctrl);
}

json to_json(const SelectivityReport& r) {
  json levels = json::array();
  for (const auto& row : r.levels) {
    levels.push_back({{"n", row.n},
                      {"alpha_n", finite_or_null(row.alpha_n)},
                      {"phi_n", finite_or_null(row.phi_n)},
                      {"phi_over_alpha", finite_or_null(row.ratio)}});
  }
  json conditions = json::array();
  for (const auto& c : r.conditions) {
    conditions.push_back({{"name", c.name}, {"value", finite_or_null(c.value)}, {"flag", to_string(c.flag)}});
  }
  json out = {{"j", r.j},
              {"convention", to_string(r.convention)},
              {"delta_a", r.delta_a},
              {"residual", finite_or_null(r.residual)},
              {"iterations", r.iterations},
              {"k_series_converged", r.k_series_converged},
              {"levels", levels},
              {"conditions", conditions},
              {"truncation",
               {{"name", "zeta_1*varpi_j"},
                {"value", finite_or_null(r.truncation_ratio)},
                {"flag", to_string(r.truncation_flag)}}},
              {"thresholds", {{"ok", r.thresholds.ok}, {"warn", r.thresholds.warn}}}};
  out["bracket"] = r.bracket ? json{r.bracket->lo, r.bracket->hi} : json(nullptr);
  return out;
}

json to_json(const ConventionMetrics& m) {
  if (m.error) return json{{"error", *m.error}};
  return json{{"alpha_j", m.alpha_j},     {"Gamma_j", m.gamma_j}, {"eps_j", m.eps_j},
              {"omega_j", m.omega_j},     {"rho00", m.rho00},     {"nbar", m.nbar},
              {"g2", m.g2},               {"delta_fock", m.delta_fock},
              {"delta_hs", m.delta_hs}};
}

json to_json(const FullModelRun& r) {
  return json{{"delta_a", r.delta_a},
              {"phonon_marginal", r.marginal},
              {"thermal_baseline", r.thermal},
              {"p_low_engineered", r.low_engineered},
              {"p_low_thermal", r.low_thermal},
              {"enhancement_ratio", r.enhancement},
              {"next_level_suppression", r.suppression},
              {"enhanced", r.enhanced},
              {"suppressed", r.suppressed},
              {"passed", r.passed()},
              {"steady_state_residual", r.residual},
              {"gap_ratio", r.gap_ratio}};
}

RunManifest run_scenario(const ScenarioConfig& cfg_in, const fs::path& out) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("output directory '" + out.string() + "' is not writable");

  OutputSet files(out);
  ScenarioConfig cfg = cfg_in;
  const std::size_t j = cfg.target_j;
  std::string context = "scenario (eta = " + format_number(cfg.params.eta()) + ", j = " + std::to_string(j) + ")";
  json timings = json::object();
  try {
    auto t0 = std::chrono::steady_clock::now();
    const DetuningChoice det = resolve_detuning(cfg);
    cfg.params.delta_a = det.value;
    timings["detuning"] = seconds_since(t0);
    context = "scenario (eta = " + format_number(cfg.params.eta()) + ", j = " + std::to_string(j) +
              ", Delta_a = " + format_number(det.value) + ")";

    const SystemParams& p = cfg.params;
    const SelectivityReport audit = audit_conditions(p, j, cfg.thresholds, cfg.series);

    t0 = std::chrono::steady_clock::now();
    const ConventionMetrics md = compute_metrics(p, j, AlphaConvention::derived, cfg.series);
    const ConventionMetrics ml = compute_metrics(p, j, AlphaConvention::literal, cfg.series);
    const ConventionMetrics& active = p.alpha_convention == AlphaConvention::derived ? md : ml;
    timings["metrics"] = seconds_since(t0);

    std::optional<AnalyticPopulations> pops;
    auto active_populations = [&]() -> const AnalyticPopulations& {
      if (!pops) {
        if (active.error) throw Error("active convention failed: " + *active.error);
        pops = scenario_populations(p, j, cfg.series);
      }
      return *pops;
    };

    for (OutputKind kind : cfg.outputs) {
      t0 = std::chrono::steady_clock::now();
      switch (kind) {
        case OutputKind::populations: {
          const auto& ap = active_populations();
          files.write("populations.csv", populations_csv(ap.dist));
          const auto& tail = *ap.dist.tail();
          const std::size_t rows = ap.dist.materialize().size();
          json side = {{"convention", to_string(p.alpha_convention)},
                       {"j", j},
                       {"delta_a", p.delta_a},
                       {"rows", rows},
                       {"tail", {{"start", tail.start}, {"amplitude", tail.amplitude}, {"ratio", tail.ratio}}},
                       {"mass_beyond_rows",
                        tail.amplitude * std::pow(tail.ratio, static_cast<double>(rows)) / (1.0 - tail.ratio)},
                       {"total", ap.dist.total()}};
          files.write("populations.json", dump(side));
          break;
        }
        case OutputKind::wigner: {
          const auto& ap = active_populations();
          const GridSpec spec = cfg.wigner ? *cfg.wigner : default_grid(ap.dist);
          const WignerGrid g = wigner(ap.dist, spec);
          files.write("wigner.csv", wigner_csv(g));
          json side = {{"convention", to_string(p.alpha_convention)},
                       {"grid",
                        {{"xmin", spec.xmin}, {"xmax", spec.xmax}, {"ymin", spec.ymin},
                         {"ymax", spec.ymax}, {"nx", spec.nx}, {"ny", spec.ny}}},
                       {"grid_source", cfg.wigner ? "config" : "default"},
                       {"mass", g.mass},
                       {"coverage_ok", g.coverage_ok},
                       {"min_value", g.min_value()}};
          files.write("wigner.json", dump(side));
          break;
        }
        case OutputKind::metrics: {
          json m = {{"j", j},
                    {"delta_a", p.delta_a},
                    {"detuning_source", det.source},
                    {"active_convention", to_string(p.alpha_convention)},
                    {"derived", to_json(md)},
                    {"literal", to_json(ml)}};
          files.write("metrics.json", dump(m));
          break;
        }
        case OutputKind::selectivity: {
          json s = {{"working_point", to_json(audit)}};
          std::optional<Bracket> b;
          if (cfg.bracket) {
            b = cfg.bracket;
          } else if (reference_detuning(p.eta(), j)) {
            b = default_bracket(p, j);
          }
          if (b) {
            try {
              s["solve"] = {{"status", "ok"},
                            {"report", to_json(solve_detuning(p, j, *b, cfg.series, {}, cfg.thresholds))}};
            } catch (const BracketError& e) {
              s["solve"] = {{"status", "no_sign_change"},
                            {"bracket", {b->lo, b->hi}},
                            {"error", e.what()},
                            {"phi_lo", finite_or_null(e.phi_lo())},
                            {"phi_hi", finite_or_null(e.phi_hi())}};
            } catch (const InvalidBracketError& e) {
              s["solve"] = {{"status", "invalid_bracket"}, {"bracket", {b->lo, b->hi}}, {"error", e.what()}};
            }
          } else {
            s["solve"] = {{"status", "not_attempted"}};
          }
          if (const auto ref = reference_detuning(p.eta(), j)) {
            s["reference_delta_a"] = *ref;
            if (s["solve"]["status"] == "ok") {
              s["root_deviation_from_reference"] = s["solve"]["report"]["delta_a"].get<double>() - *ref;
            }
          }
          json changes = json::array();
          for (const auto& c : scan_sign_changes(p, j, {-3.0 * p.omega_m, 3.0 * p.omega_m}, 6000, cfg.series)) {
            changes.push_back({c.lo, c.hi});
          }
          s["sign_changes"] = changes;
          files.write("selectivity.json", dump(s));
          break;
        }
        case OutputKind::full_model_validation: {
          json v = {{"j", j},
                    {"n_c", cfg.validation.n_c},
                    {"nbar_p", cfg.validation.nbar_p},
                    {"kappa_a", cfg.validation.kappa},
                    {"kappa_b", cfg.validation.kappa},
                    {"gamma_p", p.gamma_p}};
          const SelectivityReport root = validation_root(p, j, cfg.validation, cfg.series);
          SystemParams q = p;
          q.delta_a = root.delta_a;
          const FullModelRun run = run_full_model(q, j, cfg.validation);
          v["root"] = to_json(root);
          v["run"] = to_json(run);
          v["passed"] = run.passed();
          // The negative-side root near -omega_m is reported for comparison.
          if (reference_detuning(p.eta(), j)) {
            json other;
            try {
              const auto r = solve_detuning(p, j, default_bracket(p, j), cfg.series);
              SystemParams qn = p;
              qn.delta_a = r.delta_a;
              other = to_json(run_full_model(qn, j, cfg.validation));
            } catch (const Error& e) {
              other = {{"error", e.what()}};
            }
            v["negative_side"] = other;
          }
          files.write("validation.json", dump(v));
          break;
        }
      }
      timings[to_string(kind)] = seconds_since(t0);
    }

    json counts = {{"OK", 0}, {"WARN", 0}, {"FAIL", 0}};
    for (const auto& c : audit.conditions) counts[to_string(c.flag)] = counts[to_string(c.flag)].get<int>() + 1;
    counts[to_string(audit.truncation_flag)] = counts[to_string(audit.truncation_flag)].get<int>() + 1;

    json resolved = {{"derived", to_json(md)}, {"literal", to_json(ml)}};
    json manifest = {{"tool", "simulator"},
                     {"version", kToolVersion},
                     {"started_utc", started},
                     {"scenario", to_json(cfg)},
                     {"detuning", {{"value", det.value}, {"source", det.source}}},
                     {"resolved", resolved},
                     {"audit",
                      {{"worst", to_string(worst_flag(audit))},
                       {"counts", counts},
                       {"k_series_converged", audit.k_series_converged}}},
                     {"reference_comparison", reference_comparison(p, j, md, ml)},
                     {"files", files.records()}};
    timings["total"] = seconds_since(t_start);
    manifest["timings_s"] = timings;
    write_file(out / "manifest.json", dump(manifest));

    RunManifest rm;
    rm.doc = manifest;
    rm.files = files.written();
    rm.derived = md;
    rm.literal = ml;
    rm.delta_a = p.delta_a;
    return rm;
  } catch (const ConfigError& e) {
    files.remove_all();
    throw ConfigError(context + ": " + e.what());
  } catch (const std::exception& e) {
    files.remove_all();
    throw Error(context + ": " + e.what());
  }
}

SweepOutcome run_sweep(const json& base, const fs::path& out, unsigned workers) {
  if (!base.is_object() || !base.contains("sweep")) throw ConfigError("'sweep' section is required");
  const ScenarioConfig base_cfg = parse_config_json(base);
  const SweepSpec& spec = *base_cfg.sweep;

  json stripped = base;
  stripped.erase("sweep");
  stripped.erase("out_dir");

  std::vector<json> docs;
  if (!spec.points.empty()) {
    for (const auto& patch : spec.points) {
      json d = stripped;
      d.merge_patch(patch);
      docs.push_back(d);
    }
  } else {
    for (double eta : spec.eta) {
      for (std::size_t j : spec.j) {
        json d = stripped;
        d.merge_patch(json{{"params", {{"omega_m", 1.0 / eta}}}, {"target_j", j}});
        docs.push_back(d);
      }
    }
  }

  struct PointResult {
    std::string dir;
    std::optional<RunManifest> run;
    std::optional<ScenarioConfig> cfg;
    std::string error;
  };
  std::vector<PointResult> results(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    results[i].dir = name;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      PointResult& r = results[i];
      try {
        ScenarioConfig c = parse_config_json(docs[i]);
        c.sweep.reset();
        if (!c.wants(OutputKind::metrics)) c.outputs.push_back(OutputKind::metrics);
        r.cfg = c;
        r.run = run_scenario(c, out / r.dir);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(workers == 0 ? 1u : workers, static_cast<unsigned>(docs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv = csv_row({"index", "dir", "status", "eta", "j", "delta_a", "omega_j_derived",
                             "nbar_derived", "g2_derived", "delta_derived", "omega_j_literal",
                             "nbar_literal", "g2_literal", "delta_literal", "error"});
  json points = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PointResult& r = results[i];
    std::vector<std::string> row{std::to_string(i), r.dir};
    if (r.run) {
      row.push_back("ok");
      row.push_back(format_number(r.cfg->params.eta()));
      row.push_back(std::to_string(r.cfg->target_j));
      row.push_back(format_number(r.run->delta_a));
      for (const auto* m : {&*r.run->derived, &*r.run->literal}) {
        if (m->error) {
          row.insert(row.end(), {"nan", "nan", "nan", "nan"});
        } else {
          row.insert(row.end(), {format_number(m->omega_j), format_number(m->nbar), format_number(m->g2),
                                 format_number(m->delta_fock)});
        }
      }
      row.push_back("");
      points.push_back({{"index", i}, {"dir", r.dir}, {"status", "ok"}});
    } else {
      ++failed;
      row.push_back("error");
      row.push_back(r.cfg ? format_number(r.cfg->params.eta()) : "");
      row.push_back(r.cfg ? std::to_string(r.cfg->target_j) : "");
      for (int k = 0; k < 9; ++k) row.push_back("");
      row.push_back(r.error);
      points.push_back({{"index", i}, {"dir", r.dir}, {"status", "error"}, {"error", r.error}});
    }
    csv += csv_row(row);
  }

  write_file(out / "sweep.csv", csv);
  SweepOutcome o;
  o.points = results.size();
  o.failed = failed;
  o.manifest = {{"tool", "simulator"},
                {"version", kToolVersion},
                {"started_utc", utc_now()},
                {"workers", n_workers},
                {"points", points},
                {"failed", failed},
                {"files", json::array({{{"name", "sweep.csv"}, {"sha256", sha256_hex(csv)}, {"bytes", csv.size()}}})}};
  write_file(out / "manifest.json", dump(o.manifest));
  return o;
}

}  // namespace optomech
