#pragma once

// Scenario pipeline: detuning -> steady state -> observables -> files.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optomech/config.hpp"
#include "optomech/observables.hpp"
#include "optomech/selectivity.hpp"

namespace optomech {

inline constexpr const char* kToolVersion = "0.1.0";

struct DetuningChoice {
  double value;
  std::string source;  // "config", "reference", "solved"
};

// Explicit params.delta_a wins, then the reference table, then a solve over
// the configured bracket. use_solved_detuning forces the solve.
DetuningChoice resolve_detuning(const ScenarioConfig& cfg);

struct ConventionMetrics {
  AlphaConvention convention = AlphaConvention::derived;
  std::optional<std::string> error;
  double alpha_j = 0.0;
  double gamma_j = 0.0;  // 2 alpha_j^2 / kappa_b
  double eps_j = 0.0;
  double omega_j = 0.0;  // varpi_j
  double rho00 = 0.0;
  double nbar = 0.0;
  double g2 = 0.0;
  double delta_fock = 0.0;
  double delta_hs = 0.0;
};

ConventionMetrics compute_metrics(const SystemParams& p, std::size_t j, AlphaConvention convention,
                                  const SeriesControl& ctrl = {});

// Stationary populations of the engineered model for the active convention.
AnalyticPopulations scenario_populations(const SystemParams& p, std::size_t j,
                                         const SeriesControl& ctrl = {});

struct FullModelRun {
  double delta_a = 0.0;
  std::vector<double> marginal;  // phonon populations of the three-mode steady state
  std::vector<double> thermal;   // thermal baseline at validation nbar_p
  double low_engineered = 0.0;   // sum_{n<=j} marginal
  double low_thermal = 0.0;
  double enhancement = 0.0;      // low_engineered / low_thermal
  double suppression = 0.0;      // 1 - p_{j+1} / p_{j+1}^thermal
  bool enhanced = false;
  bool suppressed = false;       // suppression >= 0.1
  double residual = 0.0;
  double gap_ratio = 0.0;

  bool passed() const { return enhanced && suppressed; }
};

// Dense steady state of the three-mode model on {2, 2, n_c} at p.delta_a,
// with the validation occupation and cavity linewidths.
FullModelRun run_full_model(const SystemParams& p, std::size_t j, const ValidationSpec& v);

// Root of phi_j used for the reduced-scale check: the validation bracket when
// given, otherwise the first sign change on (0, 3 omega_m).
SelectivityReport validation_root(const SystemParams& p, std::size_t j, const ValidationSpec& v,
                                  const SeriesControl& ctrl = {});

nlohmann::json to_json(const SelectivityReport& r);
nlohmann::json to_json(const ConventionMetrics& m);
nlohmann::json to_json(const FullModelRun& r);

struct RunManifest {
  nlohmann::json doc;                     // contents of manifest.json
  std::vector<std::string> files;         // emitted payload files, manifest excluded
  std::optional<ConventionMetrics> derived;
  std::optional<ConventionMetrics> literal;
  double delta_a = 0.0;
};

// Writes the requested outputs plus manifest.json into out. On failure every
// file written by this call is removed and the error is rethrown with the
// scenario attached (ConfigError stays a ConfigError).
RunManifest run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out);

struct SweepOutcome {
  nlohmann::json manifest;
  std::size_t points = 0;
  std::size_t failed = 0;
};

// One subdirectory per point plus sweep.csv; points run on up to `workers`
// threads and the table is assembled in grid order.
SweepOutcome run_sweep(const nlohmann::json& base, const std::filesystem::path& out,
                       unsigned workers);

}  // namespace optomech
