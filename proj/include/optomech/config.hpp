#pragma once

// Scenario configuration: JSON schema, defaults and validation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optomech/model.hpp"
#include "optomech/observables.hpp"
#include "optomech/selectivity.hpp"

namespace optomech {

enum class OutputKind { populations, wigner, metrics, selectivity, full_model_validation };

std::string to_string(OutputKind k);
OutputKind output_kind_from_string(const std::string& s);

// Reduced-scale three-mode run compared against the thermal baseline.
struct ValidationSpec {
  std::size_t n_c = 8;
  double nbar_p = 0.5;
  double kappa = 0.15;            // used for both cavities
  std::optional<Bracket> bracket; // default: first root of phi_j on (0, 3 omega_m)
};

// Either a Cartesian grid over (eta, j) or an explicit list of config
// patches merged onto the base scenario.
struct SweepSpec {
  std::vector<double> eta;
  std::vector<std::size_t> j;
  std::vector<nlohmann::json> points;
};

struct ScenarioConfig {
  SystemParams params;
  bool delta_a_given = false;
  std::size_t target_j = 1;
  std::optional<Bracket> bracket;
  bool use_solved_detuning = false;
  std::vector<OutputKind> outputs{OutputKind::populations, OutputKind::metrics,
                                  OutputKind::selectivity};
  std::optional<GridSpec> wigner;  // default_grid() when absent
  ValidationSpec validation;
  SeriesControl series;
  ConditionThresholds thresholds;
  std::optional<std::string> out_dir;
  std::optional<SweepSpec> sweep;

  bool wants(OutputKind k) const;
};

// Throws ConfigError naming the offending key, or citing the violated
// physical invariant.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_json(const nlohmann::json& doc);

// Parses the document text into JSON only, with ConfigError on syntax errors.
nlohmann::json parse_json_text(const std::string& text);

// Canonical JSON of the resolved scenario (for manifests).
nlohmann::json to_json(const ScenarioConfig& cfg);

}  // namespace optomech
