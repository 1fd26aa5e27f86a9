#pragma once

// Locating the drive detuning that makes level j resonant (phi_j = 0) and
// auditing the large-detuning conditions behind the effective model.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "optomech/model.hpp"

namespace optomech {

struct Bracket {
  double lo;
  double hi;
};

enum class ConditionFlag { ok, warn, fail };
std::string to_string(ConditionFlag f);

// Ratios below `ok` pass, below `warn` warn, anything else fails.
struct ConditionThresholds {
  double ok = 0.2;
  double warn = 0.5;
};

struct ConditionRatio {
  std::string name;
  double value;
  ConditionFlag flag;
};

struct LevelRow {
  std::size_t n;
  double alpha_n;
  double phi_n;
  double ratio;  // |phi_n| / |alpha_n|
};

struct SelectivityReport {
  std::size_t j = 0;
  AlphaConvention convention = AlphaConvention::derived;
  double delta_a = 0.0;                 // root (solve) or the audited detuning
  std::optional<Bracket> bracket;       // set by solve_detuning
  double residual = 0.0;                // |phi_j(delta_a)|
  int iterations = 0;
  bool k_series_converged = false;
  std::vector<LevelRow> levels;         // n = 0 .. j + 5
  std::vector<ConditionRatio> conditions;
  double truncation_ratio = 0.0;        // zeta_{j+1} varpi_j / zeta_j
  ConditionFlag truncation_flag = ConditionFlag::ok;
  ConditionThresholds thresholds;
};

struct RootOptions {
  double phi_tol = 1e-9;
  int max_iter = 500;
};

// Bisection polished by secant steps inside [lo, hi]. Throws
// InvalidBracketError when a pole (0, +-omega_m) lies in the bracket and
// BracketError when phi_j has no sign change across it.
SelectivityReport solve_detuning(const SystemParams& p, std::size_t j, Bracket bracket,
                                 const SeriesControl& ctrl = {}, const RootOptions& opts = {},
                                 const ConditionThresholds& thresholds = {});

// Condition ratios and the per-level table at p.delta_a.
SelectivityReport audit_conditions(const SystemParams& p, std::size_t j,
                                   const ConditionThresholds& thresholds = {},
                                   const SeriesControl& ctrl = {});

// Sign changes of phi_j on a uniform sample of [range.lo, range.hi], with
// intervals touching a pole discarded.
std::vector<Bracket> scan_sign_changes(const SystemParams& p, std::size_t j, Bracket range,
                                       std::size_t samples = 2000, const SeriesControl& ctrl = {});

// Detunings quoted for the four reference working points (eta, j).
std::optional<double> reference_detuning(double eta, std::size_t j);

// Reference detuning +- 0.5, clipped to the pole-free interval that contains it.
// Throws ParameterError when no reference exists for (eta, j).
Bracket default_bracket(const SystemParams& p, std::size_t j);

}  // namespace optomech
