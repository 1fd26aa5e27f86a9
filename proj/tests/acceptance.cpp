// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"
#include "optomech/format.hpp"
#include "optomech/lindblad.hpp"
#include "optomech/observables.hpp"
#include "optomech/scenario.hpp"
#include "optomech/selectivity.hpp"
#include "optomech/working_points.hpp"

using namespace optomech;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct RandomSet {
  SelectiveDamping s;
};

std::vector<RandomSet> random_sets() {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<RandomSet> out;
  for (int i = 0; i < 24; ++i) {
    const double gamma = std::pow(10.0, -6.0 + 3.0 * u01(rng));
    const double nbar = 0.2 + 9.8 * u01(rng);
    const double rate = gamma * std::pow(10.0, -2.0 + 6.0 * u01(rng));
    out.push_back({SelectiveDamping{gamma, nbar, static_cast<std::size_t>(i % 4), rate}});
  }
  return out;
}

SystemParams working_params(const WorkingPoint& wp, AlphaConvention c) {
  SystemParams p;
  p.omega_m = 1.0 / wp.eta;
  p.delta_a = wp.delta_a;
  p.alpha_convention = c;
  return p;
}

// 1. analytic vs chain vs dense Liouvillian
Outcome steady_state_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst_chain = 0.0, worst_dense = 0.0;
  const auto sets = random_sets();
  for (const auto& rs : sets) {
    const SelectiveDamping& s = rs.s;
    const AnalyticPopulations a = analytic_populations(s, s.j + 2);
    const PhononDistribution chain = chain_steady_state(s);
    for (std::size_t n = 0; n < chain.size(); ++n) {
      worst_chain = std::max(worst_chain, std::abs(chain[n] - a.dist[n]));
    }
    const std::size_t nc = 12;
    const auto ch = effective_channels(s, nc);
    const SteadyState ss = steady_state(build_liouvillian(Dims{nc}, ch));
    double z = 0.0;
    for (std::size_t n = 0; n < nc; ++n) z += a.dist[n];
    for (std::size_t n = 0; n < nc; ++n) {
      const auto k = static_cast<Eigen::Index>(n);
      worst_dense = std::max(worst_dense, std::abs(ss.rho.matrix()(k, k).real() - a.dist[n] / z));
    }
  }
  const double t = elapsed(t0);
  o.pass = worst_chain <= 1e-10 && worst_dense <= 1e-10 && t < 10.0;
  o.detail = std::to_string(sets.size()) + " sets; max |analytic-chain| = " + fmt(worst_chain) +
             ", max |analytic-dense(N_c=12)| = " + fmt(worst_dense) + ", " + fmt(t) + " s";
  return o;
}

// 2. rho_00 against independent geometric sums
Outcome normalization_identity() {
  Outcome o;
  double worst = 0.0;
  for (const auto& rs : random_sets()) {
    const SelectiveDamping& s = rs.s;
    const AnalyticPopulations a = analytic_populations(s, s.j + 2);
    const long double zeta = static_cast<long double>(s.nbar_p) / (s.nbar_p + 1.0L);
    long double low = 0.0L, high = 0.0L, term = 1.0L;
    for (std::size_t n = 0; term > 1e-30L; ++n, term *= zeta) {
      (n <= s.j ? low : high) += term;
    }
    const long double expected = 1.0L / (low + static_cast<long double>(a.varpi) * high);
    worst = std::max(worst, static_cast<double>(std::abs(a.rho00 - expected) / expected));
  }
  o.pass = worst <= 1e-14;
  o.detail = "max relative deviation " + fmt(worst);
  return o;
}

// 3. zero net flux on every bond
Outcome detailed_balance() {
  Outcome o;
  double worst = 0.0, worst_selective = 0.0;
  for (const auto& rs : random_sets()) {
    const SelectiveDamping& s = rs.s;
    const PhononDistribution chain = chain_steady_state(s);
    const RateChain rates = thermal_selective_chain(s, chain.size());
    const AnalyticPopulations a = analytic_populations(s, s.j + 2);
    for (const PhononDistribution* d : {&chain, &a.dist}) {
      for (std::size_t n = 0; n + 1 < rates.size(); ++n) {
        const double fwd = (*d)[n] * rates.up[n];
        const double back = (*d)[n + 1] * rates.down_total(n + 1);
        if (fwd + back == 0.0) continue;
        const double rel = std::abs(fwd - back) / (fwd + back);
        worst = std::max(worst, rel);
        if (n == s.j) worst_selective = std::max(worst_selective, rel);
      }
    }
  }
  o.pass = worst < 1e-12;
  o.detail = "max net/gross flux " + fmt(worst) + " (selective bond " + fmt(worst_selective) + ")";
  return o;
}

// 4. closed-form oracles
Outcome closed_forms() {
  Outcome o;
  std::vector<std::string> bad;
  for (double eta : {0.1, 0.3}) {
    if (std::abs(f1_element(0, eta).value - std::exp(-eta * eta)) > 1e-12) bad.push_back("f1");
    if (std::abs(f2_element(0, eta).value - (1.0 - std::exp(-eta * eta)) / eta) > 1e-12) bad.push_back("f2");
  }
  if (std::abs(g2_zero(thermal_reference(1.3, 8)) - 2.0) > 1e-10) bad.push_back("thermal g2");
  if (std::abs(g2_zero(PhononDistribution({0.0, 0.0, 1.0})) - 0.5) > 1e-10) bad.push_back("Fock g2");
  if (std::abs(wigner_point(PhononDistribution({1.0}), 0.0, 0.0) - 2.0 / std::numbers::pi) > 1e-10) {
    bad.push_back("vacuum W");
  }
  if (std::abs(non_gaussianity_fock(thermal_reference(2.5, 8))) > 1e-10) bad.push_back("thermal delta");

  const double gamma = 0.5;
  const Liouvillian l = build_liouvillian(Dims{2}, std::vector<LindbladChannel>{{0.5 * gamma, annihilation(FockSpace(2))}});
  EvolveControl ctrl;
  ctrl.t_final = 4.0;
  ctrl.snapshot_every = 20;
  double worst = 0.0;
  for (const auto& sn : evolve(DensityMatrix::basis_state({2}, 1), l, ctrl)) {
    worst = std::max(worst, std::abs(sn.rho.matrix()(1, 1).real() - std::exp(-gamma * sn.t)));
  }
  if (worst > 1e-6) bad.push_back("decay");
  o.pass = bad.empty();
  o.detail = "f1, f2, g2 (thermal, Fock 2), W_vac(0), delta[thermal]; decay error " + fmt(worst);
  for (const auto& b : bad) o.detail += "; failed " + b;
  return o;
}

// 5. Wigner integrity on default grids
Outcome wigner_integrity() {
  Outcome o;
  double worst_mass = 0.0, min_w = 1e300, worst_rot = 0.0, slowest = 0.0;
  for (const auto& wp : kWorkingPoints) {
    for (AlphaConvention c : {AlphaConvention::derived, AlphaConvention::literal}) {
      const PhononDistribution d = analytic_populations(working_params(wp, c), wp.j, wp.j + 2).dist;
      const auto t0 = std::chrono::steady_clock::now();
      const WignerGrid g = wigner(d, default_grid(d));
      slowest = std::max(slowest, elapsed(t0));
      worst_mass = std::max(worst_mass, std::abs(g.mass - 1.0));
      min_w = std::min(min_w, g.min_value());
      for (double r : {0.3, 1.2, 2.7}) {
        for (double th : {0.4, 1.9, 3.3, 5.1}) {
          worst_rot = std::max(worst_rot, std::abs(wigner_point(d, r * std::cos(th), r * std::sin(th)) -
                                                   wigner_point(d, r, 0.0)));
        }
      }
    }
  }
  o.pass = worst_mass <= 1e-4 && min_w > -1e-10 && worst_rot <= 1e-12 && slowest < 5.0;
  o.detail = "8 grids; max |mass-1| = " + fmt(worst_mass) + ", min W = " + fmt(min_w) +
             ", rotation defect " + fmt(worst_rot) + ", slowest grid " + fmt(slowest) + " s";
  return o;
}

// 6. quoted g2 and delta at the caption detunings
Outcome quoted_values() {
  Outcome o;
  struct Cell {
    double g2[2], delta[2], delta_hs[2];
  };
  std::vector<Cell> cells;
  std::size_t within = 0;
  std::ostringstream table;
  for (const auto& wp : kWorkingPoints) {
    Cell cell{};
    bool cell_ok = false;
    for (int k = 0; k < 2; ++k) {
      const AlphaConvention c = k == 0 ? AlphaConvention::derived : AlphaConvention::literal;
      const ConventionMetrics m = compute_metrics(working_params(wp, c), wp.j, c);
      cell.g2[k] = m.error ? NAN : m.g2;
      cell.delta[k] = m.error ? NAN : m.delta_fock;
      cell.delta_hs[k] = m.error ? NAN : m.delta_hs;
      if (std::abs(cell.g2[k] - wp.g2_quoted) <= 0.05 && std::abs(cell.delta[k] - wp.delta_quoted) <= 0.05) {
        cell_ok = true;
      }
    }
    within += cell_ok;
    table << " (eta=" << wp.eta << ",j=" << wp.j << ") quoted g2=" << wp.g2_quoted << " d=" << wp.delta_quoted
          << " | derived g2=" << fmt(cell.g2[0]) << " d=" << fmt(cell.delta[0]) << " | literal g2="
          << fmt(cell.g2[1]) << " d=" << fmt(cell.delta[1]) << (cell_ok ? " [within]" : " [outside]") << ";";
    cells.push_back(cell);
  }
  if (within == cells.size()) {
    o.detail = "all cells within 0.05;" + table.str();
    return o;
  }
  // Degraded check, per convention: delta rises with eta and with j, g2 < 1 everywhere.
  // Cell order: (0.1,1), (0.1,2), (0.3,1), (0.3,2).
  bool any_trend = false;
  std::string trends;
  for (int k = 0; k < 2; ++k) {
    const auto d = [&](int i) { return cells[i].delta[k]; };
    const bool up_eta = d(2) > d(0) && d(3) > d(1);
    const bool up_j = d(1) > d(0) && d(3) > d(2);
    bool sub = true;
    for (const auto& c : cells) sub = sub && c.g2[k] < 1.0;
    any_trend = any_trend || (up_eta && up_j && sub);
    trends += std::string(k == 0 ? " derived" : " literal") + ": delta up with eta " + (up_eta ? "yes" : "no") +
              ", with j " + (up_j ? "yes" : "no") + ", g2<1 " + (sub ? "yes" : "no") + ";";
  }
  o.pass = any_trend;
  o.detail = std::to_string(within) + "/4 cells within 0.05; degraded trends:" + trends + table.str();
  return o;
}

// 7. selectivity roots
Outcome selectivity_roots() {
  Outcome o;
  bool hard = true;
  std::size_t soft = 0;
  std::string detail;
  for (const auto& wp : kWorkingPoints) {
    SystemParams p = working_params(wp, AlphaConvention::derived);
    std::vector<Bracket> brackets;
    std::string how = "reference bracket";
    try {
      brackets.push_back(default_bracket(p, wp.j));
      solve_detuning(p, wp.j, brackets.back());
    } catch (const BracketError&) {
      brackets.clear();
      how = "scan";
      // Sign change closest to the reference value anywhere on (-3 omega_m, 3 omega_m).
      auto all = scan_sign_changes(p, wp.j, {-3 * p.omega_m, 3 * p.omega_m}, 6000);
      std::sort(all.begin(), all.end(), [&](const Bracket& a, const Bracket& b) {
        return std::abs(0.5 * (a.lo + a.hi) - wp.delta_a) < std::abs(0.5 * (b.lo + b.hi) - wp.delta_a);
      });
      if (!all.empty()) brackets.push_back(all.front());
    }
    if (brackets.empty()) {
      hard = false;
      detail += " (eta=" + fmt(wp.eta) + ",j=" + std::to_string(wp.j) + ") no root;";
      continue;
    }
    const Bracket b = brackets.front();
    const SelectivityReport r = solve_detuning(p, wp.j, b);
    SystemParams lo = p, hi = p;
    lo.delta_a = b.lo;
    hi.delta_a = b.hi;
    const bool sign_change = std::signbit(phi_n(lo, wp.j)) != std::signbit(phi_n(hi, wp.j));
    const bool ok = r.residual < 1e-9 && sign_change && r.delta_a > b.lo && r.delta_a < b.hi;
    hard = hard && ok;
    const double dev = r.delta_a - wp.delta_a;
    soft += std::abs(dev) <= 0.3;
    detail += " (eta=" + fmt(wp.eta) + ",j=" + std::to_string(wp.j) + ") root " + fmt(r.delta_a, 6) + " via " +
              how + ", |phi| " + fmt(r.residual) + ", deviation " + fmt(dev, 4) + ";";
  }
  o.pass = hard && soft == kWorkingPoints.size();
  o.detail = std::string("hard ") + (hard ? "passed" : "FAILED") + ", soft " + std::to_string(soft) +
             "/4 within 0.3:" + detail;
  return o;
}

// 8. reduced-scale three-mode model
Outcome full_model() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  ValidationSpec v;  // n_c = 8, nbar_p = 0.5, kappa_a = kappa_b = 0.15
  std::string detail;
  for (std::size_t j : {1u, 2u}) {
    SystemParams p;
    const SelectivityReport root = validation_root(p, j, v);
    p.delta_a = root.delta_a;
    const FullModelRun r = run_full_model(p, j, v);
    o.pass = o.pass && r.passed();
    detail += " eta=0.1 j=" + std::to_string(j) + ": Delta_a " + fmt(root.delta_a, 6) + ", enhancement " +
              fmt(r.enhancement, 4) + ", p_{j+1} suppression " + fmt(100 * r.suppression, 4) + "%;";
  }
  {
    SystemParams p;
    p.omega_m = 1.0 / 0.3;
    const SelectivityReport root = validation_root(p, 1, v);
    p.delta_a = root.delta_a;
    const FullModelRun r = run_full_model(p, 1, v);
    detail += " (info) eta=0.3 j=1: enhancement " + fmt(r.enhancement, 4) + ", suppression " +
              fmt(100 * r.suppression, 4) + "%;";
  }
  const double t = elapsed(t0);
  o.pass = o.pass && t < 120.0;
  o.detail = "N_c=8, nbar_p=0.5:" + detail + " " + fmt(t) + " s";
  return o;
}

// 9. byte-identical outputs across repeated runs
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "optomech_acceptance";
  fs::remove_all(root);
  std::size_t compared = 0;
  std::vector<std::string> mismatched;

  auto compare_dirs = [&](const fs::path& a, const fs::path& b) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
      const fs::path rel = fs::relative(e.path(), a);
      ++compared;
      if (slurp(e.path()) != slurp(b / rel)) mismatched.push_back(rel.string());
    }
  };

  std::vector<std::string> configs{
      R"({"outputs":["populations","wigner","metrics","selectivity","full_model_validation"]})"};
  for (const auto& wp : kWorkingPoints) {
    configs.push_back(R"({"params":{"omega_m":)" + format_number(1.0 / wp.eta) + R"(},"target_j":)" +
                      std::to_string(wp.j) + R"(,"outputs":["populations","wigner","metrics","selectivity"]})");
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ScenarioConfig c = parse_config(configs[i]);
    const fs::path a = root / ("s" + std::to_string(i) + "_a");
    const fs::path b = root / ("s" + std::to_string(i) + "_b");
    run_scenario(c, a);
    run_scenario(c, b);
    compare_dirs(a, b);
  }
  const auto sweep = nlohmann::json::parse(R"({"sweep":{"eta":[0.1,0.3],"j":[1,2]}})");
  run_sweep(sweep, root / "sweep_a", 2);
  run_sweep(sweep, root / "sweep_b", 1);
  compare_dirs(root / "sweep_a", root / "sweep_b");

  // The command-line front end, twice.
  const fs::path cfg = root / "cli.json";
  write_file(cfg, "{}");
  for (const char* tag : {"cli_a", "cli_b"}) {
    const std::string cmd = std::string(SIMULATOR_PATH) + " run --config " + cfg.string() + " --out " +
                            (root / tag).string() + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) mismatched.push_back(std::string(tag) + " exit status");
  }
  compare_dirs(root / "cli_a", root / "cli_b");

  fs::remove_all(root);
  o.pass = mismatched.empty() && compared > 0;
  o.detail = std::to_string(compared) + " files compared, " + std::to_string(mismatched.size()) + " differ";
  for (const auto& m : mismatched) o.detail += "; " + m;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"steady-state oracle equivalence", steady_state_oracles},
      {"normalization identity", normalization_identity},
      {"detailed balance", detailed_balance},
      {"closed-form oracles", closed_forms},
      {"Wigner integrity", wigner_integrity},
      {"quoted value reproduction", quoted_values},
      {"selectivity solver", selectivity_roots},
      {"full-model structural validation", full_model},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " [" << criteria[i].first
              << "] " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
