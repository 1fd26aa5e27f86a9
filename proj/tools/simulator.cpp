// simulator <subcommand> --config <path> --out <dir> [--alpha-convention derived|literal] [--parallel N]

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <thread>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"
#include "optomech/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw optomech::ConfigError("cannot read config '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective phonon-state engineering simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(optomech::kToolVersion));

  std::string config_path;
  std::string out_dir;
  std::string convention;
  unsigned parallel = 0;

  struct Stage {
    const char* name;
    const char* help;
    std::optional<optomech::OutputKind> only;
  };
  const Stage stages[] = {
      {"run", "run every output listed in the config", std::nullopt},
      {"solve-detuning", "solve phi_j = 0 and audit the selectivity conditions",
       optomech::OutputKind::selectivity},
      {"steady-state", "stationary phonon populations", optomech::OutputKind::populations},
      {"wigner", "Wigner function on a grid", optomech::OutputKind::wigner},
      {"metrics", "g2(0), non-Gaussianity and rates for both conventions",
       optomech::OutputKind::metrics},
      {"validate-full", "reduced-scale three-mode steady state",
       optomech::OutputKind::full_model_validation},
      {"sweep", "parameter sweep from the config's sweep section", std::nullopt},
  };
  for (const auto& s : stages) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "scenario JSON")->required();
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--alpha-convention", convention, "derived or literal")
        ->check(CLI::IsMember({"derived", "literal"}));
    sub->add_option("--parallel", parallel, "sweep workers (default: available cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();

  try {
    nlohmann::json doc = optomech::parse_json_text(read_text(config_path));
    if (!doc.is_object()) throw optomech::ConfigError("config must be a JSON object");
    if (!convention.empty()) doc["params"]["alpha_convention"] = convention;
    optomech::ScenarioConfig cfg = optomech::parse_config_json(doc);

    std::string dir = out_dir;
    if (dir.empty() && cfg.out_dir) dir = *cfg.out_dir;
    if (dir.empty()) throw optomech::ConfigError("no output directory: pass --out or set 'out_dir'");

    if (name == "sweep") {
      const unsigned workers = parallel ? parallel : std::max(1u, std::thread::hardware_concurrency());
      const auto o = optomech::run_sweep(doc, dir, workers);
      std::cout << o.points - o.failed << "/" << o.points << " sweep points completed\n";
      return o.failed ? kExitPartial : kExitOk;
    }

    for (const auto& s : stages) {
      if (name == s.name && s.only) cfg.outputs = {*s.only};
    }
    const auto rm = optomech::run_scenario(cfg, dir);
    for (const auto& f : rm.files) std::cout << (std::filesystem::path(dir) / f).string() << "\n";
    return kExitOk;
  } catch (const optomech::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
