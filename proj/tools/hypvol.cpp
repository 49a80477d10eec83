#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hypvol/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hypvol: volumes of quotients of SO_0(n,1) by dominated pairs"};
  std::vector<std::string> verbs;
  for (const auto& [name, cmd] : hypvol::commands()) verbs.push_back(name);

  std::string verb;
  app.add_option("command", verb, "command to run")->required()->check(CLI::IsMember(verbs));
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  const std::vector<std::pair<std::string, std::string>> keys{
      {"n", "dimension"},
      {"genus", "surface genus"},
      {"punctures", "number of punctures"},
      {"seed", "random seed"},
      {"samples", "Monte Carlo samples"},
      {"mesh-h", "target mesh edge length"},
      {"refine", "mesh refinement level"},
      {"tol", "tolerance"},
      {"out", "output file"},
      {"rho", "trivial, elliptic, fuchsian or reversed"},
      {"rep", "representation file"},
      {"map-file", "map file"},
      {"map", "constant or relaxed"},
      {"iterations", "relaxation sweeps"},
      {"L", "maximal word length"},
      {"paths", "random simplex paths"},
      {"matrices", "random matrices per dimension"},
      {"expect", "expected value"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [k, help] : keys) opts[k] = app.add_option("--" + k, values[k], help);
  std::vector<std::string> extra;
  app.add_option("--set", extra, "extra key=value settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hypvol::kExitConfig;
  }

  hypvol::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = hypvol::RunConfig::load(config_path);
    for (const auto& [k, opt] : opts)
      if (opt->count()) cfg.set(k, values[k]);
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw hypvol::ParseError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const hypvol::Error& e) {
    std::cerr << "hypvol: " << e.what() << '\n';
    return hypvol::kExitConfig;
  }
  return hypvol::run_command(verb, cfg, std::cout, std::cerr);
}
