#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace osgood;
  CLI::App app{"Yudovich-type spaces, K-functionals and Osgood flows on the 2D torus"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, manifest_path;
  cli::KeyValues flags;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--manifest", manifest_path, "replay a manifest.json written by an earlier run");

  // Every config key is also a flag; the flag value is stored verbatim.
  const std::vector<std::pair<std::string, std::string>> keys{
      {"field", "field source: builtin:<name> or a file"},
      {"kind", "example kind (logpower, loglog, bmo, yudovich)"},
      {"example-alpha", "exponent of the LogPower example"},
      {"n", "grid size (power of two)"},
      {"centered", "place the singularity at the origin node"},
      {"domain", "torus2pi or unit"},
      {"theta", "growth: const[:c], power:a, log:a, logpower:a:b, shifted:a[:b], csv:path"},
      {"growth", "growth family when --theta is absent"},
      {"alpha", "growth exponent (example exponent for verify-example)"},
      {"log-alphas", "iterated-log exponents, comma separated"},
      {"p0", "lowest exponent"},
      {"lambda", "sharp maximal quantile in (0, 1/2]"},
      {"beta", "kernel regularity / smoothness index"},
      {"kappa", "scale gap for sequence spaces"},
      {"t-end", "final time"},
      {"epsilon", "initial separation"},
      {"orientation", "zero or infinity"},
      {"modulus", "yudovich, power:<a> or rlog:<k>"},
      {"eps-L", "integration endpoint near zero"},
      {"norm", "sharp-yudovich, vishik or classical"},
      {"pair", "lp_linf, lp_bmo, linf_lip or seq"},
      {"ns", "grid sizes, comma separated"},
      {"window-lo", "lower end of the asymptotics window"},
      {"window-hi", "upper end of the asymptotics window"},
      {"seed", "random seed"},
      {"output", "output directory"}};
  std::map<std::string, std::string> values;
  for (const auto& [k, help] : keys) app.add_option("--" + k, values[k], help);
  bool strict = false, explain = false;
  app.add_flag("--strict", strict, "exit 4 when the verdict fails");
  app.add_flag("--explain", explain, "print the resolved configuration and parameter conventions");

  for (const auto& s : cli::subcommands()) app.add_subcommand(s, "run the " + s + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cli::KeyValues kv;
    if (!manifest_path.empty()) kv = cli::load_manifest(manifest_path);
    if (!config_path.empty())
      for (auto& [k, v] : cli::load_key_values(config_path)) kv[k] = v;
    for (const auto& [k, help] : keys) {
      if (app.count("--" + k) == 0) continue;
      std::string key = k;
      std::replace(key.begin(), key.end(), '-', '_');
      kv[key] = values[k];
    }
    if (strict) kv["strict"] = "true";
    kv["subcommand"] = app.get_subcommands().front()->get_name();

    const auto config = cli::ExperimentConfig::from_map(kv);
    if (explain) std::cout << cli::explain(config);
    const auto result = cli::run(config);
    std::cout << result.summary;
    for (const auto& f : result.files) std::cout << "wrote " << config.output << '/' << f << '\n';
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "osgood: " << e.what() << '\n';
    return cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "osgood: " << e.what() << '\n';
    return 3;
  }
}
