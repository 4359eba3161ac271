#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace osgood;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("osgood_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string binary() {
  const char* p = std::getenv("OSGOOD_CLI");
  return p ? p : "";
}

int shell(const std::string& args) {
  const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

cli::ExperimentConfig config(cli::KeyValues kv) { return cli::ExperimentConfig::from_map(kv); }

}  // namespace

TEST_CASE("key=value parsing", "[cli]") {
  std::istringstream in("# comment\n n = 64\n\ntheta=\"power:2\"\nlambda='0.1'  # trailing\n");
  const auto kv = cli::parse_key_values(in);
  CHECK(kv.at("n") == "64");
  CHECK(kv.at("theta") == "power:2");
  CHECK(kv.at("lambda") == "0.1");
  CHECK(kv.size() == 3);
  std::istringstream bad("n 64\n");
  CHECK_THROWS_AS(cli::parse_key_values(bad), Error);
  CHECK(cli::parse_list("1, 2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK_THROWS_AS(cli::parse_double("n", "abc"), Error);
  CHECK_THROWS_AS(cli::load_key_values("/nonexistent/osgood.cfg"), Error);
}

TEST_CASE("growth specifications", "[cli]") {
  CHECK(cli::parse_growth("const", 1.0)(5.0) == 1.0);
  CHECK(cli::parse_growth("const:3", 1.0)(5.0) == 3.0);
  CHECK(cli::parse_growth("power:2", 1.0)(3.0) == Catch::Approx(9.0));
  CHECK(cli::parse_growth("log:1", 1.0)(std::exp(2.0)) == Catch::Approx(2.0));
  CHECK(cli::parse_growth("shifted:0:1", 1.0).name() == GrowthFunction::shifted(0.0, {1.0}).name());
  CHECK_THROWS_AS(cli::parse_growth("cubic", 1.0), Error);
  CHECK_THROWS_AS(cli::parse_growth("csv:/nonexistent.csv", 1.0), Error);
}

TEST_CASE("config validation", "[cli]") {
  const auto c = config({{"subcommand", "ynorm"}});
  CHECK(c.n == 256);
  CHECK(c.p0 == 1.0);
  CHECK(c.lambda == 0.25);
  CHECK(c.theta == "power:1");
  CHECK(config({{"subcommand", "verify-example"}, {"kind", "loglog"}}).theta == "shifted:0:1");
  CHECK(config({{"subcommand", "envelope"}}).theta == "const");
  CHECK(config({{"subcommand", "vishik-norm"}}).theta == "shifted:0:1");
  CHECK(config({{"subcommand", "ynorm"}, {"growth", "power"}, {"alpha", "2"}}).theta == "power:2");

  auto code = [](cli::KeyValues kv) {
    try {
      config(std::move(kv));
    } catch (const Error& e) {
      return cli::exit_code_for(e);
    }
    return 0;
  };
  CHECK(code({{"subcommand", "ynorm"}, {"n", "100"}}) == 2);
  CHECK(code({{"subcommand", "ynorm"}, {"n", "8192"}}) == 2);
  CHECK(code({{"subcommand", "ynorm"}, {"lambda", "0.7"}}) == 2);
  CHECK(code({{"subcommand", "ynorm"}, {"p0", "0.5"}}) == 2);
  CHECK(code({{"subcommand", "ynorm"}, {"colour", "red"}}) == 2);
  CHECK(code({{"subcommand", "nothing"}}) == 2);
  CHECK(code({{"subcommand", "osgood"}, {"orientation", "sideways"}}) == 2);
  CHECK(code({{"subcommand", "ynorm"}, {"n", "64"}}) == 0);
  CHECK(cli::exit_code_for(Error(ErrorCode::StepUnstable, "x")) == 3);
  CHECK(cli::exit_code_for(Error(ErrorCode::IoError, "x")) == 2);
}

TEST_CASE("runs write reports and a replayable manifest", "[cli]") {
  const fs::path dir = scratch("lib");
  const auto c = config({{"subcommand", "ynorm"}, {"n", "32"}, {"ns", "16,32"}, {"output", dir.string()}});
  const auto r = cli::run(c);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "norms.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "manifest.json"));
  const std::string first = slurp(dir / "norms.csv");

  auto kv = cli::load_manifest((dir / "manifest.json").string());
  CHECK(kv.at("n") == "32");
  CHECK(kv.at("subcommand") == "ynorm");
  const auto again = cli::run(cli::ExperimentConfig::from_map(kv));
  CHECK(again.exit_code == 0);
  CHECK(slurp(dir / "norms.csv") == first);
  CHECK(cli::explain(c).find("lambda") != std::string::npos);
}

TEST_CASE("every subcommand runs", "[cli]") {
  for (const auto& sub : cli::subcommands()) {
    const fs::path dir = scratch("sub_" + sub);
    cli::KeyValues kv{{"subcommand", sub}, {"n", "32"}, {"output", dir.string()}};
    if (sub == "verify-example") kv = {{"subcommand", sub}, {"n", "128"}, {"ns", "32,64"}, {"window_lo", "1e-3"}, {"output", dir.string()}};
    if (sub == "twinflow") kv["t_end"] = "0.1";
    if (sub == "envelope") kv["ns"] = "16,32";
    INFO(sub);
    const auto r = cli::run(config(kv));
    CHECK(!r.files.empty());
    for (const auto& f : r.files) CHECK(fs::exists(dir / f));
    CHECK(r.report.is_object());
  }
}

TEST_CASE("executable exit codes", "[cli][exe]") {
  if (binary().empty()) SKIP("OSGOOD_CLI not set");
  const fs::path dir = scratch("exe");
  const std::string out = " --output " + dir.string();
  CHECK(shell("--version") == 0);
  CHECK(shell("ynorm --n 32" + out) == 0);
  CHECK(shell("ynorm --n 100" + out) == 2);
  CHECK(shell("ynorm --unknown-flag 1" + out) == 2);
  CHECK(shell("") == 2);
  CHECK(shell("ynorm --config /nonexistent.cfg" + out) == 2);
  CHECK(shell("verify-example --n 64 --window-lo 1e-5" + out) == 3);
  CHECK(shell("osgood --modulus power:1" + out) == 0);
  CHECK(shell("verify-example --field builtin:const --n 128 --ns 32,64 --window-lo 1e-3" + out) == 0);
  CHECK(shell("verify-example --field builtin:const --n 128 --ns 32,64 --window-lo 1e-3 --strict" + out) == 4);
}

TEST_CASE("config files, flags and manifests combine", "[cli][exe]") {
  if (binary().empty()) SKIP("OSGOOD_CLI not set");
  const fs::path dir = scratch("merge");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "n=16\ntheta=power:2\nlambda=0.1\n";
  }
  REQUIRE(shell("sharp-ynorm --config " + (dir / "run.cfg").string() + " --n 32 --output " + (dir / "a").string()) == 0);
  const auto kv = cli::load_manifest((dir / "a" / "manifest.json").string());
  CHECK(kv.at("n") == "32");
  CHECK(kv.at("theta") == "power:2");
  CHECK(kv.at("lambda") == "0.10000000000000001");
  REQUIRE(shell("sharp-ynorm --manifest " + (dir / "a" / "manifest.json").string() + " --output " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "norms.csv") == slurp(dir / "b" / "norms.csv"));
}
