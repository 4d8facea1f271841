#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lorentz/scenario.hpp"

using namespace lorentz;

namespace {
std::string value(const ScenarioOutcome& o, const std::string& key) {
  for (const auto& [k, v] : o.summary)
    if (k == key) return v;
  return "";
}

const char* ads_conjugate = R"(
[scenario]
name = ads
[metric]
name = ads2
[initial]
x = 0, 0
v = 1, 0.5
[run]
kind = conjugate
t_max = 4
)";

const char* twin = R"(
[scenario]
name = twin-small
[metric]
name = minkowski
n = 3
[initial]
p = 0, 0, 0, 0
q = 2, 0.3, 0, 0
[run]
kind = twin
trials = 20
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}
}  // namespace

TEST_CASE("FNV-1a 64 reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("parsing: sections, comments, duplicates") {
  const ScenarioText t = ScenarioText::parse("# c\n[a]\nx = 1\n y= two words \n[expect]\nk <= 1\nk >= 0\n", "mem");
  CHECK(t.get("a", "x") == "1");
  CHECK(t.get("a", "y") == "two words");
  CHECK_FALSE(t.get("a", "z"));
  CHECK(t.sections.at("expect").size() == 2);
  CHECK_THROWS(ScenarioText::parse("[a]\nx = 1\nx = 2\n", "mem"));
  CHECK_THROWS(ScenarioText::parse("x = 1\n", "mem"));
  CHECK_THROWS(ScenarioText::parse("[a]\njunk\n", "mem"));
}

TEST_CASE("a conjugate scenario runs and reports") {
  const ScenarioOutcome o = run_scenario_text(ads_conjugate, "mem", {});
  CHECK(o.exit_code == exit_code::ok);
  CHECK(o.name == "ads");
  CHECK(std::abs(std::stod(value(o, "t_star")) - 3.141592653589793) < 1e-4);
  CHECK(o.csv.rfind("# lorentz_lab ", 0) == 0);
  CHECK(o.csv.find("# scenario ads fnv1a ") != std::string::npos);
  CHECK(o.report().find("exit = 0") != std::string::npos);
}

TEST_CASE("expectations drive exit code 2") {
  std::string text = ads_conjugate;
  CHECK(run_scenario_text(text + "[expect]\nt_star = 3.14159265 +- 1e-4\n", "mem", {}).exit_code == 0);
  const ScenarioOutcome bad = run_scenario_text(text + "[expect]\nt_star = 3 +- 1e-4\n", "mem", {});
  CHECK(bad.exit_code == exit_code::bound_failed);
  REQUIRE(bad.failures.size() == 1);
  CHECK(bad.failures[0].find("t_star") != std::string::npos);
  CHECK(run_scenario_text(text + "[expect]\nno_such_key < 1\n", "mem", {}).exit_code == exit_code::config_error);
  CHECK(run_scenario_text(text + "[expect]\nt_star ~ 1\n", "mem", {}).exit_code == exit_code::config_error);
}

TEST_CASE("configuration errors name the offending field") {
  std::string text = ads_conjugate;
  auto err = [](const std::string& s) { return run_scenario_text(s, "mem", {}); };

  ScenarioOutcome o = err(text + "[tolerances]\nrel_tol = fast\n");
  CHECK(o.exit_code == exit_code::config_error);
  CHECK(o.error.find("tolerances.rel_tol") != std::string::npos);

  o = err(text + "[output]\nflavour = 1\n");
  CHECK(o.exit_code == exit_code::config_error);
  CHECK(o.error.find("output.flavour") != std::string::npos);

  std::string no_v = text;
  no_v.replace(no_v.find("v = 1, 0.5"), 10, "");
  o = err(no_v);
  CHECK(o.exit_code == exit_code::config_error);
  CHECK(o.error.find("initial.v") != std::string::npos);

  std::string kerr = text;
  kerr.replace(kerr.find("ads2"), 4, "kerr");
  CHECK(err(kerr).exit_code == exit_code::config_error);

  std::string outside = text;
  outside.replace(outside.find("x = 0, 0"), 8, "x = 0, 2");
  CHECK(err(outside).exit_code == exit_code::config_error);
}

TEST_CASE("degraded integration is a numerical failure") {
  const char* text = R"(
[scenario]
name = degraded
[metric]
name = schwarzschild-exterior
[initial]
x = 0, 10, pi/2, 0
v = 1, -0.3, 0, 0.02
[run]
kind = geodesic
lambda_max = 20
[tolerances]
rel_tol = 1e-3
abs_tol = 1e-3
drift_bound = 1e-12
)";
  const ScenarioOutcome o = run_scenario_text(text, "mem", {});
  CHECK(o.exit_code == exit_code::numerical_failure);
  CHECK_FALSE(o.error.empty());
}

TEST_CASE("reruns are byte-identical and seeds follow precedence") {
  const ScenarioOutcome a = run_scenario_text(twin, "mem", {});
  const ScenarioOutcome b = run_scenario_text(twin, "mem", {});
  REQUIRE(a.exit_code == 0);
  CHECK(a.csv == b.csv);
  CHECK(a.csv.find("seed 1") != std::string::npos);

  RunOptions two;
  two.jobs = 2;
  CHECK(run_scenario_text(twin, "mem", two).csv == a.csv);

  const std::string with_seed = std::string(twin) + "seed = 5\n";
  const ScenarioOutcome file_seed = run_scenario_text(with_seed, "mem", {});
  CHECK(file_seed.csv.find("seed 5") != std::string::npos);
  CHECK(file_seed.csv != a.csv);

  RunOptions cli;
  cli.seed = 9;
  CHECK(run_scenario_text(with_seed, "mem", cli).csv.find("seed 9") != std::string::npos);

  ::setenv("LORENTZ_LAB_SEED", "11", 1);
  CHECK(run_scenario_text(twin, "mem", {}).csv.find("seed 11") != std::string::npos);
  CHECK(run_scenario_text(with_seed, "mem", {}).csv.find("seed 5") != std::string::npos);
  ::unsetenv("LORENTZ_LAB_SEED");
}

TEST_CASE("builtin recipes") {
  const auto& rs = builtin_recipes();
  auto has = [&](const char* n) { return find_recipe(n) != nullptr; };
  CHECK(has("schwarzschild-interior-collapse"));
  CHECK(has("clifton-pohl-incomplete"));
  CHECK(has("milne-incomplete"));
  CHECK_FALSE(has("nope"));
  for (const Recipe& r : rs) {
    CAPTURE(r.name);
    CHECK_FALSE(r.about.empty());
    const ScenarioOutcome o = run_scenario_text(r.text, r.name, {});
    CHECK(o.exit_code == exit_code::ok);
    if (o.exit_code != 0) MESSAGE(o.report());
  }
}

TEST_CASE("embedded recipes match the recipe directory") {
  namespace fs = std::filesystem;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(LORENTZ_RECIPE_DIR)) {
    if (entry.path().extension() != ".scn") continue;
    ++files;
    const Recipe* r = find_recipe(entry.path().stem().string());
    REQUIRE(r);
    CHECK(r->text == slurp(entry.path()));
  }
  CHECK(files == builtin_recipes().size());
}
