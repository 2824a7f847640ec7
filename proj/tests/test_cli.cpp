#include <doctest.h>

#include "fracgl/experiments.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

using namespace fracgl;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACGL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracgl_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("figure1 writes the profile, the plot and a summary with thresholds") {
    const fs::path out = scratch("figure1");
    CHECK(run_cli("figure1 --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "summary.json"));
    CHECK(slurp(out / "profile.csv").rfind("x,u,phi_ss\n", 0) == 0);
    CHECK(slurp(out / "profile.svg").find("<svg") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(j["experiment"] == "figure1");
    CHECK(j["passed"] == true);
    CHECK(j["inputs"]["n"] == 200);
    CHECK(j["inputs"]["gamma"] == 1.5);
    CHECK(j["inputs"]["phi_l"] == 1.0);
    CHECK(j["inputs"]["phi_r"] == 2.0);
    REQUIRE(j["checks"].size() >= 4);
    for (const auto& c : j["checks"]) {
      CHECK(c["criterion"] == 2);
      CHECK(c.contains("threshold"));
      CHECK(c.contains("relation"));
    }
    fs::remove_all(out);
  }

  TEST_CASE("missing or unwritable output directory is a usage error with no artifacts") {
    CHECK(run_cli("figure1") == 1);
    CHECK(run_cli("figure1 --out /proc/fracgl_cannot_write_here") == 1);
    CHECK_FALSE(fs::exists("/proc/fracgl_cannot_write_here"));
  }

  TEST_CASE("unknown experiments and invalid parameters exit with 1") {
    const fs::path out = scratch("bad");
    CHECK(run_cli("no-such-experiment --out " + out.string()) == 1);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("figure1 --gamma 2.5 --out " + out.string()) == 1);
    CHECK_FALSE(fs::exists(out / "summary.json"));
    CHECK(run_cli("figure1 --n notanumber --out " + out.string()) == 1);
    CHECK(run_cli("hydro-limit --replicas 0 --out " + out.string()) == 1);
    fs::remove_all(out);
  }

  TEST_CASE("a failed check exits with 2 and still writes the summary") {
    const fs::path out = scratch("fail");
    CHECK(run_cli("rate-check --dt 0.25 --out " + out.string()) == 2);
    const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(j["passed"] == false);
    fs::remove_all(out);
  }

  TEST_CASE("config file values are overridden by flags") {
    const fs::path out = scratch("config");
    fs::create_directories(out);
    {
      std::ofstream cfg(out / "run.ini");
      cfg << "n = 60\ngamma = 1.3\nphi-l = 0.5\n";
    }
    CHECK(run_cli("figure1 --config " + (out / "run.ini").string() + " --n 40 --out " + out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(j["inputs"]["n"] == 40);
    CHECK(j["inputs"]["gamma"] == 1.3);
    CHECK(j["inputs"]["phi_l"] == 0.5);
    CHECK(j["inputs"]["phi_r"] == 2.0);
    fs::remove_all(out);
  }

  TEST_CASE("same seed gives an identical summary regardless of thread count") {
    const fs::path a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
    const std::string args = "girsanov --replicas 300 --seed 77 --threads ";
    CHECK(run_cli(args + "1 --out " + a.string()) == 0);
    CHECK(run_cli(args + "3 --out " + b.string()) == 0);
    CHECK(run_cli("girsanov --replicas 300 --seed 78 --out " + c.string()) == 0);
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "summary.json") != slurp(c / "summary.json"));
    for (const auto& p : {a, b, c}) fs::remove_all(p);
  }

  TEST_CASE("experiment library: catalog, criteria bookkeeping, summary") {
    std::set<int> covered;
    for (const auto& info : experiment_catalog()) covered.insert(info.criteria.begin(), info.criteria.end());
    CHECK(covered.size() == 13);
    CHECK_THROWS_AS(run_experiment({.experiment = "nope"}), DomainError);

    ExperimentConfig cfg;
    cfg.experiment = "adjoint";
    const ExperimentOutput out = run_experiment(cfg);
    CHECK(out.passed());
    CHECK(out.criterion_passed(12) == std::optional<bool>(true));
    CHECK_FALSE(out.criterion_passed(3).has_value());
    CHECK(out.metrics.count("defect_driven") == 1);
    CHECK(summary_json(out) == summary_json(run_experiment(cfg)));

    ExperimentOutput mixed;
    mixed.checks = {{1, "a", true, 0, 0, "<="}, {1, "b", false, 1, 0, "<="}, {2, "c", true, 0, 0, "<="}};
    CHECK_FALSE(mixed.passed());
    CHECK(mixed.criterion_passed(1) == std::optional<bool>(false));
    CHECK(mixed.criterion_passed(2) == std::optional<bool>(true));
  }
}
