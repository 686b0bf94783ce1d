#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "maghelm/config.hpp"
#include "maghelm/report.hpp"
#include "maghelm/runner.hpp"

using namespace maghelm;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("maghelm_cli_" + std::to_string(::getpid())) / name;
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

int maghelm_run(const std::string& args) {
  std::string cmd = std::string(MAGHELM_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cfg(const std::string& name) { return std::string(MAGHELM_CONFIGS) + "/" + name; }

fs::path write_config(const fs::path& dir, const std::string& text) {
  auto p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

report::Row row(const std::string& kind, double lambda, double lhs, double rhs) {
  ProblemSpec p;
  p.lambda = lambda;
  report::Row r{make_report(kind, lhs, rhs, p), {"abc", 1024, "fd"}};
  return r;
}
}  // namespace

TEST_CASE("config parsing") {
  auto c = config::parse(R"({"command": "hardy", "problem": {"d": 3, "nodes": 1024}, "potential": {"kind": "free"}})");
  CHECK(c.command == config::Command::hardy);
  CHECK(c.nodes == 1024);
  CHECK(c.problem.d == 3);
  CHECK(c.out == "out");
  CHECK_FALSE(c.canonical.empty());

  CHECK_THROWS_WITH_AS(config::parse(R"({"command": "hardy", "bogus": 1})"), "unknown key 'bogus' in config",
                       config::ConfigError);
  CHECK_THROWS_WITH_AS(config::parse(R"({"command": "estimates", "sweep": {"lambdas": [], "epsilons": [0.1]}})"),
                       "empty grid", config::ConfigError);
  CHECK_THROWS_WITH_AS(config::parse(R"({"command": "fly"})"), "unknown command: fly", config::ConfigError);
  CHECK_THROWS_WITH_AS(config::parse(R"({"problem": {}})"), "config needs a command", config::ConfigError);
  CHECK_THROWS_AS(config::parse("{not json"), config::ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"command": "solve", "problem": {"nodes": 8}})"), config::ConfigError);
  for (auto k : {config::Command::solve, config::Command::identity, config::Command::estimates, config::Command::hardy,
                 config::Command::farfield, config::Command::spectral, config::Command::evolve, config::Command::report})
    CHECK(config::command_from_string(config::to_string(k)) == k);
}

TEST_CASE("spec hash follows the problem, not the output path") {
  auto a = config::parse(R"({"command": "hardy", "problem": {"d": 3}, "out": "x"})");
  auto b = config::parse(R"({"command": "hardy", "problem": {"d": 3}, "out": "y"})");
  auto c = config::parse(R"({"command": "hardy", "problem": {"d": 2}, "out": "x"})");
  CHECK(config::spec_hash(a) == config::spec_hash(b));
  CHECK(config::spec_hash(a) != config::spec_hash(c));
  CHECK(a.canonical == b.canonical);
  config::set_seed(a, 42);
  CHECK(a.seed == 42);
  CHECK(a.canonical != b.canonical);
}

TEST_CASE("report formats") {
  CHECK(report::format_from_string("csv") == report::Format::csv);
  CHECK_THROWS_WITH_AS(report::format_from_string("xls"), "unknown format: xls", Error);
  CHECK(report::number(0.1) == "0.10000000000000001");
  CHECK(report::number(INFINITY) == "inf");
  CHECK(report::number(NAN) == "nan");
  CHECK(report::fnv1a_hex("") == "cbf29ce484222325");

  std::vector<report::Row> rows{row("bp", 10, 2, 4), row("bp", 1, 1, 2), row("src", 1, 3, 1)};
  rows[0].report.extras["lambda"] = 10;
  auto csv = report::emit_report(rows, report::Format::csv);
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header.rfind("kind,lambda,epsilon,sign,d,r_min,r_max,mode_cutoff,lhs,rhs,ratio,spec_hash,mesh_nodes,solver,notes", 0) == 0);
  CHECK(header.find(",extra_lambda") != std::string::npos);
  CHECK(first.rfind("bp,1,", 0) == 0);

  auto j = nlohmann::json::parse(report::emit_report(rows, report::Format::json));
  REQUIRE(j.size() == 3);
  CHECK(j[2]["kind"] == "src");
  CHECK(j[0]["spec_hash"] == "abc");

  rows.push_back(row("bp", 100, INFINITY, 1));
  auto j2 = nlohmann::json::parse(report::emit_report(rows, report::Format::json));
  CHECK(j2[2]["lhs"] == "inf");

  auto svg = report::emit_report(rows, report::Format::svg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  auto shuffled = rows;
  std::swap(shuffled[0], shuffled[3]);
  CHECK(report::emit_report(shuffled, report::Format::csv) == report::emit_report(rows, report::Format::csv));
}

TEST_CASE("cli: hardy run writes a summary with the constant") {
  auto dir = scratch("hardy");
  CHECK(maghelm_run("hardy --config " + cfg("free_d3.json") + " --out " + dir.string()) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["status"] == "pass");
  CHECK(j["hardy_constant"].get<double>() == doctest::Approx(4.0).epsilon(0.01));
  CHECK(fs::exists(dir / "reports.csv"));
}

TEST_CASE("cli: unbounded Hardy case passes its expectation") {
  auto dir = scratch("ab");
  CHECK(maghelm_run("hardy --config " + cfg("ab_hardy_unbounded.json") + " --out " + dir.string()) == 0);
}

TEST_CASE("cli: config errors exit 2 and write nothing") {
  auto dir = scratch("bad");
  auto out = dir / "out";
  auto p = write_config(dir, R"({"command": "estimates", "sweep": {"lambdas": [], "epsilons": [0.1]}})");
  CHECK(maghelm_run("estimates --config " + p.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out / "summary.json"));
  p = write_config(dir, R"({"command": "hardy", "colour": "red"})");
  CHECK(maghelm_run("hardy --config " + p.string() + " --out " + out.string()) == 2);
  CHECK(maghelm_run("solve --config " + cfg("free_d3.json") + " --out " + out.string()) == 2);
  CHECK(maghelm_run("hardy --config " + (dir / "missing.json").string()) == 2);
  CHECK(maghelm_run("hardy") == 2);
  CHECK_FALSE(fs::exists(out / "summary.json"));
}

TEST_CASE("cli: failing assertion exits 1") {
  auto dir = scratch("fail");
  auto p = write_config(dir, R"({"command": "hardy", "problem": {"d": 3, "nodes": 1024},
    "potential": {"kind": "free"}, "options": {"expect_range": [5.0, 6.0]}})");
  CHECK(maghelm_run("hardy --config " + p.string() + " --out " + (dir / "out").string()) == 1);
  auto j = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(j["status"] == "fail");
}

TEST_CASE("cli: solve with solver comparison") {
  auto dir = scratch("solve");
  CHECK(maghelm_run("solve --config " + cfg("solve_compare.json") + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "solution.csv"));
}

TEST_CASE("cli: summary is byte-identical across runs and thread counts") {
  auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  std::string conf = " --config " + cfg("farfield_two_mode.json") + " --seed 5";
  REQUIRE(maghelm_run("farfield" + conf + " --threads 1 --out " + a.string()) == 0);
  REQUIRE(maghelm_run("farfield" + conf + " --threads 1 --out " + b.string()) == 0);
  REQUIRE(maghelm_run("farfield" + conf + " --threads 4 --out " + c.string()) == 0);
  auto sa = slurp(a / "summary.json");
  CHECK(sa == slurp(b / "summary.json"));
  CHECK(sa == slurp(c / "summary.json"));
  CHECK(nlohmann::json::parse(sa)["seed"] == 5);
}

TEST_CASE("cli: report re-emits a summary") {
  auto dir = scratch("report");
  REQUIRE(maghelm_run("hardy --config " + cfg("free_d3.json") + " --out " + (dir / "h").string()) == 0);
  auto p = write_config(dir, std::string(R"({"command": "report", "options": {"input": ")") +
                                 (dir / "h" / "summary.json").string() + R"(", "formats": ["csv", "json"]}})");
  CHECK(maghelm_run("report --config " + p.string() + " --out " + (dir / "r").string()) == 0);
  CHECK(slurp(dir / "r" / "reports.csv") == slurp(dir / "h" / "reports.csv"));
}
