#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maghelm/config.hpp"
#include "maghelm/parallel.hpp"
#include "maghelm/runner.hpp"

using namespace maghelm;

int main(int argc, char** argv) {
  CLI::App app{"maghelm: radial-mode lab for the magnetic Helmholtz equation"};
  std::string command, config_path, out;
  int threads = -1;
  long long seed = -1;
  app.add_option("command", command, "solve | identity | estimates | hardy | farfield | spectral | evolve | report")
      ->required();
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads; MAGHELM_THREADS when absent, 0 for all cores");
  app.add_option("--seed", seed, "seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : runner::exit_config;
  }

  if (threads < 0) {
    const char* env = std::getenv("MAGHELM_THREADS");
    if (env && *env) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "maghelm: MAGHELM_THREADS is not an integer\n";
        return runner::exit_config;
      }
    }
  }
  set_worker_count(threads < 0 ? 0 : threads);

  config::RunConfig cfg;
  try {
    cfg = config::load(config_path);
    auto cmd = config::command_from_string(command);
    if (cmd != cfg.command) throw config::ConfigError(std::string("config is for '") + config::to_string(cfg.command) +
                                                      "', not '" + command + "'");
  } catch (const Error& e) {
    std::cerr << "maghelm: " << e.what() << '\n';
    return runner::exit_config;
  }
  if (!out.empty()) cfg.out = out;
  if (seed >= 0) config::set_seed(cfg, (std::uint64_t)seed);
  auto o = runner::run(cfg);
  for (const auto& a : o.assertions) std::cout << (a.passed ? "ok    " : "FAIL  ") << a.name << ": " << a.detail << '\n';
  if (o.status != runner::exit_pass) std::cerr << "maghelm: " << o.message << '\n';
  else std::cout << "wrote " << cfg.out << "/summary.json\n";
  return o.status;
}
