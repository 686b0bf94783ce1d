#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::config {

enum class Command { solve, identity, estimates, hardy, farfield, spectral, evolve, report };
const char* to_string(Command c);
Command command_from_string(const std::string& s);

/// Malformed or inconsistent run configuration (exit status 2).
struct ConfigError : Error {
  using Error::Error;
};

struct Sweep {
  std::vector<double> lambdas, epsilons;
  std::vector<int> nodes;  // mesh doubling ladder
};

/// Command-specific knobs; unused ones are ignored by other commands.
struct Options {
  std::string solver = "fd";                  // solve: fd | green
  bool compare = false;                       // solve: fd against green
  double tol = -1.0;                          // hard tolerance; < 0 keeps the command default
  std::vector<std::string> multipliers;       // identity: quadratic, cubic, piecewise, alpha1, energy
  double R1 = 8.0;                            // piecewise kink
  std::vector<std::string> kinds;             // estimates: estimate names, plus operator_norm
  double max_dispersion = -1.0;               // estimates: optional uniformity assertion
  double max_trend = -1.0;                    // estimates: optional |trend exponent| bound
  bool expect_unbounded = false;              // hardy
  std::vector<double> expect_range;           // hardy: [lo, hi]
  int window = 8;                             // farfield: dyadic radii
  int log_points = 64;                        // spectral
  double log_lo = 1e-2, log_hi = 400.0;       // spectral
  bool expect_warning = false;                // spectral
  std::string weight = "inverse_square";      // evolve: inverse_square | one
  std::vector<double> horizons;               // evolve
  std::string input;                          // report: summary.json to re-emit
  std::vector<std::string> formats = {"csv", "svg"};
};

struct RunConfig {
  Command command = Command::solve;
  ProblemSpec problem;
  int nodes = 4096;
  PotentialSpec potential;
  Source f;
  Sweep sweep;
  Options options;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string canonical;  // key-sorted JSON of the parsed document, defaults filled in
};

/// Parses one JSON document; unknown keys, bad types and empty grids raise ConfigError.
RunConfig parse(const std::string& text);
RunConfig load(const std::string& path);

/// Overrides the seed, keeping the canonical text in step.
void set_seed(RunConfig& c, std::uint64_t seed);

/// FNV-1a of the canonical problem, potential and source.
std::string spec_hash(const RunConfig& c);

}  // namespace maghelm::config
