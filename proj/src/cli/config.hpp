#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cli/sweep.hpp"

namespace purify::cli {

/// Settings shared by all commands. Every field maps to one command-line
/// flag and to one key of the flat `key = value` config file.
struct SweepConfig {
  std::string channel = "depolarising";
  std::string p_grid;        // --p
  std::string gamma_grid;    // --gamma
  std::string werner_grid;   // --werner-f
  std::string fidelity_grid; // --f-initial
  std::string pauli_weights; // --pauli-weights "wz,wx,wy"
  double f_target = 0.9;
  double epsilon = 1e-7;
  std::string mode = "global";
  std::string method = "iterative";
  std::string n_grid = "2^3:2^12";
  int k_max = 16;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 20261016;
  int workers = 1;
  std::size_t state_cap = kDefaultStateCap;
  std::int64_t trials = 1'000'000;
  bool no_permute = false;
  int inject_fault = 0;
};

/// "start:stop:count" (inclusive, linear) or a comma list. Must be non-empty
/// and strictly monotone.
std::vector<double> parse_grid(const std::string& text);

/// Comma list of integers, where an entry may be written 2^k, or the range
/// "2^a:2^b" for every power of two in between.
std::vector<std::int64_t> parse_pool_grid(const std::string& text);

ChannelSpec channel_shape(const SweepConfig& config);

/// Initial states named by whichever of --p, --gamma, --werner-f,
/// --f-initial was given; `fallback` is used when none was.
std::vector<GridPoint> make_grid(const SweepConfig& config, const std::string& fallback_flag,
                                 const std::string& fallback_grid);

}  // namespace purify::cli
