#pragma once

// Monte Carlo oracle for the finite-pool distributions. Trials simulate each
// DEJMPS attempt as a Bernoulli draw with the ladder's t_k; no quantum states
// are sampled.
//
// Generator: trials are cut into chunks of kTrialChunk; chunk c runs
// std::mt19937_64 seeded with splitmix64(seed + c). Counts are integers, so the
// merged result does not depend on how chunks are spread over workers.

#include <cstdint>
#include <string>
#include <vector>

#include "purify/dejmps.hpp"
#include "purify/finitesize.hpp"

namespace purify {

inline constexpr std::int64_t kTrialChunk = 16384;
inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64-chunked";

struct TrialConfig {
  std::uint64_t seed = 20261016;
  std::int64_t trials = 1'000'000;
  FiniteRunSpec spec;
  int workers = 1;
};

/// Standard error of a frequency, sqrt(f (1 - f) / trials).
double frequency_error(double f, std::int64_t trials);

struct EmpiricalLaw {
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::int64_t pool = 0;
  int i = 0;
  int j = 1;
  double p_i = 1.0;
  // Index M' = 0..T; entry 0 counts every trial.
  std::vector<std::int64_t> success_count;
  std::vector<std::int64_t> joint_i_count;
  std::vector<std::int64_t> joint_j_count;

  std::int64_t max_outputs() const {
    return static_cast<std::int64_t>(success_count.size()) - 1;
  }
  double success(std::int64_t m) const;
  double joint(std::int64_t m, int which) const;  // which: 0 for i, 1 for j
  double success_error(std::int64_t m) const { return frequency_error(success(m), trials); }
  double joint_error(std::int64_t m, int which) const {
    return frequency_error(joint(m, which), trials);
  }
};

/// Samples (X_{M'}, Y_{M'}) for every M' against a pool of spec.pool pairs.
EmpiricalLaw simulate_runs(const TrialConfig& config, const IterationLadder& ladder);

/// Empirical law of I_k^{m}, pool pairs consumed for m level-k outputs with
/// an unbounded pool.
struct EmpiricalConsumption {
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  int k = 0;
  std::int64_t outputs = 0;
  std::vector<std::int64_t> histogram;  // histogram[n] = trials consuming n pairs
  double mean = 0.0;
  double variance = 0.0;
  double mean_error = 0.0;
  double variance_error = 0.0;  // from the fourth central moment

  double frequency(std::int64_t n) const;
};

EmpiricalConsumption simulate_consumption(const TrialConfig& config,
                                          const IterationLadder& ladder, int k,
                                          std::int64_t outputs);

}  // namespace purify
