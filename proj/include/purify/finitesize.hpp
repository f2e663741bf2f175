#pragma once

// Exact finite-pool analysis of iterated and interpolated DEJMPS.
//
// Production semantics: output pairs are made one after another. A level-k
// pair is built from two level-(k-1) pairs; on failure the whole level-k
// attempt restarts. Pool pairs are consumed one at a time, so the cost of one
// output is a renewal variable I_k and the cost of M' outputs is a sum of M'
// independent copies (with the protocol of each drawn independently).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "purify/dejmps.hpp"

namespace purify {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Probability mass over 0..size()-1.
struct CountDistribution {
  std::vector<double> mass;
  // Consumed-pair distributions are cut once the cumulative mass reaches
  // 1 - truncation_threshold; tail_mass is what was left out.
  double truncation_threshold = 0.0;
  double tail_mass = 0.0;

  std::size_t size() const { return mass.size(); }
  double operator[](std::size_t n) const { return n < mass.size() ? mass[n] : 0.0; }
  double total() const;
  double mean() const;
  double variance() const;
  double cdf(std::size_t n) const;
};

enum class InfidelityMode { Global, PerPair };

std::string to_string(InfidelityMode mode);
InfidelityMode parse_infidelity_mode(const std::string& name);

struct FiniteRunSpec {
  std::int64_t pool = 0;  // N
  int i = 0;              // DEJMPS iteration counts of the two protocols
  int j = 1;
  double p_i = 1.0;
  double epsilon = 1e-7;
  InfidelityMode mode = InfidelityMode::Global;
  double f_prime = 0.0;  // asymptotic mixture fidelity p_i F_i + p_j F_j
  // Outputs are twirled and depolarised down to f_prime, so every produced
  // pair is W_{F'} (the uninterpolated baseline).
  bool depolarise_to_target = false;
};

/// Fills f_prime from the ladder and validates ranges.
FiniteRunSpec make_run_spec(const IterationLadder& ladder, std::int64_t pool, int i,
                            int j, double p_i, double epsilon,
                            InfidelityMode mode = InfidelityMode::Global);

/// Uninterpolated run of protocol k, depolarised to `f_target`.
FiniteRunSpec make_baseline_spec(const IterationLadder& ladder, std::int64_t pool,
                                 int k, double f_target, double epsilon,
                                 InfidelityMode mode = InfidelityMode::Global);

// --- pairs produced from and consumed by a single protocol -----------------

/// Distribution of M_k^n, the number of level-k pairs purified from n pool
/// pairs, by conditioning on the level k-1 count.
CountDistribution pairs_produced_distribution(const IterationLadder& ladder, int k,
                                              std::int64_t n);

/// Pr(M_k^n is odd).
double odd_mass(const IterationLadder& ladder, int k, std::int64_t n);

/// E(M_k^n) = t_k (E(M_{k-1}^n) - Pr(M_{k-1}^n odd)) / 2.
double expected_pairs(const IterationLadder& ladder, int k, std::int64_t n);

/// Distribution of I_k^m, the pool pairs consumed to make m level-k pairs,
/// from differences of Pr(M_k^n >= m). Truncated at cumulative mass
/// 1 - 1e-12.
CountDistribution pairs_consumed_distribution(const IterationLadder& ladder, int k,
                                              std::int64_t m,
                                              double truncation = 1e-12);

/// (m mu_k, m sigma_k^2).
std::pair<double, double> normal_approximation(const IterationLadder& ladder, int k,
                                               std::int64_t m);

/// Pr(I_k^1 = n) for n = 0..n_max, from the single-protocol production
/// chain.
CountDistribution single_output_cost(const IterationLadder& ladder, int k,
                                     std::int64_t n_max);

// --- joint law of (X_{M'}, Y_{M'}) ------------------------------------------

struct JointLawRow {
  double joint_i = 0.0;  // Pr(X_{M'} = i, Y_{M'} = 1)
  double joint_j = 0.0;  // Pr(X_{M'} = j, Y_{M'} = 1)
  double success = 0.0;  // Pr(Y_{M'} = 1)
};

struct JointLawTable {
  std::int64_t pool = 0;
  int i = 0;
  int j = 1;
  double p_i = 1.0;
  // rows[m] for M' = m; rows[0] is the empty output (success 1). Rows run to
  // T = floor(N / 2^i); beyond T success is exactly zero.
  std::vector<JointLawRow> rows;

  std::int64_t max_outputs() const { return static_cast<std::int64_t>(rows.size()) - 1; }
  double success(std::int64_t m) const;
};

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

/// (2T - 1)(2^i + 2^j + 2) + 2 with T = floor(N / 2^i).
std::size_t markov_state_count(std::int64_t pool, int i, int j);

/// Absorbing-chain method: one transition per pool pair, iterated N times;
/// Pr(X_{M'} = k, Y_{M'} = 1) is the probability flux into "output M' made
/// by protocol k".
JointLawTable joint_law_markov(const FiniteRunSpec& spec, const IterationLadder& ladder,
                               std::size_t state_cap = kDefaultStateCap);

/// Convolution method: single-output success curves per protocol, mixed and
/// convolved over M'.
JointLawTable joint_law_iterative(const FiniteRunSpec& spec,
                                  const IterationLadder& ladder);

/// F''_{M'} = Pr(Y=0)/2 + sum_k Pr(X=k, Y=1) F_k, for M' >= 1.
double f_doubleprime(const JointLawTable& table, std::array<double, 2> fidelities,
                     std::int64_t m);
double f_doubleprime(const JointLawTable& table, const IterationLadder& ladder,
                     std::int64_t m);

struct MBounds {
  std::int64_t lower_general = 0;
  std::optional<std::int64_t> lower_uninterpolated;
  std::int64_t upper = 0;
  std::vector<double> f_doubleprime;  // index M' = 0..T; entry 0 is F'
};

/// Lower bounds from Pr(Y)^2 and (single protocol) Pr(Y) on the output
/// fidelity, upper bound from the last-pair marginal. Per-pair mode replaces
/// the threshold 1 - eps with (1 - eps)^{M'}.
MBounds m_bounds(const FiniteRunSpec& spec, const JointLawTable& table,
                 const IterationLadder& ladder);

}  // namespace purify
