#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "purify/bellcore.hpp"

namespace purify {

template <typename Scalar>
struct StepOutcomeT {
  Scalar success_prob;
  BellDiagonalT<Scalar> output;
};

using StepOutcome = StepOutcomeT<double>;

/// One DEJMPS round on two Bell-diagonal pairs, conditioned on success.
///   t  = (a+b)(a'+b') + (c+d)(c'+d')
///   a" = (aa' + bb')/t,  b" = (cd' + c'd)/t,
///   c" = (cc' + dd')/t,  d" = (ab' + a'b)/t
template <typename Scalar>
StepOutcomeT<Scalar> dejmps_step(const BellDiagonalT<Scalar>& x,
                                 const BellDiagonalT<Scalar>& y) {
  const Scalar t = (x.a() + x.b()) * (y.a() + y.b()) +
                   (x.c() + x.d()) * (y.c() + y.d());
  if (!(t > Scalar(0))) throw DegenerateStep("DEJMPS success probability is zero");
  Vector4<Scalar> out(x.a() * y.a() + x.b() * y.b(),
                      x.c() * y.d() + y.c() * x.d(),
                      x.c() * y.c() + x.d() * y.d(),
                      x.a() * y.b() + y.a() * x.b());
  out /= t;
  return {t, BellDiagonalT<Scalar>::unchecked(out)};
}

/// Runs the DEJMPS circuit explicitly on the 16-dimensional two-pair state:
/// Alice rotates with U, Bob with U^dagger, both apply CNOT (first pair
/// source, second pair target), measure the targets and keep the source on
/// equal outcomes. Returns the success probability and the Bell diagonal of
/// the kept pair. Independent check of dejmps_step.
StepOutcome dejmps_step_circuit_oracle(const TwoQubitDensity& x,
                                       const TwoQubitDensity& y);

/// The relabelling of Bell weights (one of 24) that maximises the Bell
/// fidelity after one DEJMPS step on two copies. Ties go to the
/// lexicographically largest permuted tuple.
BellDiagonal optimal_permutation(const BellDiagonal& x);

struct LadderLevel {
  int k = 0;
  BellDiagonal state;
  double fidelity = 0.0;
  double success_prob = 1.0;  // t_k; level 0 takes no step and reports 1
  double cumulative_success = 1.0;  // s_k
  double rate = 1.0;                // s_k / 2^k
  double mean_cost = 1.0;           // 2^k / s_k
  double cost_variance = 0.0;       // sigma_k^2
};

struct LadderOptions {
  bool permute_first = true;
  bool permute_each_level = false;
};

/// Lazily iterates DEJMPS levels 0, 1, 2, ... from an initial state.
class LadderStream {
 public:
  LadderStream(const BellDiagonal& initial, LadderOptions options = {});

  /// Next level, or nullopt once a step degenerates (t = 0).
  std::optional<LadderLevel> next();

  const std::optional<std::string>& stop_reason() const { return stop_reason_; }

 private:
  LadderOptions options_;
  std::optional<LadderLevel> last_;
  BellDiagonal initial_;
  std::optional<std::string> stop_reason_;
};

/// DEJMPS iteration ladder. All computed levels are kept; `retained()` is the
/// length of the prefix with strictly increasing fidelity, which is the part
/// usable by the interpolation optimiser.
class IterationLadder {
 public:
  IterationLadder() = default;
  IterationLadder(std::vector<LadderLevel> levels, std::optional<std::string> notice);

  std::span<const LadderLevel> levels() const { return levels_; }
  std::span<const LadderLevel> retained_levels() const {
    return std::span<const LadderLevel>(levels_).first(retained_);
  }
  std::size_t size() const { return levels_.size(); }
  std::size_t retained() const { return retained_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const LadderLevel& operator[](std::size_t k) const { return levels_.at(k); }

  /// Set when the ladder stopped before k_max because a step degenerated.
  const std::optional<std::string>& truncation_notice() const { return notice_; }

  /// Copy with t_k replaced; used to inject faults into validation runs.
  IterationLadder with_success_prob(int k, double t) const;

 private:
  std::vector<LadderLevel> levels_;
  std::size_t retained_ = 0;
  std::optional<std::string> notice_;
};

/// Builds levels 0..k_max. Throws DomainError when the (optionally permuted)
/// initial Bell fidelity does not exceed 1/2.
IterationLadder build_ladder(const BellDiagonal& initial, int k_max,
                             LadderOptions options = {});

inline IterationLadder build_ladder(const BellDiagonal& initial, int k_max,
                                    bool permute_first) {
  return build_ladder(initial, k_max, LadderOptions{permute_first, false});
}

/// sigma_k^2 = 2^{k+1} (2^{k-1} - s_k (1 + sum_{i<k} 2^{i-1}/s_i)) / s_k^2.
/// Closed form kept for cross-checking the recurrence.
double cost_variance_closed_form(std::span<const LadderLevel> levels, int k);

}  // namespace purify
