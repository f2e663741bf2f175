#pragma once

// Asymptotic interpolation between purification protocols.
//
// Mixing protocol k with probability p_k gives rate 1 / sum p_k I_k and
// fidelity sum p_k F_k. With q_k = p_k I_k both become ratios of linear forms
// in q, and an optimum at fixed rate (or fixed fidelity) is always attained
// by a mixture of two protocols, so the optimisers below search pairs.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "purify/dejmps.hpp"

namespace purify {

struct ProtocolPoint {
  int index = 0;  // ordinal of the protocol, e.g. its DEJMPS iteration count
  double rate = 1.0;
  double fidelity = 0.0;
  double mean_cost = 1.0;  // I_k = 1 / R_k

  static ProtocolPoint make(int index, double rate, double fidelity);
};

/// Protocol points for the retained (strictly improving) ladder levels.
std::vector<ProtocolPoint> points_from_ladder(const IterationLadder& ladder);

struct InterpolationResult {
  std::size_t i = 0;  // positions in the point sequence, i <= j
  std::size_t j = 0;
  ProtocolPoint first;   // point i
  ProtocolPoint second;  // point j
  double q_i = 1.0;      // q-weights, scaled to q_i + q_j = 1
  double q_j = 0.0;
  double p_i = 1.0;
  double p_j = 0.0;
  double achieved_rate = 1.0;
  double achieved_fidelity = 0.0;
};

/// Sorts by decreasing rate and drops points that are dominated, either by a
/// single point (no better in rate and fidelity) or by an interpolation of two
/// neighbours. The result has strictly decreasing rate and strictly increasing
/// fidelity.
std::vector<ProtocolPoint> pareto_prune(std::span<const ProtocolPoint> points);

/// Fidelity of the (i, j) mixture running at `rate_target`, with
/// R_j <= rate_target <= R_i.
double pair_fidelity_at_rate(const ProtocolPoint& pi, const ProtocolPoint& pj,
                             double rate_target);

/// Rate of the (i, j) mixture reaching `fidelity_target`, with
/// F_i <= fidelity_target <= F_j.
double pair_rate_at_fidelity(const ProtocolPoint& pi, const ProtocolPoint& pj,
                             double fidelity_target);

/// Highest fidelity reachable at `rate_target` over all pairs. Points must
/// have strictly decreasing rate and strictly increasing fidelity. Ties go to
/// the lexicographically smallest (i, j).
InterpolationResult max_fidelity_at_rate(std::span<const ProtocolPoint> points,
                                         double rate_target);

/// Highest rate reaching `fidelity_target` over all pairs; same conventions.
InterpolationResult max_rate_at_fidelity(std::span<const ProtocolPoint> points,
                                         double fidelity_target);

/// Normalised probabilities p_k proportional to q_k / I_k.
std::pair<double, double> mixture_probabilities(const InterpolationResult& result);

/// Threshold rate Omega: no protocol with R_k <= Omega can be paired with an
/// earlier one to beat `rate_achieved` at `fidelity_target`.
double cutoff_threshold(std::span<const ProtocolPoint> points, double fidelity_target,
                        double rate_achieved);

using ProtocolSource = std::function<std::optional<ProtocolPoint>()>;

struct CutoffResult {
  std::size_t count = 0;  // K: number of leading protocols with R_k > Omega
  double omega = 0.0;
  std::vector<ProtocolPoint> points;  // the K protocols
  bool source_exhausted = false;
};

/// Pulls protocols from `tail` (after `points_so_far`) until the rate falls
/// to Omega or below and returns the protocols worth considering.
CutoffResult protocol_cutoff(std::span<const ProtocolPoint> points_so_far,
                             double fidelity_target, double rate_achieved,
                             const ProtocolSource& tail);

/// A source that continues a DEJMPS ladder past its last retained level,
/// stopping when fidelity stops increasing.
ProtocolSource ladder_source(const BellDiagonal& initial, LadderOptions options,
                             std::size_t skip);

}  // namespace purify
