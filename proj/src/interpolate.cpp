#include "purify/interpolate.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <string>

namespace purify {

namespace {

void require_monotone(std::span<const ProtocolPoint> points) {
  if (points.empty()) throw InvalidParameter("no protocol points");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].rate < points[k - 1].rate) ||
        !(points[k].fidelity > points[k - 1].fidelity))
      throw InvalidParameter(
          "protocol points must have strictly decreasing rate and strictly "
          "increasing fidelity");
  }
}

InterpolationResult make_result(std::span<const ProtocolPoint> points, std::size_t i,
                                std::size_t j, double q_i, double q_j) {
  InterpolationResult r;
  r.i = i;
  r.j = j;
  r.first = points[i];
  r.second = points[j];
  const double total = q_i + q_j;
  r.q_i = q_i / total;
  r.q_j = q_j / total;
  const double weighted_rate = r.q_i * r.first.rate + r.q_j * r.second.rate;
  r.achieved_rate = weighted_rate / (r.q_i + r.q_j);
  r.achieved_fidelity = (r.q_i * r.first.rate * r.first.fidelity +
                         r.q_j * r.second.rate * r.second.fidelity) /
                        weighted_rate;
  std::tie(r.p_i, r.p_j) = mixture_probabilities(r);
  return r;
}

}  // namespace

ProtocolPoint ProtocolPoint::make(int index, double rate, double fidelity) {
  if (!(rate > 0.0)) throw InvalidParameter("protocol rate must be positive");
  return ProtocolPoint{index, rate, fidelity, 1.0 / rate};
}

std::vector<ProtocolPoint> points_from_ladder(const IterationLadder& ladder) {
  std::vector<ProtocolPoint> out;
  for (const LadderLevel& level : ladder.retained_levels()) {
    ProtocolPoint p{level.k, level.rate, level.fidelity, level.mean_cost};
    out.push_back(p);
  }
  return out;
}

std::vector<ProtocolPoint> pareto_prune(std::span<const ProtocolPoint> points) {
  if (points.empty()) throw InvalidParameter("pareto_prune needs at least one point");
  std::vector<ProtocolPoint> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ProtocolPoint& x, const ProtocolPoint& y) {
                     if (x.rate != y.rate) return x.rate > y.rate;
                     return x.fidelity > y.fidelity;
                   });

  // Single-point dominance: along decreasing rate, fidelity must strictly grow.
  std::vector<ProtocolPoint> frontier;
  for (const ProtocolPoint& p : sorted) {
    if (frontier.empty() || p.fidelity > frontier.back().fidelity) frontier.push_back(p);
  }

  // Interpolation dominance: keep only points strictly above the chord of
  // their kept neighbours (upper hull in the cost-fidelity plane).
  std::vector<ProtocolPoint> hull;
  for (const ProtocolPoint& p : frontier) {
    while (hull.size() >= 2) {
      const ProtocolPoint& a = hull[hull.size() - 2];
      const ProtocolPoint& b = hull.back();
      if (b.fidelity <= pair_fidelity_at_rate(a, p, b.rate))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return hull;
}

double pair_fidelity_at_rate(const ProtocolPoint& pi, const ProtocolPoint& pj,
                             double rate_target) {
  if (rate_target == pi.rate) return pi.fidelity;
  if (rate_target == pj.rate) return pj.fidelity;
  return (pi.fidelity * pi.rate * (rate_target - pj.rate) +
          pj.fidelity * pj.rate * (pi.rate - rate_target)) /
         (rate_target * (pi.rate - pj.rate));
}

double pair_rate_at_fidelity(const ProtocolPoint& pi, const ProtocolPoint& pj,
                             double fidelity_target) {
  if (fidelity_target == pi.fidelity) return pi.rate;
  if (fidelity_target == pj.fidelity) return pj.rate;
  return (pj.fidelity - pi.fidelity) * pi.rate * pj.rate /
         (pi.rate * (fidelity_target - pi.fidelity) +
          pj.rate * (pj.fidelity - fidelity_target));
}

InterpolationResult max_fidelity_at_rate(std::span<const ProtocolPoint> points,
                                         double rate_target) {
  require_monotone(points);
  const double lo = points.back().rate;
  const double hi = points.front().rate;
  if (!(rate_target >= lo && rate_target <= hi))
    throw OutOfRange("target rate " + std::to_string(rate_target) +
                         " outside feasible interval [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]",
                     lo, hi);
  if (points.size() == 1) return make_result(points, 0, 0, 1.0, 0.0);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (!(rate_target >= points[j].rate && rate_target <= points[i].rate)) continue;
      const double f = pair_fidelity_at_rate(points[i], points[j], rate_target);
      if (f > best) {
        best = f;
        bi = i;
        bj = j;
      }
    }
  }
  const double span = points[bi].rate - points[bj].rate;
  return make_result(points, bi, bj, (rate_target - points[bj].rate) / span,
                     (points[bi].rate - rate_target) / span);
}

InterpolationResult max_rate_at_fidelity(std::span<const ProtocolPoint> points,
                                         double fidelity_target) {
  require_monotone(points);
  const double lo = points.front().fidelity;
  const double hi = points.back().fidelity;
  if (!(fidelity_target >= lo && fidelity_target <= hi))
    throw OutOfRange("target fidelity " + std::to_string(fidelity_target) +
                         " outside feasible interval [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]",
                     lo, hi);
  if (points.size() == 1) return make_result(points, 0, 0, 1.0, 0.0);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (!(fidelity_target >= points[i].fidelity &&
            fidelity_target <= points[j].fidelity))
        continue;
      const double r = pair_rate_at_fidelity(points[i], points[j], fidelity_target);
      if (r > best) {
        best = r;
        bi = i;
        bj = j;
      }
    }
  }
  const ProtocolPoint& a = points[bi];
  const ProtocolPoint& b = points[bj];
  InterpolationResult r = make_result(points, bi, bj,
                                      b.rate * (b.fidelity - fidelity_target),
                                      a.rate * (fidelity_target - a.fidelity));
  return r;
}

std::pair<double, double> mixture_probabilities(const InterpolationResult& result) {
  if (!(result.q_i >= 0.0 && result.q_j >= 0.0) || result.q_i + result.q_j <= 0.0)
    throw InvalidParameter("mixture needs non-negative q-weights with positive sum");
  const double wi = result.q_i / result.first.mean_cost;
  const double wj = result.q_j / result.second.mean_cost;
  return {wi / (wi + wj), wj / (wi + wj)};
}

double cutoff_threshold(std::span<const ProtocolPoint> points, double fidelity_target,
                        double rate_achieved) {
  if (points.empty()) throw InvalidParameter("no protocol points");
  if (!(rate_achieved > 0.0)) throw InvalidParameter("achieved rate must be positive");
  if (!(fidelity_target > points.front().fidelity && fidelity_target < 1.0))
    throw InvalidParameter("target fidelity must lie in (F_1, 1)");
  double omega = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const ProtocolPoint& p : points) {
    if (!(p.fidelity < fidelity_target)) break;
    const double den = (1.0 - p.fidelity) * p.rate - (1.0 - fidelity_target) * rate_achieved;
    if (!(den > 0.0)) continue;
    any = true;
    omega = std::min(omega, (fidelity_target - p.fidelity) * rate_achieved * p.rate / den);
  }
  if (!any)
    throw CutoffUndefined(
        "protocol cutoff undefined: achieved rate inconsistent with the protocols");
  return omega;
}

CutoffResult protocol_cutoff(std::span<const ProtocolPoint> points_so_far,
                             double fidelity_target, double rate_achieved,
                             const ProtocolSource& tail) {
  CutoffResult out;
  out.omega = cutoff_threshold(points_so_far, fidelity_target, rate_achieved);
  for (const ProtocolPoint& p : points_so_far) {
    if (!(p.rate > out.omega)) {
      out.count = out.points.size();
      return out;
    }
    out.points.push_back(p);
  }
  while (true) {
    std::optional<ProtocolPoint> next = tail ? tail() : std::nullopt;
    if (!next) {
      out.source_exhausted = true;
      break;
    }
    if (!(next->rate > out.omega)) break;
    out.points.push_back(*next);
  }
  out.count = out.points.size();
  return out;
}

ProtocolSource ladder_source(const BellDiagonal& initial, LadderOptions options,
                             std::size_t skip) {
  struct State {
    LadderStream stream;
    std::size_t skip;
    double last_fidelity = -1.0;
    bool done = false;
  };
  auto state = std::make_shared<State>(State{LadderStream(initial, options), skip});
  return [state]() -> std::optional<ProtocolPoint> {
    if (state->done) return std::nullopt;
    while (true) {
      std::optional<LadderLevel> level = state->stream.next();
      if (!level || !(level->fidelity > state->last_fidelity)) {
        state->done = true;
        return std::nullopt;
      }
      state->last_fidelity = level->fidelity;
      if (state->skip > 0) {
        --state->skip;
        continue;
      }
      return ProtocolPoint{level->k, level->rate, level->fidelity, level->mean_cost};
    }
  };
}

}  // namespace purify
