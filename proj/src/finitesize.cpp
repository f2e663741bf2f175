#include "purify/finitesize.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Core>

namespace purify {

namespace {

constexpr int kProduced = -1;

struct Edge {
  int target;  // local state, or kProduced
  double prob;
};

// Production of one level-k pair, one pool pair per transition. Local state
// (c << 1) | h: bit l-1 of c set when a level-l pair (1 <= l < k) is held,
// h set when a raw pool pair is held. Level 0 has a single pass-through state.
struct Track {
  int k = 0;
  int states = 1;
  std::vector<std::vector<Edge>> edges;
};

void cascade(const IterationLadder& ladder, int k, int held, int level, double prob,
             std::vector<Edge>& out) {
  const double t = ladder[static_cast<std::size_t>(level)].success_prob;
  if (1.0 - t > 0.0) out.push_back({held << 1, prob * (1.0 - t)});
  if (t <= 0.0) return;
  if (level == k) {
    out.push_back({kProduced, prob * t});
    return;
  }
  const int bit = 1 << (level - 1);
  if (held & bit)
    cascade(ladder, k, held & ~bit, level + 1, prob * t, out);
  else
    out.push_back({(held | bit) << 1, prob * t});
}

Track make_track(const IterationLadder& ladder, int k) {
  if (k < 0 || k > ladder.depth())
    throw InvalidParameter("protocol level " + std::to_string(k) + " exceeds ladder depth");
  Track track;
  track.k = k;
  if (k == 0) {
    track.edges = {{{kProduced, 1.0}}};
    return track;
  }
  track.states = 1 << k;
  track.edges.resize(static_cast<std::size_t>(track.states));
  for (int s = 0; s < track.states; ++s) {
    const int held = s >> 1;
    if ((s & 1) == 0)
      track.edges[s].push_back({s | 1, 1.0});
    else
      cascade(ladder, k, held, 1, 1.0, track.edges[s]);
  }
  return track;
}

void validate_levels(const FiniteRunSpec& spec, const IterationLadder& ladder) {
  if (spec.pool < 0) throw InvalidParameter("pool size must be non-negative");
  if (spec.i < 0 || spec.j < spec.i)
    throw InvalidParameter("protocol indices must satisfy 0 <= i <= j");
  if (spec.j > ladder.depth())
    throw InvalidParameter("ladder depth " + std::to_string(ladder.depth()) +
                           " below protocol level " + std::to_string(spec.j));
  if (!(spec.p_i >= 0.0 && spec.p_i <= 1.0))
    throw InvalidParameter("p_i must lie in [0, 1]");
}

JointLawTable empty_table(const FiniteRunSpec& spec) {
  JointLawTable table;
  table.pool = spec.pool;
  table.i = spec.i;
  table.j = spec.j;
  table.p_i = spec.p_i;
  const std::int64_t T = spec.pool >> spec.i;
  table.rows.assign(static_cast<std::size_t>(T + 1), JointLawRow{});
  table.rows[0].success = 1.0;
  return table;
}

// Distribution of a binomially thinned halving: X -> B(floor(X / 2), t).
std::vector<double> thin_halves(const std::vector<double>& dist, double t) {
  const std::size_t max_s = (dist.size() - 1) / 2;
  std::vector<double> weight(max_s + 1, 0.0);
  for (std::size_t m = 0; m < dist.size(); ++m) weight[m / 2] += dist[m];

  std::vector<double> out(max_s + 1, 0.0);
  std::vector<double> row{1.0};  // B(s, t) pmf, grown one trial at a time
  for (std::size_t s = 0; s <= max_s; ++s) {
    if (s > 0) {
      row.push_back(0.0);
      for (std::size_t r = s; r > 0; --r) row[r] = row[r] * (1.0 - t) + row[r - 1] * t;
      row[0] *= (1.0 - t);
    }
    if (weight[s] == 0.0) continue;
    for (std::size_t r = 0; r <= s; ++r) out[r] += weight[s] * row[r];
  }
  return out;
}

double tail_at_least(const std::vector<double>& dist, std::int64_t m) {
  CompensatedSum acc;
  for (std::size_t x = static_cast<std::size_t>(std::max<std::int64_t>(m, 0)); x < dist.size();
       ++x)
    acc.add(dist[x]);
  return acc.value();
}

}  // namespace

double CountDistribution::total() const {
  CompensatedSum acc;
  for (double m : mass) acc.add(m);
  return acc.value();
}

double CountDistribution::mean() const {
  CompensatedSum acc;
  for (std::size_t n = 0; n < mass.size(); ++n) acc.add(static_cast<double>(n) * mass[n]);
  return acc.value() / total();
}

double CountDistribution::variance() const {
  const double mu = mean();
  CompensatedSum acc;
  for (std::size_t n = 0; n < mass.size(); ++n) {
    const double dx = static_cast<double>(n) - mu;
    acc.add(dx * dx * mass[n]);
  }
  return acc.value() / total();
}

double CountDistribution::cdf(std::size_t n) const {
  CompensatedSum acc;
  for (std::size_t x = 0; x <= n && x < mass.size(); ++x) acc.add(mass[x]);
  return acc.value();
}

std::string to_string(InfidelityMode mode) {
  return mode == InfidelityMode::Global ? "global" : "per-pair";
}

InfidelityMode parse_infidelity_mode(const std::string& name) {
  if (name == "global") return InfidelityMode::Global;
  if (name == "per-pair" || name == "per_pair" || name == "pair") return InfidelityMode::PerPair;
  throw InvalidParameter("unknown infidelity mode '" + name + "'");
}

FiniteRunSpec make_run_spec(const IterationLadder& ladder, std::int64_t pool, int i, int j,
                            double p_i, double epsilon, InfidelityMode mode) {
  FiniteRunSpec spec;
  spec.pool = pool;
  spec.i = i;
  spec.j = j;
  spec.p_i = p_i;
  spec.epsilon = epsilon;
  spec.mode = mode;
  validate_levels(spec, ladder);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParameter("epsilon must lie in (0, 1)");
  spec.f_prime = p_i * ladder[static_cast<std::size_t>(i)].fidelity +
                 (1.0 - p_i) * ladder[static_cast<std::size_t>(j)].fidelity;
  return spec;
}

FiniteRunSpec make_baseline_spec(const IterationLadder& ladder, std::int64_t pool, int k,
                                 double f_target, double epsilon, InfidelityMode mode) {
  FiniteRunSpec spec = make_run_spec(ladder, pool, k, k, 1.0, epsilon, mode);
  if (ladder[static_cast<std::size_t>(k)].fidelity < f_target - kEqualityTol)
    throw InvalidParameter("baseline protocol does not reach the target fidelity");
  spec.f_prime = f_target;
  spec.depolarise_to_target = true;
  return spec;
}

CountDistribution pairs_produced_distribution(const IterationLadder& ladder, int k,
                                              std::int64_t n) {
  if (k < 0 || k > ladder.depth())
    throw InvalidParameter("iteration count exceeds ladder depth");
  if (n < 0) throw InvalidParameter("pool size must be non-negative");
  std::vector<double> dist(static_cast<std::size_t>(n) + 1, 0.0);
  dist.back() = 1.0;
  for (int level = 1; level <= k; ++level)
    dist = thin_halves(dist, ladder[static_cast<std::size_t>(level)].success_prob);
  return CountDistribution{std::move(dist)};
}

double odd_mass(const IterationLadder& ladder, int k, std::int64_t n) {
  const CountDistribution dist = pairs_produced_distribution(ladder, k, n);
  CompensatedSum acc;
  for (std::size_t m = 1; m < dist.size(); m += 2) acc.add(dist.mass[m]);
  return acc.value();
}

double expected_pairs(const IterationLadder& ladder, int k, std::int64_t n) {
  if (k < 0 || k > ladder.depth())
    throw InvalidParameter("iteration count exceeds ladder depth");
  if (n < 0) throw InvalidParameter("pool size must be non-negative");
  double expectation = static_cast<double>(n);
  for (int level = 1; level <= k; ++level) {
    double odd = 0.0;
    if (level == 1) {
      odd = static_cast<double>(n % 2);
    } else if (level == 2) {
      const double t1 = ladder[1].success_prob;
      odd = 0.5 * (1.0 - std::pow(1.0 - 2.0 * t1, static_cast<double>(n / 2)));
    } else {
      odd = odd_mass(ladder, level - 1, n);
    }
    expectation = ladder[static_cast<std::size_t>(level)].success_prob * (expectation - odd) / 2.0;
  }
  return expectation;
}

CountDistribution pairs_consumed_distribution(const IterationLadder& ladder, int k,
                                              std::int64_t m, double truncation) {
  if (k < 0 || k > ladder.depth())
    throw InvalidParameter("iteration count exceeds ladder depth");
  if (m < 0) throw InvalidParameter("output count must be non-negative");
  CountDistribution out;
  out.truncation_threshold = truncation;
  if (k == 0 || m == 0) {
    out.mass.assign(static_cast<std::size_t>(m) + 1, 0.0);
    out.mass.back() = 1.0;
    return out;
  }
  constexpr std::int64_t kMaxPool = std::int64_t{1} << 22;
  const std::int64_t start = m << k;  // fewer pool pairs cannot make m outputs
  out.mass.assign(static_cast<std::size_t>(start), 0.0);
  double previous = 0.0;
  for (std::int64_t n = start;; ++n) {
    if (n > kMaxPool) throw DomainError("consumed-pair distribution does not converge");
    double at_least = previous;
    if (n % 2 == 0) at_least = tail_at_least(pairs_produced_distribution(ladder, k, n).mass, m);
    out.mass.push_back(at_least - previous);
    previous = at_least;
    if (at_least >= 1.0 - truncation) break;
  }
  out.tail_mass = 1.0 - previous;
  return out;
}

std::pair<double, double> normal_approximation(const IterationLadder& ladder, int k,
                                               std::int64_t m) {
  const LadderLevel& level = ladder[static_cast<std::size_t>(k)];
  const double count = static_cast<double>(m);
  return {count * level.mean_cost, count * level.cost_variance};
}

CountDistribution single_output_cost(const IterationLadder& ladder, int k,
                                     std::int64_t n_max) {
  const Track track = make_track(ladder, k);
  CountDistribution out;
  out.mass.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<double> cur(static_cast<std::size_t>(track.states), 0.0);
  std::vector<double> next(cur.size());
  cur[0] = 1.0;
  for (std::int64_t step = 1; step <= n_max; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    double produced = 0.0;
    for (std::size_t s = 0; s < cur.size(); ++s) {
      const double v = cur[s];
      if (v == 0.0) continue;
      for (const Edge& e : track.edges[s]) {
        if (e.target == kProduced)
          produced += v * e.prob;
        else
          next[static_cast<std::size_t>(e.target)] += v * e.prob;
      }
    }
    out.mass[static_cast<std::size_t>(step)] = produced;
    std::swap(cur, next);
  }
  CompensatedSum left;
  for (double v : cur) left.add(v);
  out.tail_mass = left.value();
  return out;
}

double JointLawTable::success(std::int64_t m) const {
  if (m < 0) throw InvalidParameter("output count must be non-negative");
  if (m > max_outputs()) return 0.0;
  return rows[static_cast<std::size_t>(m)].success;
}

std::size_t markov_state_count(std::int64_t pool, int i, int j) {
  const std::int64_t T = pool >> i;
  if (T <= 0) return 0;
  const std::size_t per_block = (std::size_t{1} << i) + (std::size_t{1} << j) + 2;
  return static_cast<std::size_t>(2 * T - 1) * per_block + 2;
}

JointLawTable joint_law_markov(const FiniteRunSpec& spec, const IterationLadder& ladder,
                               std::size_t state_cap) {
  validate_levels(spec, ladder);
  JointLawTable table = empty_table(spec);
  const std::int64_t T = table.max_outputs();
  if (T == 0) return table;

  const std::size_t count = markov_state_count(spec.pool, spec.i, spec.j);
  if (count > state_cap)
    throw StateCapExceeded("Markov chain needs " + std::to_string(count) +
                               " states, above the cap of " + std::to_string(state_cap),
                           count);

  const std::array<Track, 2> tracks{make_track(ladder, spec.i), make_track(ladder, spec.j)};
  const std::array<double, 2> choose{spec.p_i, 1.0 - spec.p_i};
  const std::array<std::size_t, 2> track_offset{0, static_cast<std::size_t>(tracks[0].states)};
  const std::size_t ready_offset =
      static_cast<std::size_t>(tracks[0].states + tracks[1].states);
  const std::size_t block_size = ready_offset + 2;
  const std::size_t blocks = static_cast<std::size_t>(2 * T - 1);
  const std::size_t absorbing = blocks * block_size;

  // Block 0 holds n = 0; blocks 1 + 2(n-1) + marker hold n >= 1 outputs whose
  // last one came from protocol `marker`.
  const auto block_base = [&](std::int64_t n, int marker) -> std::size_t {
    return n == 0 ? 0 : (1 + 2 * static_cast<std::size_t>(n - 1) + marker) * block_size;
  };

  std::vector<double> cur(count, 0.0), sum(count), comp(count);
  std::vector<CompensatedSum> flux_i(static_cast<std::size_t>(T + 1));
  std::vector<CompensatedSum> flux_j(static_cast<std::size_t>(T + 1));

  for (int c = 0; c < 2; ++c) cur[track_offset[c]] += choose[c];

  const auto add = [&](std::size_t idx, double v) {
    const double s = sum[idx];
    const double t = s + v;
    comp[idx] += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    sum[idx] = t;
  };
  const auto record = [&](std::int64_t output, int which, double v) {
    (which == 0 ? flux_i : flux_j)[static_cast<std::size_t>(output)].add(v);
  };

  for (std::int64_t step = 1; step <= spec.pool; ++step) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(comp.begin(), comp.end(), 0.0);
    // Before this step at most (step - 1) / 2^i outputs exist.
    const std::int64_t n_active = std::min<std::int64_t>(T - 1, (step - 1) >> spec.i);
    const std::size_t block_end = n_active == 0 ? 1 : 1 + 2 * static_cast<std::size_t>(n_active);

    for (std::size_t b = 0; b < block_end; ++b) {
      const std::int64_t n = b == 0 ? 0 : static_cast<std::int64_t>((b - 1) / 2) + 1;
      const std::size_t base = b * block_size;

      for (int w = 0; w < 2; ++w) {
        const Track& track = tracks[w];
        for (int s = 0; s < track.states; ++s) {
          const double v = cur[base + track_offset[w] + static_cast<std::size_t>(s)];
          if (v == 0.0) continue;
          for (const Edge& e : track.edges[static_cast<std::size_t>(s)]) {
            const double f = v * e.prob;
            if (e.target == kProduced) {
              add(base + ready_offset + w, f);
              record(n + 1, w, f);
            } else {
              add(base + track_offset[w] + static_cast<std::size_t>(e.target), f);
            }
          }
        }
      }

      // Output n+1 just made by protocol w; this pool pair starts output n+2.
      for (int w = 0; w < 2; ++w) {
        const double v = cur[base + ready_offset + w];
        if (v == 0.0) continue;
        if (n + 1 == T) {
          add(absorbing + w, v);
          continue;
        }
        const std::size_t next_base = block_base(n + 1, w);
        for (int c = 0; c < 2; ++c) {
          if (choose[c] == 0.0) continue;
          for (const Edge& e : tracks[c].edges[0]) {
            const double f = v * choose[c] * e.prob;
            if (e.target == kProduced) {
              add(next_base + ready_offset + c, f);
              record(n + 2, c, f);
            } else {
              add(next_base + track_offset[c] + static_cast<std::size_t>(e.target), f);
            }
          }
        }
      }
    }
    add(absorbing, cur[absorbing]);
    add(absorbing + 1, cur[absorbing + 1]);
    for (std::size_t idx = 0; idx < count; ++idx) cur[idx] = sum[idx] + comp[idx];
  }

  for (std::int64_t m = 1; m <= T; ++m) {
    JointLawRow& row = table.rows[static_cast<std::size_t>(m)];
    row.joint_i = flux_i[static_cast<std::size_t>(m)].value();
    row.joint_j = flux_j[static_cast<std::size_t>(m)].value();
    row.success = row.joint_i + row.joint_j;
  }
  return table;
}

JointLawTable joint_law_iterative(const FiniteRunSpec& spec, const IterationLadder& ladder) {
  validate_levels(spec, ladder);
  JointLawTable table = empty_table(spec);
  const std::int64_t T = table.max_outputs();
  if (T == 0) return table;
  const std::int64_t N = spec.pool;
  const double p = spec.p_i;
  const double q = 1.0 - p;

  const CountDistribution cost_i = single_output_cost(ladder, spec.i, N);
  const CountDistribution cost_j = single_output_cost(ladder, spec.j, N);

  // Pr(Y_{1,n} = 1 | X_1 = k) = Pr(I_k <= n).
  const auto prefix = [N](const CountDistribution& d) {
    std::vector<double> out(static_cast<std::size_t>(N) + 1);
    CompensatedSum acc;
    for (std::int64_t n = 0; n <= N; ++n) {
      acc.add(d.mass[static_cast<std::size_t>(n)]);
      out[static_cast<std::size_t>(n)] = acc.value();
    }
    return out;
  };
  const std::vector<double> success_i = prefix(cost_i);
  const std::vector<double> success_j = prefix(cost_j);

  // All costs are even once every protocol in use iterates at least once, so
  // the arrays can be indexed by n / 2.
  const int min_level = p == 0.0 ? spec.j : spec.i;
  const std::int64_t stride = min_level >= 1 ? 2 : 1;
  const Eigen::Index L = static_cast<Eigen::Index>(N / stride);

  Eigen::VectorXd step_cost = Eigen::VectorXd::Zero(L + 1);  // Pr(I^1 = u * stride)
  for (Eigen::Index u = 0; u <= L; ++u) {
    const auto n = static_cast<std::size_t>(u * stride);
    step_cost[u] = p * cost_i.mass[n] + q * cost_j.mass[n];
  }
  Eigen::Index d_lo = 1;
  while (d_lo <= L && step_cost[d_lo] == 0.0) ++d_lo;

  // reversed[x] = Pr(I^{M'-1} = (L - x) * stride), so convolution terms are
  // contiguous dot products.
  Eigen::VectorXd reversed = Eigen::VectorXd::Zero(L + 1);
  Eigen::VectorXd next(L + 1);
  reversed[L] = 1.0;
  Eigen::Index lo = 0;  // smallest support point of I^{M'-1}

  for (std::int64_t m = 1; m <= T; ++m) {
    CompensatedSum ji, jj;
    for (Eigen::Index u = lo; u <= L; ++u) {
      const double mass = reversed[L - u];
      if (mass == 0.0) continue;
      const auto rest = static_cast<std::size_t>(N - u * stride);
      ji.add(mass * success_i[rest]);
      jj.add(mass * success_j[rest]);
    }
    JointLawRow& row = table.rows[static_cast<std::size_t>(m)];
    row.joint_i = p * ji.value();
    row.joint_j = q * jj.value();
    row.success = row.joint_i + row.joint_j;

    if (m == T || d_lo > L) break;
    const Eigen::Index new_lo = lo + d_lo;
    if (new_lo > L) break;
    next.setZero();
    for (Eigen::Index u = new_lo; u <= L; ++u) {
      const Eigen::Index len = u - lo - d_lo + 1;
      next[L - u] = step_cost.segment(d_lo, len).dot(reversed.segment(L - u + d_lo, len));
    }
    reversed.swap(next);
    lo = new_lo;
  }
  return table;
}

double f_doubleprime(const JointLawTable& table, std::array<double, 2> fidelities,
                     std::int64_t m) {
  if (m < 1 || m > table.pool) throw InvalidParameter("output count outside 1..N");
  if (m > table.max_outputs()) return 0.5;
  const JointLawRow& row = table.rows[static_cast<std::size_t>(m)];
  return 0.5 * (1.0 - row.success) + row.joint_i * fidelities[0] +
         row.joint_j * fidelities[1];
}

double f_doubleprime(const JointLawTable& table, const IterationLadder& ladder,
                     std::int64_t m) {
  return f_doubleprime(table,
                       {ladder[static_cast<std::size_t>(table.i)].fidelity,
                        ladder[static_cast<std::size_t>(table.j)].fidelity},
                       m);
}

MBounds m_bounds(const FiniteRunSpec& spec, const JointLawTable& table,
                 const IterationLadder& ladder) {
  validate_levels(spec, ladder);
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0))
    throw InvalidParameter("epsilon must lie in (0, 1)");
  const std::array<double, 2> fidelities =
      spec.depolarise_to_target
          ? std::array<double, 2>{spec.f_prime, spec.f_prime}
          : std::array<double, 2>{ladder[static_cast<std::size_t>(spec.i)].fidelity,
                                  ladder[static_cast<std::size_t>(spec.j)].fidelity};

  // Minimum global fidelity required when aiming for M' outputs.
  const double keep = 1.0 - spec.epsilon;
  const auto required = [&](std::int64_t m) {
    return spec.mode == InfidelityMode::Global ? keep
                                               : std::pow(keep, static_cast<double>(m));
  };

  MBounds out;
  const std::int64_t T = table.max_outputs();
  const bool single = spec.p_i == 0.0 || spec.p_i == 1.0;
  out.f_doubleprime.assign(static_cast<std::size_t>(std::max<std::int64_t>(T, 0)) + 1,
                           spec.f_prime);
  std::int64_t uninterpolated = 0;
  for (std::int64_t m = 1; m <= T; ++m) {
    const double success = table.rows[static_cast<std::size_t>(m)].success;
    const double need = required(m);
    if (success * success >= need) out.lower_general = m;
    if (success >= need) uninterpolated = m;
    const double fpp = f_doubleprime(table, fidelities, m);
    out.f_doubleprime[static_cast<std::size_t>(m)] = fpp;
    if (werner_fidelity(spec.f_prime, fpp) >= need) out.upper = m;
  }
  // Beyond T nothing is produced and F'' = 1/2; per-pair thresholds fall with
  // M', so the upper set may still extend there.
  const double separable = werner_fidelity(spec.f_prime, 0.5);
  for (std::int64_t m = spec.pool; m > std::max<std::int64_t>(T, 0); --m) {
    if (separable >= required(m)) {
      out.upper = m;
      break;
    }
    if (spec.mode == InfidelityMode::Global) break;
  }
  if (single) out.lower_uninterpolated = uninterpolated;
  return out;
}

}  // namespace purify
