#include "purify/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace purify {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Sampler {
 public:
  Sampler(std::uint64_t seed, const IterationLadder& ladder) : rng_(seed), ladder_(ladder) {}

  bool bernoulli(double p) {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p;
  }

  // Pool pairs used to finish one level-k pair, or -1 once more than
  // `budget` would be needed.
  std::int64_t produce(int k, std::int64_t budget) {
    if (k == 0) return budget >= 1 ? 1 : -1;
    const double t = ladder_[static_cast<std::size_t>(k)].success_prob;
    std::int64_t used = 0;
    while (true) {
      for (int half = 0; half < 2; ++half) {
        const std::int64_t got = produce(k - 1, budget - used);
        if (got < 0) return -1;
        used += got;
      }
      if (bernoulli(t)) return used;
    }
  }

 private:
  std::mt19937_64 rng_;
  const IterationLadder& ladder_;
};

void validate(const TrialConfig& config, const IterationLadder& ladder) {
  if (config.trials < 1) throw InvalidParameter("trials must be at least 1");
  if (config.workers < 1) throw InvalidParameter("workers must be at least 1");
  const FiniteRunSpec& spec = config.spec;
  if (spec.pool < 0) throw InvalidParameter("pool size must be non-negative");
  if (spec.i < 0 || spec.j < spec.i || spec.j > ladder.depth())
    throw InvalidParameter("protocol indices must satisfy 0 <= i <= j <= ladder depth");
  if (!(spec.p_i >= 0.0 && spec.p_i <= 1.0)) throw InvalidParameter("p_i must lie in [0, 1]");
}

// Runs `body(chunk_index, trials_in_chunk)` for every chunk, chunks dealt
// round-robin to the workers.
template <class Body>
void for_each_chunk(const TrialConfig& config, Body body) {
  const std::int64_t chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;
  const int workers = static_cast<int>(std::min<std::int64_t>(config.workers, chunks));
  const auto run = [&](int w) {
    for (std::int64_t c = w; c < chunks; c += workers) {
      const std::int64_t first = c * kTrialChunk;
      body(c, std::min(kTrialChunk, config.trials - first));
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

}  // namespace

double frequency_error(double f, std::int64_t trials) {
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

double EmpiricalLaw::success(std::int64_t m) const {
  if (m < 0 || m > max_outputs()) return 0.0;
  return static_cast<double>(success_count[static_cast<std::size_t>(m)]) /
         static_cast<double>(trials);
}

double EmpiricalLaw::joint(std::int64_t m, int which) const {
  if (m < 1 || m > max_outputs()) return 0.0;
  const auto& counts = which == 0 ? joint_i_count : joint_j_count;
  return static_cast<double>(counts[static_cast<std::size_t>(m)]) /
         static_cast<double>(trials);
}

EmpiricalLaw simulate_runs(const TrialConfig& config, const IterationLadder& ladder) {
  validate(config, ladder);
  const FiniteRunSpec& spec = config.spec;
  const std::int64_t T = spec.pool >> spec.i;
  const std::size_t width = static_cast<std::size_t>(T) + 1;
  const std::int64_t chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;

  struct Counts {
    std::vector<std::int64_t> success, joint_i, joint_j;
  };
  std::vector<Counts> per_chunk(static_cast<std::size_t>(chunks));

  for_each_chunk(config, [&](std::int64_t c, std::int64_t count) {
    Counts local{std::vector<std::int64_t>(width), std::vector<std::int64_t>(width),
                 std::vector<std::int64_t>(width)};
    Sampler sampler(splitmix64(config.seed + static_cast<std::uint64_t>(c)), ladder);
    for (std::int64_t trial = 0; trial < count; ++trial) {
      ++local.success[0];
      std::int64_t used = 0;
      for (std::int64_t m = 1; m <= T; ++m) {
        const bool pick_i = sampler.bernoulli(spec.p_i);
        const std::int64_t cost = sampler.produce(pick_i ? spec.i : spec.j, spec.pool - used);
        if (cost < 0) break;
        used += cost;
        ++local.success[static_cast<std::size_t>(m)];
        ++(pick_i ? local.joint_i : local.joint_j)[static_cast<std::size_t>(m)];
      }
    }
    per_chunk[static_cast<std::size_t>(c)] = std::move(local);
  });

  EmpiricalLaw law;
  law.seed = config.seed;
  law.trials = config.trials;
  law.pool = spec.pool;
  law.i = spec.i;
  law.j = spec.j;
  law.p_i = spec.p_i;
  law.success_count.assign(width, 0);
  law.joint_i_count.assign(width, 0);
  law.joint_j_count.assign(width, 0);
  for (const Counts& counts : per_chunk) {
    for (std::size_t m = 0; m < width; ++m) {
      law.success_count[m] += counts.success[m];
      law.joint_i_count[m] += counts.joint_i[m];
      law.joint_j_count[m] += counts.joint_j[m];
    }
  }
  return law;
}

double EmpiricalConsumption::frequency(std::int64_t n) const {
  if (n < 0 || n >= static_cast<std::int64_t>(histogram.size())) return 0.0;
  return static_cast<double>(histogram[static_cast<std::size_t>(n)]) /
         static_cast<double>(trials);
}

EmpiricalConsumption simulate_consumption(const TrialConfig& config,
                                          const IterationLadder& ladder, int k,
                                          std::int64_t outputs) {
  if (config.trials < 1) throw InvalidParameter("trials must be at least 1");
  if (k < 0 || k > ladder.depth()) throw InvalidParameter("level outside ladder");
  if (outputs < 0) throw InvalidParameter("output count must be non-negative");
  for (int level = 1; level <= k; ++level)
    if (!(ladder[static_cast<std::size_t>(level)].success_prob > 0.0))
      throw InvalidParameter("zero success probability: consumption is unbounded");

  const std::int64_t chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<std::vector<std::int64_t>> per_chunk(static_cast<std::size_t>(chunks));
  constexpr std::int64_t kUnbounded = std::int64_t{1} << 62;

  for_each_chunk(config, [&](std::int64_t c, std::int64_t count) {
    std::vector<std::int64_t> hist;
    Sampler sampler(splitmix64(config.seed + static_cast<std::uint64_t>(c)), ladder);
    for (std::int64_t trial = 0; trial < count; ++trial) {
      std::int64_t used = 0;
      for (std::int64_t m = 0; m < outputs; ++m) used += sampler.produce(k, kUnbounded);
      if (used >= static_cast<std::int64_t>(hist.size()))
        hist.resize(static_cast<std::size_t>(used) + 1, 0);
      ++hist[static_cast<std::size_t>(used)];
    }
    per_chunk[static_cast<std::size_t>(c)] = std::move(hist);
  });

  EmpiricalConsumption out;
  out.seed = config.seed;
  out.trials = config.trials;
  out.k = k;
  out.outputs = outputs;
  for (const auto& hist : per_chunk) {
    if (hist.size() > out.histogram.size()) out.histogram.resize(hist.size(), 0);
    for (std::size_t n = 0; n < hist.size(); ++n) out.histogram[n] += hist[n];
  }

  const double trials = static_cast<double>(config.trials);
  double sum = 0.0;
  for (std::size_t n = 0; n < out.histogram.size(); ++n)
    sum += static_cast<double>(n) * static_cast<double>(out.histogram[n]);
  out.mean = sum / trials;
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t n = 0; n < out.histogram.size(); ++n) {
    const double d = static_cast<double>(n) - out.mean;
    const double w = static_cast<double>(out.histogram[n]);
    m2 += w * d * d;
    m4 += w * d * d * d * d;
  }
  m2 /= trials;
  m4 /= trials;
  out.variance = m2 * trials / std::max(trials - 1.0, 1.0);
  out.mean_error = std::sqrt(out.variance / trials);
  out.variance_error = std::sqrt(std::max(m4 - m2 * m2, 0.0) / trials);
  return out;
}

}  // namespace purify
