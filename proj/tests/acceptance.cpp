// Acceptance run: one PASS/FAIL line per primary criterion, with the
// tolerances and runtime budgets they are stated with.
//
// Exit status counts unexpected failures only. A known deviation (a stated
// property the exact computation shows to be false) still prints FAIL; its
// analysis is in the README.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/sweep.hpp"
#include "purify/bellcore.hpp"
#include "purify/dejmps.hpp"
#include "purify/finitesize.hpp"
#include "purify/interpolate.hpp"

using namespace purify;

namespace {

struct Verdict {
  bool passed = true;
  bool unexpected = false;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    passed = false;
    unexpected = true;
    notes.push_back(why);
  }
  void deviate(const std::string& why) {
    passed = false;
    notes.push_back("known: " + why);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

BellDiagonal random_state(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  const double a = e(rng), b = e(rng), c = e(rng), d = e(rng);
  const double s = a + b + c + d;
  return BellDiagonal(a / s, b / s, c / s, d / s);
}

// A random state whose best Bell fidelity exceeds `floor`.
BellDiagonal random_purifiable(std::mt19937_64& rng, double floor = 0.55) {
  for (;;) {
    const BellDiagonal x = optimal_permutation(random_state(rng));
    if (x.a() > floor && x.a() < 0.97) return x;
  }
}

// ---------------------------------------------------------------------------

Verdict dejmps_step_correctness() {
  Verdict v;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const BellDiagonal x = random_state(rng);
    const BellDiagonal y = random_state(rng);
    const StepOutcome fast = dejmps_step(x, y);
    const StepOutcome slow = dejmps_step_circuit_oracle(density_of(x), density_of(y));
    worst = std::max(worst, std::abs(fast.success_prob - slow.success_prob));
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst, std::abs(fast.output[k] - slow.output[k]));
  }
  if (!(worst <= 1e-10)) v.fail("recursion vs circuit oracle off by " + fmt(worst));
  v.note("recursion vs circuit oracle, 100 pairs: worst " + fmt(worst));

  // Fidelity 1/2 stays 1/2 (the weights leave the Werner family, see README);
  // perfect pairs stay perfect with t = 1.
  const StepOutcome half = dejmps_step(werner(0.5), werner(0.5));
  const StepOutcome again = dejmps_step(half.output, half.output);
  const double half_err = std::max({std::abs(half.output.a() - 0.5),
                                    std::abs(again.output.a() - 0.5),
                                    std::abs(half.success_prob - 5.0 / 9.0)});
  const StepOutcome one = dejmps_step(werner(1.0), werner(1.0));
  double one_err = std::abs(one.success_prob - 1.0);
  for (int k = 0; k < 4; ++k) one_err = std::max(one_err, std::abs(one.output[k] - werner(1.0)[k]));
  if (!(half_err <= 1e-12)) v.fail("F = 1/2 not preserved: " + fmt(half_err));
  if (!(one_err <= 1e-12)) v.fail("F = 1 not fixed: " + fmt(one_err));
  v.note("fixed points: F=1/2 " + fmt(half_err) + ", F=1 " + fmt(one_err));
  return v;
}

Verdict ladder_moments() {
  Verdict v;
  std::mt19937_64 rng(202);
  double worst_abs = 0.0, worst_rel = 0.0;
  int exact = 0, total = 0, within_ulp = 0;
  for (int n = 0; n < 20; ++n) {
    const IterationLadder ladder = build_ladder(random_purifiable(rng), 6);
    for (const LadderLevel& level : ladder.levels()) {
      if (level.k > 6) break;
      const double closed = cost_variance_closed_form(ladder.levels(), level.k);
      const double err = std::abs(closed - level.cost_variance);
      worst_abs = std::max(worst_abs, err);
      worst_rel = std::max(worst_rel, err / std::max(1.0, level.cost_variance));
      const double product = level.mean_cost * level.rate;
      ++total;
      exact += product == 1.0;
      within_ulp += std::abs(product - 1.0) <= std::numeric_limits<double>::epsilon();
    }
  }
  if (!(worst_abs <= 1e-9)) v.fail("closed form vs recurrence off by " + fmt(worst_abs));
  v.note("sigma^2 closed form vs recurrence: worst abs " + fmt(worst_abs) + ", rel " +
         fmt(worst_rel));
  if (within_ulp != total) v.fail("mu*R deviates from 1 by more than one ulp");
  v.note("mu*R == 1 bit-exact in " + std::to_string(exact) + "/" + std::to_string(total) +
         " levels, the rest within one ulp (1/x is rounded)");
  return v;
}

Verdict distribution_recurrences() {
  Verdict v;
  const IterationLadder ladder = build_ladder(werner(0.7), 4);
  double worst_norm = 0.0;
  for (int k = 0; k <= 4; ++k)
    for (std::int64_t n = 0; n <= 256; ++n)
      worst_norm = std::max(worst_norm,
                            std::abs(pairs_produced_distribution(ladder, k, n).total() - 1.0));
  if (!(worst_norm <= 1e-10)) v.fail("normalisation off by " + fmt(worst_norm));
  v.note("sum-to-one, k<=4, n<=256: worst " + fmt(worst_norm));

  const double t1 = ladder[1].success_prob, t2 = ladder[2].success_prob;
  double worst_mean = 0.0;
  for (std::int64_t n = 0; n <= 256; ++n) {
    const double h = static_cast<double>(n / 2);
    const double closed = t2 * (2.0 * h * t1 + std::pow(1.0 - 2.0 * t1, h) - 1.0) / 4.0;
    worst_mean = std::max(worst_mean,
                          std::abs(closed - pairs_produced_distribution(ladder, 2, n).mean()));
  }
  if (!(worst_mean <= 1e-12)) v.fail("E(M_2^n) off by " + fmt(worst_mean));
  v.note("E(M_2^n) closed form vs distribution mean, n<=256: worst " + fmt(worst_mean));
  return v;
}

Verdict cross_method_agreement() {
  Verdict v;
  const IterationLadder ladder = build_ladder(werner(0.7), 3);
  double worst = 0.0;
  std::int64_t entries = 0;
  for (int i = 0; i <= 2; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (std::int64_t pool = 1; pool <= 200; ++pool) {
          const FiniteRunSpec spec = make_run_spec(ladder, pool, i, j, p, 1e-7);
          const JointLawTable a = joint_law_markov(spec, ladder);
          const JointLawTable b = joint_law_iterative(spec, ladder);
          if (a.rows.size() != b.rows.size()) {
            v.fail("table lengths differ at N=" + std::to_string(pool));
            continue;
          }
          for (std::size_t m = 0; m < a.rows.size(); ++m) {
            worst = std::max({worst, std::abs(a.rows[m].joint_i - b.rows[m].joint_i),
                              std::abs(a.rows[m].joint_j - b.rows[m].joint_j),
                              std::abs(a.rows[m].success - b.rows[m].success)});
            entries += 3;
          }
        }
  if (!(worst <= 1e-9)) v.fail("methods differ by " + fmt(worst));
  v.note(std::to_string(entries) + " entries, every N in 1..200: worst " + fmt(worst));
  return v;
}

Verdict monte_carlo_concordance() {
  Verdict v;
  cli::ValidateSettings settings;  // 10^6 trials, 3 standard errors
  const IterationLadder ladder = build_ladder(werner(settings.werner_f), 6);
  for (const cli::CheckResult& c : {cli::check_joint_law_mc(ladder, ladder, settings),
                                    cli::check_consumption_mc(ladder, ladder, settings)}) {
    if (!c.passed) v.fail(c.name + ": " + std::to_string(c.violations.size()) + " outside 3 SE");
    v.note(c.name + ": " + std::to_string(c.compared) + " compared, worst " + fmt(c.worst) +
           " SE");
  }
  return v;
}

// Best rate over all mixtures of three protocols on a 0.01 simplex grid.
double brute_force_rate(const std::vector<ProtocolPoint>& pts, double f_target) {
  double best = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (int u = 0; u <= 100; ++u)
          for (int w = 0; u + w <= 100; ++w) {
            const double pa = u / 100.0, pb = w / 100.0, pc = (100 - u - w) / 100.0;
            const double f = pa * pts[a].fidelity + pb * pts[b].fidelity + pc * pts[c].fidelity;
            if (f < f_target) continue;
            const double cost =
                pa * pts[a].mean_cost + pb * pts[b].mean_cost + pc * pts[c].mean_cost;
            best = std::max(best, 1.0 / cost);
          }
  return best;
}

Verdict optimizer_identities() {
  Verdict v;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double vertex_err = 0.0, trip_err = 0.0, beat = -1.0;
  int instances = 0;
  for (int n = 0; n < 40; ++n) {
    std::vector<ProtocolPoint> raw;
    if (n % 2 == 0) {
      raw = points_from_ladder(build_ladder(random_purifiable(rng), 8));
    } else {
      // synthetic protocols: rates down, fidelities up, no convexity promised
      double r = 1.0, f = 0.55 + 0.1 * unit(rng);
      for (int k = 0; k < 5; ++k) {
        raw.push_back(ProtocolPoint::make(k, r, f));
        r *= 0.2 + 0.7 * unit(rng);
        f += (1.0 - f) * (0.05 + 0.6 * unit(rng));
      }
    }
    if (raw.size() > 5) raw.resize(5);
    const std::vector<ProtocolPoint> pts = pareto_prune(raw);
    ++instances;

    for (const ProtocolPoint& p : pts)
      vertex_err = std::max(vertex_err, std::abs(max_rate_at_fidelity(pts, p.fidelity).achieved_rate - p.rate));

    for (int s = 0; s < 20; ++s) {
      const double f = pts.front().fidelity + unit(rng) * (pts.back().fidelity - pts.front().fidelity);
      const double r = max_rate_at_fidelity(pts, f).achieved_rate;
      trip_err = std::max(trip_err, std::abs(max_fidelity_at_rate(pts, r).achieved_fidelity - f));
      const double r2 = pts.back().rate + unit(rng) * (pts.front().rate - pts.back().rate);
      const double f2 = max_fidelity_at_rate(pts, r2).achieved_fidelity;
      trip_err = std::max(trip_err, std::abs(max_rate_at_fidelity(pts, f2).achieved_rate - r2) / r2);
    }

    if (raw.size() >= 3) {
      for (int s = 0; s < 3; ++s) {
        const double f = pts.front().fidelity + unit(rng) * (pts.back().fidelity - pts.front().fidelity);
        const double pair = max_rate_at_fidelity(pts, f).achieved_rate;
        beat = std::max(beat, brute_force_rate(raw, f) - pair);
      }
    }
  }
  if (vertex_err != 0.0) v.fail("rate at a vertex differs by " + fmt(vertex_err));
  if (!(trip_err <= 1e-9)) v.fail("round trip off by " + fmt(trip_err));
  if (!(beat <= 1e-6)) v.fail("three-protocol grid beats the pair optimum by " + fmt(beat));
  v.note(std::to_string(instances) + " point sets: vertex error " + fmt(vertex_err) +
         ", round trip " + fmt(trip_err) + ", brute force minus pair " + fmt(beat));
  return v;
}

Verdict figure1_ordering() {
  Verdict v;
  const double f_target = 0.9;
  cli::SweepConfig config;
  config.p_grid = "0:0.6:61";
  std::vector<cli::GridPoint> grid = cli::make_grid(config, "", "");

  // add the channel strength where one DEJMPS step lands exactly on F_target,
  // so the equality case is exercised away from F_initial >= F_target
  double lo = 0.15, hi = 0.4;
  ChannelSpec channel;
  channel.kind = ChannelKind::Depolarising;
  for (int it = 0; it < 200; ++it) {
    channel.strength = 0.5 * (lo + hi);
    const double f1 = build_ladder(channel_bell_diagonal(channel), 1)[1].fidelity;
    (f1 > f_target ? lo : hi) = channel.strength;
  }
  channel.strength = lo;
  grid.push_back({lo, channel_bell_diagonal(channel)});

  int rows = 0, equal_rows = 0;
  for (const cli::GridPoint& point : grid) {
    const cli::AsymptoticRow row = cli::asymptotic_point(point, f_target, 16, LadderOptions{});
    if (row.status != "ok" && row.status != "at_target") {
      v.fail("status " + row.status + " at p=" + fmt(point.param));
      continue;
    }
    ++rows;
    const bool ordered = row.rate_uninterpolated <= row.rate_interpolated &&
                         row.rate_interpolated <= row.rate_ree_bound;
    if (!ordered) v.fail("ordering broken at p=" + fmt(point.param));

    // Literal claim: equal exactly where some F_k = F_target. Equality in
    // fact needs that level to be a vertex of the pruned frontier; a level
    // below the chord of its neighbours is beaten by mixing them.
    bool hits = row.status == "at_target", hits_vertex = hits;
    const IterationLadder ladder = build_ladder(point.state, 16);
    for (const LadderLevel& level : ladder.retained_levels())
      hits = hits || std::abs(level.fidelity - f_target) <= 1e-12;
    for (const ProtocolPoint& p : pareto_prune(points_from_ladder(ladder)))
      hits_vertex = hits_vertex || std::abs(p.fidelity - f_target) <= 1e-12;
    const bool equal = row.rate_interpolated - row.rate_uninterpolated <= 1e-12;
    equal_rows += equal;
    if (equal != hits_vertex)
      v.fail(std::string(equal ? "unexpected equality" : "missing equality") +
             " at frontier vertex, p=" + fmt(point.param));
    else if (equal != hits)
      v.deviate("F_" + std::to_string(row.k_baseline) + " = 0.9 at p=" + fmt(point.param) +
                " but that level is off the frontier: interpolated " +
                fmt(row.rate_interpolated) + " (pair " + std::to_string(row.pair_i) + "," +
                std::to_string(row.pair_j) + ") > uninterpolated " +
                fmt(row.rate_uninterpolated));
  }
  v.note(std::to_string(rows) + " grid points (61-point grid plus p=" + fmt(lo) +
         " where F_1 = 0.9), " + std::to_string(equal_rows) + " with equal rates; ordering " +
         "holds everywhere");
  return v;
}

Verdict figure2_shape() {
  Verdict v;
  cli::SweepConfig config;
  config.fidelity_grid = "0.55:0.9:8";
  const std::vector<cli::GridPoint> grid = cli::make_grid(config, "", "");
  const std::vector<std::int64_t> pools = cli::parse_pool_grid("2^5:2^12");
  cli::FiniteSettings settings;  // F_target 0.9, eps 1e-7, global, iterative

  int order_bad = 0, lower_bad = 0, upper_bad = 0, gap_bad = 0, gap_checked = 0;
  double worst_gap = 0.0;
  for (const cli::GridPoint& point : grid) {
    const std::vector<cli::FiniteRow> rows = cli::finite_point(point, pools, settings);
    const double f0 = rows.front().f_initial;
    struct Curve { const char* name; double cli::FiniteRow::*lower, cli::FiniteRow::*upper, cli::FiniteRow::*rate; };
    for (const Curve& c : {Curve{"interpolated", &cli::FiniteRow::interp_lower, &cli::FiniteRow::interp_upper,
                                 &cli::FiniteRow::rate_interpolated},
                           Curve{"baseline", &cli::FiniteRow::baseline_lower, &cli::FiniteRow::baseline_upper,
                                 &cli::FiniteRow::rate_baseline}}) {
      bool order = true, lower = true, upper = true;
      for (std::size_t n = 0; n < rows.size(); ++n) {
        order = order && rows[n].*c.lower <= rows[n].*c.upper;
        if (n > 0) {
          lower = lower && rows[n].*c.lower >= rows[n - 1].*c.lower;
          upper = upper && rows[n].*c.upper <= rows[n - 1].*c.upper;
        }
      }
      const std::string panel = "F_initial=" + fmt(f0) + " " + c.name;
      if (!order) { ++order_bad; v.fail(panel + ": lower > upper"); }
      if (!lower) { ++lower_bad; v.fail(panel + ": lower/N decreases"); }
      if (!upper) { ++upper_bad; v.deviate(panel + ": upper/N increases"); }
      if (f0 >= 0.7 - 1e-12) {
        const cli::FiniteRow& last = rows.back();
        const double rate = last.*c.rate;
        const double gap = std::max(std::abs(last.*c.lower - rate), std::abs(last.*c.upper - rate)) / rate;
        worst_gap = std::max(worst_gap, gap);
        ++gap_checked;
        if (!(gap <= 0.15)) {
          ++gap_bad;
          v.deviate(panel + ": N=4096 bounds " + fmt(last.*c.lower) + ".." + fmt(last.*c.upper) +
                 " vs rate " + fmt(rate) + " (" + fmt(100 * gap) + "%)");
        }
      }
    }
  }
  v.note("curves with lower > upper: " + std::to_string(order_bad) + "/16, lower/N decreasing: " +
         std::to_string(lower_bad) + "/16, upper/N increasing: " + std::to_string(upper_bad) +
         "/16, outside 15% at N=4096: " + std::to_string(gap_bad) + "/" +
         std::to_string(gap_checked) + " (worst " + fmt(100 * worst_gap) + "%)");
  return v;
}

Verdict omega_cutoff_soundness() {
  Verdict v;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int extended = 0;
  for (int n = 0; n < 50; ++n) {
    const BellDiagonal start = n % 2 ? werner(0.56 + 0.4 * unit(rng)) : random_purifiable(rng);
    const IterationLadder full = build_ladder(start, 30);
    const std::vector<ProtocolPoint> all = points_from_ladder(full);
    const double f_top = all.back().fidelity;
    const double f_target = all.front().fidelity + (0.05 + 0.9 * unit(rng)) * (f_top - all.front().fidelity);

    // shortest prefix that reaches the target, and some rate it achieves
    std::size_t m = 0;
    while (all[m].fidelity < f_target) ++m;
    std::vector<ProtocolPoint> so_far(all.begin(), all.begin() + static_cast<long>(m) + 1);
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    const double r_achieved = pair_rate_at_fidelity(so_far[i], so_far[m], f_target);

    const CutoffResult cut = protocol_cutoff(so_far, f_target, r_achieved,
                                             ladder_source(start, LadderOptions{}, so_far.size()));
    const double with_cut = max_rate_at_fidelity(pareto_prune(cut.points), f_target).achieved_rate;
    const double with_all = max_rate_at_fidelity(pareto_prune(all), f_target).achieved_rate;
    worst = std::max(worst, with_all - with_cut);
    extended += cut.points.size() > so_far.size();
  }
  if (!(worst <= 1e-12)) v.fail("protocols past the cutoff improve the rate by " + fmt(worst));
  v.note("50 instances (" + std::to_string(extended) +
         " pulled protocols past the prefix): largest gain from the full ladder " + fmt(worst));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"dejmps step correctness", 1, dejmps_step_correctness},
      {"ladder moments", 1, ladder_moments},
      {"distribution recurrences", 10, distribution_recurrences},
      {"cross-method agreement", 60, cross_method_agreement},
      {"monte carlo concordance", 300, monte_carlo_concordance},
      {"optimizer identities", 30, optimizer_identities},
      {"figure-1 ordering", 10, figure1_ordering},
      {"figure-2 shape", 600, figure2_shape},
      {"omega cutoff soundness", 10, omega_cutoff_soundness},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = c.run();
    } catch (const std::exception& e) {
      verdict.fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds > c.budget_seconds) verdict.fail("took " + fmt(seconds) + " s");
    std::printf("%s %s (%.2f s of %.0f s)%s\n", verdict.passed ? "PASS" : "FAIL", c.name.c_str(),
                seconds, c.budget_seconds,
                !verdict.passed && !verdict.unexpected ? " [known deviation, see README]" : "");
    for (const std::string& note : verdict.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
    if (verdict.unexpected) ++unexpected;
  }
  return unexpected;
}
