#include "cli/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "purify/mc_oracle.hpp"

namespace purify::cli {

namespace {

std::string describe(const FiniteRunSpec& spec) {
  std::ostringstream out;
  out << "N=" << spec.pool << " i=" << spec.i << " j=" << spec.j << " p_i=" << spec.p_i;
  return out.str();
}

struct McRun {
  std::int64_t pool;
  int i;
  int j;
  double p_i;
};

// Chosen so that every non-zero exact probability is at least ~1e-4.
const std::vector<McRun> kMcRuns{
    {2, 1, 1, 1.0}, {16, 1, 2, 0.5}, {10, 0, 1, 0.5}, {40, 2, 3, 0.75}, {24, 1, 3, 0.0}};

struct McConsumption {
  int k;
  std::int64_t outputs;
};

const std::vector<McConsumption> kMcConsumption{{0, 3}, {1, 1}, {1, 4}, {2, 1},
                                                {2, 3}, {3, 1}};

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "markov") return Method::Markov;
  if (name == "iterative") return Method::Iterative;
  throw InvalidParameter("unknown method '" + name + "' (markov | iterative)");
}

AsymptoticRow asymptotic_point(const GridPoint& point, double f_target, int k_max,
                               LadderOptions options) {
  AsymptoticRow row;
  row.param = point.param;
  const BellDiagonal start =
      options.permute_first ? optimal_permutation(point.state) : point.state;
  row.f_initial = start.a();
  if (!(row.f_initial > 0.5)) {
    row.status = "impossible";
    return row;
  }
  if (row.f_initial >= f_target - kEqualityTol) {
    row.rate_interpolated = row.rate_uninterpolated = row.rate_ree_bound = 1.0;
    row.status = "at_target";
    return row;
  }
  row.rate_ree_bound = std::min(1.0, ree_rate_bound(row.f_initial, f_target));

  const IterationLadder ladder = build_ladder(point.state, k_max, options);
  const std::vector<ProtocolPoint> raw = points_from_ladder(ladder);
  std::vector<ProtocolPoint> points = pareto_prune(raw);
  if (points.back().fidelity < f_target - kEqualityTol) {
    row.status = "unreachable";
    return row;
  }
  const double target = std::min(f_target, points.back().fidelity);
  InterpolationResult best = max_rate_at_fidelity(points, target);

  // Protocols beyond k_max can still matter while their rate exceeds Omega.
  if (ladder.retained() == ladder.size()) {
    try {
      const CutoffResult cut = protocol_cutoff(
          raw, target, best.achieved_rate, ladder_source(point.state, options, ladder.retained()));
      if (cut.points.size() > raw.size()) {
        points = pareto_prune(cut.points);
        best = max_rate_at_fidelity(points, target);
      }
    } catch (const CutoffUndefined&) {
    } catch (const OutOfRange&) {
    }
  }

  row.rate_interpolated = best.achieved_rate;
  row.pair_i = best.first.index;
  row.pair_j = best.second.index;
  row.p_i = best.p_i;
  for (const LadderLevel& level : ladder.retained_levels()) {
    if (level.fidelity >= f_target - kEqualityTol) {
      row.k_baseline = level.k;
      row.rate_uninterpolated = level.rate;
      break;
    }
  }
  return row;
}

void add_row(CsvTable& table, const AsymptoticRow& row) {
  table.add_row({row.param, row.f_initial, row.rate_interpolated, std::int64_t{row.pair_i},
                 std::int64_t{row.pair_j}, row.p_i, row.rate_uninterpolated,
                 row.rate_ree_bound, row.status});
}

JointLawTable joint_law(const FiniteRunSpec& spec, const IterationLadder& ladder,
                        Method method, std::size_t state_cap) {
  return method == Method::Markov ? joint_law_markov(spec, ladder, state_cap)
                                  : joint_law_iterative(spec, ladder);
}

std::vector<FiniteRow> finite_point(const GridPoint& point, const std::vector<std::int64_t>& pools,
                                    const FiniteSettings& settings) {
  const AsymptoticRow asym =
      asymptotic_point(point, settings.f_target, settings.k_max, settings.options);
  std::vector<FiniteRow> rows;
  for (std::int64_t pool : pools) {
    FiniteRow row;
    row.param = point.param;
    row.f_initial = asym.f_initial;
    row.pool = pool;
    row.mode = settings.mode;
    row.pair_i = asym.pair_i;
    row.pair_j = asym.pair_j;
    row.p_i = asym.p_i;
    row.k_baseline = asym.k_baseline;
    row.rate_interpolated = asym.rate_interpolated;
    row.rate_baseline = asym.rate_uninterpolated;
    row.status = asym.status;
    rows.push_back(row);
  }
  if (asym.status == "impossible" || asym.status == "unreachable") return rows;

  const int depth = std::max({settings.k_max, asym.pair_j, asym.k_baseline});
  const IterationLadder ladder = build_ladder(point.state, depth, settings.options);
  for (FiniteRow& row : rows) {
    const double n = static_cast<double>(row.pool);
    try {
      const FiniteRunSpec spec = make_run_spec(ladder, row.pool, row.pair_i, row.pair_j,
                                               row.p_i, settings.epsilon, settings.mode);
      const MBounds interp = m_bounds(
          spec, joint_law(spec, ladder, settings.method, settings.state_cap), ladder);
      const FiniteRunSpec base = make_baseline_spec(ladder, row.pool, row.k_baseline,
                                                    settings.f_target, settings.epsilon,
                                                    settings.mode);
      const MBounds baseline = m_bounds(
          base, joint_law(base, ladder, settings.method, settings.state_cap), ladder);
      if (n > 0) {
        row.interp_lower = static_cast<double>(interp.lower_general) / n;
        row.interp_upper = static_cast<double>(interp.upper) / n;
        row.baseline_lower = static_cast<double>(*baseline.lower_uninterpolated) / n;
        row.baseline_upper = static_cast<double>(baseline.upper) / n;
      }
    } catch (const StateCapExceeded&) {
      row.status = "state_cap";
    }
  }
  return rows;
}

void add_row(CsvTable& table, const FiniteRow& row) {
  table.add_row({row.param, row.f_initial, row.pool, to_string(row.mode),
                 std::int64_t{row.pair_i}, std::int64_t{row.pair_j}, row.p_i,
                 std::int64_t{row.k_baseline}, row.interp_lower, row.interp_upper,
                 row.baseline_lower, row.baseline_upper, row.rate_interpolated,
                 row.rate_baseline, row.status});
}

CheckResult check_methods_agree(const IterationLadder& ladder, double tolerance) {
  CheckResult out;
  out.name = "markov_vs_iterative";
  out.tolerance = tolerance;
  const std::vector<std::int64_t> pools{1, 2, 3, 4, 7, 8, 15, 16, 31, 50, 64, 100, 127, 150, 200};
  for (int i = 0; i <= 2; ++i) {
    for (int j = i + 1; j <= 3; ++j) {
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (std::int64_t pool : pools) {
          const FiniteRunSpec spec = make_run_spec(ladder, pool, i, j, p, 1e-7);
          const JointLawTable a = joint_law_markov(spec, ladder);
          const JointLawTable b = joint_law_iterative(spec, ladder);
          double worst = 0.0;
          for (std::size_t m = 0; m < a.rows.size(); ++m) {
            worst = std::max({worst, std::abs(a.rows[m].joint_i - b.rows[m].joint_i),
                              std::abs(a.rows[m].joint_j - b.rows[m].joint_j),
                              std::abs(a.rows[m].success - b.rows[m].success)});
            out.compared += 3;
          }
          out.worst = std::max(out.worst, worst);
          if (!(worst <= tolerance)) {
            out.passed = false;
            out.violations.push_back(describe(spec) + " deviation " + format_double(worst));
          }
        }
      }
    }
  }
  return out;
}

CheckResult check_joint_law_mc(const IterationLadder& exact, const IterationLadder& simulated,
                               const ValidateSettings& settings) {
  CheckResult out;
  out.name = "monte_carlo_joint_law";
  out.tolerance = settings.sigmas;
  for (const McRun& run : kMcRuns) {
    const FiniteRunSpec spec = make_run_spec(exact, run.pool, run.i, run.j, run.p_i, 1e-7);
    const JointLawTable table = joint_law_iterative(spec, exact);
    TrialConfig config{settings.seed, settings.trials, spec, settings.workers};
    const EmpiricalLaw law = simulate_runs(config, simulated);

    const auto compare = [&](double p, double f, std::int64_t m, const char* what) {
      const double se = frequency_error(p, settings.trials);
      const double gap = std::abs(f - p);
      ++out.compared;
      const bool ok = se > 0.0 ? gap <= settings.sigmas * se : gap <= 1e-12;
      if (se > 0.0) out.worst = std::max(out.worst, gap / se);
      if (!ok) {
        out.passed = false;
        out.violations.push_back(describe(spec) + " M'=" + std::to_string(m) + " " + what +
                                 " exact " + format_double(p) + " empirical " +
                                 format_double(f));
      }
    };
    for (std::int64_t m = 1; m <= table.max_outputs(); ++m) {
      const JointLawRow& row = table.rows[static_cast<std::size_t>(m)];
      compare(row.success, law.success(m), m, "success");
      compare(row.joint_i, law.joint(m, 0), m, "joint_i");
      compare(row.joint_j, law.joint(m, 1), m, "joint_j");
    }
  }
  return out;
}

CheckResult check_consumption_mc(const IterationLadder& exact,
                                 const IterationLadder& simulated,
                                 const ValidateSettings& settings) {
  CheckResult out;
  out.name = "monte_carlo_consumption";
  out.tolerance = settings.sigmas;
  for (const McConsumption& c : kMcConsumption) {
    const double m = static_cast<double>(c.outputs);
    const double mean = m * exact[static_cast<std::size_t>(c.k)].mean_cost;
    const double variance = m * exact[static_cast<std::size_t>(c.k)].cost_variance;
    const CountDistribution dist = pairs_consumed_distribution(exact, c.k, c.outputs);
    CompensatedSum fourth;
    for (std::size_t n = 0; n < dist.size(); ++n) {
      const double d = static_cast<double>(n) - mean;
      fourth.add(d * d * d * d * dist.mass[n]);
    }
    const double trials = static_cast<double>(settings.trials);
    const double mean_se = std::sqrt(variance / trials);
    const double var_se = std::sqrt(std::max(fourth.value() - variance * variance, 0.0) / trials);

    TrialConfig config{settings.seed, settings.trials, FiniteRunSpec{}, settings.workers};
    const EmpiricalConsumption sample = simulate_consumption(config, simulated, c.k, c.outputs);

    const auto compare = [&](double value, double estimate, double se, const char* what) {
      const double gap = std::abs(estimate - value);
      ++out.compared;
      const bool ok = se > 0.0 ? gap <= settings.sigmas * se : gap <= 1e-9 * std::max(1.0, value);
      if (se > 0.0) out.worst = std::max(out.worst, gap / se);
      if (!ok) {
        out.passed = false;
        out.violations.push_back("k=" + std::to_string(c.k) + " m=" +
                                 std::to_string(c.outputs) + " " + what + " exact " +
                                 format_double(value) + " empirical " + format_double(estimate));
      }
    };
    compare(mean, sample.mean, mean_se, "mean");
    compare(variance, sample.variance, var_se, "variance");
  }
  return out;
}

CheckResult check_bound_invariants(const IterationLadder& ladder) {
  CheckResult out;
  out.name = "bound_invariants";
  const auto fail = [&](const std::string& what) {
    out.passed = false;
    out.violations.push_back(what);
  };
  for (const McRun& run : kMcRuns) {
    for (InfidelityMode mode : {InfidelityMode::Global, InfidelityMode::PerPair}) {
      const FiniteRunSpec spec =
          make_run_spec(ladder, run.pool, run.i, run.j, run.p_i, 1e-3, mode);
      const JointLawTable table = joint_law_iterative(spec, ladder);
      FiniteRunSpec bigger = spec;
      bigger.pool += 1;
      const JointLawTable next = joint_law_iterative(bigger, ladder);
      for (std::int64_t m = 1; m <= table.max_outputs(); ++m) {
        ++out.compared;
        if (table.success(m) > table.success(m - 1) + 1e-12)
          fail(describe(spec) + " Pr(Y) increases at M'=" + std::to_string(m));
        if (next.success(m) < table.success(m) - 1e-12)
          fail(describe(spec) + " Pr(Y) decreases with N at M'=" + std::to_string(m));
      }
      const MBounds b = m_bounds(spec, table, ladder);
      ++out.compared;
      if (b.lower_general > b.upper) fail(describe(spec) + " lower_general > upper");
      if (b.lower_uninterpolated &&
          (b.lower_general > *b.lower_uninterpolated || *b.lower_uninterpolated > b.upper))
        fail(describe(spec) + " single-protocol bounds out of order");
    }
  }
  return out;
}

std::vector<CheckResult> run_validation(const ValidateSettings& settings) {
  const IterationLadder exact = build_ladder(werner(settings.werner_f), 6);
  IterationLadder simulated = exact;
  if (settings.fault_level > 0) {
    const double t = exact[static_cast<std::size_t>(settings.fault_level)].success_prob;
    simulated = exact.with_success_prob(settings.fault_level, 1.0 - t);
  }
  return {check_methods_agree(exact), check_bound_invariants(exact),
          check_joint_law_mc(exact, simulated, settings),
          check_consumption_mc(exact, simulated, settings)};
}

Json validation_summary(const std::vector<CheckResult>& checks,
                        const ValidateSettings& settings) {
  Json doc = Json::object();
  doc["schema"] = "purify.validate/1";
  doc["seed"] = settings.seed;
  doc["trials"] = settings.trials;
  doc["generator"] = kGeneratorName;
  doc["fault_level"] = settings.fault_level;
  bool all = true;
  Json list = Json::array();
  for (const CheckResult& c : checks) {
    all = all && c.passed;
    list.push_back(Json{{"name", c.name},
                        {"passed", c.passed},
                        {"compared", c.compared},
                        {"worst", c.worst},
                        {"tolerance", c.tolerance},
                        {"violations", c.violations}});
  }
  doc["passed"] = all;
  doc["checks"] = std::move(list);
  return doc;
}

}  // namespace purify::cli
