#include "cli/commands.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cli/config.hpp"

namespace purify::cli {

namespace {

class Infeasible : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// fn(k) for k in [0, count) on up to `workers` threads; results stay in index
// order whatever the completion order.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, int workers, Fn fn) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        results[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void emit(const SweepConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty() || config.out == "-") {
    out << text;
    return;
  }
  std::ofstream file(config.out, std::ios::binary);
  if (!file) throw InvalidParameter("cannot write to '" + config.out + "'");
  file << text;
}

void emit_table(const SweepConfig& config, const CsvTable& table, std::ostream& out) {
  emit(config, config.format == "json" ? dump(table.to_json()) : table.str(), out);
}

LadderOptions ladder_options(const SweepConfig& config) {
  return LadderOptions{!config.no_permute, false};
}

void check_target(double f_target) {
  if (!(f_target > 0.5 && f_target < 1.0))
    throw InvalidParameter("--f-target must lie in (1/2, 1)");
}

void cmd_ladder(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  const std::vector<GridPoint> grid = make_grid(config, "", "");
  if (grid.size() != 1) throw InvalidParameter("ladder takes a single initial state");
  const IterationLadder ladder = build_ladder(grid.front().state, config.k_max,
                                              ladder_options(config));
  if (ladder.retained() < ladder.size())
    err << "note: fidelity stops increasing after k=" << ladder.retained() - 1
        << "; later levels omitted\n";
  if (ladder.truncation_notice()) err << "note: " << *ladder.truncation_notice() << '\n';
  if (config.format == "json")
    emit(config, dump(ladder_to_json(ladder, true)), out);
  else
    emit(config, ladder_table(ladder, true).str(), out);
}

void cmd_asymptotic(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  check_target(config.f_target);
  const ChannelSpec shape = channel_shape(config);
  const bool damping = shape.kind == ChannelKind::AmplitudeDamping;
  const std::vector<GridPoint> grid =
      make_grid(config, damping ? "gamma" : "p", damping ? "0:0.8:41" : "0:0.6:61");
  const auto rows = parallel_map<AsymptoticRow>(grid.size(), config.workers, [&](std::size_t k) {
    return asymptotic_point(grid[k], config.f_target, config.k_max, ladder_options(config));
  });
  CsvTable table(kAsymptoticSchema, kAsymptoticColumns);
  bool any = false;
  for (const AsymptoticRow& row : rows) {
    add_row(table, row);
    any = any || row.status == "ok" || row.status == "at_target";
  }
  emit_table(config, table, out);
  if (!any) {
    err << "error: target fidelity unreachable at every grid point\n";
    throw Infeasible("unreachable");
  }
}

void cmd_finite(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  check_target(config.f_target);
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw InvalidParameter("--epsilon must lie in (0, 1)");
  const std::vector<GridPoint> grid = make_grid(config, "f-initial", "0.55:0.9:8");
  const std::vector<std::int64_t> pools = parse_pool_grid(config.n_grid);
  FiniteSettings settings;
  settings.f_target = config.f_target;
  settings.epsilon = config.epsilon;
  settings.mode = parse_infidelity_mode(config.mode);
  settings.method = parse_method(config.method);
  settings.state_cap = config.state_cap;
  settings.k_max = config.k_max;
  settings.options = ladder_options(config);

  const auto blocks = parallel_map<std::vector<FiniteRow>>(
      grid.size(), config.workers,
      [&](std::size_t k) { return finite_point(grid[k], pools, settings); });
  CsvTable table(kFiniteSchema, kFiniteColumns);
  bool any = false;
  for (const auto& rows : blocks) {
    for (const FiniteRow& row : rows) {
      add_row(table, row);
      any = any || (row.status != "unreachable" && row.status != "impossible");
      if (row.status == "state_cap")
        err << "note: N=" << row.pool << " at param " << row.param
            << " exceeds --state-cap; row left empty\n";
    }
  }
  emit_table(config, table, out);
  if (!any) {
    err << "error: target fidelity unreachable at every grid point\n";
    throw Infeasible("unreachable");
  }
}

bool cmd_validate(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  ValidateSettings settings;
  settings.seed = config.seed;
  settings.trials = config.trials;
  settings.workers = config.workers;
  settings.fault_level = config.inject_fault;
  if (settings.trials < 1) throw InvalidParameter("--trials must be at least 1");
  if (settings.fault_level < 0 || settings.fault_level > 6)
    throw InvalidParameter("--inject-fault takes a level in 1..6");
  const std::vector<CheckResult> checks = run_validation(settings);
  for (const CheckResult& c : checks) {
    err << (c.passed ? "pass " : "FAIL ") << c.name << " (" << c.compared
        << " compared, worst " << c.worst << ")\n";
    for (const std::string& v : c.violations) err << "  " << v << '\n';
  }
  const Json summary = validation_summary(checks, settings);
  emit(config, dump(summary), out);
  return summary["passed"].get<bool>();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  SweepConfig config;
  CLI::App app{"Rates and finite-pool bounds for interpolated DEJMPS purification"};
  app.set_config("--config", "", "flat 'key = value' file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--channel", config.channel, "depolarising | dephasing | pauli | amplitude-damping")
      ->capture_default_str();
  app.add_option("--p", config.p_grid, "channel probability: value, list or start:stop:count");
  app.add_option("--gamma", config.gamma_grid, "amplitude-damping strength grid");
  app.add_option("--werner-f", config.werner_grid, "Werner-state fidelity grid (no channel)");
  app.add_option("--f-initial", config.fidelity_grid,
                 "initial Bell fidelity grid, converted to the channel parameter");
  app.add_option("--pauli-weights", config.pauli_weights,
                 "conditional Z,X,Y flip weights of the Pauli channel (default 1/2,1/3,1/6)");
  app.add_option("--f-target", config.f_target, "target fidelity")->capture_default_str();
  app.add_option("--epsilon", config.epsilon, "allowed infidelity")->capture_default_str();
  app.add_option("--mode", config.mode, "global | per-pair")->capture_default_str();
  app.add_option("--method", config.method, "markov | iterative")->capture_default_str();
  app.add_option("--n-grid", config.n_grid,
                 "pool sizes: list (entries may be 2^k) or 2^a:2^b; the default range is a "
                 "choice of this tool, not taken from published figures")
      ->capture_default_str();
  app.add_option("--kmax", config.k_max, "largest DEJMPS iteration count")->capture_default_str();
  app.add_option("--out", config.out, "output path (stdout when omitted)");
  app.add_option("--format", config.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--workers", config.workers, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--state-cap", config.state_cap, "largest Markov chain allowed")
      ->capture_default_str();
  app.add_option("--trials", config.trials, "Monte Carlo trials")->capture_default_str();
  app.add_flag("--no-permute", config.no_permute,
               "skip the initial Bell-basis permutation");
  app.add_option("--inject-fault", config.inject_fault,
                 "validate only: replace t_k by 1 - t_k at this level in the simulator");

  CLI::App* ladder = app.add_subcommand("ladder", "DEJMPS iteration table");
  CLI::App* asymptotic = app.add_subcommand("asymptotic-sweep", "rates against channel strength");
  CLI::App* finite = app.add_subcommand("finite-sweep", "finite-pool bounds against pool size");
  CLI::App* validate = app.add_subcommand("validate", "exact-versus-simulation cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidArguments;
  }

  try {
    if (ladder->parsed()) cmd_ladder(config, out, err);
    if (asymptotic->parsed()) cmd_asymptotic(config, out, err);
    if (finite->parsed()) cmd_finite(config, out, err);
    if (validate->parsed() && !cmd_validate(config, out, err)) return kExitValidationFailure;
  } catch (const Infeasible&) {
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidArguments;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidArguments;
  } catch (const StateCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidArguments;
  }
  return kExitOk;
}

}  // namespace purify::cli
