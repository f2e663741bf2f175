#pragma once

// Per-grid-point computations behind the sweep commands.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "purify/bellcore.hpp"
#include "purify/dejmps.hpp"
#include "purify/finitesize.hpp"
#include "purify/interpolate.hpp"
#include "purify/io.hpp"

namespace purify::cli {

/// One initial state of a sweep: the channel parameter (or the Werner
/// fidelity when no channel is involved) and its Bell-diagonal state.
struct GridPoint {
  double param = 0.0;
  BellDiagonal state;
};

enum class Method { Markov, Iterative };
Method parse_method(const std::string& name);

struct AsymptoticRow {
  double param = 0.0;
  double f_initial = 0.0;
  double rate_interpolated = 0.0;
  int pair_i = 0;
  int pair_j = 0;
  double p_i = 1.0;
  double rate_uninterpolated = 0.0;
  double rate_ree_bound = 0.0;
  int k_baseline = 0;
  std::string status = "ok";  // ok | at_target | unreachable | impossible
};

/// Optimal interpolated pair at `f_target`, the smallest single protocol
/// reaching it and the relative-entropy ceiling (clipped to 1).
AsymptoticRow asymptotic_point(const GridPoint& point, double f_target, int k_max,
                               LadderOptions options);

inline const std::vector<std::string> kAsymptoticColumns{
    "param", "F_initial", "rate_interpolated", "pair_i", "pair_j",
    "p_i", "rate_uninterpolated", "rate_ree_bound", "status"};
inline constexpr const char* kAsymptoticSchema = "purify.asymptotic_sweep/1";

void add_row(CsvTable& table, const AsymptoticRow& row);

struct FiniteSettings {
  double f_target = 0.9;
  double epsilon = 1e-7;
  InfidelityMode mode = InfidelityMode::Global;
  Method method = Method::Iterative;
  std::size_t state_cap = kDefaultStateCap;
  int k_max = 16;
  LadderOptions options;
};

struct FiniteRow {
  double param = 0.0;
  double f_initial = 0.0;
  std::int64_t pool = 0;
  InfidelityMode mode = InfidelityMode::Global;
  int pair_i = 0;
  int pair_j = 0;
  double p_i = 1.0;
  int k_baseline = 0;
  double interp_lower = 0.0;    // lower_general / N
  double interp_upper = 0.0;    // upper / N
  double baseline_lower = 0.0;  // lower_uninterpolated / N
  double baseline_upper = 0.0;
  double rate_interpolated = 0.0;
  double rate_baseline = 0.0;
  std::string status = "ok";  // ok | at_target | unreachable | impossible | state_cap
};

inline const std::vector<std::string> kFiniteColumns{
    "param", "F_initial", "N", "mode", "pair_i", "pair_j", "p_i", "k_baseline",
    "interp_lower", "interp_upper", "baseline_lower", "baseline_upper",
    "rate_interpolated", "rate_baseline", "status"};
inline constexpr const char* kFiniteSchema = "purify.finite_sweep/1";

/// Bounds for every N in `pools`, in order.
std::vector<FiniteRow> finite_point(const GridPoint& point, const std::vector<std::int64_t>& pools,
                                    const FiniteSettings& settings);

void add_row(CsvTable& table, const FiniteRow& row);

JointLawTable joint_law(const FiniteRunSpec& spec, const IterationLadder& ladder,
                        Method method, std::size_t state_cap);

// --- validation ------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // largest deviation (absolute, or in standard errors)
  double tolerance = 0.0;
  std::int64_t compared = 0;
  std::vector<std::string> violations;  // offending parameters
};

struct ValidateSettings {
  std::uint64_t seed = 20261016;
  std::int64_t trials = 1'000'000;
  int workers = 1;
  double sigmas = 3.0;
  // Replace t_k by 1 - t_k in the ladder the simulator sees (0 = no fault).
  int fault_level = 0;
  double werner_f = 0.7;
};

/// Markov versus iterative joint laws on i in {0,1,2}, j in i+1..3, N <= 200,
/// p_i in {0, 0.25, 0.5, 0.75, 1}.
CheckResult check_methods_agree(const IterationLadder& ladder, double tolerance = 1e-9);

/// Simulated joint laws against the exact tables on the standard grid.
CheckResult check_joint_law_mc(const IterationLadder& exact, const IterationLadder& simulated,
                               const ValidateSettings& settings);

/// Simulated consumed-pair means and variances against exact values.
CheckResult check_consumption_mc(const IterationLadder& exact,
                                 const IterationLadder& simulated,
                                 const ValidateSettings& settings);

/// Monotonicity of Pr(Y) and ordering of the bounds on the standard grid.
CheckResult check_bound_invariants(const IterationLadder& ladder);

std::vector<CheckResult> run_validation(const ValidateSettings& settings);

Json validation_summary(const std::vector<CheckResult>& checks,
                        const ValidateSettings& settings);

}  // namespace purify::cli
