#include <doctest.h>

#include <cmath>

#include "purify/mc_oracle.hpp"

using namespace purify;

namespace {

const IterationLadder& werner_ladder() {
  static const IterationLadder ladder = build_ladder(werner(0.7), 4);
  return ladder;
}

TrialConfig config(const FiniteRunSpec& spec, std::int64_t trials, int workers = 1) {
  return TrialConfig{20261016, trials, spec, workers};
}

}  // namespace

TEST_CASE("perfect steps are deterministic") {
  const IterationLadder ladder = build_ladder(BellDiagonal(), 3);
  const FiniteRunSpec spec = make_run_spec(ladder, 21, 2, 2, 1.0, 1e-7);
  const EmpiricalLaw law = simulate_runs(config(spec, 2000), ladder);
  for (std::int64_t m = 0; m <= law.max_outputs(); ++m)
    CHECK(law.success(m) == (m * 4 <= 21 ? 1.0 : 0.0));
}

TEST_CASE("single attempt from two pairs") {
  const IterationLadder& L = werner_ladder();
  const FiniteRunSpec spec = make_run_spec(L, 2, 1, 1, 1.0, 1e-7);
  const std::int64_t trials = 1'000'000;
  const EmpiricalLaw law = simulate_runs(config(spec, trials), L);
  const double se = std::sqrt(0.68 * 0.32 / trials);
  CHECK(std::abs(law.success(1) - 0.68) <= 3 * se);
  CHECK(law.success_error(1) == doctest::Approx(se).epsilon(0.01));
}

TEST_CASE("results depend only on the seed") {
  const IterationLadder& L = werner_ladder();
  const FiniteRunSpec spec = make_run_spec(L, 24, 1, 2, 0.4, 1e-7);
  const EmpiricalLaw a = simulate_runs(config(spec, 50'000, 1), L);
  const EmpiricalLaw b = simulate_runs(config(spec, 50'000, 3), L);
  CHECK(a.success_count == b.success_count);
  CHECK(a.joint_i_count == b.joint_i_count);
  CHECK(a.joint_j_count == b.joint_j_count);
  TrialConfig other = config(spec, 50'000);
  other.seed = 1;
  CHECK(simulate_runs(other, L).success_count != a.success_count);
}

TEST_CASE("mixture joint law near the exact table") {
  const IterationLadder& L = werner_ladder();
  const FiniteRunSpec spec = make_run_spec(L, 20, 1, 2, 0.5, 1e-7);
  const std::int64_t trials = 200'000;
  const EmpiricalLaw law = simulate_runs(config(spec, trials), L);
  const JointLawTable exact = joint_law_iterative(spec, L);
  for (std::int64_t m = 1; m <= exact.max_outputs(); ++m) {
    const JointLawRow& row = exact.rows[static_cast<std::size_t>(m)];
    // Loose 5-sigma band: this is a smoke test, the acceptance suite runs the
    // 3-sigma comparison.
    CHECK(std::abs(law.success(m) - row.success) <= 5 * frequency_error(row.success, trials) + 1e-12);
    CHECK(std::abs(law.joint(m, 0) - row.joint_i) <= 5 * frequency_error(row.joint_i, trials) + 1e-12);
  }
}

TEST_CASE("consumption") {
  const IterationLadder& L = werner_ladder();
  const TrialConfig cfg = config(FiniteRunSpec{}, 1'000'000);
  const EmpiricalConsumption zero = simulate_consumption(cfg, L, 0, 4);
  CHECK(zero.frequency(4) == 1.0);
  CHECK(zero.variance == 0.0);

  const EmpiricalConsumption one = simulate_consumption(cfg, L, 1, 3);
  CHECK(std::abs(one.mean / (3 * 2.9412) - 1) < 0.02);

  const EmpiricalConsumption two = simulate_consumption(cfg, L, 2, 2);
  CHECK(std::abs(two.variance / (2 * L[2].cost_variance) - 1) < 0.02);
  CHECK(two.mean_error > 0.0);
  CHECK(two.variance_error > 0.0);
}

TEST_CASE("configuration is validated") {
  const IterationLadder& L = werner_ladder();
  FiniteRunSpec spec = make_run_spec(L, 8, 1, 2, 0.5, 1e-7);
  CHECK_THROWS_AS(simulate_runs(config(spec, 0), L), InvalidParameter);
  spec.j = 9;
  CHECK_THROWS_AS(simulate_runs(config(spec, 10), L), InvalidParameter);
}
