#include <doctest.h>

#include <cmath>
#include <random>

#include "purify/dejmps.hpp"

using namespace purify;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

BellDiagonal random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector4<double> w(u(rng), u(rng), u(rng), u(rng));
  return BellDiagonal(w / w.sum());
}

}  // namespace

TEST_CASE("single step examples") {
  const auto perfect = dejmps_step(BellDiagonal(), BellDiagonal());
  CHECK(perfect.success_prob == 1.0);
  CHECK(perfect.output.a() == 1.0);

  const auto half = dejmps_step(werner(0.5), werner(0.5));
  CHECK(close(half.success_prob, 5.0 / 9.0, 1e-15));
  // F = 1/2 is preserved, but the output is no longer Werner: (1/2, 1/10, 1/10, 3/10)
  CHECK(close(half.output.a(), 0.5, 1e-15));
  CHECK(close(half.output.b(), 0.1, 1e-15));
  CHECK(close(half.output.c(), 0.1, 1e-15));
  CHECK(close(half.output.d(), 0.3, 1e-15));
  CHECK(close(dejmps_step(half.output, half.output).output.a(), 0.5, 1e-15));

  const auto seven = dejmps_step(werner(0.7), werner(0.7));
  CHECK(close(seven.success_prob, 0.68, 1e-15));
  CHECK(close(seven.output.a(), 0.735294, 1e-6));
  CHECK(close(seven.output.b(), 0.029412, 1e-6));
  CHECK(close(seven.output.c(), 0.029412, 1e-6));
  CHECK(close(seven.output.d(), 0.205882, 1e-6));
}

TEST_CASE("the step is generic in the scalar type") {
  const auto x = werner<long double>(0.7L);
  const auto out = dejmps_step(x, x);
  CHECK(std::abs(out.success_prob - 0.68L) < 1e-18L);
  CHECK(std::abs(out.output.a() - 0.5L / 0.68L) < 1e-18L);
}

TEST_CASE("zero success probability is reported") {
  const BellDiagonal x(0.0, 0.0, 1.0, 0.0);
  const BellDiagonal y(1.0, 0.0, 0.0, 0.0);
  CHECK_THROWS_AS(dejmps_step(x, y), DegenerateStep);
}

TEST_CASE("circuit oracle agrees with the recursion") {
  const auto a = dejmps_step_circuit_oracle(density_of(BellDiagonal()), density_of(BellDiagonal()));
  CHECK(close(a.success_prob, 1.0, 1e-12));
  CHECK(close(a.output.a(), 1.0, 1e-12));

  const auto half = dejmps_step_circuit_oracle(density_of(werner(0.5)), density_of(werner(0.5)));
  CHECK(close(half.success_prob, 5.0 / 9.0, 1e-10));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const BellDiagonal x = random_state(rng);
    const BellDiagonal y = random_state(rng);
    const auto fast = dejmps_step(x, y);
    const auto slow = dejmps_step_circuit_oracle(density_of(x), density_of(y));
    CHECK(close(fast.success_prob, slow.success_prob, 1e-10));
    for (int k = 0; k < 4; ++k) CHECK(close(fast.output[k], slow.output[k], 1e-10));
  }
}

TEST_CASE("optimal permutation") {
  const BellDiagonal w = werner(0.7);
  const BellDiagonal pw = optimal_permutation(w);
  CHECK(pw.a() == w.a());

  const BellDiagonal step = dejmps_step(w, w).output;
  const BellDiagonal shuffled(step.d(), step.b(), step.a(), step.c());
  CHECK(close(optimal_permutation(shuffled).a(), 0.735294, 1e-6));

  const BellDiagonal flat(0.25, 0.25, 0.25, 0.25);
  const BellDiagonal same = optimal_permutation(flat);
  for (int k = 0; k < 4; ++k) CHECK(same[k] == 0.25);
}

TEST_CASE("ladder of perfect pairs") {
  const IterationLadder ladder = build_ladder(BellDiagonal(), 3);
  REQUIRE(ladder.size() == 4);
  for (const LadderLevel& level : ladder.levels()) {
    CHECK(level.fidelity == 1.0);
    CHECK(level.success_prob == 1.0);
    CHECK(level.rate == std::ldexp(1.0, -level.k));
  }
  CHECK(ladder.retained() == 1);
}

TEST_CASE("ladder from Werner 0.7") {
  const IterationLadder ladder = build_ladder(werner(0.7), 1);
  REQUIRE(ladder.size() == 2);
  const LadderLevel& one = ladder[1];
  CHECK(close(one.success_prob, 0.68, 1e-15));
  CHECK(close(one.cumulative_success, 0.68, 1e-15));
  CHECK(close(one.rate, 0.34, 1e-15));
  CHECK(close(one.mean_cost, 2.941176, 1e-6));
  CHECK(close(one.cost_variance, 2.768166, 1e-6));
  CHECK(close(one.cost_variance, 4 * (1 - 0.68) / (0.68 * 0.68), 1e-12));
}

TEST_CASE("purification below one half is refused") {
  CHECK_THROWS_AS(build_ladder(werner(0.5), 3), DomainError);
  CHECK_THROWS_AS(build_ladder(werner(0.3), 3, false), DomainError);
}

TEST_CASE("variance closed form matches the recurrence") {
  std::mt19937_64 rng(3);
  int tested = 0;
  while (tested < 10) {
    const BellDiagonal x = random_state(rng);
    if (optimal_permutation(x).a() <= 0.55) continue;
    const IterationLadder ladder = build_ladder(x, 6);
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const double closed = cost_variance_closed_form(ladder.levels(), static_cast<int>(k));
      CHECK(std::abs(closed - ladder[k].cost_variance) <=
            1e-9 * std::max(1.0, ladder[k].cost_variance));
      CHECK(ladder[k].mean_cost * ladder[k].rate == doctest::Approx(1.0).epsilon(1e-15));
    }
    ++tested;
  }
}

TEST_CASE("lazy stream matches the eager ladder") {
  LadderStream stream(werner(0.8));
  const IterationLadder ladder = build_ladder(werner(0.8), 5);
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const auto level = stream.next();
    REQUIRE(level);
    CHECK(level->fidelity == ladder[k].fidelity);
    CHECK(level->rate == ladder[k].rate);
  }
}

TEST_CASE("fault injection recomputes downstream levels") {
  const IterationLadder ladder = build_ladder(werner(0.7), 3);
  const IterationLadder faulty = ladder.with_success_prob(1, 0.32);
  CHECK(faulty[1].success_prob == 0.32);
  CHECK(close(faulty[3].cumulative_success,
              0.32 * ladder[2].success_prob * ladder[3].success_prob, 1e-15));
  CHECK_THROWS_AS(ladder.with_success_prob(0, 0.5), InvalidParameter);
}
