#include "purify/dejmps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace purify {

namespace {

using Matrix2c = Eigen::Matrix2cd;
using Matrix16c = Eigen::Matrix<std::complex<double>, 16, 16>;

// U|0> = (|0> - i|1>)/sqrt2, U|1> = (|1> - i|0>)/sqrt2.
Matrix2c rotation_u() {
  using namespace std::complex_literals;
  const double r = 1.0 / std::sqrt(2.0);
  Matrix2c u;
  u << r, -1.0i * r, -1.0i * r, r;
  return u;
}

// Qubit order A1 B1 A2 B2, A1 the most significant bit.
constexpr int kA1 = 3, kB1 = 2, kA2 = 1, kB2 = 0;

Matrix16c on_qubit(const Matrix2c& op, int bit) {
  Matrix16c out = Matrix16c::Identity();
  const Matrix2c id = Matrix2c::Identity();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 3; q >= 0; --q)
    acc = Eigen::kroneckerProduct(acc, q == bit ? op : id).eval();
  out = acc;
  return out;
}

Matrix16c cnot(int control, int target) {
  Matrix16c out = Matrix16c::Zero();
  for (int s = 0; s < 16; ++s) {
    const int image = (s >> control) & 1 ? s ^ (1 << target) : s;
    out(image, s) = 1.0;
  }
  return out;
}

}  // namespace

StepOutcome dejmps_step_circuit_oracle(const TwoQubitDensity& x,
                                       const TwoQubitDensity& y) {
  const Matrix16c joint = Eigen::kroneckerProduct(x.matrix(), y.matrix()).eval();

  const Matrix2c u = rotation_u();
  const Matrix2c ud = u.adjoint();
  const Matrix16c local = on_qubit(u, kA1) * on_qubit(u, kA2) *
                          on_qubit(ud, kB1) * on_qubit(ud, kB2);
  const Matrix16c gates = cnot(kB1, kB2) * cnot(kA1, kA2) * local;
  const Matrix16c evolved = gates * joint * gates.adjoint();

  // Keep outcomes with equal target bits and trace out the target pair.
  TwoQubitDensity::Matrix kept = TwoQubitDensity::Matrix::Zero();
  for (int outcome = 0; outcome < 2; ++outcome) {
    const int low = outcome * ((1 << kA2) | (1 << kB2));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) kept(r, c) += evolved(4 * r + low, 4 * c + low);
  }
  const double t = kept.trace().real();
  if (!(t > 1e-15)) throw DegenerateStep("post-selected state is not normalisable");
  kept /= t;
  kept = 0.5 * (kept + kept.adjoint()).eval();
  return {t, bell_diagonal_of(TwoQubitDensity(kept))};
}

BellDiagonal optimal_permutation(const BellDiagonal& x) {
  std::array<int, 4> perm{0, 1, 2, 3};
  std::array<double, 4> best_tuple{};
  double best = -1.0;
  do {
    const std::array<double, 4> tuple{x[perm[0]], x[perm[1]], x[perm[2]], x[perm[3]]};
    const auto candidate = BellDiagonal::unchecked(
        Vector4<double>(tuple[0], tuple[1], tuple[2], tuple[3]));
    double fid = -1.0;
    try {
      fid = dejmps_step(candidate, candidate).output.a();
    } catch (const DegenerateStep&) {
      continue;
    }
    if (fid > best + kEqualityTol) {
      best = fid;
      best_tuple = tuple;
    } else if (std::abs(fid - best) <= kEqualityTol && tuple > best_tuple) {
      best = std::max(best, fid);
      best_tuple = tuple;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best < 0.0) return x;
  return BellDiagonal::unchecked(
      Vector4<double>(best_tuple[0], best_tuple[1], best_tuple[2], best_tuple[3]));
}

LadderStream::LadderStream(const BellDiagonal& initial, LadderOptions options)
    : options_(options), initial_(initial) {}

std::optional<LadderLevel> LadderStream::next() {
  if (stop_reason_) return std::nullopt;
  if (!last_) {
    LadderLevel level;
    level.state = options_.permute_first ? optimal_permutation(initial_) : initial_;
    level.fidelity = level.state.a();
    last_ = level;
    return level;
  }
  const LadderLevel& prev = *last_;
  const BellDiagonal source = (options_.permute_each_level && prev.k > 0)
                                  ? optimal_permutation(prev.state)
                                  : prev.state;
  StepOutcome step;
  try {
    step = dejmps_step(source, source);
  } catch (const DegenerateStep&) {
    stop_reason_ = "DEJMPS step degenerates at level " + std::to_string(prev.k + 1);
    return std::nullopt;
  }
  LadderLevel level;
  level.k = prev.k + 1;
  level.state = step.output;
  level.fidelity = step.output.a();
  level.success_prob = step.success_prob;
  level.cumulative_success = step.success_prob * prev.cumulative_success;
  const double two_k = std::ldexp(1.0, level.k);
  level.rate = level.cumulative_success / two_k;
  level.mean_cost = two_k / level.cumulative_success;
  // Law of total variance over the geometric number of attempts.
  level.cost_variance = 2.0 * prev.cost_variance / level.success_prob +
                        two_k * two_k * (1.0 - level.success_prob) /
                            (level.cumulative_success * level.cumulative_success);
  last_ = level;
  return level;
}

IterationLadder::IterationLadder(std::vector<LadderLevel> levels,
                                 std::optional<std::string> notice)
    : levels_(std::move(levels)), notice_(std::move(notice)) {
  retained_ = levels_.empty() ? 0 : 1;
  while (retained_ < levels_.size() &&
         levels_[retained_].fidelity > levels_[retained_ - 1].fidelity)
    ++retained_;
}

IterationLadder IterationLadder::with_success_prob(int k, double t) const {
  std::vector<LadderLevel> copy = levels_;
  if (k < 1 || k >= static_cast<int>(copy.size()))
    throw InvalidParameter("fault level outside ladder");
  copy[k].success_prob = t;
  for (std::size_t n = static_cast<std::size_t>(k); n < copy.size(); ++n) {
    auto& lv = copy[n];
    const auto& prev = copy[n - 1];
    lv.cumulative_success = lv.success_prob * prev.cumulative_success;
    const double two_k = std::ldexp(1.0, lv.k);
    lv.rate = lv.cumulative_success / two_k;
    lv.mean_cost = two_k / lv.cumulative_success;
    lv.cost_variance = 2.0 * prev.cost_variance / lv.success_prob +
                       two_k * two_k * (1.0 - lv.success_prob) /
                           (lv.cumulative_success * lv.cumulative_success);
  }
  return IterationLadder(std::move(copy), notice_);
}

IterationLadder build_ladder(const BellDiagonal& initial, int k_max,
                             LadderOptions options) {
  if (k_max < 0) throw InvalidParameter("k_max must be non-negative");
  LadderStream stream(initial, options);
  std::vector<LadderLevel> levels;
  levels.push_back(*stream.next());
  if (!(levels.front().fidelity > 0.5))
    throw DomainError("purification impossible: initial Bell fidelity " +
                      std::to_string(levels.front().fidelity) + " <= 1/2");
  while (static_cast<int>(levels.size()) <= k_max) {
    auto level = stream.next();
    if (!level) break;
    levels.push_back(*level);
  }
  return IterationLadder(std::move(levels), stream.stop_reason());
}

double cost_variance_closed_form(std::span<const LadderLevel> levels, int k) {
  if (k < 0 || k >= static_cast<int>(levels.size()))
    throw InvalidParameter("level outside ladder");
  if (k == 0) return 0.0;
  const double s_k = levels[k].cumulative_success;
  double inner = 1.0;
  for (int i = 1; i <= k - 1; ++i)
    inner += std::ldexp(1.0, i - 1) / levels[i].cumulative_success;
  return std::ldexp(1.0, k + 1) * (std::ldexp(1.0, k - 1) - s_k * inner) / (s_k * s_k);
}

}  // namespace purify
