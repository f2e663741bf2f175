#pragma once

// Two-qubit state algebra in the Bell basis.
//
// Basis convention: computational states |00>, |01>, |10>, |11> with
// index 2*a + b, Alice's qubit first. Bell-diagonal weights are stored in the
// order |Phi+>, |Psi->, |Psi+>, |Phi->, which is the order the DEJMPS
// recursion is written in.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "purify/errors.hpp"

namespace purify {

inline constexpr double kEqualityTol = 1e-12;
inline constexpr double kPsdSlack = 1e-10;

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

/// Bell-basis diagonal (a, b, c, d) for |Phi+>, |Psi->, |Psi+>, |Phi->.
template <typename Scalar>
class BellDiagonalT {
 public:
  using Weights = Vector4<Scalar>;

  BellDiagonalT() : w_(Scalar(1), Scalar(0), Scalar(0), Scalar(0)) {}

  /// Validating constructor: weights must be non-negative and sum to one
  /// within 1e-12. Rounding noise down to -1e-12 is clamped to zero.
  explicit BellDiagonalT(const Weights& w) : w_(w) {
    using std::abs;
    for (int k = 0; k < 4; ++k) {
      if (!(w_[k] >= -Scalar(kEqualityTol)))
        throw InvalidParameter("Bell weight is negative or NaN");
      if (w_[k] < Scalar(0)) w_[k] = Scalar(0);
    }
    if (abs(w_.sum() - Scalar(1)) > Scalar(kEqualityTol))
      throw InvalidParameter("Bell weights do not sum to one");
  }

  BellDiagonalT(Scalar a, Scalar b, Scalar c, Scalar d)
      : BellDiagonalT(Weights(a, b, c, d)) {}

  /// Skips validation; for internal results that are normalised by
  /// construction.
  static BellDiagonalT unchecked(const Weights& w) {
    BellDiagonalT out;
    out.w_ = w;
    return out;
  }

  Scalar a() const { return w_[0]; }
  Scalar b() const { return w_[1]; }
  Scalar c() const { return w_[2]; }
  Scalar d() const { return w_[3]; }
  Scalar operator[](int k) const { return w_[k]; }
  const Weights& weights() const { return w_; }

  std::array<Scalar, 4> to_array() const { return {w_[0], w_[1], w_[2], w_[3]}; }

  friend bool operator==(const BellDiagonalT& x, const BellDiagonalT& y) {
    return x.w_ == y.w_;
  }

 private:
  Weights w_;
};

using BellDiagonal = BellDiagonalT<double>;

/// Werner state of Bell fidelity F: (F, (1-F)/3, (1-F)/3, (1-F)/3).
template <typename Scalar>
BellDiagonalT<Scalar> werner(Scalar fidelity) {
  if (!(fidelity >= Scalar(0.25) - Scalar(kEqualityTol) &&
        fidelity <= Scalar(1) + Scalar(kEqualityTol)))
    throw InvalidParameter("Werner fidelity must lie in [1/4, 1]");
  const Scalar rest = (Scalar(1) - fidelity) / Scalar(3);
  return BellDiagonalT<Scalar>::unchecked(
      Vector4<Scalar>(fidelity, rest, rest, rest));
}

template <typename Scalar>
Scalar bell_fidelity(const BellDiagonalT<Scalar>& state) {
  return state.a();
}

/// Fidelity between two commuting Bell-diagonal states,
/// (sum_k sqrt(x_k y_k))^2.
template <typename Scalar>
Scalar diagonal_fidelity(const BellDiagonalT<Scalar>& x,
                         const BellDiagonalT<Scalar>& y) {
  using std::sqrt;
  Scalar overlap(0);
  for (int k = 0; k < 4; ++k) overlap += sqrt(x[k] * y[k]);
  return overlap * overlap;
}

/// Werner-Werner fidelity, (sqrt(F1 F2) + sqrt((1-F1)(1-F2)))^2.
template <typename Scalar>
Scalar werner_fidelity(Scalar f1, Scalar f2) {
  using std::sqrt;
  const Scalar s = sqrt(f1 * f2) + sqrt((Scalar(1) - f1) * (Scalar(1) - f2));
  return s * s;
}

/// h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
template <typename Scalar>
Scalar binary_entropy(Scalar x) {
  using std::log2;
  if (!(x >= Scalar(0) && x <= Scalar(1)))
    throw DomainError("binary entropy argument outside [0, 1]");
  Scalar h(0);
  if (x > Scalar(0)) h -= x * log2(x);
  if (x < Scalar(1)) h -= (Scalar(1) - x) * log2(Scalar(1) - x);
  return h;
}

/// Relative-entropy-of-entanglement ceiling on the rate at which Werner
/// states of fidelity `f_initial` convert to Werner states of `f_target`.
template <typename Scalar>
Scalar ree_rate_bound(Scalar f_initial, Scalar f_target) {
  const auto open_half = [](Scalar f) { return f > Scalar(0.5) && f < Scalar(1); };
  if (!open_half(f_initial) || !open_half(f_target))
    throw DomainError("REE bound needs fidelities in (1/2, 1)");
  const Scalar num = Scalar(1) - binary_entropy(f_initial);
  const Scalar den = Scalar(1) - binary_entropy(f_target);
  if (num == Scalar(0) || den == Scalar(0))
    throw DomainError("REE bound undefined: binary entropy equals one");
  return num / den;
}

// --- density matrices and channels ----------------------------------------

/// A validated 4x4 density matrix in the computational basis.
class TwoQubitDensity {
 public:
  using Matrix = Matrix4c<double>;

  /// Throws InvalidParameter unless the matrix is Hermitian, has unit trace
  /// and is positive semidefinite (smallest eigenvalue >= -1e-10).
  explicit TwoQubitDensity(const Matrix& m);

  const Matrix& matrix() const { return m_; }

  static TwoQubitDensity bell_projector(int label);

 private:
  Matrix m_;
};

/// Column k is the k-th Bell state in Phi+, Psi-, Psi+, Phi- order.
const Matrix4c<double>& bell_basis();

/// Bell-diagonal state as a density matrix, sum_k w_k |beta_k><beta_k|.
TwoQubitDensity density_of(const BellDiagonal& state);

enum class ChannelKind { Depolarising, Dephasing, Pauli, AmplitudeDamping };

struct ChannelSpec {
  ChannelKind kind = ChannelKind::Depolarising;
  double strength = 0.0;  // p, or gamma for amplitude damping
  // Conditional flip weights for the Pauli channel (Z, X, Y).
  double w_z = 1.0;
  double w_x = 0.0;
  double w_y = 0.0;

  static ChannelSpec depolarising(double p) { return {ChannelKind::Depolarising, p}; }
  static ChannelSpec dephasing(double p) { return {ChannelKind::Dephasing, p}; }
  static ChannelSpec pauli(double p, double wz, double wx, double wy) {
    return {ChannelKind::Pauli, p, wz, wx, wy};
  }
  static ChannelSpec amplitude_damping(double gamma) {
    return {ChannelKind::AmplitudeDamping, gamma};
  }
};

std::string to_string(ChannelKind kind);
ChannelKind parse_channel_kind(const std::string& name);

/// Sends the second qubit of |Phi+> through `channel`.
///   depolarising       (1-p) s + p I/2
///   dephasing          (1-p) s + p Z s Z
///   pauli              (1-p) s + p (wz Z s Z + wx X s X + wy Y s Y)
///   amplitude damping  Kraus diag(1, sqrt(1-g)), sqrt(g) |0><1|
TwoQubitDensity apply_channel(const ChannelSpec& channel);

/// Bell-basis diagonal of `state`; off-diagonal Bell coherences are dropped.
BellDiagonal bell_diagonal_of(const TwoQubitDensity& state);

/// Bell fidelity produced by `channel` on |Phi+>, in closed form.
double channel_fidelity(const ChannelSpec& channel);

/// Bell-diagonal weights of the channel output in closed form. Agrees with
/// bell_diagonal_of(apply_channel(channel)) up to rounding; amplitude damping
/// loses its Phi+/Phi- coherence here as there.
BellDiagonal channel_bell_diagonal(const ChannelSpec& channel);

/// Inverse of channel_fidelity: the channel strength giving Bell fidelity
/// `fidelity`. Pauli weights are copied from `shape`.
ChannelSpec channel_for_fidelity(const ChannelSpec& shape, double fidelity);

}  // namespace purify
