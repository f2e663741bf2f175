#include "purify/bellcore.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <vector>

namespace purify {

namespace {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4 = Matrix4c<double>;

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c pauli_y() {
  using namespace std::complex_literals;
  Matrix2c m;
  m << 0.0, -1.0i, 1.0i, 0.0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0))
    throw InvalidParameter(std::string(what) + " must lie in [0, 1]");
}

std::vector<Matrix2c> kraus_operators(const ChannelSpec& ch) {
  const double p = ch.strength;
  check_unit(p, "channel strength");
  const Matrix2c id = Matrix2c::Identity();
  std::vector<Matrix2c> ops;
  switch (ch.kind) {
    case ChannelKind::Depolarising:
      ops.push_back(std::sqrt(1.0 - 0.75 * p) * id);
      ops.push_back(std::sqrt(0.25 * p) * pauli_x());
      ops.push_back(std::sqrt(0.25 * p) * pauli_y());
      ops.push_back(std::sqrt(0.25 * p) * pauli_z());
      break;
    case ChannelKind::Dephasing:
      ops.push_back(std::sqrt(1.0 - p) * id);
      ops.push_back(std::sqrt(p) * pauli_z());
      break;
    case ChannelKind::Pauli: {
      check_unit(ch.w_z, "Pauli weight w_z");
      check_unit(ch.w_x, "Pauli weight w_x");
      check_unit(ch.w_y, "Pauli weight w_y");
      if (std::abs(ch.w_z + ch.w_x + ch.w_y - 1.0) > kEqualityTol)
        throw InvalidParameter("Pauli weights must sum to one");
      ops.push_back(std::sqrt(1.0 - p) * id);
      ops.push_back(std::sqrt(p * ch.w_z) * pauli_z());
      ops.push_back(std::sqrt(p * ch.w_x) * pauli_x());
      ops.push_back(std::sqrt(p * ch.w_y) * pauli_y());
      break;
    }
    case ChannelKind::AmplitudeDamping: {
      Matrix2c k0 = Matrix2c::Zero();
      k0(0, 0) = 1.0;
      k0(1, 1) = std::sqrt(1.0 - p);
      Matrix2c k1 = Matrix2c::Zero();
      k1(0, 1) = std::sqrt(p);
      ops.push_back(k0);
      ops.push_back(k1);
      break;
    }
  }
  return ops;
}

}  // namespace

const Matrix4& bell_basis() {
  static const Matrix4 basis = [] {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix4 m = Matrix4::Zero();
    // Phi+
    m(0, 0) = r;
    m(3, 0) = r;
    // Psi-
    m(1, 1) = r;
    m(2, 1) = -r;
    // Psi+
    m(1, 2) = r;
    m(2, 2) = r;
    // Phi-
    m(0, 3) = r;
    m(3, 3) = -r;
    return m;
  }();
  return basis;
}

TwoQubitDensity::TwoQubitDensity(const Matrix& m) : m_(m) {
  if (!m_.allFinite()) throw InvalidParameter("density matrix has non-finite entries");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kEqualityTol)
    throw InvalidParameter("density matrix is not Hermitian");
  if (std::abs(m_.trace() - 1.0) > kEqualityTol)
    throw InvalidParameter("density matrix trace differs from one");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdSlack)
    throw InvalidParameter("density matrix is not positive semidefinite");
}

TwoQubitDensity TwoQubitDensity::bell_projector(int label) {
  if (label < 0 || label > 3) throw InvalidParameter("Bell label must be 0..3");
  const auto v = bell_basis().col(label);
  return TwoQubitDensity(v * v.adjoint());
}

TwoQubitDensity density_of(const BellDiagonal& state) {
  const Matrix4& u = bell_basis();
  Matrix4 d = Matrix4::Zero();
  for (int k = 0; k < 4; ++k) d(k, k) = state[k];
  return TwoQubitDensity(u * d * u.adjoint());
}

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Depolarising: return "depolarising";
    case ChannelKind::Dephasing: return "dephasing";
    case ChannelKind::Pauli: return "pauli";
    case ChannelKind::AmplitudeDamping: return "amplitude-damping";
  }
  return "unknown";
}

ChannelKind parse_channel_kind(const std::string& name) {
  if (name == "depolarising" || name == "depolarizing") return ChannelKind::Depolarising;
  if (name == "dephasing") return ChannelKind::Dephasing;
  if (name == "pauli") return ChannelKind::Pauli;
  if (name == "amplitude-damping" || name == "amplitude_damping")
    return ChannelKind::AmplitudeDamping;
  throw InvalidParameter("unknown channel '" + name + "'");
}

TwoQubitDensity apply_channel(const ChannelSpec& channel) {
  const auto phi = bell_basis().col(0);
  const Matrix4 input = phi * phi.adjoint();
  Matrix4 out = Matrix4::Zero();
  for (const Matrix2c& k : kraus_operators(channel)) {
    const Matrix4 full = Eigen::kroneckerProduct(Matrix2c::Identity(), k).eval();
    out += full * input * full.adjoint();
  }
  // Symmetrise away rounding asymmetry before validation.
  out = 0.5 * (out + out.adjoint()).eval();
  return TwoQubitDensity(out);
}

BellDiagonal bell_diagonal_of(const TwoQubitDensity& state) {
  const Matrix4 in_bell = bell_basis().adjoint() * state.matrix() * bell_basis();
  Vector4<double> w;
  for (int k = 0; k < 4; ++k) w[k] = in_bell(k, k).real();
  // Diagonal entries in any orthonormal basis sum to the trace, which the
  // density check already pinned to one.
  return BellDiagonal(w);
}

double channel_fidelity(const ChannelSpec& ch) {
  check_unit(ch.strength, "channel strength");
  switch (ch.kind) {
    case ChannelKind::Depolarising: return 1.0 - 0.75 * ch.strength;
    case ChannelKind::Dephasing:
    case ChannelKind::Pauli: return 1.0 - ch.strength;
    case ChannelKind::AmplitudeDamping: {
      const double s = 1.0 + std::sqrt(1.0 - ch.strength);
      return 0.25 * s * s;
    }
  }
  return 0.0;
}

BellDiagonal channel_bell_diagonal(const ChannelSpec& ch) {
  check_unit(ch.strength, "channel strength");
  const double p = ch.strength;
  switch (ch.kind) {
    case ChannelKind::Depolarising: return BellDiagonal(1.0 - 0.75 * p, p / 4, p / 4, p / 4);
    case ChannelKind::Dephasing: return BellDiagonal(1.0 - p, 0.0, 0.0, p);
    case ChannelKind::Pauli:
      return BellDiagonal(1.0 - p, p * ch.w_y, p * ch.w_x, p * ch.w_z);
    case ChannelKind::AmplitudeDamping: {
      const double s = std::sqrt(1.0 - p);
      return BellDiagonal(0.25 * (1 + s) * (1 + s), p / 4, p / 4, 0.25 * (1 - s) * (1 - s));
    }
  }
  throw InvalidParameter("unknown channel");
}

ChannelSpec channel_for_fidelity(const ChannelSpec& shape, double fidelity) {
  ChannelSpec out = shape;
  switch (shape.kind) {
    case ChannelKind::Depolarising:
      if (!(fidelity >= 0.25 && fidelity <= 1.0))
        throw InvalidParameter("depolarising fidelity must lie in [1/4, 1]");
      out.strength = 4.0 * (1.0 - fidelity) / 3.0;
      break;
    case ChannelKind::Dephasing:
    case ChannelKind::Pauli:
      if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw InvalidParameter("fidelity must lie in [0, 1]");
      out.strength = 1.0 - fidelity;
      break;
    case ChannelKind::AmplitudeDamping: {
      if (!(fidelity >= 0.25 && fidelity <= 1.0))
        throw InvalidParameter("amplitude-damping fidelity must lie in [1/4, 1]");
      const double root = 2.0 * std::sqrt(fidelity) - 1.0;
      out.strength = std::clamp(1.0 - root * root, 0.0, 1.0);
      break;
    }
  }
  out.strength = std::clamp(out.strength, 0.0, 1.0);
  return out;
}

}  // namespace purify
