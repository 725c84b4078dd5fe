// Copyright 2026 The qneuro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Quantum-side algebra in the Pauli coefficient representation.
//
// A density matrix on n qubits is stored as the real coefficient vector
// rho^mu of rho = sum_mu rho^mu sigma_mu1 (x) ... (x) sigma_mun, where the
// multi-index (mu1...mun) is flattened with qubit 1 most significant. The
// identity coefficient rho^(0...0) is always 2^-n.
//
// Unitaries act by forward evolution rho -> U rho U^dagger. With this
// placement the probability-space operator of exp(i phi sigma3 / 2) is the
// standard phase-gate matrix used throughout the library (see povm.hpp).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qneuro/error.hpp"

namespace qneuro {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr std::size_t pow2(int n) { return std::size_t{1} << n; }
constexpr std::size_t pow4(int n) { return std::size_t{1} << (2 * n); }

// sigma_0 = I, sigma_1 = X, sigma_2 = Y, sigma_3 = Z.
inline Eigen::Matrix2cd pauli(int mu) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (mu) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -1i, 1i, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw ValidationError("pauli index out of range: " + std::to_string(mu));
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Pauli string for flattened multi-index `index` over n qubits.
inline Eigen::MatrixXcd pauli_string(std::size_t index, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    const int mu = static_cast<int>((index >> (2 * q)) & 3U);
    out = kron(out, Eigen::MatrixXcd(pauli(mu)));
  }
  return out;
}

inline std::vector<Eigen::MatrixXcd> pauli_basis(int n) {
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(pow4(n));
  for (std::size_t k = 0; k < pow4(n); ++k) basis.push_back(pauli_string(k, n));
  return basis;
}

struct BlochState {
  int n = 1;
  Eigen::VectorXd coeffs;

  BlochState() : coeffs(Eigen::VectorXd::Zero(4)) { coeffs[0] = 0.5; }
  BlochState(int qubits, Eigen::VectorXd c) : n(qubits), coeffs(std::move(c)) {
    if (qubits < 1 || static_cast<std::size_t>(coeffs.size()) != pow4(qubits))
      throw DimensionError("BlochState: coefficient vector must have length 4^n");
    if (std::abs(coeffs[0] - 1.0 / static_cast<double>(pow2(qubits))) > 1e-12)
      throw ValidationError("BlochState: identity coefficient must be 2^-n");
  }

  static BlochState maximally_mixed(int qubits) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pow4(qubits)));
    c[0] = 1.0 / static_cast<double>(pow2(qubits));
    return {qubits, std::move(c)};
  }

  // Euclidean norm of the non-identity block.
  double radius() const { return coeffs.tail(coeffs.size() - 1).norm(); }

  // Reassembles sum_mu rho^mu sigma_mu.
  Eigen::MatrixXcd density_matrix() const {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(pow2(n)),
                                                  static_cast<Eigen::Index>(pow2(n)));
    for (std::size_t k = 0; k < pow4(n); ++k)
      if (coeffs[static_cast<Eigen::Index>(k)] != 0.0)
        rho += coeffs[static_cast<Eigen::Index>(k)] * pauli_string(k, n);
    return rho;
  }
};

struct UnitarySpec {
  int n = 1;
  Eigen::MatrixXcd matrix;

  UnitarySpec(int qubits, Eigen::MatrixXcd u) : n(qubits), matrix(std::move(u)) {
    const auto dim = static_cast<Eigen::Index>(pow2(qubits));
    if (qubits < 1 || matrix.rows() != dim || matrix.cols() != dim)
      throw DimensionError("UnitarySpec: matrix must be 2^n x 2^n");
    const double dev =
        (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (dev > 1e-12) throw ValidationError("UnitarySpec: matrix is not unitary");
  }
};

// Real 4^n x 4^n map on Pauli coefficients; block form 1 (+) SO(4^n - 1)
// for unitary-derived members.
struct TransferMatrix {
  int n = 1;
  Eigen::MatrixXd entries;

  TransferMatrix(int qubits, Eigen::MatrixXd e) : n(qubits), entries(std::move(e)) {
    const auto dim = static_cast<Eigen::Index>(pow4(qubits));
    if (qubits < 1 || entries.rows() != dim || entries.cols() != dim)
      throw DimensionError("TransferMatrix: entries must be 4^n x 4^n");
  }

  static TransferMatrix identity(int qubits) {
    const auto dim = static_cast<Eigen::Index>(pow4(qubits));
    return {qubits, Eigen::MatrixXd::Identity(dim, dim)};
  }

  // Composition: (*this) applied after `first`.
  TransferMatrix after(const TransferMatrix& first) const {
    if (first.n != n) throw DimensionError("TransferMatrix: qubit count mismatch");
    return {n, entries * first.entries};
  }
};

inline BlochState ket_to_bloch(const Eigen::VectorXcd& amplitudes) {
  const auto dim = static_cast<std::size_t>(amplitudes.size());
  int n = 0;
  while (pow2(n) < dim) ++n;
  if (n < 1 || pow2(n) != dim) throw DimensionError("ket_to_bloch: length must be 2^n, n >= 1");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-10)
    throw ValidationError("ket_to_bloch: amplitudes are not normalized");
  const Eigen::MatrixXcd rho = amplitudes * amplitudes.adjoint();
  const double scale = 1.0 / static_cast<double>(pow2(n));
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(pow4(n)));
  for (std::size_t k = 0; k < pow4(n); ++k)
    coeffs[static_cast<Eigen::Index>(k)] = scale * (pauli_string(k, n) * rho).trace().real();
  coeffs[0] = scale;
  return {n, std::move(coeffs)};
}

// Haar-random pure state (normalized complex Gaussian amplitudes).
template <class Rng>
Eigen::VectorXcd random_ket(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(pow2(n)));
  for (auto& a : v) a = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

// Random mixed state: a convex combination of two random pure states with
// a uniform weight.
template <class Rng>
BlochState random_mixed_state(int n, Rng& rng) {
  const BlochState a = ket_to_bloch(random_ket(n, rng));
  const BlochState b = ket_to_bloch(random_ket(n, rng));
  const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  Eigen::VectorXd c = w * a.coeffs + (1 - w) * b.coeffs;
  c[0] = 1.0 / static_cast<double>(pow2(n));
  return {n, std::move(c)};
}

inline TransferMatrix unitary_to_transfer(const UnitarySpec& u) {
  const int n = u.n;
  const auto basis = pauli_basis(n);
  const auto dim = static_cast<Eigen::Index>(pow4(n));
  const double scale = 1.0 / static_cast<double>(pow2(n));
  Eigen::MatrixXd l(dim, dim);
  for (Eigen::Index nu = 0; nu < dim; ++nu) {
    const Eigen::MatrixXcd evolved = u.matrix * basis[static_cast<std::size_t>(nu)] * u.matrix.adjoint();
    for (Eigen::Index mu = 0; mu < dim; ++mu)
      l(mu, nu) = scale * (basis[static_cast<std::size_t>(mu)] * evolved).trace().real();
  }
  return {n, std::move(l)};
}

inline BlochState apply_transfer(const TransferMatrix& l, const BlochState& s) {
  if (l.n != s.n) throw DimensionError("apply_transfer: qubit count mismatch");
  Eigen::VectorXd out = l.entries * s.coeffs;
  out[0] = s.coeffs[0];
  return {s.n, std::move(out)};
}

// exp(i angle sigma_mu / 2) on one qubit.
inline Eigen::Matrix2cd pauli_rotation(int mu, double angle) {
  using namespace std::complex_literals;
  return std::cos(angle / 2) * pauli(0) + 1i * std::sin(angle / 2) * pauli(mu);
}

// Unitary for a named builtin gate; nullopt for members without one
// (the antipode).
inline std::optional<UnitarySpec> builtin_unitary(std::string_view name,
                                                  std::optional<double> angle = std::nullopt) {
  auto need_angle = [&]() {
    if (!angle) throw ValidationError("builtin gate '" + std::string(name) + "' needs an angle");
    return *angle;
  };
  if (name == "identity") return UnitarySpec(1, pauli(0));
  if (name == "not") return UnitarySpec(1, pauli(1));
  if (name == "hadamard") {
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    return UnitarySpec(1, h / std::sqrt(2.0));
  }
  if (name == "rot_theta") return UnitarySpec(1, pauli_rotation(2, need_angle()));
  if (name == "phase_phi") return UnitarySpec(1, pauli_rotation(3, need_angle()));
  if (name == "antipode") return std::nullopt;
  if (name == "cnot") {
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;  // control = qubit 1
    return UnitarySpec(2, c);
  }
  throw ValidationError("unknown builtin gate '" + std::string(name) + "'");
}

inline TransferMatrix builtin_gate(std::string_view name, std::optional<double> angle = std::nullopt) {
  if (name == "antipode") {
    Eigen::Vector4d d(1, -1, -1, -1);
    return {1, Eigen::MatrixXd(d.asDiagonal())};
  }
  return unitary_to_transfer(*builtin_unitary(name, angle));
}

}  // namespace qneuro
