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

// Probabilistic representation of qubits.
//
// Each qubit is read out by a four-outcome POVM whose outcome z = 2a + b is
// carried by a pair of binary variables (pbits a, b). A state's Pauli
// coefficients map to the joint outcome distribution p = A rho, and a
// transfer matrix L becomes the operator G = A L A^-1 on distributions.
// For n qubits everything is the n-fold tensor power, outcome of qubit 1
// most significant, so pbit A is the top bit of the event index.
//
// Note on normalization: with A^z_0 = 1/2 the outcome operators sum to 2I
// under the ordinary operator sum, not I. The operational layer used here
// (p = A rho with the half-trace pairing) is self-consistent and gives
// sum_z p^z = 1 for every state.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qneuro/error.hpp"
#include "qneuro/qubit_core.hpp"

namespace qneuro {

class Povm {
 public:
  explicit Povm(const Eigen::Matrix4d& matrix) : matrix_(matrix) {
    for (int z = 0; z < 4; ++z)
      if (std::abs(matrix_(z, 0) - 0.5) > 1e-12)
        throw ValidationError("Povm: identity column must be 1/2");
    const Eigen::RowVector4d sums = matrix_.colwise().sum();
    if ((sums - Eigen::RowVector4d(2, 0, 0, 0)).cwiseAbs().maxCoeff() > 1e-12)
      throw ValidationError("Povm: column sums must be (2, 0, 0, 0)");
    Eigen::FullPivLU<Eigen::Matrix4d> lu(matrix_);
    if (!lu.isInvertible()) throw ValidationError("Povm: matrix is singular");
    inverse_ = lu.inverse();
    for (int n = 1; n <= kCachedPowers; ++n) {
      powers_.push_back(power(matrix_, n));
      inverse_powers_.push_back(power(inverse_, n));
    }
  }

  const Eigen::Matrix4d& matrix() const { return matrix_; }
  const Eigen::Matrix4d& inverse() const { return inverse_; }

  // A (x) ... (x) A, n factors.
  // Powers for n <= 2 are precomputed; the metric calls them per segment.
  Eigen::MatrixXd tensor_power(int n) const {
    return n >= 1 && n <= kCachedPowers ? powers_[n - 1] : power(matrix_, n);
  }
  Eigen::MatrixXd inverse_tensor_power(int n) const {
    return n >= 1 && n <= kCachedPowers ? inverse_powers_[n - 1] : power(inverse_, n);
  }
  const Eigen::MatrixXd& inverse_tensor_power_ref(int n) const {
    if (n < 1 || n > kCachedPowers) throw DimensionError("Povm: uncached tensor power");
    return inverse_powers_[n - 1];
  }
  static constexpr int kCachedPowers = 2;

 private:
  static Eigen::MatrixXd power(const Eigen::Matrix4d& m, int n) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, Eigen::MatrixXd(m));
    return out;
  }

  Eigen::Matrix4d matrix_;
  Eigen::Matrix4d inverse_;
  std::vector<Eigen::MatrixXd> powers_;
  std::vector<Eigen::MatrixXd> inverse_powers_;
};

// Tetrahedral POVM: outcome signs on (sigma1, sigma2, sigma3) are
// (---), (++-), (-++), (+-+), each scaled by 1/(2 sqrt 3).
inline Eigen::Matrix4d default_povm_matrix() {
  const double c = 0.5 / std::sqrt(3.0);
  Eigen::Matrix4d a;
  a << 0.5, -c, -c, -c,
       0.5,  c,  c, -c,
       0.5, -c,  c,  c,
       0.5,  c, -c,  c;
  return a;
}

inline const Povm& default_povm() {
  static const Povm povm(default_povm_matrix());
  return povm;
}

inline int qubits_for_length(std::size_t len) {
  int n = 0;
  while (pow4(n) < len) ++n;
  if (n < 1 || pow4(n) != len) throw DimensionError("vector length must be 4^n with n >= 1");
  return n;
}

struct Distribution {
  int n = 1;
  Eigen::VectorXd probs;

  Distribution() : probs(Eigen::VectorXd::Constant(4, 0.25)) {}
  Distribution(int qubits, Eigen::VectorXd p) : n(qubits), probs(std::move(p)) {
    if (qubits < 1 || static_cast<std::size_t>(probs.size()) != pow4(qubits))
      throw DimensionError("Distribution: length must be 4^n");
    if (std::abs(probs.sum() - 1.0) > 1e-9)
      throw ValidationError("Distribution: probabilities must sum to 1");
    if (probs.minCoeff() < -1e-9) throw ValidationError("Distribution: negative probability");
  }

  static Distribution uniform(int qubits) {
    const auto dim = static_cast<Eigen::Index>(pow4(qubits));
    return {qubits, Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim))};
  }
  static Distribution point_mass(int qubits, std::size_t event) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pow4(qubits)));
    if (event >= pow4(qubits)) throw ValidationError("Distribution: event out of range");
    p[static_cast<Eigen::Index>(event)] = 1.0;
    return {qubits, std::move(p)};
  }

  // Probability that pbit `bit` (0 = A, most significant) equals 1.
  double marginal(int bit) const {
    const int bits = 2 * n;
    double sum = 0;
    for (Eigen::Index z = 0; z < probs.size(); ++z)
      if ((static_cast<std::size_t>(z) >> (bits - 1 - bit)) & 1U) sum += probs[z];
    return sum;
  }
};

struct GateOperator {
  int n = 1;
  Eigen::MatrixXd entries;

  GateOperator(int qubits, Eigen::MatrixXd e) : n(qubits), entries(std::move(e)) {
    const auto dim = static_cast<Eigen::Index>(pow4(qubits));
    if (qubits < 1 || entries.rows() != dim || entries.cols() != dim)
      throw DimensionError("GateOperator: entries must be 4^n x 4^n");
    const double dev = (entries.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (dev > 1e-10) throw ValidationError("GateOperator: columns must sum to 1");
  }

  static GateOperator identity(int qubits) {
    const auto dim = static_cast<Eigen::Index>(pow4(qubits));
    return {qubits, Eigen::MatrixXd::Identity(dim, dim)};
  }

  // Raw product; the result is a quasi-distribution in general.
  Eigen::VectorXd apply(const Eigen::VectorXd& p) const {
    if (p.size() != entries.cols()) throw DimensionError("GateOperator: length mismatch");
    return entries * p;
  }

  // Applies to a distribution known to stay in the positive domain
  // (an embedded quantum state); tiny negative round-off is clipped.
  Distribution apply(const Distribution& p) const {
    if (p.n != n) throw DimensionError("GateOperator: qubit count mismatch");
    Eigen::VectorXd q = entries * p.probs;
    for (auto& x : q) if (x < 0 && x > -1e-12) x = 0;
    return {n, std::move(q)};
  }
};

inline Distribution embed(const BlochState& s, const Povm& povm = default_povm()) {
  Eigen::VectorXd p = povm.tensor_power(s.n) * s.coeffs;
  for (auto& x : p) if (x < 0 && x > -1e-12) x = 0;
  return {s.n, std::move(p)};
}

inline BlochState invert(const Eigen::VectorXd& p, const Povm& povm = default_povm()) {
  const int n = qubits_for_length(static_cast<std::size_t>(p.size()));
  Eigen::VectorXd c = povm.inverse_tensor_power(n) * p;
  const double inv_dim = 1.0 / static_cast<double>(pow2(n));
  if (std::abs(c[0] - inv_dim) > 1e-9) throw ValidationError("invert: vector is not normalized");
  c[0] = inv_dim;
  return {n, std::move(c)};
}

inline BlochState invert(const Distribution& d, const Povm& povm = default_povm()) {
  return invert(d.probs, povm);
}

inline GateOperator gate_operator(const TransferMatrix& l, const Povm& povm = default_povm()) {
  Eigen::MatrixXd g = povm.tensor_power(l.n) * l.entries * povm.inverse_tensor_power(l.n);
  return {l.n, std::move(g)};
}

// Closed form of the phase gate exp(i phi sigma3 / 2) under the default POVM.
inline GateOperator phase_gate_closed(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::MatrixXd g(4, 4);
  g << 1 + c, 1 - c,    -s,     s,
       1 - c, 1 + c,     s,    -s,
           s,    -s, 1 + c, 1 - c,
          -s,     s, 1 - c, 1 + c;
  return {1, 0.5 * g};
}

// CNOT (control = qubit 1) under the default POVM, assembled from its
// 4x4 blocks. Block rows/columns are indexed by the first qubit's outcome.
inline GateOperator cnot_closed() {
  const double r = 1.0 / std::sqrt(3.0);
  Eigen::Matrix4d h1, h2, j1, j2;
  h1 << 1, r, 1, r,
       -r, 1, -r, 1,
        1, r, 1, r,
       -r, 1, -r, 1;
  h1 /= 4;
  h2 <<  r, -1, -r, 1,
         1,  r, -1, -r,
        -r,  1,  r, -1,
        -1, -r,  1,  r;
  h2 /= 4;
  j1 << 1, 0, 0, 0,
        0, 0, 0, -1,
        0, 0, 1, 0,
        0, -1, 0, 0;
  j1 *= r;
  j2 << 0, 0, 1, 0,
        0, -1, 0, 0,
        1, 0, 0, 0,
        0, 0, 0, -1;
  j2 *= r;
  const Eigen::Matrix4d h1t = h1.transpose(), h2t = h2.transpose();
  Eigen::MatrixXd g(16, 16);
  g << h1 - j1,  h1t + j2, h2,       h2t,
       h1t + j2, h1 - j1,  h2t,      h2,
       -h2,      -h2t,     h1 - j2,  h1t + j1,
       -h2t,     -h2,      h1t + j1, h1 - j2;
  return {2, std::move(g)};
}

// Bilinear metric g(p, q) = tr[rho_p rho_q] = 2^n sum_mu rho_p^mu rho_q^mu,
// extended to arbitrary real vectors.
inline double metric_g(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const Povm& povm = default_povm()) {
  if (p.size() != q.size()) throw DimensionError("metric_g: length mismatch");
  const int n = qubits_for_length(static_cast<std::size_t>(p.size()));
  if (n <= Povm::kCachedPowers) {
    const auto& inv = povm.inverse_tensor_power_ref(n);
    return static_cast<double>(pow2(n)) * (inv * p).dot(inv * q);
  }
  const Eigen::MatrixXd inv = povm.inverse_tensor_power(n);
  return static_cast<double>(pow2(n)) * (inv * p).dot(inv * q);
}

inline double metric_g(const Distribution& p, const Distribution& q,
                       const Povm& povm = default_povm()) {
  return metric_g(p.probs, q.probs, povm);
}

// Bloch radius r, with r^2 = 2^-n g(p,p) - 2^-2n.
inline double bloch_radius(const Eigen::VectorXd& p, const Povm& povm = default_povm()) {
  const int n = qubits_for_length(static_cast<std::size_t>(p.size()));
  const double inv_dim = 1.0 / static_cast<double>(pow2(n));
  double r2 = inv_dim * metric_g(p, p, povm) - inv_dim * inv_dim;
  if (r2 < -1e-9) throw ConsistencyError("bloch_radius: negative squared radius");
  return std::sqrt(std::max(r2, 0.0));
}

inline double pure_radius(int n) {
  const double inv_dim = 1.0 / static_cast<double>(pow2(n));
  return std::sqrt(inv_dim * (1.0 - inv_dim));
}

// Coherence R = r / r_pure: 0 maximally mixed, 1 pure, > 1 overcohered.
inline double coherence(const Distribution& p, const Povm& povm = default_povm()) {
  return bloch_radius(p.probs, povm) / pure_radius(p.n);
}

inline double fidelity(const Distribution& p, const Distribution& q,
                       const Povm& povm = default_povm()) {
  const double gpp = metric_g(p, p, povm), gqq = metric_g(q, q, povm);
  if (gpp <= 0 || gqq <= 0) throw ValidationError("fidelity: zero-norm argument");
  return metric_g(p, q, povm) / std::sqrt(gpp * gqq);
}

// Angle (radians) between the Bloch vectors of a pure target p and q.
// Below this Bloch radius the direction of q is round-off; the angle is
// reported as undefined.
inline constexpr double kMinRadius = 1e-7;

inline double unitary_error(const Distribution& p, const Distribution& q,
                            const Povm& povm = default_povm()) {
  if (p.n != q.n) throw DimensionError("unitary_error: qubit count mismatch");
  if (std::abs(coherence(p, povm) - 1.0) > 1e-8)
    throw ValidationError("unitary_error: target is not a pure state");
  const double rq = bloch_radius(q.probs, povm);
  if (rq <= kMinRadius) throw ValidationError("unitary_error: undefined angle for r(q) = 0");
  const double inv_dim = 1.0 / static_cast<double>(pow2(p.n));
  const double arg = (metric_g(p, q, povm) - inv_dim) /
                     (rq * std::sqrt(static_cast<double>(pow2(p.n)) - 1.0));
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

enum class Region { Pure, Mixed, Overcohered };

struct RegionLabel {
  Region region;
  double tolerance;
};

inline const char* to_string(Region r) {
  switch (r) {
    case Region::Pure: return "pure";
    case Region::Mixed: return "mixed";
    case Region::Overcohered: return "overcohered";
  }
  return "?";
}

inline RegionLabel classify_region(const Distribution& p, double tol = 0.05,
                                   const Povm& povm = default_povm()) {
  if (!(tol > 0)) throw ValidationError("classify_region: tolerance must be positive");
  const double r = coherence(p, povm);
  if (std::abs(r - 1.0) <= tol) return {Region::Pure, tol};
  return {r < 1.0 ? Region::Mixed : Region::Overcohered, tol};
}

// Plain-text matrix format: '#' comment lines, then one row per line,
// whitespace-separated decimals.
inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m,
                         const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  std::ostringstream row;
  row.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    row.str("");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) row << ' ';
      row << m(i, j);
    }
    os << row.str() << '\n';
  }
}

inline Eigen::MatrixXd read_matrix(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ValidationError("read_matrix: bad number on line " + std::to_string(lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DimensionError("read_matrix: ragged row on line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

}  // namespace qneuro
