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
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qneuro/qubit_core.hpp"

using namespace qneuro;

namespace {

double max_dev(const Eigen::MatrixXd& a, const oracle::Mat& b) {
  double d = 0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b[r][c]));
  return d;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

}  // namespace

TEST(KetToBloch, BasisAndEquator) {
  const auto s0 = ket_to_bloch(Eigen::Vector2cd(1, 0));
  EXPECT_LT((s0.coeffs - vec({0.5, 0, 0, 0.5})).cwiseAbs().maxCoeff(), 1e-15);
  const auto sp = ket_to_bloch(Eigen::Vector2cd(1, 1) / std::sqrt(2.0));
  EXPECT_LT((sp.coeffs - vec({0.5, 0.5, 0, 0})).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KetToBloch, TwoQubitBasisState) {
  Eigen::Vector4cd k = Eigen::Vector4cd::Zero();
  k[0] = 1;
  const auto s = ket_to_bloch(k);
  for (int i = 0; i < 16; ++i) {
    const bool on = i == 0 || i == 3 || i == 12 || i == 15;
    EXPECT_NEAR(s.coeffs[i], on ? 0.25 : 0.0, 1e-15) << i;
  }
}

TEST(KetToBloch, RejectsUnnormalized) {
  EXPECT_THROW(ket_to_bloch(Eigen::Vector2cd(1, 1)), ValidationError);
  EXPECT_THROW(ket_to_bloch(Eigen::Vector3cd(1, 0, 0)), DimensionError);
}

TEST(BlochState, IdentityCoefficientEnforced) {
  EXPECT_THROW(BlochState(1, vec({0.4, 0, 0, 0})), ValidationError);
  EXPECT_THROW(BlochState(1, vec({0.5, 0, 0})), DimensionError);
}

TEST(UnitarySpec, RejectsNonUnitary) {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 1, 0, 1;
  EXPECT_THROW(UnitarySpec(1, m), ValidationError);
}

TEST(Transfer, MatchesDirectTraceOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int k = 0; k < 20; ++k) {
    const int mu = 1 + k % 3;
    const double a = ang(rng);
    const auto u = oracle::rotation(mu, a);
    const auto l = unitary_to_transfer(UnitarySpec{1, pauli_rotation(mu, a)});
    EXPECT_LT(max_dev(l.entries, oracle::transfer_1q(u)), 1e-14);
  }
}

TEST(Transfer, NotAndPhasePi) {
  const auto l_not = builtin_gate("not");
  EXPECT_LT((l_not.entries - Eigen::Vector4d(1, 1, -1, -1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-15);
  const auto l_pi = builtin_gate("phase_phi", kPi);
  EXPECT_LT((l_pi.entries - Eigen::Vector4d(1, -1, -1, 1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((builtin_gate("phase_phi", 0.0).entries - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transfer, AntipodeAndErrors) {
  EXPECT_EQ(builtin_gate("antipode").entries, Eigen::MatrixXd(Eigen::Vector4d(1, -1, -1, -1).asDiagonal()));
  EXPECT_FALSE(builtin_unitary("antipode").has_value());
  EXPECT_THROW(builtin_gate("swap"), ValidationError);
  EXPECT_THROW(builtin_gate("phase_phi"), ValidationError);
}

TEST(Transfer, BlockStructureAndOrthogonality) {
  std::mt19937_64 rng(2);
  for (int n : {1, 2}) {
    for (int k = 0; k < 10; ++k) {
      Eigen::MatrixXcd m(static_cast<Eigen::Index>(pow2(n)), static_cast<Eigen::Index>(pow2(n)));
      std::normal_distribution<double> nd;
      for (auto& x : m.reshaped()) x = Complex(nd(rng), nd(rng));
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
      const Eigen::MatrixXcd q = qr.householderQ();
      const auto l = unitary_to_transfer(UnitarySpec{n, q});
      const auto dim = l.entries.rows();
      EXPECT_NEAR(l.entries(0, 0), 1.0, 1e-12);
      EXPECT_LT(l.entries.row(0).tail(dim - 1).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT(l.entries.col(0).tail(dim - 1).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((l.entries.transpose() * l.entries - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Transfer, EvolutionCommutesWithRepresentation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int n : {1, 2}) {
    for (int k = 0; k < 20; ++k) {
      const auto d = static_cast<Eigen::Index>(pow2(n));
      Eigen::MatrixXcd m(d, d);
      for (auto& x : m.reshaped()) x = Complex(nd(rng), nd(rng));
      const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
      const Eigen::VectorXcd psi = random_ket(n, rng);
      const auto lhs = apply_transfer(unitary_to_transfer(UnitarySpec{n, u}), ket_to_bloch(psi));
      const auto rhs = ket_to_bloch(u * psi);
      EXPECT_LT((lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Transfer, CompositionOrder) {
  const auto u = pauli_rotation(2, 0.3), v = pauli_rotation(3, 1.2);
  const auto l_uv = unitary_to_transfer(UnitarySpec{1, u * v});
  const auto l_u = unitary_to_transfer(UnitarySpec{1, u}), l_v = unitary_to_transfer(UnitarySpec{1, v});
  // U V acts as V first, then U.
  EXPECT_LT((l_uv.entries - l_u.entries * l_v.entries).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((l_uv.entries - l_u.after(l_v).entries).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyTransfer, NotAndCnot) {
  const auto s1 = apply_transfer(builtin_gate("not"), ket_to_bloch(Eigen::Vector2cd(1, 0)));
  EXPECT_LT((s1.coeffs - vec({0.5, 0, 0, -0.5})).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::Vector4cd k10 = Eigen::Vector4cd::Zero(), k11 = Eigen::Vector4cd::Zero();
  k10[2] = 1;
  k11[3] = 1;
  const auto out = apply_transfer(builtin_gate("cnot"), ket_to_bloch(k10));
  EXPECT_LT((out.coeffs - ket_to_bloch(k11).coeffs).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(apply_transfer(builtin_gate("cnot"), ket_to_bloch(Eigen::Vector2cd(1, 0))), DimensionError);
}

TEST(BlochState, RadiusOfPureAndMixed) {
  std::mt19937_64 rng(4);
  for (int n : {1, 2}) {
    const double r_pure = std::sqrt(std::pow(2.0, -n) * (1 - std::pow(2.0, -n)));
    EXPECT_NEAR(ket_to_bloch(random_ket(n, rng)).radius(), r_pure, 1e-12);
    EXPECT_LE(random_mixed_state(n, rng).radius(), r_pure + 1e-9);
    EXPECT_NEAR(BlochState::maximally_mixed(n).radius(), 0.0, 1e-15);
  }
}
