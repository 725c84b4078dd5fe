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

// Algebraic self-checks run by `qneuro verify`. Every check is evaluated
// against a caller-supplied POVM so that a deliberately perturbed one can
// be fed in as a negative control.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qneuro/circuits.hpp"
#include "qneuro/experiments.hpp"
#include "qneuro/povm.hpp"
#include "qneuro/qubit_core.hpp"
#include "qneuro/snn.hpp"

namespace qneuro {

struct CheckResult {
  std::string name;
  double deviation = 0;  // max absolute deviation found
  double tolerance = 0;
  bool passed() const { return deviation <= tolerance; }
};

// The phase gate and CNOT closed forms, with the default POVM, are the
// reference matrices; the transform is recomputed through `povm`.
inline std::vector<CheckResult> run_verify_checks(const Povm& povm = default_povm(), std::uint64_t seed = 20260101) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  auto add = [&](std::string name, double dev, double tol) { out.push_back({std::move(name), dev, tol}); };
  auto max_abs = [](const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); };

  {
    double dev = 0;
    for (double phi : evenly_spaced_angles(36)) {
      const auto g = gate_operator(builtin_gate("phase_phi", phi), povm);
      dev = std::max(dev, max_abs(g.entries - phase_gate_closed(phi).entries));
    }
    add("phase_gate_closed_form", dev, 1e-12);
  }
  add("cnot_block_assembly", max_abs(gate_operator(builtin_gate("cnot"), povm).entries - cnot_closed().entries),
      1e-12);

  for (int n : {1, 2}) {
    double dev = 0;
    for (int k = 0; k < 100; ++k) {
      const BlochState s = random_mixed_state(n, rng);
      const Eigen::VectorXd p = povm.tensor_power(n) * s.coeffs;
      dev = std::max(dev, (invert(p, povm).coeffs - s.coeffs).cwiseAbs().maxCoeff());
    }
    add("embed_invert_roundtrip_n" + std::to_string(n), dev, 1e-12);
  }

  {
    double purity = 0, bound = 0, total = 0;
    for (int n : {1, 2}) {
      // Per-qubit outcome operators have largest eigenvalue 1/2, so no
      // outcome of an n-qubit state exceeds 2^-n.
      const double cap = 1.0 / static_cast<double>(pow2(n));
      for (const auto& t : test_states(n).states) {
        const Eigen::VectorXd p = povm.tensor_power(n) * t.state.coeffs;
        total = std::max(total, std::abs(p.sum() - 1.0));
        bound = std::max(bound, std::max(0.0, p.maxCoeff() - cap));
        const double r2 = metric_g(p, p, povm) / static_cast<double>(pow2(n)) - 1.0 / static_cast<double>(pow4(n));
        purity = std::max(purity, std::abs(std::sqrt(std::max(r2, 0.0)) / pure_radius(n) - 1.0));
      }
    }
    add("test_states_pure", purity, 1e-9);
    add("test_states_probability_bound", bound, 1e-9);
    add("embedding_normalized", total, 1e-12);
  }

  {
    // The {A, D} pbits of any state are untouched by CNOT.
    const auto g = gate_operator(builtin_gate("cnot"), povm);
    double dev = 0;
    for (int k = 0; k < 50; ++k) {
      const BlochState s = random_mixed_state(2, rng);
      const Distribution p(2, povm.tensor_power(2) * s.coeffs);
      const Distribution q(2, g.entries * p.probs);
      for (int bit : {0, 3}) dev = std::max(dev, std::abs(q.marginal(bit) - p.marginal(bit)));
    }
    add("cnot_marginal_invariance_AD", dev, 1e-10);
  }

  {
    double dev = 0;
    for (const char* name : {"identity", "not", "hadamard", "antipode"})
      dev = std::max(dev, max_abs(gate_operator(builtin_gate(name), povm).entries.colwise().sum().array() - 1.0));
    dev = std::max(dev, max_abs(gate_operator(builtin_gate("rot_theta", 0.7), povm).entries.colwise().sum().array() - 1.0));
    add("gate_column_sums", dev, 1e-12);
  }

  {
    // Composition: L(U2 U1) = L(U2) L(U1).
    const auto u1 = *builtin_unitary("rot_theta", 0.4);
    const auto u2 = *builtin_unitary("phase_phi", 1.1);
    const UnitarySpec u21{1, u2.matrix * u1.matrix};
    const auto lhs = unitary_to_transfer(u21);
    const auto rhs = unitary_to_transfer(u2).after(unitary_to_transfer(u1));
    add("transfer_composition", max_abs(lhs.entries - rhs.entries), 1e-12);
  }

  {
    // Fidelity is 1 on the diagonal and the metric is symmetric.
    double dev = 0;
    for (int k = 0; k < 20; ++k) {
      const int n = 1 + k % 2;
      const Distribution p(n, povm.tensor_power(n) * random_mixed_state(n, rng).coeffs);
      const Distribution q(n, povm.tensor_power(n) * random_mixed_state(n, rng).coeffs);
      dev = std::max(dev, std::abs(fidelity(p, p, povm) - 1.0));
      dev = std::max(dev, std::abs(metric_g(p, q, povm) - metric_g(q, p, povm)));
    }
    for (int n : {1, 2}) dev = std::max(dev, bloch_radius(Distribution::uniform(n).probs, povm));
    add("metric_identities", dev, 1e-12);
  }

  {
    // Point-mass distributions lie outside the Bloch ball with R = 3.
    double dev = 0;
    for (std::size_t z = 0; z < 4; ++z) dev = std::max(dev, std::abs(coherence(Distribution::point_mass(1, z), povm) - 3.0));
    add("point_mass_overcoherence", dev, 1e-12);
  }

  {
    const Eigen::MatrixXd rec = rectification_weights(one_qubit_embedding(), dense_projection(1), 1.0);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
    for (int z = 0; z < 4; ++z) expect(3 - z, z) = std::tanh(1.0);
    add("rectification_antidiagonal", max_abs(rec - expect), 1e-15);
  }

  add("saturation_decay_law", std::abs(iterate_saturation(1.0, 1.0, 100) * std::sqrt(1 + 2.0 / 3.0 * 100) - 1.0),
      0.05);
  return out;
}

// Default POVM with a small rotation of outcomes 0 and 1 along sigma1.
// Still a valid operator set (unit row 1/2, column sums preserved).
inline Povm perturbed_povm(double epsilon) {
  Eigen::Matrix4d a = default_povm_matrix();
  a(0, 1) += epsilon;
  a(1, 1) -= epsilon;
  return Povm(a);
}

}  // namespace qneuro
