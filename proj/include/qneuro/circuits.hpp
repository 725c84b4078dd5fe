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

// Spiking circuits that apply a gate operator to pbit spike trains.
//
// A gate maps the dense code (2n pbits) to a sparse one-hot code over 4^n
// event nodes, pushes the event through gate-weighted edges, and reads the
// dense code back out:
//
//   inputs --W_embed--> event nodes --(W_proj G)/tau_avr x tau_avr delays--> outputs
//
// The embedding is kept exact by three feedback families among the event
// nodes: rectification (restores losers after a winner, delay 1), additive
// normalization (pushes the number of spikes per step toward one), and
// eta-doubles (inhibition -eta at delay 1 followed by excitation S(eta) at
// delay 2).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qneuro/error.hpp"
#include "qneuro/povm.hpp"
#include "qneuro/snn.hpp"

namespace qneuro {

enum class NormalizationForm {
  // c = strength (1 - sum X): vanishes when exactly one event node fires.
  SelfConsistent,
  // Alternative unit-column weight (layer size times the event weight);
  // leaves a residual bias on single-spike steps. Kept for comparison runs.
  Printed,
};

struct CircuitParams {
  int tau_avr = 2;
  double eta = 0.0;
  NeuronParams neuron{};
  NormalizationForm normalization = NormalizationForm::SelfConsistent;

  // Excitation leg of an eta-double: -S(-eta).
  double eta_excitation() const { return -saturate(-eta, neuron.gamma); }

  void validate() const {
    if (tau_avr < 1) throw ValidationError("CircuitParams: tau_avr must be >= 1");
    if (!(eta >= 0)) throw ValidationError("CircuitParams: eta must be >= 0");
    neuron.validate();
  }
};

// Where an output pbit is read from: a physical vertex, or a copy of an
// input train delayed by `shift` steps.
struct OutputTap {
  enum class Kind { Vertex, InputCopy };
  std::string label;
  Kind kind = Kind::Vertex;
  std::size_t index = 0;  // vertex id, or position in spec.input_vertices
  int shift = 0;
};

struct WiredCircuit {
  int qubits = 1;
  CircuitParams params;
  NetworkSpec spec;
  std::map<std::string, VertexId> input_map;
  std::vector<OutputTap> outputs;  // pbit order A', B', ...
  // Embedding-layer event nodes in event order (the joint nodes for CNOT).
  std::vector<VertexId> event_nodes;
  // Stage-I marginal event nodes (CNOT only): pair {A,D} then {B,C}.
  std::vector<VertexId> marginal_nodes;
  int tau_gate = 0;
  // Steps from an input event to the output step that nominally carries it.
  int latency = 0;
  // Node count including bookkeeping elements without a vertex of their own
  // (normalization aggregates, logical output copies).
  std::size_t logical_node_count = 0;
  std::size_t reference_nodes = 0;
  std::size_t reference_edges = 0;
};

inline constexpr std::array<const char*, 4> kEventLabels = {"00", "01", "10", "11"};

// Dense-code projection: row b, column z is bit b of event z (MSB = pbit A).
inline Eigen::MatrixXd dense_projection(int n) {
  const int bits = 2 * n;
  const auto events = static_cast<Eigen::Index>(pow4(n));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(bits, events);
  for (Eigen::Index z = 0; z < events; ++z)
    for (int b = 0; b < bits; ++b) w(b, z) = static_cast<double>((z >> (bits - 1 - b)) & 1);
  return w;
}

// Affine injection from {A, B, unit} to the four event nodes.
inline Eigen::MatrixXd one_qubit_embedding() {
  Eigen::MatrixXd w(4, 3);
  w << -1, -1, 1,
       -1, 1, 0,
       1, -1, 0,
       1, 1, -1;
  return w;
}

// Rectifying self-feedback among embedding nodes. `embed` is the affine
// injection (last column = unit vertex), `proj` maps an active event to the
// upstream spike pattern. Node i's potential under event j is M^i_j; losers
// must sit at exactly -1 or 0 relative to the winner's 1, and the winner's
// restoring weight onto loser i is -S(M^i_j - delta^i_j).
inline Eigen::MatrixXd rectification_weights(const Eigen::MatrixXd& embed, const Eigen::MatrixXd& proj,
                                             double gamma) {
  if (embed.cols() != proj.rows() + 1)
    throw DimensionError("rectification_weights: embed must have one column per upstream node plus unit");
  const Eigen::Index k = embed.rows();
  if (proj.cols() != k) throw DimensionError("rectification_weights: proj must map the event space");
  const Eigen::MatrixXd m =
      embed.leftCols(proj.rows()) * proj + embed.col(proj.rows()) * Eigen::RowVectorXd::Ones(k);
  Eigen::MatrixXd rec(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = m(i, j) - (i == j ? 1.0 : 0.0);
      if (d != 0.0 && d != -1.0)
        throw ConstructionError("rectification_weights: potential " + std::to_string(m(i, j)) +
                                " outside {0, -1} relative to the winner");
      rec(i, j) = d == 0.0 ? 0.0 : -saturate(d, gamma);
    }
  return rec;
}

// Per-node potential correction for a spike pattern of the normalized layer.
inline double normalization_correction(const std::vector<std::uint8_t>& spikes, double strength) {
  double total = 0;
  for (auto x : spikes) total += x;
  return strength * (1.0 - total);
}

namespace detail {

struct EmbeddingBlock {
  std::array<VertexId, 4> events{};
};

// Normalization feedback on `layer`: strength (1 - sum X), strength =
// -coeff S(-1). The unit leg is delayed so that it first lands together with
// the layer's first possible spikes (`unit_delay` = first firing step + 1);
// a network started from rest then sees no spurious correction.
inline void add_normalization(NetworkSpec& spec, const std::vector<VertexId>& layer, VertexId unit,
                              double coeff, const CircuitParams& p, int unit_delay) {
  const double s1 = saturate(-1.0, p.neuron.gamma);
  const double from_event = coeff * s1;
  const double from_unit =
      p.normalization == NormalizationForm::SelfConsistent ? -coeff * s1 : -s1 * coeff * static_cast<double>(layer.size());
  for (auto dst : layer) {
    for (auto src : layer) spec.add_edge(src, dst, 1, from_event);
    spec.add_edge(unit, dst, unit_delay, from_unit);
  }
}

inline void add_eta_doubles(NetworkSpec& spec, VertexId src, VertexId dst, int delay, const CircuitParams& p) {
  spec.add_edge(src, dst, delay, -p.eta);
  spec.add_edge(src, dst, delay + 1, p.eta_excitation());
}

// Event nodes for one pbit pair with embedding, rectification,
// normalization and lateral eta-doubles.
inline EmbeddingBlock add_embedding_block(NetworkSpec& spec, VertexId a, VertexId b, VertexId unit,
                                          const std::string& prefix, const CircuitParams& p) {
  EmbeddingBlock blk;
  for (int z = 0; z < 4; ++z) blk.events[z] = spec.add_vertex(VertexKind::Neuron, prefix + kEventLabels[z]);
  const Eigen::MatrixXd embed = one_qubit_embedding();
  const std::array<VertexId, 3> upstream = {a, b, unit};
  for (int z = 0; z < 4; ++z)
    for (int c = 0; c < 3; ++c)
      if (embed(z, c) != 0.0) spec.add_edge(upstream[c], blk.events[z], 1, embed(z, c));
  const Eigen::MatrixXd rec = rectification_weights(embed, dense_projection(1), p.neuron.gamma);
  const Eigen::MatrixXd structure = rectification_weights(embed, dense_projection(1), 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (structure(i, j) != 0.0) spec.add_edge(blk.events[j], blk.events[i], 1, rec(i, j));
  add_normalization(spec, {blk.events.begin(), blk.events.end()}, unit, 0.25, p, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) add_eta_doubles(spec, blk.events[i], blk.events[j], 1, p);
  return blk;
}

}  // namespace detail

// Builds the one-qubit gate circuit for a 4x4 gate operator G.
inline WiredCircuit build_one_qubit_circuit(const GateOperator& g, const CircuitParams& p) {
  p.validate();
  if (g.n != 1) throw DimensionError("build_one_qubit_circuit: gate must act on one qubit");
  WiredCircuit c;
  c.qubits = 1;
  c.params = p;
  auto& spec = c.spec;
  const VertexId a = spec.add_vertex(VertexKind::Input, "A");
  const VertexId b = spec.add_vertex(VertexKind::Input, "B");
  const VertexId unit = spec.add_vertex(VertexKind::Unit, "unit");
  c.input_map = {{"A", a}, {"B", b}};
  const auto blk = detail::add_embedding_block(spec, a, b, unit, "ev_", p);
  c.event_nodes.assign(blk.events.begin(), blk.events.end());

  const VertexId out_a = spec.add_vertex(VertexKind::Neuron, "A'");
  const VertexId out_b = spec.add_vertex(VertexKind::Neuron, "B'");
  const Eigen::MatrixXd wg = dense_projection(1) * g.entries;
  const std::array<VertexId, 2> outs = {out_a, out_b};
  for (int z = 0; z < 4; ++z)
    for (int o = 0; o < 2; ++o)
      for (int d = 1; d <= p.tau_avr; ++d) spec.add_edge(blk.events[z], outs[o], d, wg(o, z) / p.tau_avr);
  spec.output_vertices = {out_a, out_b};
  c.outputs = {{"A'", OutputTap::Kind::Vertex, out_a, 0}, {"B'", OutputTap::Kind::Vertex, out_b, 0}};

  c.tau_gate = 4 + p.tau_avr;
  c.latency = 1 + p.tau_avr;
  c.logical_node_count = spec.vertex_count() + 1;  // + normalization aggregate
  c.reference_nodes = 10;
  c.reference_edges = 62;
  spec.validate();
  return c;
}

// Builds the CNOT circuit (control = qubit 1, pbits A B; target = C D).
//
// Stage I embeds the pbit pairs {A, D} and {B, C} separately; stage II ANDs
// one node of each into 16 joint event nodes. Pbits A and D are invariant
// under the gate and are copied through. B' and C' are each the OR of four
// partial projections, one per {A, D} context m: partial (o, m) integrates
// the rows of G with context m and output bit o set, from every joint node,
// and is held below threshold by eta-doubles from the stage-I {A, D} nodes
// whenever the current context is not m.
inline WiredCircuit build_cnot_circuit(const CircuitParams& p) {
  p.validate();
  WiredCircuit c;
  c.qubits = 2;
  c.params = p;
  auto& spec = c.spec;
  const std::array<std::string, 4> names = {"A", "B", "C", "D"};
  std::array<VertexId, 4> in{};
  for (int k = 0; k < 4; ++k) {
    in[k] = spec.add_vertex(VertexKind::Input, names[k]);
    c.input_map[names[k]] = in[k];
  }
  const VertexId unit = spec.add_vertex(VertexKind::Unit, "unit");

  const auto ad = detail::add_embedding_block(spec, in[0], in[3], unit, "ad_", p);
  const auto bc = detail::add_embedding_block(spec, in[1], in[2], unit, "bc_", p);
  c.marginal_nodes.assign(ad.events.begin(), ad.events.end());
  c.marginal_nodes.insert(c.marginal_nodes.end(), bc.events.begin(), bc.events.end());

  // Joint event z = (A B C D) sits at node (m, b) with m = (A D), b = (B C).
  auto ad_of = [](int z) { return ((z >> 3) & 1) * 2 + (z & 1); };
  auto bc_of = [](int z) { return ((z >> 2) & 1) * 2 + ((z >> 1) & 1); };
  std::array<VertexId, 16> joint{};
  for (int z = 0; z < 16; ++z) {
    std::string label = "ev_";
    for (int bit = 3; bit >= 0; --bit) label += ((z >> bit) & 1) ? '1' : '0';
    joint[z] = spec.add_vertex(VertexKind::Neuron, label);
  }
  c.event_nodes.assign(joint.begin(), joint.end());

  Eigen::MatrixXd embed2 = Eigen::MatrixXd::Zero(16, 9);
  Eigen::MatrixXd proj2 = Eigen::MatrixXd::Zero(8, 16);
  for (int z = 0; z < 16; ++z) {
    embed2(z, ad_of(z)) = 1;
    embed2(z, 4 + bc_of(z)) = 1;
    embed2(z, 8) = -1;
    proj2(ad_of(z), z) = 1;
    proj2(4 + bc_of(z), z) = 1;
  }
  for (int z = 0; z < 16; ++z) {
    spec.add_edge(ad.events[ad_of(z)], joint[z], 1, 1.0);
    spec.add_edge(bc.events[bc_of(z)], joint[z], 1, 1.0);
    spec.add_edge(unit, joint[z], 2, -1.0);  // aligned with the stage-I spikes
  }
  const Eigen::MatrixXd rec2 = rectification_weights(embed2, proj2, p.neuron.gamma);
  const Eigen::MatrixXd structure2 = rectification_weights(embed2, proj2, 1.0);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (structure2(i, j) != 0.0) spec.add_edge(joint[j], joint[i], 1, rec2(i, j));
  detail::add_normalization(spec, c.event_nodes, unit, 9.0 / 16.0, p, 3);

  // Partial projections. Joint nodes fire at t + 2 for an input at t; the
  // last averaged contribution of that event lands at t + 4 + tau_avr, which
  // is also when its context gates the partial node. Relays fire one step
  // later, at t + tau_gate.
  const GateOperator g = cnot_closed();
  const int gate_offset = 2;
  const int gating_delay = 2 + gate_offset + p.tau_avr - 1;
  const std::array<int, 2> out_bits = {1, 2};  // B, C
  const std::array<std::string, 2> out_names = {"B", "C"};
  std::array<std::array<VertexId, 4>, 2> partial{};
  for (int o = 0; o < 2; ++o)
    for (int m = 0; m < 4; ++m)
      partial[o][m] = spec.add_vertex(VertexKind::Neuron, "pp_" + out_names[o] + "_" + kEventLabels[m]);
  for (int o = 0; o < 2; ++o)
    for (int m = 0; m < 4; ++m) {
      for (int j = 0; j < 16; ++j) {
        double w = 0;
        for (int z = 0; z < 16; ++z)
          if (ad_of(z) == m && ((z >> (3 - out_bits[o])) & 1)) w += g.entries(z, j);
        for (int d = 1; d <= p.tau_avr; ++d) spec.add_edge(joint[j], partial[o][m], gate_offset + d, w / p.tau_avr);
      }
      for (int ctx = 0; ctx < 4; ++ctx)
        if (ctx != m) detail::add_eta_doubles(spec, ad.events[ctx], partial[o][m], gating_delay, p);
    }
  std::array<VertexId, 2> relay{};
  for (int o = 0; o < 2; ++o) {
    relay[o] = spec.add_vertex(VertexKind::Neuron, out_names[o] + "'");
    for (int m = 0; m < 4; ++m) spec.add_edge(partial[o][m], relay[o], 1, 1.0);
  }

  c.tau_gate = 5 + p.tau_avr;
  c.latency = c.tau_gate;
  spec.output_vertices = {relay[0], relay[1]};
  c.outputs = {{"A'", OutputTap::Kind::InputCopy, 0, c.latency},
               {"B'", OutputTap::Kind::Vertex, relay[0], 0},
               {"C'", OutputTap::Kind::Vertex, relay[1], 0},
               {"D'", OutputTap::Kind::InputCopy, 3, c.latency}};
  // The 39 physical vertices are A B C D, unit, 2 x 4 stage-I nodes, 16
  // joint nodes, 8 partial projections and 2 relays; A' and D' need none.
  c.logical_node_count = spec.vertex_count();
  c.reference_nodes = 38;
  c.reference_edges = 1309;
  spec.validate();
  return c;
}

}  // namespace qneuro
