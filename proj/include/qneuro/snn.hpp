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

// Discrete-time stochastic integrate-and-fire network on a delayed,
// weighted multigraph.
//
// Each step, a neuron accumulates u* = u + sum_e w_e X^{src(e), t - delay(e)},
// fires with probability P(u*) = (1 + erf((u* - 1/2) / sigma)) / 2, and keeps
// the residual u = S(u* - X) with S(u) = gamma tanh(u / gamma). Input and
// unit vertices are pure sources: inputs emit externally supplied bits, unit
// vertices emit 1 every step. Neither integrates.
//
// Incoming contributions are summed with Neumaier compensation so that
// feedback legs designed to cancel a residual (w = -S(x) against u = S(x))
// cancel exactly regardless of edge order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qneuro/error.hpp"

namespace qneuro {

using VertexId = std::size_t;

struct NeuronParams {
  double sigma = 0.0;
  double gamma = 0.0;
  static constexpr double kThreshold = 0.5;

  void validate() const {
    if (!(sigma >= 0)) throw ValidationError("NeuronParams: sigma must be >= 0");
    if (!(gamma >= 0)) throw ValidationError("NeuronParams: gamma must be >= 0");
  }
};

// Firing probability. The sigma = 0 limit is the step function with value
// 1/2 exactly at threshold.
inline double activation(double u, double sigma) {
  const double x = u - NeuronParams::kThreshold;
  if (sigma == 0.0) return x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5);
  return 0.5 * (1.0 + std::erf(x / sigma));
}

inline double saturate(double u, double gamma) {
  if (gamma == 0.0 || u == 0.0) return 0.0;
  if (std::isinf(gamma)) return u;
  return gamma * std::tanh(u / gamma);
}

inline double iterate_saturation(double u0, double gamma, long t) {
  if (!(gamma > 0)) throw ValidationError("iterate_saturation: gamma must be > 0");
  if (t < 0) throw ValidationError("iterate_saturation: t must be >= 0");
  double u = u0;
  for (long k = 0; k < t; ++k) u = saturate(u, gamma);
  return u;
}

enum class VertexKind { Neuron, Input, Unit };

inline const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Neuron: return "neuron";
    case VertexKind::Input: return "input";
    case VertexKind::Unit: return "unit";
  }
  return "?";
}

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  int delay = 1;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct NetworkSpec {
  std::vector<VertexKind> kinds;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::vector<VertexId> input_vertices;
  std::vector<VertexId> output_vertices;

  std::size_t vertex_count() const { return kinds.size(); }

  VertexId add_vertex(VertexKind kind, std::string label) {
    kinds.push_back(kind);
    labels.push_back(std::move(label));
    const VertexId id = kinds.size() - 1;
    if (kind == VertexKind::Input) input_vertices.push_back(id);
    return id;
  }

  void add_edge(VertexId src, VertexId dst, int delay, double weight) {
    edges.push_back({src, dst, delay, weight});
  }

  std::vector<VertexId> unit_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < kinds.size(); ++v)
      if (kinds[v] == VertexKind::Unit) out.push_back(v);
    return out;
  }

  VertexId find(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ValidationError("NetworkSpec: no vertex labeled '" + label + "'");
    return static_cast<VertexId>(it - labels.begin());
  }

  int max_delay() const {
    int d = 1;
    for (const auto& e : edges) d = std::max(d, e.delay);
    return d;
  }

  void validate() const {
    if (labels.size() != kinds.size()) throw ValidationError("NetworkSpec: label count mismatch");
    const auto n = vertex_count();
    for (const auto& e : edges) {
      if (e.src >= n || e.dst >= n) throw ValidationError("NetworkSpec: edge endpoint out of range");
      if (e.delay < 1) throw ValidationError("NetworkSpec: edge delay must be >= 1");
      if (kinds[e.dst] != VertexKind::Neuron)
        throw ValidationError("NetworkSpec: source vertex '" + labels[e.dst] + "' has an incoming edge");
    }
    for (auto v : input_vertices)
      if (v >= n || kinds[v] != VertexKind::Input) throw ValidationError("NetworkSpec: bad input vertex");
    for (auto v : output_vertices)
      if (v >= n) throw ValidationError("NetworkSpec: bad output vertex");
  }
};

// Compensated accumulator (Neumaier).
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Mutable per-trial state: residual potentials, recent spikes, and the
// contributions already in flight along delayed edges.
struct NetworkState {
  std::vector<double> u;
  std::vector<std::vector<std::uint8_t>> history;  // ring, newest at (t - 1) % depth
  std::vector<std::vector<Accumulator>> pending;   // ring indexed by arrival step
  long t = 0;

  NetworkState() = default;
  NetworkState(std::size_t vertices, int max_delay) { resize(vertices, max_delay); }

  void resize(std::size_t vertices, int max_delay) {
    u.assign(vertices, 0.0);
    history.assign(static_cast<std::size_t>(max_delay), std::vector<std::uint8_t>(vertices, 0));
    pending.assign(static_cast<std::size_t>(max_delay) + 1, std::vector<Accumulator>(vertices));
    t = 0;
  }

  void reset() {
    std::fill(u.begin(), u.end(), 0.0);
    for (auto& h : history) std::fill(h.begin(), h.end(), 0);
    for (auto& p : pending) std::fill(p.begin(), p.end(), Accumulator{});
    t = 0;
  }

  // Spike vector emitted `lag` steps ago (lag >= 1).
  const std::vector<std::uint8_t>& spikes_ago(int lag) const {
    const auto depth = static_cast<long>(history.size());
    return history[static_cast<std::size_t>(((t - lag) % depth + depth) % depth)];
  }
};

// Uniform double in [0, 1) from 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64 finalizer; derives independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Simulator {
 public:
  Simulator(const NetworkSpec& spec, NeuronParams params) : spec_(&spec), params_(params) {
    spec.validate();
    params.validate();
    const auto n = spec.vertex_count();
    offsets_.assign(n + 1, 0);
    for (const auto& e : spec.edges) ++offsets_[e.src + 1];
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    out_.resize(spec.edges.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : spec.edges) out_[fill[e.src]++] = e;
    input_slot_.assign(n, -1);
    for (std::size_t k = 0; k < spec.input_vertices.size(); ++k)
      input_slot_[spec.input_vertices[k]] = static_cast<int>(k);
    state_.resize(n, spec.max_delay());
    spikes_.assign(n, 0);
  }

  const NetworkSpec& spec() const { return *spec_; }
  const NeuronParams& params() const { return params_; }
  NetworkState& state() { return state_; }
  const NetworkState& state() const { return state_; }
  void reset() { state_.reset(); }

  // Advances one step and returns the spike vector X^t.
  template <class Rng>
  std::span<const std::uint8_t> step(std::span<const std::uint8_t> ext, Rng& rng) {
    const auto& spec = *spec_;
    const auto n = spec.vertex_count();
    if (ext.size() != spec.input_vertices.size())
      throw DimensionError("Simulator::step: expected " + std::to_string(spec.input_vertices.size()) +
                           " input bits, got " + std::to_string(ext.size()));
    const auto slots = static_cast<long>(state_.pending.size());
    auto& arriving = state_.pending[static_cast<std::size_t>(state_.t % slots)];
    for (std::size_t i = 0; i < n; ++i) {
      switch (spec.kinds[i]) {
        case VertexKind::Input:
          spikes_[i] = ext[static_cast<std::size_t>(input_slot_[i])] ? 1 : 0;
          break;
        case VertexKind::Unit:
          spikes_[i] = 1;
          break;
        case VertexKind::Neuron: {
          Accumulator acc = arriving[i];
          acc.add(state_.u[i]);
          const double u_star = acc.value();
          const double p = activation(u_star, params_.sigma);
          std::uint8_t x;
          if (p >= 1.0) x = 1;
          else if (p <= 0.0) x = 0;
          else x = uniform01(rng) < p ? 1 : 0;
          spikes_[i] = x;
          state_.u[i] = saturate(u_star - x, params_.gamma);
          break;
        }
      }
      arriving[i] = Accumulator{};
    }
    for (std::size_t src = 0; src < n; ++src) {
      if (!spikes_[src]) continue;
      for (std::size_t k = offsets_[src]; k < offsets_[src + 1]; ++k) {
        const auto& e = out_[k];
        state_.pending[static_cast<std::size_t>((state_.t + e.delay) % slots)][e.dst].add(e.weight);
      }
    }
    const auto depth = static_cast<long>(state_.history.size());
    state_.history[static_cast<std::size_t>(state_.t % depth)] = spikes_;
    ++state_.t;
    return spikes_;
  }

 private:
  const NetworkSpec* spec_;
  NeuronParams params_;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> out_;
  std::vector<int> input_slot_;
  NetworkState state_;
  std::vector<std::uint8_t> spikes_;
};

// Binary matrix, row-major (step x column).
struct BitMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

  std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
  std::uint8_t& at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
  std::span<const std::uint8_t> row(std::size_t r) const { return {bits.data() + r * cols, cols}; }
  std::span<std::uint8_t> row(std::size_t r) { return {bits.data() + r * cols, cols}; }

  bool operator==(const BitMatrix&) const = default;
};

// Runs `steps` steps from `initial` (a fresh zero state when omitted) and
// returns the full raster, steps x vertex_count.
template <class Rng>
BitMatrix run(const NetworkSpec& spec, NeuronParams params, const BitMatrix& inputs, std::size_t steps,
              Rng& rng, const NetworkState* initial = nullptr) {
  if (steps < 1) throw ValidationError("run: steps must be >= 1");
  if (inputs.rows < steps || inputs.cols != spec.input_vertices.size())
    throw DimensionError("run: input trains must be steps x |inputs|");
  Simulator sim(spec, params);
  if (initial) sim.state() = *initial;
  BitMatrix raster(steps, spec.vertex_count());
  for (std::size_t t = 0; t < steps; ++t) {
    const auto x = sim.step(inputs.row(t), rng);
    std::copy(x.begin(), x.end(), raster.row(t).begin());
  }
  return raster;
}

// Empirical firing rate of one neuron driven through a single edge of
// weight `total_weight` by i.i.d. Bernoulli(nu_in) input.
inline double rate_response(double total_weight, double nu_in, double gamma, double sigma, std::size_t steps,
                            std::uint64_t seed = 1) {
  if (steps < 1000) throw ValidationError("rate_response: needs at least 1000 steps");
  NetworkSpec spec;
  const auto in = spec.add_vertex(VertexKind::Input, "in");
  const auto out = spec.add_vertex(VertexKind::Neuron, "out");
  spec.add_edge(in, out, 1, total_weight);
  spec.output_vertices = {out};
  Simulator sim(spec, {sigma, gamma});
  std::mt19937_64 rng(seed);
  std::mt19937_64 drive(mix_seed(seed, 1));
  std::uint8_t bit = 0;
  std::size_t fired = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    bit = uniform01(drive) < nu_in ? 1 : 0;
    fired += sim.step(std::span<const std::uint8_t>(&bit, 1), rng)[out];
  }
  return static_cast<double>(fired) / static_cast<double>(steps);
}

// Edge-list text format:
//   # comments
//   vertices <N>
//   vertex <id> <neuron|input|unit> <label>     (N lines)
//   inputs <id>...
//   outputs <id>...
//   edges <M>
//   <src> <dst> <delay> <weight>                (M lines)
inline void write_network(std::ostream& os, const NetworkSpec& spec,
                          const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "vertices " << spec.vertex_count() << '\n';
  for (VertexId v = 0; v < spec.vertex_count(); ++v)
    os << "vertex " << v << ' ' << to_string(spec.kinds[v]) << ' ' << spec.labels[v] << '\n';
  os << "inputs";
  for (auto v : spec.input_vertices) os << ' ' << v;
  os << "\noutputs";
  for (auto v : spec.output_vertices) os << ' ' << v;
  os << "\nedges " << spec.edges.size() << '\n';
  std::ostringstream line;
  line.precision(17);
  for (const auto& e : spec.edges) {
    line.str("");
    line << e.src << ' ' << e.dst << ' ' << e.delay << ' ' << e.weight;
    os << line.str() << '\n';
  }
}

inline NetworkSpec read_network(std::istream& is) {
  NetworkSpec spec;
  std::string line;
  int lineno = 0;
  std::size_t declared = 0, expected_edges = 0;
  bool in_edges = false;
  auto fail = [&](const std::string& what) {
    throw ValidationError("read_network: line " + std::to_string(lineno) + ": " + what);
  };
  static const std::map<std::string, VertexKind> kinds = {
      {"neuron", VertexKind::Neuron}, {"input", VertexKind::Input}, {"unit", VertexKind::Unit}};
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (in_edges) {
      Edge e;
      if (!(ls >> e.src >> e.dst >> e.delay >> e.weight)) fail("expected 'src dst delay weight'");
      spec.edges.push_back(e);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "vertices") {
      if (!(ls >> declared)) fail("bad vertex count");
    } else if (key == "vertex") {
      std::size_t id;
      std::string kind, label;
      if (!(ls >> id >> kind >> label)) fail("expected 'vertex id kind label'");
      if (id != spec.vertex_count()) fail("vertex ids must be consecutive");
      const auto it = kinds.find(kind);
      if (it == kinds.end()) fail("unknown vertex kind '" + kind + "'");
      spec.kinds.push_back(it->second);
      spec.labels.push_back(label);
    } else if (key == "inputs" || key == "outputs") {
      auto& list = key == "inputs" ? spec.input_vertices : spec.output_vertices;
      VertexId v;
      while (ls >> v) list.push_back(v);
    } else if (key == "edges") {
      if (!(ls >> expected_edges)) fail("bad edge count");
      in_edges = true;
    } else {
      fail("unknown directive '" + key + "'");
    }
  }
  if (spec.vertex_count() != declared) throw ValidationError("read_network: vertex count mismatch");
  if (spec.edges.size() != expected_edges) throw ValidationError("read_network: edge count mismatch");
  spec.validate();
  return spec;
}

}  // namespace qneuro
