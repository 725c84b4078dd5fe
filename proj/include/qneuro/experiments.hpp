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

// Test-state catalogs, spike-train sampling and estimation, and the trial
// and eta-search protocols used to characterize gate circuits.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qneuro/circuits.hpp"
#include "qneuro/error.hpp"
#include "qneuro/povm.hpp"
#include "qneuro/qubit_core.hpp"
#include "qneuro/snn.hpp"

namespace qneuro {

struct TestState {
  std::string label;
  Eigen::VectorXcd ket;
  BlochState state;
  bool entangled = false;
};

struct TestStateSet {
  int n = 1;
  std::vector<TestState> states;
};

// n = 1: the poles, four equatorial states, and eight states on the
// circles cos(theta) = +-1/sqrt(3) at azimuths (2k+1) pi/4 (14 total).
// n = 2: the four basis states and the 24 equal-weight superpositions
// (|a> + i^k |b>)/sqrt(2) of two distinct basis states (28 total).
inline TestStateSet test_states(int n) {
  using namespace std::complex_literals;
  TestStateSet set{n, {}};
  auto add = [&](std::string label, Eigen::VectorXcd ket, bool entangled = false) {
    BlochState s = ket_to_bloch(ket);
    set.states.push_back({std::move(label), std::move(ket), std::move(s), entangled});
  };
  if (n == 1) {
    add("ket0", Eigen::Vector2cd(1, 0));
    add("ket1", Eigen::Vector2cd(0, 1));
    for (int k = 0; k < 4; ++k)
      add("eq_k" + std::to_string(k), Eigen::Vector2cd(1, std::exp(1i * (k * kPi / 2))) / std::sqrt(2.0));
    const double r3 = std::sqrt(3.0), norm = std::sqrt(2 * r3);
    for (int sign : {+1, -1})
      for (int k = 0; k < 4; ++k) {
        const Complex a0 = std::sqrt(r3 + sign) / norm;
        const Complex a1 = std::exp(1i * ((2 * k + 1) * kPi / 4)) * std::sqrt(r3 - sign) / norm;
        add(std::string(sign > 0 ? "up_k" : "dn_k") + std::to_string(k), Eigen::Vector2cd(a0, a1));
      }
  } else if (n == 2) {
    const std::array<const char*, 4> basis = {"00", "01", "10", "11"};
    for (int z = 0; z < 4; ++z) {
      Eigen::Vector4cd ket = Eigen::Vector4cd::Zero();
      ket[z] = 1;
      add(std::string("ket") + basis[z], ket);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int k = 0; k < 4; ++k) {
          Eigen::Vector4cd ket = Eigen::Vector4cd::Zero();
          ket[a] = 1 / std::sqrt(2.0);
          ket[b] = std::exp(1i * (k * kPi / 2)) / std::sqrt(2.0);
          // Two distinct basis states differing in both qubits are entangled.
          const bool entangled = (a ^ b) == 3;
          add(std::string("s") + basis[a] + "_" + basis[b] + "_k" + std::to_string(k), ket, entangled);
        }
  } else {
    throw ValidationError("test_states: only n = 1 and n = 2 are catalogued");
  }
  return set;
}

// Draws one event from `d`.
template <class Rng>
std::size_t sample_event(const Distribution& d, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0;
  const auto last = static_cast<std::size_t>(d.probs.size()) - 1;
  for (std::size_t z = 0; z < last; ++z) {
    cum += d.probs[static_cast<Eigen::Index>(z)];
    if (u < cum) return z;
  }
  return last;
}

inline void event_bits(std::size_t event, int n, std::span<std::uint8_t> out) {
  const int bits = 2 * n;
  for (int b = 0; b < bits; ++b) out[static_cast<std::size_t>(b)] = (event >> (bits - 1 - b)) & 1U;
}

// I.i.d. event per step, emitted as its 2n pbits (pbit A first).
template <class Rng>
BitMatrix sample_input(const Distribution& d, std::size_t steps, Rng& rng) {
  BitMatrix trains(steps, static_cast<std::size_t>(2 * d.n));
  for (std::size_t t = 0; t < steps; ++t) event_bits(sample_event(d, rng), d.n, trains.row(t));
  return trains;
}

// Joint frequencies of the listed columns over rows [begin, end).
inline Distribution estimate_distribution(const BitMatrix& raster, const std::vector<std::size_t>& columns,
                                          std::size_t begin, std::size_t end) {
  if (columns.empty() || columns.size() % 2) throw ValidationError("estimate_distribution: need 2n columns");
  if (begin >= end || end > raster.rows) throw ValidationError("estimate_distribution: empty or invalid window");
  const int n = static_cast<int>(columns.size() / 2);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pow4(n)));
  for (std::size_t t = begin; t < end; ++t) {
    std::size_t z = 0;
    for (auto c : columns) z = (z << 1) | raster.at(t, c);
    counts[static_cast<Eigen::Index>(z)] += 1;
  }
  return {n, counts / static_cast<double>(end - begin)};
}

struct TrialConfig {
  int tau_sig = 30;
  std::size_t steps_budget = 10000;
};

struct TrialResult {
  // Pooled estimate over all segments.
  double F_mean = 0;
  double R_mean = 0;
  double alpha_mean = 0;  // radians; NaN when the output has zero radius
  // Spread of per-segment estimates.
  double F_sd = 0;
  double R_sd = 0;
  double eta_used = 0;
  Distribution p_out;
  std::size_t segments = 0;
};

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population standard deviation.
inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Repeats segments {reset; feed tau_gate + tau_sig sampled input steps;
// count output events after the transient} until the budget is spent, and
// scores the pooled output against the exact target G p_in.
inline TrialResult run_trial(const WiredCircuit& circuit, const GateOperator& gate, const Distribution& p_in,
                             const TrialConfig& cfg, std::uint64_t seed) {
  if (p_in.n != circuit.qubits || gate.n != circuit.qubits)
    throw DimensionError("run_trial: distribution or gate does not match the circuit");
  if (cfg.tau_sig < 1) throw ValidationError("run_trial: tau_sig must be >= 1");
  if (cfg.steps_budget < static_cast<std::size_t>(cfg.tau_sig))
    throw ValidationError("run_trial: budget is smaller than one segment");
  const int n = circuit.qubits;
  const auto tau_sig = static_cast<std::size_t>(cfg.tau_sig);
  const auto tau_gate = static_cast<std::size_t>(circuit.tau_gate);
  const std::size_t segments = (cfg.steps_budget + tau_sig - 1) / tau_sig;
  const std::size_t seg_len = tau_gate + tau_sig;
  const std::size_t events = pow4(n);

  Simulator sim(circuit.spec, circuit.params.neuron);
  std::mt19937_64 input_rng(mix_seed(seed, 0));
  std::mt19937_64 neuron_rng(mix_seed(seed, 1));
  BitMatrix inputs(seg_len, static_cast<std::size_t>(2 * n));

  const Distribution target = gate.apply(p_in);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(events));
  Eigen::VectorXd seg_counts(static_cast<Eigen::Index>(events));
  std::vector<double> f_seg, r_seg;
  f_seg.reserve(segments);
  r_seg.reserve(segments);

  for (std::size_t s = 0; s < segments; ++s) {
    sim.reset();
    for (std::size_t t = 0; t < seg_len; ++t) event_bits(sample_event(p_in, input_rng), n, inputs.row(t));
    seg_counts.setZero();
    for (std::size_t t = 0; t < seg_len; ++t) {
      const auto spikes = sim.step(inputs.row(t), neuron_rng);
      if (t < tau_gate) continue;
      std::size_t z = 0;
      for (const auto& tap : circuit.outputs) {
        const std::uint8_t bit = tap.kind == OutputTap::Kind::Vertex
                                     ? spikes[tap.index]
                                     : inputs.at(t - static_cast<std::size_t>(tap.shift), tap.index);
        z = (z << 1) | bit;
      }
      seg_counts[static_cast<Eigen::Index>(z)] += 1;
    }
    pooled += seg_counts;
    const Distribution p_seg(n, seg_counts / static_cast<double>(tau_sig));
    f_seg.push_back(fidelity(target, p_seg));
    r_seg.push_back(coherence(p_seg));
  }

  TrialResult r;
  r.p_out = Distribution(n, pooled / static_cast<double>(segments * tau_sig));
  r.F_mean = fidelity(target, r.p_out);
  r.R_mean = coherence(r.p_out);
  // The angle needs a pure target (not so for the antipode) and a
  // resolvable output direction.
  const bool angle_defined = std::abs(coherence(target) - 1.0) <= 1e-8 && bloch_radius(r.p_out.probs) > kMinRadius;
  r.alpha_mean = angle_defined ? unitary_error(target, r.p_out) : std::numeric_limits<double>::quiet_NaN();
  r.F_sd = sd_of(f_seg);
  r.R_sd = sd_of(r_seg);
  r.eta_used = circuit.params.eta;
  r.segments = segments;
  return r;
}

// Runs fn(i) for i in [0, count) on `workers` threads; results are stored
// by index, so the output does not depend on the worker count.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline unsigned default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

enum class GateFamily { Phase, Cnot };

inline const char* to_string(GateFamily f) { return f == GateFamily::Phase ? "phase" : "cnot"; }

// One (gamma, sigma, tau_sig, tau_avr) operating point.
struct Setting {
  GateFamily family = GateFamily::Phase;
  double gamma = 1.0;
  double sigma = 0.0;
  int tau_sig = 30;
  int tau_avr = 2;
  std::size_t steps_budget = 10000;
  int angle_count = 36;  // phase family only
  NormalizationForm normalization = NormalizationForm::SelfConsistent;
};

inline std::vector<double> evenly_spaced_angles(int count) {
  std::vector<double> a;
  for (int k = 0; k < count; ++k) a.push_back(2 * kPi * k / count);
  return a;
}

struct TrialCase {
  double angle = 0;  // 0 for CNOT
  std::size_t state_index = 0;
  std::string state_label;
  bool entangled = false;
  TrialResult result;
};

struct SettingResult {
  Setting setting;
  double eta = 0;
  std::vector<TrialCase> cases;
  double F_mean = 0, F_sd = 0, R_mean = 0, R_sd = 0, alpha_mean = 0;  // alpha in radians

  // Mean F over the cases accepted by `pred`.
  template <class Pred>
  double mean_F_where(Pred pred) const {
    std::vector<double> v;
    for (const auto& c : cases)
      if (pred(c)) v.push_back(c.result.F_mean);
    return mean_of(v);
  }
  template <class Pred>
  double sd_F_where(Pred pred) const {
    std::vector<double> v;
    for (const auto& c : cases)
      if (pred(c)) v.push_back(c.result.F_mean);
    return sd_of(v);
  }
};

inline CircuitParams circuit_params(const Setting& s, double eta) {
  CircuitParams p;
  p.tau_avr = s.tau_avr;
  p.eta = eta;
  p.neuron = {s.sigma, s.gamma};
  p.normalization = s.normalization;
  return p;
}

// Runs every (angle, state) case of the family at one eta. Case i uses
// seed mix_seed(master_seed, i), shared across eta values and settings.
inline SettingResult evaluate_setting(const Setting& s, double eta, std::uint64_t master_seed,
                                      unsigned workers = 1) {
  const int n = s.family == GateFamily::Phase ? 1 : 2;
  const auto states = test_states(n);
  const std::vector<double> angles =
      s.family == GateFamily::Phase ? evenly_spaced_angles(s.angle_count) : std::vector<double>{0.0};
  const CircuitParams params = circuit_params(s, eta);

  std::vector<GateOperator> gates;
  std::vector<WiredCircuit> circuits;
  for (double a : angles) {
    gates.push_back(s.family == GateFamily::Phase ? phase_gate_closed(a) : cnot_closed());
    circuits.push_back(s.family == GateFamily::Phase ? build_one_qubit_circuit(gates.back(), params)
                                                     : build_cnot_circuit(params));
  }
  std::vector<Distribution> inputs;
  for (const auto& st : states.states) inputs.push_back(embed(st.state));

  const std::size_t count = angles.size() * states.states.size();
  const TrialConfig cfg{s.tau_sig, s.steps_budget};
  auto cases = parallel_map<TrialCase>(count, workers, [&](std::size_t i) {
    const std::size_t ai = i / states.states.size(), si = i % states.states.size();
    TrialCase c;
    c.angle = angles[ai];
    c.state_index = si;
    c.state_label = states.states[si].label;
    c.entangled = states.states[si].entangled;
    c.result = run_trial(circuits[ai], gates[ai], inputs[si], cfg, mix_seed(master_seed, i));
    return c;
  });

  SettingResult out;
  out.setting = s;
  out.eta = eta;
  out.cases = std::move(cases);
  std::vector<double> f, r, alpha;
  for (const auto& c : out.cases) {
    f.push_back(c.result.F_mean);
    r.push_back(c.result.R_mean);
    if (!std::isnan(c.result.alpha_mean)) alpha.push_back(c.result.alpha_mean);
  }
  out.F_mean = mean_of(f);
  out.F_sd = sd_of(f);
  out.R_mean = mean_of(r);
  out.R_sd = sd_of(r);
  out.alpha_mean = mean_of(alpha);
  return out;
}

inline std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 40; ++k) g.push_back(0.05 * k);
  return g;
}

struct EtaSearch {
  double eta = 0;
  double variance = 0;
  std::vector<double> variances;  // per grid point
  SettingResult best;
};

// Grid eta minimizing the variance of F across all cases; ties go to the
// smaller eta.
inline EtaSearch optimize_eta(const Setting& s, const std::vector<double>& eta_grid, std::uint64_t master_seed,
                              unsigned workers = 1) {
  if (eta_grid.empty()) throw ValidationError("optimize_eta: empty eta grid");
  std::vector<double> grid = eta_grid;
  std::sort(grid.begin(), grid.end());
  EtaSearch out;
  bool first = true;
  for (double eta : grid) {
    SettingResult r = evaluate_setting(s, eta, master_seed, workers);
    const double var = r.F_sd * r.F_sd;
    out.variances.push_back(var);
    if (first || var < out.variance) {
      out.eta = eta;
      out.variance = var;
      out.best = std::move(r);
      first = false;
    }
  }
  return out;
}

}  // namespace qneuro
