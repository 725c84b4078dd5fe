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
#include <set>

#include "qneuro/experiments.hpp"

using namespace qneuro;

TEST(TestStates, CountsAndPurity) {
  const auto one = test_states(1);
  const auto two = test_states(2);
  ASSERT_EQ(one.states.size(), 14u);
  ASSERT_EQ(two.states.size(), 28u);
  std::set<std::string> labels;
  for (const auto* set : {&one, &two})
    for (const auto& s : set->states) {
      EXPECT_NEAR(s.ket.norm(), 1.0, 1e-14) << s.label;
      EXPECT_NEAR(s.state.radius(), pure_radius(set->n), 1e-12) << s.label;
      labels.insert(s.label);
    }
  EXPECT_EQ(labels.size(), 42u);
  int entangled = 0;
  for (const auto& s : two.states) entangled += s.entangled;
  EXPECT_EQ(entangled, 8);  // pairs {00,11} and {01,10}, four phases each
  EXPECT_THROW(test_states(3), ValidationError);
}

TEST(TestStates, OneQubitGeometry) {
  const auto set = test_states(1);
  // Bloch z components: poles, equator, then the two cos(theta) circles.
  auto z_of = [](const TestState& s) { return 2 * s.state.coeffs[3]; };
  EXPECT_NEAR(z_of(set.states[0]), 1, 1e-14);
  EXPECT_NEAR(z_of(set.states[1]), -1, 1e-14);
  for (int k = 2; k < 6; ++k) EXPECT_NEAR(z_of(set.states[k]), 0, 1e-14);
  for (int k = 6; k < 10; ++k) EXPECT_NEAR(z_of(set.states[k]), 1 / std::sqrt(3.0), 1e-14);
  for (int k = 10; k < 14; ++k) EXPECT_NEAR(z_of(set.states[k]), -1 / std::sqrt(3.0), 1e-14);
}

TEST(Sampling, EventBits) {
  std::array<std::uint8_t, 4> b{};
  event_bits(0b1011, 2, b);
  EXPECT_EQ(b, (std::array<std::uint8_t, 4>{1, 0, 1, 1}));
  std::array<std::uint8_t, 2> c{};
  event_bits(2, 1, c);
  EXPECT_EQ(c, (std::array<std::uint8_t, 2>{1, 0}));
}

TEST(Sampling, FrequenciesMatchDistribution) {
  std::mt19937_64 rng(99);
  const auto u = sample_input(Distribution::uniform(1), 40000, rng);
  const auto est = estimate_distribution(u, {0, 1}, 0, u.rows);
  for (int z = 0; z < 4; ++z) EXPECT_NEAR(est.probs[z], 0.25, 0.013);

  const Distribution p = embed(ket_to_bloch(Eigen::Vector2cd(1, 0)));
  const auto s = sample_input(p, 40000, rng);
  const auto f = estimate_distribution(s, {0, 1}, 0, s.rows);
  for (int z = 0; z < 4; ++z) EXPECT_NEAR(f.probs[z], p.probs[z], 0.013) << z;
}

TEST(Sampling, PointMassIsDeterministic) {
  std::mt19937_64 rng(1);
  const auto s = sample_input(Distribution::point_mass(2, 0b0110), 50, rng);
  for (std::size_t t = 0; t < 50; ++t) {
    EXPECT_EQ(s.at(t, 0), 0);
    EXPECT_EQ(s.at(t, 1), 1);
    EXPECT_EQ(s.at(t, 2), 1);
    EXPECT_EQ(s.at(t, 3), 0);
  }
}

TEST(Estimate, WindowAndColumns) {
  BitMatrix m(4, 3);
  // rows: 000, 101, 111, 011
  m.at(1, 0) = m.at(1, 2) = 1;
  m.at(2, 0) = m.at(2, 1) = m.at(2, 2) = 1;
  m.at(3, 1) = m.at(3, 2) = 1;
  const auto d = estimate_distribution(m, {0, 2}, 0, 4);
  EXPECT_EQ(d.n, 1);
  EXPECT_DOUBLE_EQ(d.probs[0], 0.25);  // row 0
  EXPECT_DOUBLE_EQ(d.probs[1], 0.25);  // row 3
  EXPECT_DOUBLE_EQ(d.probs[3], 0.5);   // rows 1, 2
  const auto w = estimate_distribution(m, {2, 1}, 1, 3);
  EXPECT_DOUBLE_EQ(w.probs[2], 0.5);
  EXPECT_DOUBLE_EQ(w.probs[3], 0.5);
  EXPECT_THROW(estimate_distribution(m, {0}, 0, 4), ValidationError);
  EXPECT_THROW(estimate_distribution(m, {0, 1}, 2, 2), ValidationError);
  EXPECT_THROW(estimate_distribution(m, {0, 1}, 0, 5), ValidationError);
}

TEST(Stats, MeanAndSd) {
  EXPECT_TRUE(std::isnan(mean_of({})));
  EXPECT_DOUBLE_EQ(mean_of({1, 2, 3, 6}), 3.0);
  EXPECT_DOUBLE_EQ(sd_of({5}), 0.0);
  EXPECT_DOUBLE_EQ(sd_of({1, 3}), 1.0);
  EXPECT_NEAR(sd_of({2, 4, 4, 4, 5, 5, 7, 9}), 2.0, 1e-15);
}

namespace {
CircuitParams noiseless(double gamma) {
  CircuitParams p;
  p.neuron = {0.0, gamma};
  return p;
}
}  // namespace

TEST(Trial, IdentityPointMass) {
  const auto c = build_one_qubit_circuit(GateOperator::identity(1), noiseless(0.0));
  const auto r = run_trial(c, GateOperator::identity(1), Distribution::point_mass(1, 2), {20, 400}, 4);
  EXPECT_NEAR(r.F_mean, 1.0, 1e-12);
  EXPECT_NEAR(r.R_mean, 3.0, 1e-12);
  EXPECT_EQ(r.segments, 20u);
  EXPECT_EQ(r.F_sd, 0.0);
  EXPECT_TRUE(std::isnan(r.alpha_mean));  // the target is overcohered, not pure
}

TEST(Trial, SeedDeterminismAndDependence) {
  const auto g = phase_gate_closed(0.9);
  CircuitParams p = noiseless(1.0);
  p.neuron.sigma = 0.1;
  const auto c = build_one_qubit_circuit(g, p);
  const Distribution in = embed(test_states(1).states[4].state);
  const auto a = run_trial(c, g, in, {30, 3000}, 11);
  const auto b = run_trial(c, g, in, {30, 3000}, 11);
  const auto d = run_trial(c, g, in, {30, 3000}, 12);
  EXPECT_EQ(a.p_out.probs, b.p_out.probs);
  EXPECT_EQ(a.F_mean, b.F_mean);
  EXPECT_NE(a.p_out.probs, d.p_out.probs);
}

TEST(Trial, AngleDefinedOnlyForPureTargets) {
  const auto g = gate_operator(builtin_gate("antipode"));
  const auto c = build_one_qubit_circuit(g, noiseless(1.0));
  for (const auto& st : test_states(1).states) {
    const Distribution in = embed(st.state);
    const auto r = run_trial(c, g, in, {30, 600}, 1);
    const bool pure_target = std::abs(coherence(g.apply(in)) - 1.0) <= 1e-8;
    EXPECT_EQ(std::isnan(r.alpha_mean), !pure_target) << st.label;
    EXPECT_TRUE(std::isfinite(r.F_mean));
  }
}

TEST(Trial, RejectsBadArguments) {
  const auto c = build_one_qubit_circuit(GateOperator::identity(1), noiseless(1.0));
  const auto p = Distribution::uniform(1);
  EXPECT_THROW(run_trial(c, GateOperator::identity(1), p, {0, 100}, 1), ValidationError);
  EXPECT_THROW(run_trial(c, GateOperator::identity(1), p, {30, 10}, 1), ValidationError);
  EXPECT_THROW(run_trial(c, cnot_closed(), p, {30, 100}, 1), DimensionError);
  EXPECT_THROW(run_trial(c, GateOperator::identity(1), Distribution::uniform(2), {30, 100}, 1), DimensionError);
}

TEST(ParallelMap, OrderIndependentOfWorkers) {
  const std::function<std::uint64_t(std::size_t)> f = [](std::size_t i) { return mix_seed(3, i); };
  const auto one = parallel_map<std::uint64_t>(57, 1, f);
  const auto four = parallel_map<std::uint64_t>(57, 4, f);
  EXPECT_EQ(one, four);
  const std::function<int(std::size_t)> boom = [](std::size_t i) -> int {
    if (i == 5) throw ValidationError("boom");
    return 0;
  };
  EXPECT_THROW(parallel_map<int>(10, 3, boom), ValidationError);
}

TEST(Angles, EvenlySpaced) {
  const auto a = evenly_spaced_angles(36);
  ASSERT_EQ(a.size(), 36u);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_NEAR(a[9], kPi / 2, 1e-15);
  EXPECT_NEAR(a[18], kPi, 1e-15);
}

namespace {
Setting small_phase() {
  Setting s;
  s.gamma = 1.0;
  s.sigma = 0.0;
  s.tau_sig = 20;
  s.tau_avr = 2;
  s.steps_budget = 400;
  s.angle_count = 4;
  return s;
}
}  // namespace

TEST(Setting, CaseLayoutAndAggregates) {
  const auto r = evaluate_setting(small_phase(), 0.0, 5);
  ASSERT_EQ(r.cases.size(), 4u * 14u);
  EXPECT_EQ(r.cases[15].state_label, "ket1");
  EXPECT_NEAR(r.cases[15].angle, kPi / 2, 1e-15);
  std::vector<double> f;
  for (const auto& c : r.cases) f.push_back(c.result.F_mean);
  EXPECT_DOUBLE_EQ(r.F_mean, mean_of(f));
  EXPECT_DOUBLE_EQ(r.F_sd, sd_of(f));
  const double all = r.mean_F_where([](const TrialCase&) { return true; });
  EXPECT_DOUBLE_EQ(all, r.F_mean);
}

TEST(Setting, WorkerCountDoesNotChangeResults) {
  const auto a = evaluate_setting(small_phase(), 0.3, 8, 1);
  const auto b = evaluate_setting(small_phase(), 0.3, 8, 3);
  ASSERT_EQ(a.cases.size(), b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) EXPECT_EQ(a.cases[i].result.p_out.probs, b.cases[i].result.p_out.probs);
  EXPECT_EQ(a.F_mean, b.F_mean);
}

TEST(Setting, CnotFamily) {
  Setting s;
  s.family = GateFamily::Cnot;
  s.tau_avr = 4;
  s.tau_sig = 20;
  s.steps_budget = 200;
  const auto r = evaluate_setting(s, 0.0, 2);
  ASSERT_EQ(r.cases.size(), 28u);
  int entangled = 0;
  for (const auto& c : r.cases) entangled += c.entangled;
  EXPECT_EQ(entangled, 8);
}

TEST(EtaSearch, PicksMinimumVarianceAndBreaksTiesLow) {
  const Setting s = small_phase();
  const std::vector<double> grid = {0.6, 0.0, 0.3};
  const auto a = optimize_eta(s, grid, 5);
  const auto b = optimize_eta(s, grid, 5);
  EXPECT_EQ(a.eta, b.eta);
  ASSERT_EQ(a.variances.size(), 3u);
  const double best = *std::min_element(a.variances.begin(), a.variances.end());
  EXPECT_EQ(a.variance, best);
  const std::vector<double> sorted = {0.0, 0.3, 0.6};
  for (std::size_t k = 0; k < 3; ++k)
    if (a.variances[k] == best) {
      EXPECT_EQ(a.eta, sorted[k]);
      break;
    }
  EXPECT_EQ(a.best.eta, a.eta);
  EXPECT_THROW(optimize_eta(s, {}, 5), ValidationError);

  const auto tie = optimize_eta(s, {0.0, 0.0}, 5);
  EXPECT_EQ(tie.eta, 0.0);
}

// With single-step averaging and no saturation memory the circuit is a
// one-step delay of the event stream followed by G, so gates that permute
// the event space (phase 0 and pi) reproduce the target up to sampling noise.
TEST(Setting, PermutationAnglesAreExact) {
  Setting s = small_phase();
  s.gamma = 0.0;
  s.tau_avr = 1;
  s.steps_budget = 20000;
  const auto r = evaluate_setting(s, 0.0, 9);
  for (const auto& c : r.cases) {
    const bool permutation = std::abs(c.angle) < 1e-12 || std::abs(c.angle - kPi) < 1e-12;
    if (permutation) EXPECT_GT(c.result.F_mean, 0.99) << c.state_label << ' ' << c.angle;
  }
}

// Lateral inhibition pays off at gamma = 1, sigma = 0: the variance of F at
// eta = 0 exceeds the variance at the optimum.
TEST(EtaSearch, OneQubitOptimumIsPositive) {
  Setting s;
  s.gamma = 1.0;
  s.sigma = 0.0;
  s.tau_sig = 30;
  s.tau_avr = 2;
  s.steps_budget = 3000;
  s.angle_count = 12;
  const auto r = optimize_eta(s, {0.0, 0.25, 0.5, 0.75, 1.0}, 12345);
  EXPECT_GT(r.eta, 0.0);
  EXPECT_GT(r.variances.front(), r.variance);
}
