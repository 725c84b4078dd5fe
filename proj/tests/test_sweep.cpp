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

#include <sstream>

#include "qneuro/sweep.hpp"

using namespace qneuro;

namespace {

SweepConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_sweep_config(is);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

SweepConfig tiny() {
  return parse(
      "name = tiny\n"
      "gamma = 0:1:0.5\n"
      "tau_sig = 10\n"
      "steps = 100\n"
      "angles = 2\n"
      "eta = 0, 0.4\n"
      "seed = 3\n");
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse("");
  EXPECT_EQ(c.master_seed, kDefaultSeed);
  EXPECT_EQ(c.family, GateFamily::Phase);
  EXPECT_EQ(c.eta_grid, default_eta_grid());
  EXPECT_EQ(c.eta_grid.size(), 41u);
  EXPECT_EQ(c.eta_grid.back(), 2.0);
}

TEST(Config, ListsRangesAndComments) {
  const auto c = parse(
      "# leading comment\n"
      "gate = cnot   # trailing comment\n"
      "gamma = 0:2:0.25\n"
      "sigma = 0 0.1, 0.2\n"
      "tau_sig = 1, 2, 5\n"
      "tau_avr = 4\n"
      "eta = auto\n"
      "per_case = true\n"
      "normalization = printed\n");
  EXPECT_EQ(c.family, GateFamily::Cnot);
  ASSERT_EQ(c.gamma_list.size(), 9u);
  EXPECT_DOUBLE_EQ(c.gamma_list[3], 0.75);
  EXPECT_DOUBLE_EQ(c.gamma_list.back(), 2.0);
  EXPECT_EQ(c.sigma_list, (std::vector<double>{0, 0.1, 0.2}));
  EXPECT_EQ(c.tau_sig_list, (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(c.tau_avr, 4);
  EXPECT_TRUE(c.per_case);
  EXPECT_EQ(c.normalization, NormalizationForm::Printed);
}

TEST(Config, RangeEndpointSurvivesRoundOff) {
  const auto c = parse("sigma = 0:0.3:0.1\n");
  ASSERT_EQ(c.sigma_list.size(), 4u);
  EXPECT_NEAR(c.sigma_list[3], 0.3, 1e-15);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(error_of("gamma = 1\n\nbogus line\n").find("config line 3"), std::string::npos);
  EXPECT_NE(error_of("colour = red\n").find("unknown key 'colour'"), std::string::npos);
  EXPECT_NE(error_of("gamma = 1\ngamma = 2\n").find("config line 2: duplicate key"), std::string::npos);
  EXPECT_NE(error_of("gamma = one\n").find("not a number"), std::string::npos);
  EXPECT_NE(error_of("tau_sig = 2.5\n").find("integer"), std::string::npos);
  EXPECT_NE(error_of("steps = 1, 2\n").find("single value"), std::string::npos);
  EXPECT_NE(error_of("gamma = 2:1:0.1\n").find("below its start"), std::string::npos);
  EXPECT_NE(error_of("gamma = 0:1\n").find("a:b:step"), std::string::npos);
  EXPECT_NE(error_of("gate = toffoli\n").find("'phase' or 'cnot'"), std::string::npos);
  EXPECT_NE(error_of("gamma =\n").find("missing value"), std::string::npos);
  EXPECT_NE(error_of("sigma = -0.1\n").find("sigma must be >= 0"), std::string::npos);
  EXPECT_NE(error_of("steps = 5\ntau_sig = 10\n").find("steps must be >= tau_sig"), std::string::npos);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_sweep_config("/nonexistent/qneuro.cfg"), Error); }

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "quick"}) {
    const auto c = load_sweep_config(std::string(QNEURO_SOURCE_DIR) + "/configs/" + name + ".cfg");
    EXPECT_NO_THROW(c.validate()) << name;
    if (std::string(name) != "quick") EXPECT_EQ(c.master_seed, kDefaultSeed) << name;
  }
}

TEST(Sweep, RowsAndDeterminism) {
  const auto cfg = tiny();
  std::size_t calls = 0;
  const auto a = sweep(cfg, 1, [&](std::size_t done, std::size_t total) {
    ++calls;
    EXPECT_EQ(total, 3u);
    EXPECT_EQ(done, calls);
  });
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(calls, 3u);
  for (const auto& r : a) {
    EXPECT_EQ(r.angle, "all");
    EXPECT_EQ(r.segments, 10u);
    EXPECT_EQ(r.seed, 3u);
    EXPECT_TRUE(r.eta == 0.0 || r.eta == 0.4);
  }
  const auto b = sweep(cfg, 2);
  std::ostringstream ca, cb;
  write_sweep_csv(ca, a, "seed=3");
  write_sweep_csv(cb, b, "seed=3");
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(Sweep, SingleEtaMatchesDirectEvaluation) {
  auto cfg = tiny();
  cfg.gamma_list = {1.0};
  cfg.eta_grid = {0.2};
  const auto rows = sweep(cfg);
  ASSERT_EQ(rows.size(), 1u);
  Setting s;
  s.gamma = 1.0;
  s.tau_sig = 10;
  s.steps_budget = 100;
  s.angle_count = 2;
  const auto direct = evaluate_setting(s, 0.2, 3);
  EXPECT_EQ(rows[0].F_mean, direct.F_mean);
  EXPECT_EQ(rows[0].R_mean, direct.R_mean);
  EXPECT_EQ(rows[0].eta, 0.2);
}

TEST(Sweep, PerCaseRows) {
  auto cfg = tiny();
  cfg.gamma_list = {0.5};
  cfg.eta_grid = {0.0};
  cfg.per_case = true;
  const auto rows = sweep(cfg);
  ASSERT_EQ(rows.size(), 1u + 2u * 14u);
  EXPECT_EQ(rows[1].state_label, "ket0");
  EXPECT_EQ(rows[1].angle, "0");
  EXPECT_EQ(rows[28].state_label, "dn_k3");
}

TEST(Csv, RoundTrip) {
  auto cfg = tiny();
  cfg.per_case = true;
  cfg.eta_grid = {0.1};
  const auto rows = sweep(cfg);
  std::stringstream ss;
  write_sweep_csv(ss, rows, "seed=3 config=tiny");
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# seed=3 config=tiny\n", 0), 0u);
  EXPECT_NE(text.find(std::string(kSweepCsvHeader) + "\n"), std::string::npos);
  const auto back = read_sweep_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].state_label, rows[i].state_label);
    EXPECT_EQ(back[i].angle, rows[i].angle);
    EXPECT_NEAR(back[i].F_mean, rows[i].F_mean, 1e-9);
    EXPECT_NEAR(back[i].R_sd, rows[i].R_sd, 1e-9);
    EXPECT_EQ(back[i].segments, rows[i].segments);
    EXPECT_EQ(back[i].seed, rows[i].seed);
  }
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_sweep_csv(bad_header), ValidationError);
  std::istringstream short_row(std::string(kSweepCsvHeader) + "\nq,1,2\n");
  EXPECT_THROW(read_sweep_csv(short_row), ValidationError);
}

TEST(Svg, ContainsBandAndCurves) {
  const auto rows = sweep(tiny());
  std::ostringstream os;
  write_sweep_svg(os, rows, "seed=3");
  const std::string svg = os.str();
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("class=\"F-band\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"R\""), std::string::npos);
  EXPECT_NE(svg.find(">gamma<"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
