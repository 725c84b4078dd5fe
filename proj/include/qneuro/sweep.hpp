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

// Parameter sweeps: a plain-text configuration, the sweep driver, CSV
// output, and a small SVG line plot of the results.
//
// Configuration format, one `key = value` per line, '#' starts a comment:
//
//   name      = fig2c
//   gate      = phase            # phase | cnot
//   gamma     = 1                # list: 0, 0.5, 1  or range 0:2:0.25
//   sigma     = 0
//   tau_sig   = 1, 2, 5, 10, 20, 30, 50
//   tau_avr   = 2
//   steps     = 10000            # post-transient steps per trial
//   angles    = 36               # phase gate only
//   eta       = auto             # default grid, or a list / range
//   seed      = 12345
//   per_case  = false            # also emit one row per (angle, state)
//   normalization = self         # self | printed
//
// Lists may mix single values and inclusive ranges `a:b:step`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qneuro/error.hpp"
#include "qneuro/experiments.hpp"

namespace qneuro {

inline constexpr std::uint64_t kDefaultSeed = 12345;

struct SweepConfig {
  std::string name = "sweep";
  GateFamily family = GateFamily::Phase;
  std::vector<double> gamma_list{1.0};
  std::vector<double> sigma_list{0.0};
  std::vector<int> tau_sig_list{30};
  int tau_avr = 2;
  std::size_t steps_budget = 10000;
  int angle_count = 36;
  std::vector<double> eta_grid = default_eta_grid();
  std::uint64_t master_seed = kDefaultSeed;
  bool per_case = false;
  NormalizationForm normalization = NormalizationForm::SelfConsistent;

  void validate() const {
    if (gamma_list.empty() || sigma_list.empty() || tau_sig_list.empty() || eta_grid.empty())
      throw ValidationError("SweepConfig: parameter lists must be nonempty");
    for (double g : gamma_list)
      if (!(g >= 0)) throw ValidationError("SweepConfig: gamma must be >= 0");
    for (double s : sigma_list)
      if (!(s >= 0)) throw ValidationError("SweepConfig: sigma must be >= 0");
    for (double e : eta_grid)
      if (!(e >= 0)) throw ValidationError("SweepConfig: eta must be >= 0");
    for (int t : tau_sig_list) {
      if (t < 1) throw ValidationError("SweepConfig: tau_sig must be >= 1");
      if (steps_budget < static_cast<std::size_t>(t)) throw ValidationError("SweepConfig: steps must be >= tau_sig");
    }
    if (tau_avr < 1) throw ValidationError("SweepConfig: tau_avr must be >= 1");
    if (angle_count < 1) throw ValidationError("SweepConfig: angles must be >= 1");
  }

  // One-line description for output headers.
  std::string describe() const {
    std::ostringstream os;
    auto list = [&](const char* key, const auto& v) {
      os << ' ' << key << '=';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    };
    os << "name=" << name << " gate=" << to_string(family);
    list("gamma", gamma_list);
    list("sigma", sigma_list);
    list("tau_sig", tau_sig_list);
    os << " tau_avr=" << tau_avr << " steps=" << steps_budget << " angles=" << angle_count;
    list("eta", eta_grid);
    os << " per_case=" << (per_case ? "true" : "false")
       << " normalization=" << (normalization == NormalizationForm::SelfConsistent ? "self" : "printed");
    return os.str();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& tok, const std::function<void(const std::string&)>& fail) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail("not a number: '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) fail("not a number: '" + tok + "'");
  return v;
}

// Comma/space separated values and inclusive ranges a:b:step.
inline std::vector<double> parse_list(const std::string& text, const std::function<void(const std::string&)>& fail) {
  std::vector<double> out;
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  std::string tok;
  while (is >> tok) {
    if (tok.find(':') == std::string::npos) {
      out.push_back(parse_number(tok, fail));
      continue;
    }
    std::vector<std::string> parts;
    std::stringstream ps(tok);
    std::string part;
    while (std::getline(ps, part, ':')) parts.push_back(part);
    if (parts.size() != 3) fail("range must be a:b:step, got '" + tok + "'");
    const double a = parse_number(parts[0], fail), b = parse_number(parts[1], fail), step = parse_number(parts[2], fail);
    if (!(step > 0)) fail("range step must be positive");
    if (b < a) fail("range end is below its start");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(a + static_cast<double>(k) * step);
  }
  if (out.empty()) fail("empty list");
  return out;
}

}  // namespace detail

inline SweepConfig parse_sweep_config(std::istream& is) {
  SweepConfig cfg;
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  auto fail_at = [&](const std::string& what) -> void {
    throw ValidationError("config line " + std::to_string(lineno) + ": " + what);
  };
  const std::function<void(const std::string&)> fail = fail_at;
  auto integer = [&](double v, const char* key) {
    if (v != std::floor(v)) fail(std::string(key) + " must be an integer");
    return static_cast<long long>(v);
  };
  auto single = [&](const std::vector<double>& v, const char* key) {
    if (v.size() != 1) fail(std::string(key) + " takes a single value");
    return v.front();
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key");
    if (value.empty()) fail("missing value for '" + key + "'");
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

    if (key == "name") {
      if (value.find_first_of(" \t,") != std::string::npos) fail("name must not contain spaces or commas");
      cfg.name = value;
    } else if (key == "gate") {
      if (value == "phase") cfg.family = GateFamily::Phase;
      else if (value == "cnot") cfg.family = GateFamily::Cnot;
      else fail("gate must be 'phase' or 'cnot'");
    } else if (key == "gamma") {
      cfg.gamma_list = detail::parse_list(value, fail);
    } else if (key == "sigma") {
      cfg.sigma_list = detail::parse_list(value, fail);
    } else if (key == "tau_sig") {
      cfg.tau_sig_list.clear();
      for (double v : detail::parse_list(value, fail)) cfg.tau_sig_list.push_back(static_cast<int>(integer(v, "tau_sig")));
    } else if (key == "tau_avr") {
      cfg.tau_avr = static_cast<int>(integer(single(detail::parse_list(value, fail), "tau_avr"), "tau_avr"));
    } else if (key == "steps") {
      const auto v = integer(single(detail::parse_list(value, fail), "steps"), "steps");
      if (v < 1) fail("steps must be positive");
      cfg.steps_budget = static_cast<std::size_t>(v);
    } else if (key == "angles") {
      cfg.angle_count = static_cast<int>(integer(single(detail::parse_list(value, fail), "angles"), "angles"));
    } else if (key == "eta") {
      cfg.eta_grid = value == "auto" ? default_eta_grid() : detail::parse_list(value, fail);
    } else if (key == "seed") {
      const auto v = integer(single(detail::parse_list(value, fail), "seed"), "seed");
      if (v < 0) fail("seed must be nonnegative");
      cfg.master_seed = static_cast<std::uint64_t>(v);
    } else if (key == "per_case") {
      if (value == "true") cfg.per_case = true;
      else if (value == "false") cfg.per_case = false;
      else fail("per_case must be 'true' or 'false'");
    } else if (key == "normalization") {
      if (value == "self") cfg.normalization = NormalizationForm::SelfConsistent;
      else if (value == "printed") cfg.normalization = NormalizationForm::Printed;
      else fail("normalization must be 'self' or 'printed'");
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config '" + path + "'");
  return parse_sweep_config(in);
}

// One CSV row. Aggregate rows carry angle and state_label "all".
struct SweepRow {
  std::string sweep;
  double gamma = 0, sigma = 0;
  int tau_sig = 0, tau_avr = 0;
  double eta = 0;
  std::string angle = "all";
  std::string state_label = "all";
  double F_mean = 0, F_sd = 0, R_mean = 0, R_sd = 0, alpha_deg = 0;
  std::size_t segments = 0;
  std::uint64_t seed = 0;
};

inline const char* kSweepCsvHeader =
    "sweep,gamma,sigma,tau_sig,tau_avr,eta,angle,state_label,F_mean,F_sd,R_mean,R_sd,alpha_deg,segments,seed";

// Runs every (gamma, sigma, tau_sig) point of the configuration. With more
// than one eta value the grid is searched for minimum F variance at each
// point; a single value is used as given. `progress` is called after each
// point with (done, total).
inline std::vector<SweepRow> sweep(const SweepConfig& cfg, unsigned workers = 1,
                                   const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  cfg.validate();
  std::vector<SweepRow> rows;
  const std::size_t total = cfg.gamma_list.size() * cfg.sigma_list.size() * cfg.tau_sig_list.size();
  std::size_t done = 0;
  for (double gamma : cfg.gamma_list)
    for (double sigma : cfg.sigma_list)
      for (int tau_sig : cfg.tau_sig_list) {
        Setting s;
        s.family = cfg.family;
        s.gamma = gamma;
        s.sigma = sigma;
        s.tau_sig = tau_sig;
        s.tau_avr = cfg.tau_avr;
        s.steps_budget = cfg.steps_budget;
        s.angle_count = cfg.angle_count;
        s.normalization = cfg.normalization;
        const SettingResult r = cfg.eta_grid.size() == 1
                                    ? evaluate_setting(s, cfg.eta_grid.front(), cfg.master_seed, workers)
                                    : optimize_eta(s, cfg.eta_grid, cfg.master_seed, workers).best;
        SweepRow base;
        base.sweep = cfg.name;
        base.gamma = gamma;
        base.sigma = sigma;
        base.tau_sig = tau_sig;
        base.tau_avr = cfg.tau_avr;
        base.eta = r.eta;
        base.seed = cfg.master_seed;
        base.segments = r.cases.empty() ? 0 : r.cases.front().result.segments;

        SweepRow agg = base;
        agg.F_mean = r.F_mean;
        agg.F_sd = r.F_sd;
        agg.R_mean = r.R_mean;
        agg.R_sd = r.R_sd;
        agg.alpha_deg = r.alpha_mean * 180.0 / kPi;
        rows.push_back(agg);
        if (cfg.per_case)
          for (const auto& c : r.cases) {
            SweepRow row = base;
            std::ostringstream a;
            a << std::setprecision(10) << c.angle;
            row.angle = a.str();
            row.state_label = c.state_label;
            row.F_mean = c.result.F_mean;
            row.F_sd = c.result.F_sd;
            row.R_mean = c.result.R_mean;
            row.R_sd = c.result.R_sd;
            row.alpha_deg = c.result.alpha_mean * 180.0 / kPi;
            rows.push_back(row);
          }
        ++done;
        if (progress) progress(done, total);
      }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& header_comment) {
  os << "# " << header_comment << '\n' << kSweepCsvHeader << '\n';
  std::ostringstream line;
  line << std::setprecision(10);
  for (const auto& r : rows) {
    line.str("");
    line << r.sweep << ',' << r.gamma << ',' << r.sigma << ',' << r.tau_sig << ',' << r.tau_avr << ',' << r.eta << ','
         << r.angle << ',' << r.state_label << ',' << r.F_mean << ',' << r.F_sd << ',' << r.R_mean << ',' << r.R_sd
         << ',' << r.alpha_deg << ',' << r.segments << ',' << r.seed;
    os << line.str() << '\n';
  }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kSweepCsvHeader) throw ValidationError("csv line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 15) throw ValidationError("csv line " + std::to_string(lineno) + ": expected 15 fields");
    try {
      SweepRow r;
      r.sweep = f[0];
      r.gamma = std::stod(f[1]);
      r.sigma = std::stod(f[2]);
      r.tau_sig = std::stoi(f[3]);
      r.tau_avr = std::stoi(f[4]);
      r.eta = std::stod(f[5]);
      r.angle = f[6];
      r.state_label = f[7];
      r.F_mean = std::stod(f[8]);
      r.F_sd = std::stod(f[9]);
      r.R_mean = std::stod(f[10]);
      r.R_sd = std::stod(f[11]);
      r.alpha_deg = std::stod(f[12]);
      r.segments = static_cast<std::size_t>(std::stoull(f[13]));
      r.seed = std::stoull(f[14]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw ValidationError("csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header) throw ValidationError("csv: missing header");
  return rows;
}

// SVG plot of the aggregate rows: F with a +-SD band and R as a dashed
// line, against whichever of gamma, sigma, tau_sig varies most.
inline void write_sweep_svg(std::ostream& os, const std::vector<SweepRow>& all_rows, const std::string& header_comment) {
  std::vector<SweepRow> rows;
  for (const auto& r : all_rows)
    if (r.angle == "all" && r.state_label == "all") rows.push_back(r);
  if (rows.empty()) throw ValidationError("plot: no aggregate rows to draw");

  std::set<double> gs, ss, ts;
  for (const auto& r : rows) {
    gs.insert(r.gamma);
    ss.insert(r.sigma);
    ts.insert(r.tau_sig);
  }
  std::string xname = "gamma";
  std::function<double(const SweepRow&)> xof = [](const SweepRow& r) { return r.gamma; };
  if (ss.size() > gs.size() && ss.size() >= ts.size()) {
    xname = "sigma";
    xof = [](const SweepRow& r) { return r.sigma; };
  } else if (ts.size() > gs.size() && ts.size() > ss.size()) {
    xname = "tau_sig";
    xof = [](const SweepRow& r) { return static_cast<double>(r.tau_sig); };
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepRow& a, const SweepRow& b) { return xof(a) < xof(b); });

  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  double xmin = xof(rows.front()), xmax = xof(rows.back());
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  double ymax = 1.0;
  for (const auto& r : rows) ymax = std::max({ymax, r.F_mean + r.F_sd, r.R_mean});
  ymax = std::ceil(ymax * 4) / 4;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<!-- " << header_comment << " -->\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymax * k / 4;
    o << "<text x=\"" << L - 8 << "\" y=\"" << py(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << y << "</text>\n";
    const double x = xmin + (xmax - xmin) * k / 4;
    o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << x
      << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"13\" text-anchor=\"middle\">" << xname
    << "</text>\n";

  o << "<polygon class=\"F-band\" fill=\"#4a7bd0\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
  for (const auto& r : rows) o << px(xof(r)) << ',' << py(std::max(0.0, r.F_mean + r.F_sd)) << ' ';
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    o << px(xof(*it)) << ',' << py(std::max(0.0, it->F_mean - it->F_sd)) << ' ';
  o << "\"/>\n";
  o << "<polyline class=\"F\" fill=\"none\" stroke=\"#1f4fa0\" stroke-width=\"2\" points=\"";
  for (const auto& r : rows) o << px(xof(r)) << ',' << py(r.F_mean) << ' ';
  o << "\"/>\n";
  o << "<polyline class=\"R\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6,4\" points=\"";
  for (const auto& r : rows) o << px(xof(r)) << ',' << py(r.R_mean) << ' ';
  o << "\"/>\n";
  o << "<text x=\"" << W - R - 90 << "\" y=\"" << T + 4 << "\" font-size=\"12\" fill=\"#1f4fa0\">F (band: SD)</text>\n";
  o << "<text x=\"" << W - R - 90 << "\" y=\"" << T + 20 << "\" font-size=\"12\" fill=\"#c0392b\">R</text>\n";
  o << "</svg>\n";
  os << o.str();
}

}  // namespace qneuro
