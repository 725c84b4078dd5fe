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

// qneuro command-line driver.
//
//   qneuro verify
//   qneuro states -n 2
//   qneuro dump-circuit --gate cnot --tau-avr 4
//   qneuro trial --gate phase --angle 90 --angle-unit deg --state eq_k0
//   qneuro sweep --config configs/fig2c.cfg --out fig2c.csv --plot fig2c.svg
//   qneuro plot --csv fig2c.csv --out fig2c.svg
//
// Exit status: 0 success, 1 check failure or runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qneuro/circuits.hpp"
#include "qneuro/experiments.hpp"
#include "qneuro/sweep.hpp"
#include "qneuro/verify.hpp"

namespace {

using namespace qneuro;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double to_radians(double angle, const std::string& unit) { return unit == "deg" ? angle * kPi / 180.0 : angle; }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  return out;
}

// 4x4 gate operator for the one-qubit names, with the angle where needed.
GateOperator one_qubit_gate(const std::string& gate, double angle) {
  if (gate == "phase") return phase_gate_closed(angle);
  if (gate == "rot_theta") return gate_operator(builtin_gate("rot_theta", angle));
  return gate_operator(builtin_gate(gate));
}

struct CircuitOptions {
  std::string gate = "phase";
  double angle = 0;
  std::string unit = "rad";
  double gamma = 1, sigma = 0, eta = 0;
  std::optional<int> tau_avr;
  std::string normalization = "self";

  void add_to(CLI::App* app) {
    app->add_option("--gate", gate, "phase | identity | not | hadamard | rot_theta | antipode | cnot")
        ->check(CLI::IsMember({"phase", "identity", "not", "hadamard", "rot_theta", "antipode", "cnot"}));
    app->add_option("--angle", angle, "Rotation angle for phase / rot_theta");
    app->add_option("--angle-unit", unit, "Unit of --angle")->check(CLI::IsMember({"rad", "deg"}));
    app->add_option("--gamma", gamma, "Saturation level")->check(CLI::NonNegativeNumber);
    app->add_option("--sigma", sigma, "Activation noise SD")->check(CLI::NonNegativeNumber);
    app->add_option("--eta", eta, "Inhibition level")->check(CLI::NonNegativeNumber);
    app->add_option("--tau-avr", tau_avr, "Synaptic averaging length (default 2, or 4 for cnot)")
        ->check(CLI::PositiveNumber);
    app->add_option("--normalization", normalization, "self | printed")->check(CLI::IsMember({"self", "printed"}));
  }

  bool is_cnot() const { return gate == "cnot"; }
  double radians() const { return to_radians(angle, unit); }

  CircuitParams params() const {
    CircuitParams p;
    p.tau_avr = tau_avr.value_or(is_cnot() ? 4 : 2);
    p.eta = eta;
    p.neuron = {sigma, gamma};
    p.normalization = normalization == "self" ? NormalizationForm::SelfConsistent : NormalizationForm::Printed;
    return p;
  }

  GateOperator gate_operator_() const { return is_cnot() ? cnot_closed() : one_qubit_gate(gate, radians()); }

  WiredCircuit build() const {
    return is_cnot() ? build_cnot_circuit(params()) : build_one_qubit_circuit(gate_operator_(), params());
  }

  std::string describe() const {
    std::ostringstream os;
    const auto p = params();
    os << "gate=" << gate;
    if (!is_cnot()) os << " angle_rad=" << std::setprecision(10) << radians();
    os << " gamma=" << gamma << " sigma=" << sigma << " eta=" << eta << " tau_avr=" << p.tau_avr
       << " normalization=" << normalization;
    return os.str();
  }
};

int cmd_verify(double perturb) {
  const Povm povm = perturb != 0 ? perturbed_povm(perturb) : default_povm();
  const auto checks = run_verify_checks(povm);
  std::size_t failed = 0;
  std::printf("%-34s %-12s %-12s %s\n", "check", "max_dev", "tolerance", "status");
  for (const auto& c : checks) {
    std::printf("%-34s %-12.3e %-12.3e %s\n", c.name.c_str(), c.deviation, c.tolerance, c.passed() ? "ok" : "FAIL");
    if (!c.passed()) ++failed;
  }
  std::printf("%zu checks, %zu failed\n", checks.size(), failed);
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_states(int n) {
  const auto set = test_states(n);
  std::cout << "# " << set.states.size() << " test states, n=" << n << "\n";
  std::cout << "label,entangled,R";
  for (std::size_t z = 0; z < pow4(n); ++z) {
    std::cout << ",p_";
    for (int b = 2 * n - 1; b >= 0; --b) std::cout << ((z >> b) & 1);
  }
  std::cout << '\n' << std::setprecision(10);
  for (const auto& s : set.states) {
    const Distribution p = embed(s.state);
    std::cout << s.label << ',' << (s.entangled ? 1 : 0) << ',' << coherence(p);
    for (double x : p.probs) std::cout << ',' << x;
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_dump(const CircuitOptions& opt, const std::string& out_path) {
  const WiredCircuit c = opt.build();
  std::ostringstream counts;
  counts << "nodes=" << c.spec.vertex_count() << " logical_nodes=" << c.logical_node_count
         << " edges=" << c.spec.edges.size() << " tau_gate=" << c.tau_gate << " reference_nodes=" << c.reference_nodes
         << " reference_edges=" << c.reference_edges;
  const std::vector<std::string> header = {"seed=none config=" + opt.describe(), counts.str()};
  if (out_path.empty() || out_path == "-") {
    write_network(std::cout, c.spec, header);
  } else {
    auto out = open_output(out_path);
    write_network(out, c.spec, header);
  }
  return kExitOk;
}

int cmd_trial(const CircuitOptions& opt, const std::string& state_label, int tau_sig, std::size_t budget,
              std::uint64_t seed) {
  const int n = opt.is_cnot() ? 2 : 1;
  const auto set = test_states(n);
  const TestState* chosen = nullptr;
  for (const auto& s : set.states)
    if (s.label == state_label) chosen = &s;
  if (!chosen) throw UsageError("unknown state '" + state_label + "' for n=" + std::to_string(n) + " (see `states`)");
  const WiredCircuit c = opt.build();
  const GateOperator g = opt.gate_operator_();
  const TrialResult r = run_trial(c, g, embed(chosen->state), TrialConfig{tau_sig, budget}, seed);
  std::cout << "# seed=" << seed << " config=" << opt.describe() << " state=" << state_label << " tau_sig=" << tau_sig
            << " steps=" << budget << '\n';
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "F = " << r.F_mean << "  (segment SD " << r.F_sd << ")\n";
  std::cout << "R = " << r.R_mean << "  (segment SD " << r.R_sd << ")\n";
  std::cout << "alpha = " << r.alpha_mean * 180.0 / kPi << " deg\n";
  std::cout << "segments = " << r.segments << '\n';
  std::cout << "p_out =";
  std::cout << std::setprecision(5);
  for (double x : r.p_out.probs) std::cout << ' ' << x;
  std::cout << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, const std::string& plot_path,
              std::optional<std::uint64_t> seed, unsigned workers) {
  SweepConfig cfg = load_sweep_config(config_path);
  if (seed) cfg.master_seed = *seed;
  const auto rows = sweep(cfg, workers, [](std::size_t done, std::size_t total) {
    std::cerr << "point " << done << "/" << total << " done\n";
  });
  const std::string header = "seed=" + std::to_string(cfg.master_seed) + " config=" + config_path + " " + cfg.describe();
  if (out_path.empty() || out_path == "-") {
    write_sweep_csv(std::cout, rows, header);
  } else {
    auto out = open_output(out_path);
    write_sweep_csv(out, rows, header);
  }
  if (!plot_path.empty()) {
    auto svg = open_output(plot_path);
    write_sweep_svg(svg, rows, header);
  }
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw UsageError("cannot read '" + csv_path + "'");
  std::string first;
  std::getline(in, first);
  // Carry the CSV's own seed/config header into the plot.
  const std::string header = first.rfind("# ", 0) == 0 ? first.substr(2) : "seed=unknown config=" + csv_path;
  in.seekg(0);
  const auto rows = read_sweep_csv(in);
  auto out = open_output(out_path);
  write_sweep_svg(out, rows, header);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qneuro: quantum gates on integrate-and-fire spiking networks"};
  app.require_subcommand(1);

  double perturb = 0;
  auto* verify = app.add_subcommand("verify", "Run the algebraic self-checks");
  verify->add_option("--perturb-povm", perturb, "Negative control: perturb the POVM by this amount")->group("");

  int states_n = 1;
  auto* states = app.add_subcommand("states", "Print the test-state catalog with embedded distributions");
  states->add_option("-n", states_n, "Number of qubits")->check(CLI::IsMember({1, 2}));

  CircuitOptions dump_opt;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-circuit", "Write a circuit as an edge list");
  dump_opt.add_to(dump);
  dump->add_option("-o,--out", dump_out, "Output file (default stdout)");

  CircuitOptions trial_opt;
  std::string trial_state = "ket0";
  int trial_tau_sig = 30;
  std::size_t trial_budget = 10000;
  std::uint64_t trial_seed = kDefaultSeed;
  auto* trial = app.add_subcommand("trial", "Run one gate on one test state and print F, R, alpha");
  trial_opt.add_to(trial);
  trial->add_option("--state", trial_state, "Test-state label (see `states`)");
  trial->add_option("--tau-sig", trial_tau_sig, "Steps per segment")->check(CLI::PositiveNumber);
  trial->add_option("--steps", trial_budget, "Post-transient step budget")->check(CLI::PositiveNumber);
  trial->add_option("--seed", trial_seed, "Master seed (default " + std::to_string(kDefaultSeed) + ")");

  std::string sweep_config, sweep_out, sweep_plot;
  std::optional<std::uint64_t> sweep_seed;
  unsigned workers = default_workers();
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a configured parameter sweep and write CSV");
  sweep_cmd->add_option("--config", sweep_config, "Sweep configuration file")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output (default stdout)");
  sweep_cmd->add_option("--plot", sweep_plot, "Also write an SVG plot here");
  sweep_cmd->add_option("--seed", sweep_seed, "Override the configured master seed");
  sweep_cmd->add_option("--workers", workers, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "Draw an SVG from a sweep CSV");
  plot->add_option("--csv", plot_csv, "Sweep CSV")->required();
  plot->add_option("--out", plot_out, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(perturb);
    if (*states) return cmd_states(states_n);
    if (*dump) return cmd_dump(dump_opt, dump_out);
    if (*trial) {
      if (trial_budget < static_cast<std::size_t>(trial_tau_sig)) throw UsageError("--steps must be >= --tau-sig");
      return cmd_trial(trial_opt, trial_state, trial_tau_sig, trial_budget, trial_seed);
    }
    if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_out, sweep_plot, sweep_seed, workers);
    if (*plot) return cmd_plot(plot_csv, plot_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
