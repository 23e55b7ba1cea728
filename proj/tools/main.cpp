// Copyright 2026 The Surplus Auctions Authors
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

// Experiment and verification CLI. Subcommands:
//   solve       welfare + VCG payments for an instance file
//   mechanism   run a configured mechanism, print the exact distribution
//   audit       truthfulness / rationality probes over random instances
//   verify      inequality checks over random instances (one JSON line each)
//   experiment  Monte-Carlo estimation and ratio sweeps (CSV)
// Exit codes: 0 ok, 1 validation failure, 2 check failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "surplus/experiments.hpp"
#include "surplus/instance_io.hpp"

using namespace surplus;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;

struct OutputSink {
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text << "\n";
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write output file: " + path);
    out << text << "\n";
  }
};

MechanismConfig config_from_flags(const std::string& config_path, const std::string& name,
                                  std::optional<int> r, const std::string& q,
                                  const std::string& subroutine, bool bayesian) {
  MechanismConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    config = parse_mechanism_config(buffer.str());
  } else {
    nlohmann::json j;
    j["mechanism"] = name;
    config = parse_mechanism_config(j.dump());
  }
  if (r) config.r = *r;
  if (!q.empty()) config.q = parse_rational(q);
  if (!subroutine.empty()) {
    if (subroutine == "unit_demand") {
      config.subroutine = SubroutineKind::unit_demand;
    } else if (subroutine == "multi_unit") {
      config.subroutine = SubroutineKind::multi_unit;
    } else {
      throw std::invalid_argument("unknown subroutine: " + subroutine);
    }
  }
  if (bayesian) config.bayesian_preset = true;
  return config;
}

Instance pair_instance(const std::string& values) {
  const auto comma = values.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("expected two comma-separated values");
  Instance inst;
  inst.kind = Kind::indivisible;
  inst.m = 1;
  inst.agents = {Valuation{UnitDemand{{std::stod(values.substr(0, comma))}}},
                 Valuation{UnitDemand{{std::stod(values.substr(comma + 1))}}}};
  return inst;
}

Instance audit_instance(const MechanismConfig& config, int n, int m, CounterRng& rng) {
  switch (config.mechanism) {
    case MechanismKind::restricted_capacity:
      return random_instance_divisible(n, m, rng);
    case MechanismKind::two_agent_optimal:
      return random_instance_unit_demand(2, 1, rng);
    case MechanismKind::two_agent_bundle:
      return random_instance_explicit(2, std::min(m, 3), rng);
    default:
      if (config.subroutine && *config.subroutine == SubroutineKind::multi_unit)
        return random_instance_multi_unit(n, m, rng);
      return random_instance_unit_demand(n, m, rng);
  }
}

int run_solve(const std::string& instance_path, bool allow_nonstandard, int copies,
              double capacity, const OutputSink& sink) {
  const Instance inst = load_instance(instance_path, allow_nonstandard);
  const Outcome outcome = run_vcg(inst, SupplyParams{copies, capacity});
  sink.write(outcome_json(outcome));
  return 0;
}

int run_mechanism_cmd(const MechanismConfig& config, const std::string& instance_path,
                      const std::string& values, bool allow_nonstandard,
                      const OutputSink& sink) {
  Instance inst;
  if (!values.empty()) {
    inst = pair_instance(values);
  } else if (!instance_path.empty()) {
    inst = load_instance(instance_path, allow_nonstandard);
  } else {
    throw std::invalid_argument("mechanism needs --instance or --values");
  }
  const MechanismDistribution dist = run_mechanism(config, inst);
  const SurplusReport report = expected_surplus(dist, inst);
  nlohmann::json out;
  out["distribution"] = nlohmann::json::parse(distribution_json(dist));
  out["report"] = nlohmann::json::parse(surplus_report_json(report));
  sink.write(out.dump());
  return 0;
}

int run_audit(const MechanismConfig& config, int instances, int deviations, int n, int m,
              std::uint64_t seed, const OutputSink& sink) {
  std::string lines;
  bool all_pass = true;
  for (int idx = 0; idx < instances; ++idx) {
    CounterRng rng(seed ^ (0x9e3779b97f4a7c15ull * (idx + 1)));
    const Instance inst = audit_instance(config, n, m, rng);
    const auto mechanism = [&](const Instance& i) { return run_mechanism(config, i); };
    AuditReport report = audit_tie(mechanism, mechanism_kind_name(config.mechanism), inst,
                                   deviations, seed + idx);
    if (!audit_epir(mechanism(inst), inst)) report.pass = false;
    all_pass = all_pass && report.pass;
    lines += audit_report_json(report) + "\n";
  }
  if (!lines.empty()) lines.pop_back();
  sink.write(lines);
  return all_pass ? 0 : kExitCheckFailed;
}

int run_verify(const std::string& check, int instances, std::uint64_t seed, long long trials,
               const OutputSink& sink) {
  std::string lines;
  bool all_pass = true;
  const auto emit = [&](const std::string& name, const std::string& digest,
                        const CheckResult& r) {
    all_pass = all_pass && r.pass;
    lines += check_line_json(name, digest, r) + "\n";
  };

  if (check == "binomial-identity") {
    CounterRng rng(seed);
    for (int n = 1; n <= 8; ++n) {
      for (int m = 1; m <= 8; ++m) {
        double sum = 0.0, sq = 0.0;
        for (long long t = 0; t < trials; ++t) {
          int others = 0;
          for (int i = 0; i + 1 < n; ++i)
            if (rng.uniform01() <= 1.0 / m) ++others;
          const double x = 1.0 / (1.0 + others);
          sum += x;
          sq += x * x;
        }
        const double mean = sum / trials;
        const double se = std::sqrt(std::max(0.0, sq / trials - mean * mean) / trials);
        CheckResult r;
        r.lhs = mean;
        r.rhs = binomial_inverse_expectation(n, m);
        r.pass = std::abs(r.lhs - r.rhs) <= 3.0 * se + 1e-9;
        emit(check, "n" + std::to_string(n) + "m" + std::to_string(m), r);
      }
    }
  } else {
    for (int idx = 0; idx < instances; ++idx) {
      CounterRng rng(seed ^ (0x9e3779b97f4a7c15ull * (idx + 1)));
      if (check == "surplus-lower-bound") {
        const int n = rng.uniform_int(1, 5);
        const int m = rng.uniform_int(1, 5);
        const int r = rng.uniform_int(0, 3);
        if (idx % 2 == 0) {
          const Instance inst = random_instance_unit_demand(n, m, rng);
          emit(check, instance_digest(inst),
               verify_surplus_lower_bound(inst, r, Rational(1, 1), SubroutineKind::unit_demand));
        } else {
          const Instance inst = random_instance_multi_unit(n, m, rng);
          emit(check, instance_digest(inst),
               verify_surplus_lower_bound(inst, r, Rational(1, 2), SubroutineKind::multi_unit));
        }
      } else if (check == "copies-payment") {
        const int n = rng.uniform_int(1, 4);
        const int m = rng.uniform_int(1, 4);
        const Instance inst = idx % 2 == 0 ? random_instance_unit_demand(n, m, rng)
                                           : random_instance_multi_unit(n, m, rng);
        emit(check, instance_digest(inst),
             verify_copies_payment_claim(inst, rng.uniform_int(0, 2)));
      } else if (check == "divisible-payment") {
        const Instance inst = random_instance_divisible(3, rng.uniform_int(1, 2), rng);
        emit(check, instance_digest(inst),
             verify_divisible_payment_claim(inst, idx % 2 == 0 ? 0.25 : 0.5));
      } else {
        throw std::invalid_argument("unknown check: " + check);
      }
    }
  }
  if (!lines.empty()) lines.pop_back();
  sink.write(lines);
  return all_pass ? 0 : kExitCheckFailed;
}

int run_experiment(const MechanismConfig& config, const std::string& family_str, int n, int m,
                   const std::vector<int>& n_list, long long trials, std::uint64_t seed,
                   const std::string& format, const OutputSink& sink) {
  const Family family = family_from_name(family_str);
  if (!n_list.empty()) {
    std::string csv = ratio_sweep(config, family, n_list, m, trials, seed);
    if (!csv.empty() && csv.back() == '\n') csv.pop_back();
    sink.write(csv);
    return 0;
  }
  GeneratorSpec spec;
  spec.family = family;
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  const ExperimentReport report = monte_carlo(config, spec, trials);
  if (format == "csv") {
    sink.write(experiment_csv_header() + "\n" + experiment_csv_row(n, m, report));
  } else {
    nlohmann::json j;
    j["trials"] = report.trials;
    j["mean_surplus"] = report.mean_surplus;
    j["se_surplus"] = report.se_surplus;
    j["ci_surplus"] = report.ci_surplus();
    j["mean_welfare"] = report.mean_welfare;
    j["se_welfare"] = report.se_welfare;
    j["ci_welfare"] = report.ci_welfare();
    if (report.has_G) {
      j["mean_G"] = report.mean_G;
      j["se_G"] = report.se_G;
      j["ci_G"] = report.ci_G();
    }
    j["ratio"] = report.ratio;
    sink.write(j.dump());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consumer-surplus auction toolbox"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  long long trials = 10000;
  OutputSink sink;
  std::string format = "json";
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--trials", trials, "trials / samples per estimate")->capture_default_str();
  app.add_option("--out", sink.path, "write output to a file instead of stdout");
  app.add_option("--format", format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string instance_path;
  std::string config_path;
  std::string mechanism_name = "vcg_copies";
  std::string values;
  std::string q_text;
  std::string subroutine;
  std::string check = "surplus-lower-bound";
  std::string family = "exp_single_item";
  bool allow_nonstandard = false;
  bool bayesian = false;
  std::optional<int> r_opt;
  int copies = 1;
  double capacity = 1.0;
  int instances = 100;
  int deviations = 20;
  int n = 2;
  int m = 1;
  std::vector<int> n_list;

  CLI::App* solve = app.add_subcommand("solve", "welfare + VCG payments for an instance");
  solve->add_option("--instance", instance_path, "instance JSON file")->required();
  solve->add_flag("--allow-nonstandard", allow_nonstandard,
                  "load instances that fail class validation");
  solve->add_option("--copies", copies, "copies per item (indivisible)");
  solve->add_option("--capacity", capacity, "per-agent capacity (divisible)");

  CLI::App* mech = app.add_subcommand("mechanism", "run a mechanism, print its distribution");
  mech->add_option("--config", config_path, "mechanism config JSON file");
  mech->add_option("--mechanism", mechanism_name, "mechanism name when no config is given");
  mech->add_option("--instance", instance_path, "instance JSON file");
  mech->add_option("--values", values, "two comma-separated single-item values");
  mech->add_option("--r", r_opt, "copy/capacity level range");
  mech->add_option("--q", q_text, "serving probability as a rational, e.g. 1/2");
  mech->add_option("--subroutine", subroutine, "unit_demand or multi_unit");
  mech->add_flag("--bayesian-preset", bayesian, "use the prior-aware level range");
  mech->add_flag("--allow-nonstandard", allow_nonstandard,
                 "load instances that fail class validation");

  CLI::App* audit = app.add_subcommand("audit", "truthfulness and rationality probes");
  audit->add_option("--config", config_path, "mechanism config JSON file");
  audit->add_option("--mechanism", mechanism_name, "mechanism name when no config is given");
  audit->add_option("--instances", instances, "random instances to audit");
  audit->add_option("--deviations", deviations, "misreports per agent");
  audit->add_option("--n", n, "agents per generated instance");
  audit->add_option("--m", m, "items per generated instance");
  audit->add_option("--r", r_opt, "copy/capacity level range");
  audit->add_option("--q", q_text, "serving probability as a rational");
  audit->add_option("--subroutine", subroutine, "unit_demand or multi_unit");

  CLI::App* verify = app.add_subcommand("verify", "inequality checks over random instances");
  verify->add_option("--check", check,
                     "surplus-lower-bound | copies-payment | divisible-payment | "
                     "binomial-identity")
      ->required();
  verify->add_option("--instances", instances, "random instances to check");

  CLI::App* experiment = app.add_subcommand("experiment", "Monte-Carlo estimation");
  experiment->add_option("--config", config_path, "mechanism config JSON file");
  experiment->add_option("--mechanism", mechanism_name, "mechanism name when no config is given");
  experiment->add_option("--family", family,
                         "exp_single_item | iid_unit_demand | additive_divisible_lb | "
                         "single_item_interest_lb");
  experiment->add_option("--n", n, "agents");
  experiment->add_option("--m", m, "items");
  experiment->add_option("--n-list", n_list, "sweep over agent counts (CSV output)");
  experiment->add_option("--r", r_opt, "copy/capacity level range");
  experiment->add_option("--q", q_text, "serving probability as a rational");
  experiment->add_option("--subroutine", subroutine, "unit_demand or multi_unit");
  experiment->add_flag("--bayesian-preset", bayesian, "use the prior-aware level range");

  // global flags (--seed, --trials, --out, --format) may follow the
  // subcommand name
  for (CLI::App* sub : {solve, mech, audit, verify, experiment}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (solve->parsed()) return run_solve(instance_path, allow_nonstandard, copies, capacity, sink);
    const MechanismConfig config =
        config_from_flags(config_path, mechanism_name, r_opt, q_text, subroutine, bayesian);
    if (mech->parsed())
      return run_mechanism_cmd(config, instance_path, values, allow_nonstandard, sink);
    if (audit->parsed()) return run_audit(config, instances, deviations, n, m, seed, sink);
    if (verify->parsed()) return run_verify(check, instances, seed, trials, sink);
    if (experiment->parsed())
      return run_experiment(config, family, n, m, n_list, trials, seed, format, sink);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
