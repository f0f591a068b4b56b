// Command line front end: decide eventual solvability, tabulate exact
// solvability curves, simulate protocols, export complexes.
//
// Exit codes: 0 solvable/ok, 1 invalid configuration, 2 unsolvable,
// 3 unknown (fixed ports with gcd > 1), 4 cap exceeded or, under
// --strict, timeout-dominated simulation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "toposym/analysis.hpp"
#include "toposym/protocols.hpp"

namespace {

using namespace toposym;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUnsolvable = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitCap = 4;

std::vector<int> parse_counts(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::pair<int, int> parse_range(const std::string& spec) {
  auto dots = spec.find("..");
  if (dots == std::string::npos) {
    int t = std::stoi(spec);
    return {t, t};
  }
  return {std::stoi(spec.substr(0, dots)), std::stoi(spec.substr(dots + 2))};
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write " + path.string());
  out << content;
}

RandomnessConfiguration load_alpha(const std::string& sources, const std::string& assignment) {
  if (!assignment.empty()) return config_from_json(load_json_file(assignment));
  if (!sources.empty()) return RandomnessConfiguration::from_counts(parse_counts(sources));
  throw InvalidConfig("need --sources or --assignment");
}

// resolves a --ports spec; adversarial ports rename parties into
// contiguous source groups, so the configuration is renamed with them
struct ResolvedPorts {
  RandomnessConfiguration alpha;
  PortAssignment ports;
  bool adversarial = false;
};

ResolvedPorts resolve_ports(const RandomnessConfiguration& alpha, const std::string& spec) {
  if (spec == "adversarial" || spec.empty()) {
    AdversarialPorts adv = adversarial_ports(alpha);
    std::vector<int> renamed(alpha.n());
    for (int i = 0; i < alpha.n(); ++i) renamed[i] = alpha.source_of(adv.party_order[i]);
    return {RandomnessConfiguration::from_source_of(renamed), adv.ports, true};
  }
  if (spec.rfind("random:", 0) == 0) {
    uint64_t seed = std::stoull(spec.substr(7));
    return {alpha, random_ports(alpha.n(), seed), false};
  }
  PortAssignment ports = ports_from_json(load_json_file(spec));
  if (ports.n() != alpha.n()) throw InvalidConfig("port table size does not match configuration");
  return {alpha, ports, false};
}

struct TaskSpec {
  std::string label;
  std::optional<OutputComplex> complex;  // unset for the "max" function task
  int m = 1;
};

TaskSpec load_task(const std::string& spec, int n) {
  if (spec == "le" || spec.empty()) return {"le", make_leader_election(n), 1};
  if (spec.rfind("mle:", 0) == 0) {
    int m = std::stoi(spec.substr(4));
    return {"mle:" + std::to_string(m), make_m_leader_election(n, m), m};
  }
  if (spec == "max") return {"max", std::nullopt, 0};
  return {spec, output_complex_from_json(load_json_file(spec)), 0};
}

// ==== decide ====

int cmd_decide(const std::string& model, const std::string& sources,
               const std::string& assignment, const std::string& ports_spec) {
  RandomnessConfiguration alpha = load_alpha(sources, assignment);
  EventualVerdict v;
  if (model == "blackboard") {
    v = decide_blackboard(alpha);
  } else if (ports_spec == "adversarial" || ports_spec.empty()) {
    v = decide_message_passing_worst_case(alpha);
  } else {
    resolve_ports(alpha, ports_spec);  // reject malformed port tables up front
    int g = alpha.gcd_counts();
    if (g == 1) {
      v = {true, "gcd=1"};
    } else {
      // gcd > 1 rules out only the adversarial table; any fixed table may
      // still break symmetry eventually, which this tool does not decide
      std::cout << "unknown (fixed ports, gcd=" << g << ")\n";
      return kExitUnknown;
    }
  }
  std::cout << (v.solvable ? "solvable (" : "unsolvable (") << v.criterion << ")\n";
  return v.solvable ? kExitOk : kExitUnsolvable;
}

// ==== analyze ====

int cmd_analyze(const std::string& model, const std::string& sources,
                const std::string& assignment, const std::string& ports_spec,
                const std::string& task_spec, const std::string& range,
                const std::string& out_dir, int cap) {
  RandomnessConfiguration alpha = load_alpha(sources, assignment);
  auto [t_from, t_to] = parse_range(range);
  Model m = Model::blackboard();
  if (model == "mp") {
    ResolvedPorts rp = resolve_ports(alpha, ports_spec);
    alpha = rp.alpha;
    m = Model::message_passing(rp.ports);
  }
  TaskSpec task = load_task(task_spec, alpha.n());
  if (!task.complex) throw InvalidConfig("analyze needs an output complex task");
  SolvabilityCurve curve =
      solvability_curve(m, alpha, *task.complex, task.label, t_from, t_to, cap);
  std::string csv = curve.to_csv();
  std::cout << csv;
  std::filesystem::path dir(out_dir);
  write_file(dir / "curve.csv", csv);
  write_file(dir / "curve.json", curve.to_json().dump(2) + "\n");
  return kExitOk;
}

// ==== simulate ====

int cmd_simulate(const std::string& model, std::string protocol, const std::string& sources,
                 const std::string& assignment, const std::string& ports_spec,
                 const std::string& task_spec, const std::string& inputs_csv, uint64_t trials,
                 uint64_t seed, int max_rounds, const std::string& out_dir, bool trace,
                 bool strict) {
  RandomnessConfiguration alpha = load_alpha(sources, assignment);
  if (protocol.empty()) protocol = model == "mp" ? "gcd-le" : "bb-le";
  if (max_rounds <= 0) max_rounds = 50 * alpha.n();

  std::optional<ResolvedPorts> rp;
  if (protocol != "bb-le" && (model == "mp" || protocol == "gcd-le" || protocol == "matching")) {
    rp = resolve_ports(alpha, ports_spec);
    alpha = rp->alpha;
  }

  MonteCarloSummary summary;
  nlohmann::json extra;
  if (protocol == "bb-le") {
    summary = monte_carlo(trials, seed, [&](uint64_t s) {
      return trial_from_run(run_blackboard_le(alpha, s, max_rounds));
    });
    if (trace) {
      ProtocolRun run = run_blackboard_le(alpha, derive_seed(seed, 0), max_rounds, true);
      std::string lines;
      for (const auto& r : run.trace) lines += trace_to_json(r).dump() + "\n";
      write_file(std::filesystem::path(out_dir) / "trace.jsonl", lines);
    }
  } else if (protocol == "gcd-le") {
    summary = monte_carlo(trials, seed, [&](uint64_t s) {
      return trial_from_run(run_gcd_le(alpha, rp->ports, s, max_rounds));
    });
    if (trace) {
      ProtocolRun run = run_gcd_le(alpha, rp->ports, derive_seed(seed, 0), max_rounds, true);
      std::string lines;
      for (const auto& r : run.trace) lines += trace_to_json(r).dump() + "\n";
      write_file(std::filesystem::path(out_dir) / "trace.jsonl", lines);
      nlohmann::json hist = nlohmann::json::array();
      for (const auto& sizes : run.group_size_history) hist.push_back(sizes);
      extra["group_sizes_trial0"] = std::move(hist);
    }
  } else if (protocol == "matching") {
    if (alpha.k() < 2) throw InvalidConfig("matching: need at least two sources");
    auto groups = alpha.source_groups();
    summary = monte_carlo(trials, seed, [&](uint64_t s) {
      MatchingResult res =
          run_create_matching(alpha, rp->ports, groups[0], groups[1], s, max_rounds);
      TrialOutcome t;
      t.rounds = res.rounds_used;
      t.outcome = res.timeout ? "timeout" : "decided";
      t.success = !res.timeout &&
                  res.matching.size() == std::min(groups[0].size(), groups[1].size());
      return t;
    });
  } else if (protocol == "task-by-leader") {
    TaskSpec task = load_task(task_spec, alpha.n());
    std::vector<long long> inputs(alpha.n(), 0);
    if (!inputs_csv.empty()) {
      auto vals = parse_counts(inputs_csv);
      if (static_cast<int>(vals.size()) != alpha.n())
        throw InvalidConfig("--inputs needs one value per party");
      inputs.assign(vals.begin(), vals.end());
    }
    CentralTask ct = task.label == "max" ? CentralTask::max_value()
                                         : CentralTask::m_leaders(task.m);
    Model m = model == "mp" ? Model::message_passing(rp->ports) : Model::blackboard();
    summary = monte_carlo(trials, seed, [&](uint64_t s) {
      TaskRun run = run_task_by_leader(m, alpha, ct, inputs, s, max_rounds);
      TrialOutcome t;
      t.rounds = run.rounds_used;
      t.outcome = to_string(run.status);
      t.success = run.status == RunStatus::Decided;
      t.leader = run.leader;
      return t;
    });
    TaskRun first = run_task_by_leader(m, alpha, ct, inputs, derive_seed(seed, 0), max_rounds);
    extra["outputs_trial0"] = first.outputs;
  } else {
    throw InvalidConfig("unknown protocol " + protocol);
  }

  nlohmann::json j = summary.to_json();
  j["protocol"] = protocol;
  j["seed"] = seed;
  j["max_rounds"] = max_rounds;
  j["source_counts"] = alpha.source_counts();
  for (auto& [key, val] : extra.items()) j[key] = val;
  write_file(std::filesystem::path(out_dir) / "summary.json", j.dump(2) + "\n");
  std::cout << "protocol=" << protocol << " trials=" << summary.trials
            << " success_rate=" << summary.success_rate
            << " rounds_median=" << summary.rounds_median << "\n";

  uint64_t timeouts = summary.outcomes.count("timeout") ? summary.outcomes.at("timeout") : 0;
  if (strict && 2 * timeouts >= trials && trials > 0) return kExitCap;
  return kExitOk;
}

// ==== complex ====

int cmd_complex_pi_output(const std::string& task_spec, int n, const std::string& out_dir) {
  TaskSpec task = load_task(task_spec, n);
  if (!task.complex) throw InvalidConfig("pi-output needs an output complex task");
  ChromaticComplex projected = task.complex->projected();
  std::string dot = export_dot(projected);
  std::cout << dot;
  if (!out_dir.empty()) {
    write_file(std::filesystem::path(out_dir) / "pi_output.dot", dot);
    write_file(std::filesystem::path(out_dir) / "pi_output.json",
               complex_to_json(projected).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_complex_pi_tilde(const std::string& model, const std::string& strings_csv,
                         const std::string& sources, const std::string& assignment,
                         const std::string& ports_spec, const std::string& out_dir) {
  Realization rho;
  std::stringstream ss(strings_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) rho.strings.push_back(tok);
  if (rho.strings.empty()) throw InvalidConfig("pi-tilde: need --strings");
  for (const auto& s : rho.strings) {
    if (s.size() != rho.strings[0].size()) throw InvalidConfig("pi-tilde: ragged strings");
    for (char c : s)
      if (c != '0' && c != '1') throw InvalidConfig("pi-tilde: bits must be 0/1");
  }
  Model m = Model::blackboard();
  if (model == "mp") {
    RandomnessConfiguration alpha =
        sources.empty() && assignment.empty()
            ? RandomnessConfiguration::from_counts(std::vector<int>(rho.strings.size(), 1))
            : load_alpha(sources, assignment);
    ResolvedPorts rp = resolve_ports(alpha, ports_spec);
    m = Model::message_passing(rp.ports);
  }
  ChromaticComplex c = project_pi_tilde(m, rho);
  std::string dot = export_dot(c);
  std::cout << dot;
  if (!out_dir.empty()) {
    write_file(std::filesystem::path(out_dir) / "pi_tilde.dot", dot);
    write_file(std::filesystem::path(out_dir) / "pi_tilde.json",
               complex_to_json(c).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_complex_realizations(int n, int t, const std::string& sources,
                             const std::string& assignment, const std::string& out_dir,
                             int cap) {
  RandomnessConfiguration alpha =
      sources.empty() && assignment.empty()
          ? RandomnessConfiguration::from_counts(std::vector<int>(n, 1))
          : load_alpha(sources, assignment);
  nlohmann::json list = nlohmann::json::array();
  for_each_consistent(alpha, t, [&](const Realization& rho) {
    list.push_back(realization_to_json(rho));
  }, cap);
  std::cout << list.size() << " realizations\n";
  for (const auto& r : list) std::cout << r.dump() << "\n";
  if (!out_dir.empty())
    write_file(std::filesystem::path(out_dir) / "realizations.json", list.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topological analysis of randomized symmetry breaking"};
  app.require_subcommand(1);

  std::string model = "blackboard", sources, assignment, ports_spec = "adversarial";
  std::string task_spec = "le", range = "1..3", out_dir = ".", protocol, strings_csv, inputs_csv;
  uint64_t trials = 1, seed = 0;
  int cap = kDefaultEnumerationCap, max_rounds = 0, n = 0, t = 1;
  bool trace = false, strict = false;

  auto add_common = [&](CLI::App* cmd, bool with_ports) {
    cmd->add_option("--model", model, "blackboard or mp");
    cmd->add_option("--sources", sources, "source counts, e.g. 1,2,2");
    cmd->add_option("--assignment", assignment, "configuration json file");
    if (with_ports) cmd->add_option("--ports", ports_spec, "adversarial | random:SEED | file.json");
  };

  CLI::App* decide = app.add_subcommand("decide", "eventual solvability of leader election");
  add_common(decide, true);

  CLI::App* analyze = app.add_subcommand("analyze", "exact solvability curve over a time range");
  add_common(analyze, true);
  analyze->add_option("--task", task_spec, "le | mle:M | file.json");
  analyze->add_option("--t", range, "time range A..B or single T");
  analyze->add_option("--out", out_dir, "output directory");
  analyze->add_option("--cap", cap, "enumeration cap on t*k");

  CLI::App* simulate = app.add_subcommand("simulate", "seeded protocol runs");
  add_common(simulate, true);
  simulate->add_option("--protocol", protocol, "bb-le | gcd-le | matching | task-by-leader");
  simulate->add_option("--task", task_spec, "task-by-leader: max | mle:M");
  simulate->add_option("--inputs", inputs_csv, "task-by-leader: one integer per party");
  simulate->add_option("--trials", trials, "number of trials");
  simulate->add_option("--seed", seed, "master seed; trial i uses derive_seed(seed, i)");
  simulate->add_option("--max-rounds", max_rounds, "round budget (default 50*n)");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--trace", trace, "write trace.jsonl for trial 0");
  simulate->add_flag("--strict", strict, "exit 4 when at least half the trials time out");

  // complex subcommands write files only when --out is given
  std::string complex_out;
  CLI::App* complex_cmd = app.add_subcommand("complex", "export complexes");
  CLI::App* pi_output = complex_cmd->add_subcommand("pi-output", "projected output complex");
  pi_output->add_option("--task", task_spec, "le | mle:M | file.json");
  pi_output->add_option("--n", n, "number of parties")->required();
  pi_output->add_option("--out", complex_out, "output directory");
  CLI::App* pi_tilde = complex_cmd->add_subcommand("pi-tilde", "consistency view of a realization");
  pi_tilde->add_option("--model", model, "blackboard or mp");
  pi_tilde->add_option("--strings", strings_csv, "per-party bit strings, e.g. 01,01,11")->required();
  pi_tilde->add_option("--sources", sources, "source counts (mp port construction)");
  pi_tilde->add_option("--assignment", assignment, "configuration json file");
  pi_tilde->add_option("--ports", ports_spec, "adversarial | random:SEED | file.json");
  pi_tilde->add_option("--out", complex_out, "output directory");
  CLI::App* realizations = complex_cmd->add_subcommand("realizations", "enumerate realizations");
  realizations->add_option("--n", n, "number of parties (independent sources)");
  realizations->add_option("--t", t, "rounds");
  realizations->add_option("--sources", sources, "source counts");
  realizations->add_option("--assignment", assignment, "configuration json file");
  realizations->add_option("--out", complex_out, "output directory");
  realizations->add_option("--cap", cap, "enumeration cap on t*k");
  complex_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }

  try {
    if (decide->parsed()) return cmd_decide(model, sources, assignment, ports_spec);
    if (analyze->parsed())
      return cmd_analyze(model, sources, assignment, ports_spec, task_spec, range, out_dir, cap);
    if (simulate->parsed())
      return cmd_simulate(model, protocol, sources, assignment, ports_spec, task_spec,
                          inputs_csv, trials, seed, max_rounds, out_dir, trace, strict);
    if (complex_cmd->parsed()) {
      if (pi_output->parsed()) return cmd_complex_pi_output(task_spec, n, complex_out);
      if (pi_tilde->parsed())
        return cmd_complex_pi_tilde(model, strings_csv, sources, assignment, ports_spec,
                                    complex_out);
      if (realizations->parsed())
        return cmd_complex_realizations(n, t, sources, assignment, complex_out, cap);
    }
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
