#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/knowledge.hpp"
#include "toposym/randomness.hpp"

namespace toposym {

// ==== Run outcomes ====

enum class RunStatus { Decided, Timeout, StuckAtGcd };

std::string to_string(RunStatus s);

// One row of a run trace. output is -1 while a party has not decided.
struct TraceRecord {
  int round = 0;
  int party = 0;
  int class_id = 0;
  std::string state;
  int output = -1;
};

nlohmann::json trace_to_json(const TraceRecord& r);

// Result of one protocol run. outputs[p] is -1 (undecided), 0 or 1.
// final_classes are the knowledge classes at the last executed round,
// including everything the protocol itself communicated; outputs must be
// constant on them.
struct ProtocolRun {
  RunStatus status = RunStatus::Timeout;
  int rounds_used = 0;
  int leader = -1;
  // first round whose consistency classes already contained a singleton
  // (the decision is announced one round later)
  int decision_basis_round = -1;
  std::vector<int> outputs;
  std::vector<int> final_classes;
  // active group size multisets at each matching-phase boundary
  std::vector<std::vector<int>> group_size_history;
  std::vector<TraceRecord> trace;
};

// parties with equal final knowledge produced equal outputs
bool audit_name_independence(const ProtocolRun& run);

// ==== Blackboard leader election ====

// Every round all parties post their history; as soon as the previous
// round's classes contain a singleton, the singleton party with the
// lexicographically smallest bit string wins. With every source feeding
// one party and n >= 2 this decides in 2 rounds at best; with a single
// shared source it never decides.
ProtocolRun run_blackboard_le(const RandomnessConfiguration& alpha, uint64_t seed,
                              int max_rounds, bool record_trace = false);

// ==== CreateMatching ====

// Matching between two disjoint party sets over fixed ports. Each
// iteration: unmatched v1 members request a uniformly chosen active v2
// neighbour (bits come from their own source streams), v2 members ack
// the lowest requesting port, matched pairs broadcast done. The matching
// grows every iteration, so at most |v1| iterations run.
struct MatchingResult {
  std::vector<int> v1, v2;                    // after the |v1| <= |v2| swap
  std::vector<std::pair<int, int>> matching;  // (v1 member, v2 member)
  std::vector<bool> matched;                  // all parties
  bool timeout = false;
  int rounds_used = 0;
  int iterations = 0;
  std::vector<int> matching_sizes;  // |matching| after each iteration
  std::vector<TraceRecord> trace;
};

MatchingResult run_create_matching(const RandomnessConfiguration& alpha,
                                   const PortAssignment& ports, std::vector<int> v1,
                                   std::vector<int> v2, uint64_t seed, int max_rounds,
                                   bool record_trace = false);

// ==== GCD leader election ====

inline constexpr int kBootstrapRounds = 8;

// Exchange randomness for a bootstrap window, group parties by equal
// strings, then repeatedly match the two smallest groups and retire the
// matched members of the larger one (Euclid steps on group sizes) until
// a lone party remains. Groups that split later (their strings diverge)
// abort the running matching and the main phase restarts on the refined
// grouping. Reports StuckAtGcd when one multi-party group remains whose
// members share a source and so can never split.
ProtocolRun run_gcd_le(const RandomnessConfiguration& alpha, const PortAssignment& ports,
                       uint64_t seed, int max_rounds, bool record_trace = false,
                       int bootstrap_rounds = kBootstrapRounds);

// ==== Tasks through a leader ====

// Once a leader exists, any name-independent task is solved centrally:
// inputs flow to the leader, the leader computes and distributes.
struct CentralTask {
  enum class Kind { MaxValue, MLeaders };
  Kind kind = Kind::MaxValue;
  int m = 1;  // MLeaders only

  static CentralTask max_value() { return {Kind::MaxValue, 0}; }
  static CentralTask m_leaders(int m) { return {Kind::MLeaders, m}; }
};

struct TaskRun {
  RunStatus status = RunStatus::Timeout;
  int rounds_used = 0;
  int leader = -1;
  std::vector<std::string> outputs;  // empty string while undecided
};

// model picks the election protocol (blackboard or gcd over ports);
// MLeaders needs ports to address individual winners.
TaskRun run_task_by_leader(const Model& model, const RandomnessConfiguration& alpha,
                           const CentralTask& task, const std::vector<long long>& inputs,
                           uint64_t seed, int max_rounds);

// ==== Monte Carlo ====

struct TrialOutcome {
  bool success = false;
  int rounds = 0;
  std::string outcome;  // "decided", "timeout", "stuck_at_gcd", ...
  int leader = -1;
};

struct MonteCarloSummary {
  uint64_t trials = 0;
  uint64_t successes = 0;
  double success_rate = 0.0;
  int rounds_min = 0, rounds_median = 0, rounds_p99 = 0, rounds_max = 0;
  std::map<std::string, uint64_t> outcomes;
  std::map<int, uint64_t> leader_counts;

  nlohmann::json to_json() const;
};

// Trial i runs with derive_seed(seed, i); the summary is a pure function
// of (seed, trials, run_trial).
MonteCarloSummary monte_carlo(uint64_t trials, uint64_t seed,
                              const std::function<TrialOutcome(uint64_t)>& run_trial);

TrialOutcome trial_from_run(const ProtocolRun& run);

}  // namespace toposym
