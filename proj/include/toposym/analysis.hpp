#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/rational.hpp"
#include "toposym/tasks.hpp"

namespace toposym {

// ==== Exact solvability probability ====

// Probability mass of the realizations of length t that solve the task,
// summed exactly: (number of solving source draws) / 2^(t*k).
Rational exact_probability(const Model& model, const RandomnessConfiguration& alpha,
                           const OutputComplex& task, int t,
                           int cap = kDefaultEnumerationCap);

// ==== Eventual solvability ====

struct EventualVerdict {
  bool solvable = false;
  std::string criterion;  // human-readable reason, e.g. "n_1=1" or "gcd=2"
};

// Blackboard leader election succeeds with probability -> 1 iff some
// source feeds exactly one party.
EventualVerdict decide_blackboard(const RandomnessConfiguration& alpha);

// Message passing with worst-case (adversarially chosen) ports: leader
// election is eventually solvable iff gcd(n_1..n_k) = 1.
EventualVerdict decide_message_passing_worst_case(const RandomnessConfiguration& alpha);

// ==== Bounds ====

struct BlackboardBounds {
  Rational sharp;  // ((2^t - 1) / 2^t)^(k-1)
  Rational crude;  // 1 - (k-1)/2^t, may be <= 0
};

// Lower bounds on the blackboard leader election probability when some
// n_i = 1: the lone party's string is unique with probability sharp.
BlackboardBounds blackboard_lower_bound(int k, int t);

// ==== Succession audit ====

// Solving is monotone: once a realization solves, all its one-round
// extensions solve. Checks every consistent realization up to length t.
struct SuccessionViolation {
  Realization base;
  Realization extension;
};

struct SuccessionReport {
  uint64_t solving_checked = 0;
  uint64_t extensions_checked = 0;
  std::vector<SuccessionViolation> violations;
  bool ok() const { return violations.empty(); }
};

SuccessionReport succession_check(const Model& model, const RandomnessConfiguration& alpha,
                                  const OutputComplex& task, int t,
                                  int cap = kDefaultEnumerationCap);

// ==== Divisibility audit ====

// Under adversarial ports every consistency class size is a multiple of
// g = gcd(n_1..n_k), at every time up to t and for every consistent
// realization. size_histogram[time][class size] counts occurrences.
struct DivisibilityReport {
  int g = 1;
  std::map<int, std::map<int, uint64_t>> size_histogram;
  uint64_t violations = 0;
  bool ok() const { return violations == 0; }
};

DivisibilityReport divisibility_audit(const RandomnessConfiguration& alpha, int t,
                                      int cap = kDefaultEnumerationCap);

// ==== Solvability curves ====

struct CurveRow {
  int t = 0;
  Rational probability;
  uint64_t solving = 0;
  uint64_t total = 0;
};

struct SolvabilityCurve {
  std::string model;
  std::vector<int> source_counts;
  std::string task;
  std::vector<CurveRow> rows;

  // header t,numerator,denominator,solving_count,total_count
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

SolvabilityCurve solvability_curve(const Model& model, const RandomnessConfiguration& alpha,
                                   const OutputComplex& task, const std::string& task_label,
                                   int t_from, int t_to, int cap = kDefaultEnumerationCap);

}  // namespace toposym
