#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/complex.hpp"
#include "toposym/knowledge.hpp"

namespace toposym {

// ==== Output complexes ====

// An input-free task for n parties: the allowed output assignments. Pure
// of dimension n-1 (every facet assigns a value to every name) and
// symmetric (closed under permuting values across names), so the task
// itself cannot distinguish parties.
class OutputComplex {
 public:
  // facets[f][p] = value of party p (0-indexed); validated for purity,
  // alphabet coverage and symmetry
  OutputComplex(int n, std::vector<Value> alphabet, std::vector<std::vector<Value>> facets);

  int n() const { return n_; }
  const std::vector<Value>& alphabet() const { return alphabet_; }
  const std::vector<std::vector<Value>>& facets() const { return facets_; }

  bool contains_assignment(const std::vector<Value>& values) const;
  ChromaticComplex to_complex() const;
  // project_pi of every facet, re-normalized
  ChromaticComplex projected() const;

 private:
  int n_;
  std::vector<Value> alphabet_;
  std::vector<std::vector<Value>> facets_;
};

// exactly one party outputs "1", the rest "0"
OutputComplex make_leader_election(int n);
// exactly m parties output "1"; m = n collapses to one facet
OutputComplex make_m_leader_election(int n, int m);

// {"n": int, "alphabet": [...], "facets": [[value per name, ...], ...]}
nlohmann::json output_complex_to_json(const OutputComplex& o);
OutputComplex output_complex_from_json(const nlohmann::json& j);

// ==== Solvability ====

// Witness for a realization solving a task: the chosen output facet and
// the value each consistency class decides.
struct TaskVerdict {
  bool solvable = false;
  std::optional<std::vector<Value>> facet;  // value per party
  std::map<int, Value> class_values;        // class index -> value

  explicit operator bool() const { return solvable; }
};

// A realization solves the task iff some output facet is constant on
// every consistency class; equivalently the unique name-preserving
// vertex map from the realization's consistency view into the projected
// facet is simplicial.
TaskVerdict solves_realization(const Model& model, const Realization& rho,
                               const OutputComplex& task);

// Global-state reading of the same question: some value assignment that
// depends on knowledge alone (never on names) lands in the task. Decided
// by searching value assignments per distinct structural knowledge term.
bool solves_global_state(const Model& model, const Realization& rho, const OutputComplex& task,
                         int cap = kStructuralDepthCap);

}  // namespace toposym
