#include "toposym/tasks.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace toposym {

// ==== OutputComplex ====

OutputComplex::OutputComplex(int n, std::vector<Value> alphabet,
                             std::vector<std::vector<Value>> facets)
    : n_(n), alphabet_(std::move(alphabet)), facets_(std::move(facets)) {
  if (n < 1) throw InvalidConfig("output complex: n must be >= 1");
  std::set<Value> allowed(alphabet_.begin(), alphabet_.end());
  if (allowed.size() != alphabet_.size()) throw InvalidConfig("output complex: duplicate alphabet value");
  if (facets_.empty()) throw InvalidConfig("output complex: no facets");
  for (const auto& f : facets_) {
    if (static_cast<int>(f.size()) != n)
      throw InvalidArity("output complex: facet must assign a value to every name");
    for (const Value& v : f)
      if (!allowed.count(v)) throw InvalidConfig("output complex: value outside alphabet");
  }
  std::sort(facets_.begin(), facets_.end());
  facets_.erase(std::unique(facets_.begin(), facets_.end()), facets_.end());
  // symmetry: swapping any two parties' values stays inside the complex;
  // transposition closure gives closure under all permutations
  for (const auto& f : facets_) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (f[a] == f[b]) continue;
        std::vector<Value> swapped = f;
        std::swap(swapped[a], swapped[b]);
        if (!std::binary_search(facets_.begin(), facets_.end(), swapped))
          throw InvalidConfig("output complex: not symmetric under value permutation");
      }
    }
  }
}

bool OutputComplex::contains_assignment(const std::vector<Value>& values) const {
  return std::binary_search(facets_.begin(), facets_.end(), values);
}

ChromaticComplex OutputComplex::to_complex() const {
  std::vector<Simplex> fs;
  fs.reserve(facets_.size());
  for (const auto& f : facets_) {
    std::vector<Vertex> vs;
    vs.reserve(n_);
    for (int p = 0; p < n_; ++p) vs.push_back({p + 1, f[p]});
    fs.emplace_back(std::move(vs));
  }
  return {n_, std::move(fs)};
}

ChromaticComplex OutputComplex::projected() const { return project_pi_complex(to_complex()); }

OutputComplex make_leader_election(int n) { return make_m_leader_election(n, 1); }

OutputComplex make_m_leader_election(int n, int m) {
  if (m < 1 || m > n) throw InvalidConfig("m-leader election: need 1 <= m <= n");
  std::vector<std::vector<Value>> facets;
  // all n-choose-m placements of the m ones
  std::vector<int> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<Value> f(n, "0");
    for (int p : pick) f[p] = "1";
    facets.push_back(std::move(f));
    int i = m - 1;
    while (i >= 0 && pick[i] == n - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return {n, {"0", "1"}, std::move(facets)};
}

nlohmann::json output_complex_to_json(const OutputComplex& o) {
  nlohmann::json alphabet = nlohmann::json::array();
  for (const Value& v : o.alphabet()) alphabet.push_back(hex_encode(v));
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : o.facets()) {
    nlohmann::json row = nlohmann::json::array();
    for (const Value& v : f) row.push_back(hex_encode(v));
    facets.push_back(std::move(row));
  }
  return {{"n", o.n()}, {"alphabet", std::move(alphabet)}, {"facets", std::move(facets)}};
}

OutputComplex output_complex_from_json(const nlohmann::json& j) {
  std::vector<Value> alphabet;
  for (const auto& v : j.at("alphabet")) alphabet.push_back(hex_decode(v.get<std::string>()));
  std::vector<std::vector<Value>> facets;
  for (const auto& fj : j.at("facets")) {
    std::vector<Value> f;
    for (const auto& v : fj) f.push_back(hex_decode(v.get<std::string>()));
    facets.push_back(std::move(f));
  }
  return {j.at("n").get<int>(), std::move(alphabet), std::move(facets)};
}

// ==== Solvability ====

TaskVerdict solves_realization(const Model& model, const Realization& rho,
                               const OutputComplex& task) {
  if (rho.n() != task.n()) throw InvalidConfig("solves: party count mismatch");
  ConsistencyPartition part = refine(model, rho);
  for (const auto& facet : task.facets()) {
    bool ok = true;
    for (const auto& cls : part.classes) {
      for (size_t i = 1; i < cls.size() && ok; ++i)
        if (facet[cls[i]] != facet[cls[0]]) ok = false;
      if (!ok) break;
    }
    if (ok) {
      TaskVerdict verdict;
      verdict.solvable = true;
      verdict.facet = facet;
      for (size_t c = 0; c < part.classes.size(); ++c)
        verdict.class_values[static_cast<int>(c)] = facet[part.classes[c][0]];
      return verdict;
    }
  }
  return {};
}

bool solves_global_state(const Model& model, const Realization& rho, const OutputComplex& task,
                         int cap) {
  if (rho.n() != task.n()) throw InvalidConfig("solves: party count mismatch");
  std::vector<KnowledgeState> terms = evolve_structural(model, rho, cap);
  // group parties by structural term; a name-independent decision is a
  // value per distinct term
  std::map<std::string, std::vector<int>> by_term;
  for (int p = 0; p < rho.n(); ++p) by_term[terms[p].canonical()].push_back(p);
  std::vector<std::vector<int>> groups;
  groups.reserve(by_term.size());
  for (auto& [canon, members] : by_term) groups.push_back(std::move(members));

  const auto& alphabet = task.alphabet();
  size_t a = alphabet.size();
  uint64_t combos = 1;
  for (size_t i = 0; i < groups.size(); ++i) combos *= a;
  std::vector<Value> assignment(rho.n());
  for (uint64_t code = 0; code < combos; ++code) {
    uint64_t rest = code;
    for (const auto& g : groups) {
      const Value& v = alphabet[rest % a];
      rest /= a;
      for (int p : g) assignment[p] = v;
    }
    if (task.contains_assignment(assignment)) return true;
  }
  return false;
}

}  // namespace toposym
