#include "toposym/knowledge.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace toposym {

// ==== PortAssignment ====

PortAssignment::PortAssignment(int n, std::vector<std::vector<int>> target)
    : n_(n), target_(std::move(target)) {
  if (n < 1) throw InvalidConfig("ports: n must be >= 1");
  if (static_cast<int>(target_.size()) != n) throw InvalidConfig("ports: need one row per party");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(target_[i].size()) != n - 1)
      throw InvalidConfig("ports: row " + std::to_string(i) + " needs n-1 entries");
    for (int t : target_[i])
      if (t < 0 || t >= n) throw InvalidConfig("ports: target out of range");
  }
}

int PortAssignment::arrival_port(int receiver, int sender) const {
  for (int j = 1; j < n_; ++j)
    if (target(receiver, j) == sender) return j;
  throw InvalidConfig("ports: no port of " + std::to_string(receiver) + " reaches " +
                      std::to_string(sender));
}

bool validate_ports(const PortAssignment& p) {
  for (int i = 0; i < p.n(); ++i) {
    std::vector<bool> hit(p.n(), false);
    for (int j = 1; j < p.n(); ++j) {
      int t = p.target(i, j);
      if (t == i || hit[t]) return false;
      hit[t] = true;
    }
  }
  return true;
}

PortAssignment random_ports(int n, uint64_t seed) {
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int>& row = rows[i];
    for (int q = 0; q < n; ++q)
      if (q != i) row.push_back(q);
    uint64_t state = derive_seed(seed, static_cast<uint64_t>(i));
    for (size_t a = row.size(); a > 1; --a)
      std::swap(row[a - 1], row[splitmix64(state) % a]);
  }
  return {n, std::move(rows)};
}

nlohmann::json ports_to_json(const PortAssignment& p) {
  return {{"n", p.n()}, {"target", p.rows()}};
}

PortAssignment ports_from_json(const nlohmann::json& j) {
  PortAssignment p(j.at("n").get<int>(), j.at("target").get<std::vector<std::vector<int>>>());
  if (!validate_ports(p)) throw InvalidConfig("ports json: rows must be bijections");
  return p;
}

// ==== KnowledgeState ====

struct KnowledgeState::Node {
  std::shared_ptr<const Node> prev;
  int bit = -1;
  std::vector<KnowledgeState> received;
  int depth = 0;
  std::string canon;
};

KnowledgeState KnowledgeState::bottom() {
  static const auto kBottom = [] {
    auto node = std::make_shared<Node>();
    node->canon = "_";
    return node;
  }();
  KnowledgeState s;
  s.node_ = kBottom;
  return s;
}

KnowledgeState KnowledgeState::step(const KnowledgeState& prev, int bit,
                                    std::vector<KnowledgeState> received, ModelKind kind) {
  auto node = std::make_shared<Node>();
  node->prev = prev.node_;
  node->bit = bit;
  if (kind == ModelKind::Blackboard)
    std::sort(received.begin(), received.end());  // multiset in lex order
  node->received = std::move(received);
  node->depth = prev.depth() + 1;
  std::string canon = "(" + prev.canonical() + "|" + std::to_string(bit) + "|";
  canon += kind == ModelKind::Blackboard ? '{' : '(';
  for (size_t i = 0; i < node->received.size(); ++i) {
    if (i) canon += ',';
    canon += node->received[i].canonical();
  }
  canon += kind == ModelKind::Blackboard ? '}' : ')';
  canon += ')';
  node->canon = std::move(canon);
  KnowledgeState s;
  s.node_ = std::move(node);
  return s;
}

bool KnowledgeState::is_bottom() const { return node_->bit < 0; }
int KnowledgeState::depth() const { return node_->depth; }

KnowledgeState KnowledgeState::prev() const {
  if (is_bottom()) return bottom();
  KnowledgeState s;
  s.node_ = node_->prev;
  return s;
}

int KnowledgeState::bit() const { return node_->bit; }

const std::vector<KnowledgeState>& KnowledgeState::received() const { return node_->received; }

const std::string& KnowledgeState::canonical() const { return node_->canon; }

// ==== evolve_structural ====

std::vector<KnowledgeState> evolve_structural(const Model& model, const Realization& rho,
                                              int cap) {
  int n = rho.n();
  if (n < 1) throw InvalidConfig("evolve: no parties");
  if (rho.t() > cap)
    throw CapExceeded("structural knowledge at t=" + std::to_string(rho.t()) +
                      " exceeds depth cap " + std::to_string(cap));
  if (model.kind == ModelKind::MessagePassing) {
    if (!model.ports) throw InvalidConfig("evolve: message passing needs ports");
    if (model.ports->n() != n) throw InvalidConfig("evolve: port table size mismatch");
  }
  std::vector<KnowledgeState> states(n, KnowledgeState::bottom());
  for (int r = 1; r <= rho.t(); ++r) {
    std::vector<KnowledgeState> next;
    next.reserve(n);
    for (int p = 0; p < n; ++p) {
      std::vector<KnowledgeState> received;
      received.reserve(n - 1);
      if (model.kind == ModelKind::Blackboard) {
        for (int q = 0; q < n; ++q)
          if (q != p) received.push_back(states[q]);
      } else {
        for (int j = 1; j < n; ++j) received.push_back(states[model.ports->target(p, j)]);
      }
      next.push_back(KnowledgeState::step(states[p], rho.bit(p, r), std::move(received),
                                          model.kind));
    }
    states = std::move(next);
  }
  return states;
}

// ==== refine ====

bool ConsistencyPartition::has_singleton() const {
  return std::any_of(classes.begin(), classes.end(),
                     [](const std::vector<int>& c) { return c.size() == 1; });
}

bool ConsistencyPartition::refines(const ConsistencyPartition& other) const {
  for (const auto& c : classes) {
    for (size_t i = 1; i < c.size(); ++i)
      if (other.class_of[c[i]] != other.class_of[c[0]]) return false;
  }
  return true;
}

namespace {

ConsistencyPartition partition_from_ids(int t, const std::vector<int>& raw_ids) {
  int n = static_cast<int>(raw_ids.size());
  ConsistencyPartition part;
  part.t = t;
  part.class_of.assign(n, -1);
  std::map<int, int> relabel;  // raw id -> index ordered by smallest member
  for (int p = 0; p < n; ++p) {
    auto [it, fresh] = relabel.try_emplace(raw_ids[p], static_cast<int>(part.classes.size()));
    if (fresh) part.classes.emplace_back();
    part.class_of[p] = it->second;
    part.classes[it->second].push_back(p);
  }
  return part;
}

}  // namespace

std::vector<ConsistencyPartition> refine_history(const Model& model, const Realization& rho) {
  int n = rho.n();
  if (n < 1) throw InvalidConfig("refine: no parties");
  if (model.kind == ModelKind::MessagePassing) {
    if (!model.ports) throw InvalidConfig("refine: message passing needs ports");
    if (model.ports->n() != n) throw InvalidConfig("refine: port table size mismatch");
  }
  std::vector<ConsistencyPartition> history;
  std::vector<int> ids(n, 0);
  history.push_back(partition_from_ids(0, ids));
  for (int r = 1; r <= rho.t(); ++r) {
    // signature: own previous class, fresh bit, previous classes seen from
    // the others (sorted multiset on the blackboard, port tuple otherwise)
    std::map<std::tuple<int, int, std::vector<int>>, std::vector<int>> groups;
    for (int p = 0; p < n; ++p) {
      std::vector<int> seen;
      seen.reserve(n - 1);
      if (model.kind == ModelKind::Blackboard) {
        for (int q = 0; q < n; ++q)
          if (q != p) seen.push_back(ids[q]);
        std::sort(seen.begin(), seen.end());
      } else {
        for (int j = 1; j < n; ++j) seen.push_back(ids[model.ports->target(p, j)]);
      }
      groups[{ids[p], rho.bit(p, r), std::move(seen)}].push_back(p);
    }
    int next_id = 0;
    for (const auto& [sig, members] : groups) {
      for (int p : members) ids[p] = next_id;
      ++next_id;
    }
    history.push_back(partition_from_ids(r, ids));
  }
  return history;
}

ConsistencyPartition refine(const Model& model, const Realization& rho) {
  return refine_history(model, rho).back();
}

ChromaticComplex project_pi_tilde(const Model& model, const Realization& rho) {
  ConsistencyPartition part = refine(model, rho);
  std::vector<Simplex> facets;
  facets.reserve(part.classes.size());
  for (const auto& cls : part.classes) {
    std::vector<Vertex> vs;
    vs.reserve(cls.size());
    for (int p : cls) vs.push_back({p + 1, rho.strings[p]});
    facets.emplace_back(std::move(vs));
  }
  return {rho.n(), std::move(facets)};
}

// ==== Adversarial ports ====

std::vector<int> shift_map(int n, int g) {
  std::vector<int> f(n);
  for (int i = 0; i < n; ++i) f[i] = (i % g + 1) % g + (i / g) * g;
  return f;
}

AdversarialPorts adversarial_ports(const RandomnessConfiguration& alpha) {
  int n = alpha.n();
  int g = alpha.gcd_counts();

  // rename parties so source groups are contiguous and aligned to g
  std::vector<int> party_order;
  for (const auto& group : alpha.source_groups())
    party_order.insert(party_order.end(), group.begin(), group.end());

  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i].reserve(n - 1);
    for (int j = 1; j < n; ++j) {
      int block = (j + g - 1) / g;  // ceil(j/g)
      rows[i].push_back(((i + j) % g + (i / g) * g + block * g) % n);
    }
  }
  AdversarialPorts out{PortAssignment(n, std::move(rows)), std::move(party_order), g};

  if (!validate_ports(out.ports))
    throw InvalidConstruction("adversarial ports: some row is not a bijection");
  std::vector<int> f = shift_map(n, g);
  std::vector<int> renamed_source(n);
  for (int i = 0; i < n; ++i) renamed_source[i] = alpha.source_of(out.party_order[i]);
  for (int i = 0; i < n; ++i) {
    if (renamed_source[f[i]] != renamed_source[i])
      throw InvalidConstruction("adversarial ports: shift map crosses sources");
    for (int j = 1; j < n; ++j) {
      if (out.ports.target(f[i], j) != f[out.ports.target(i, j)])
        throw InvalidConstruction("adversarial ports: shift map is not an isomorphism");
    }
  }
  return out;
}

}  // namespace toposym
