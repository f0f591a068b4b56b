#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/complex.hpp"
#include "toposym/randomness.hpp"

namespace toposym {

// ==== Communication models ====

enum class ModelKind { Blackboard, MessagePassing };

// Per-party port tables on 0-indexed parties: target(i, j) is the party
// behind port j of party i, j in [1..n-1]. Every row is a bijection onto
// the other parties; rows at different parties are unrelated.
class PortAssignment {
 public:
  PortAssignment(int n, std::vector<std::vector<int>> target);

  int n() const { return n_; }
  int target(int party, int port) const { return target_[party][port - 1]; }
  const std::vector<std::vector<int>>& rows() const { return target_; }
  // the port of `receiver` whose edge comes from `sender`
  int arrival_port(int receiver, int sender) const;

  bool operator==(const PortAssignment&) const = default;

 private:
  int n_;
  std::vector<std::vector<int>> target_;
};

// every row a bijection onto [0..n-1] minus the row's party
bool validate_ports(const PortAssignment& p);

// uniformly shuffled rows, deterministic in seed
PortAssignment random_ports(int n, uint64_t seed);

// {"n": int, "target": [[int, ...], ...]}
nlohmann::json ports_to_json(const PortAssignment& p);
PortAssignment ports_from_json(const nlohmann::json& j);

struct Model {
  ModelKind kind;
  std::optional<PortAssignment> ports;  // required for MessagePassing

  static Model blackboard() { return {ModelKind::Blackboard, std::nullopt}; }
  static Model message_passing(PortAssignment p) { return {ModelKind::MessagePassing, std::move(p)}; }
};

// ==== Structural knowledge ====

// A full-information knowledge term: bottom at time 0, afterwards
// (previous own term, fresh bit, terms received from the others).
// Received terms are a lex-sorted multiset on the blackboard and a
// port-ordered tuple under message passing. Terms are compared by their
// canonical encoding; the time-t term embeds the time-(t-1) term.
class KnowledgeState {
 public:
  static KnowledgeState bottom();
  static KnowledgeState step(const KnowledgeState& prev, int bit,
                             std::vector<KnowledgeState> received, ModelKind kind);

  bool is_bottom() const;
  int depth() const;  // rounds absorbed
  KnowledgeState prev() const;
  int bit() const;
  const std::vector<KnowledgeState>& received() const;

  const std::string& canonical() const;
  bool operator==(const KnowledgeState& o) const { return canonical() == o.canonical(); }
  bool operator<(const KnowledgeState& o) const { return canonical() < o.canonical(); }

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

// Structural term growth is super-exponential in t; expansion past the
// cap throws CapExceeded.
inline constexpr int kStructuralDepthCap = 4;

// Literal knowledge recursion over a realization; index p of the result
// is party p's term after rho.t() rounds.
std::vector<KnowledgeState> evolve_structural(const Model& model, const Realization& rho,
                                              int cap = kStructuralDepthCap);

// ==== Consistency classes ====

// Partition of parties by equal knowledge after t rounds. class_of[p]
// indexes classes; classes hold ascending party ids and are ordered by
// smallest member.
struct ConsistencyPartition {
  int t = 0;
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;

  size_t count() const { return classes.size(); }
  bool same_class(int p, int q) const { return class_of[p] == class_of[q]; }
  bool has_singleton() const;
  // true iff every class of this partition is contained in one of other's
  bool refines(const ConsistencyPartition& other) const;
};

// Round-by-round signature refinement; equals the partition induced by
// evolve_structural term equality at every round, without materializing
// terms. No depth cap.
ConsistencyPartition refine(const Model& model, const Realization& rho);

// partitions after each of rounds 0..t
std::vector<ConsistencyPartition> refine_history(const Model& model, const Realization& rho);

// Vertices (party, its string), one facet per consistency class.
ChromaticComplex project_pi_tilde(const Model& model, const Realization& rho);

// ==== Adversarial ports ====

// the source-preserving shift on contiguously grouped parties:
// i = r + m*g -> (r+1 mod g) + m*g
std::vector<int> shift_map(int n, int g);

// Port tables that keep every shift orbit knowledge-uniform, so every
// consistency class size is a multiple of g = gcd of the source counts.
// Built on parties renamed to contiguous source groups; party_order maps
// the renamed index back to the original party. The construction audits
// itself (row bijectivity, shift equivariance) and throws
// InvalidConstruction if the audit fails.
struct AdversarialPorts {
  PortAssignment ports;
  std::vector<int> party_order;  // party_order[renamed] = original party
  int g = 1;
};

AdversarialPorts adversarial_ports(const RandomnessConfiguration& alpha);

}  // namespace toposym
