#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/errors.hpp"

namespace toposym {

// Values are opaque byte strings compared bytewise. Bit strings, output
// symbols and serialized knowledge terms all travel through this type.
using Value = std::string;

// Deterministic short label for a value: printable values pass through,
// anything else collapses to an fnv1a-64 hex digest.
std::string value_digest(const Value& v);

// ==== Vertices and simplices ====

// A coloured vertex: party name in [1..n] plus a value.
struct Vertex {
  int name = 0;
  Value value;

  auto operator<=>(const Vertex&) const = default;
};

// A chromatic simplex: nonempty vertex set with pairwise distinct names,
// kept sorted by name. dimension() == size-1; a single vertex has
// dimension 0 (an isolated vertex, the shape of broken symmetry).
class Simplex {
 public:
  explicit Simplex(std::vector<Vertex> vertices);

  int dimension() const { return static_cast<int>(vertices_.size()) - 1; }
  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  bool has_vertex(const Vertex& v) const;
  // true iff other's vertex set is a subset of this one's
  bool contains(const Simplex& other) const;

  auto operator<=>(const Simplex&) const = default;

 private:
  std::vector<Vertex> vertices_;
};

// ==== Complexes ====

// A chromatic simplicial complex on names [1..n], stored as its facets.
// Facets form an antichain sorted canonically; membership of any simplex
// is "subset of some facet" so downward closure is implicit.
class ChromaticComplex {
 public:
  ChromaticComplex(int n, std::vector<Simplex> facets);

  int n() const { return n_; }
  const std::vector<Simplex>& facets() const { return facets_; }
  size_t facet_count() const { return facets_.size(); }

  bool has_simplex(const Simplex& s) const;
  bool has_vertex(const Vertex& v) const;
  // sorted, de-duplicated union of all facet vertex sets
  std::vector<Vertex> vertex_set() const;
  // distinct unordered vertex pairs that share a facet (the 1-skeleton)
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  // every facet of this complex is a simplex of other
  bool is_subcomplex_of(const ChromaticComplex& other) const;

  bool operator==(const ChromaticComplex&) const = default;

 private:
  int n_;
  std::vector<Simplex> facets_;
};

// ==== Consistency projection ====

// Splits a facet into its maximal same-value parts: vertices of sigma
// grouped by equal value, one facet per group.
ChromaticComplex project_pi(const Simplex& sigma, int n);

// Union of project_pi over all facets, re-normalized to an antichain.
ChromaticComplex project_pi_complex(const ChromaticComplex& k);

// ==== Simplicial maps ====

using VertexMap = std::map<Vertex, Vertex>;

// True iff vertex_map is name-preserving and carries every facet of src
// onto a simplex of dst. Throws MapIncomplete if some src vertex is
// unmapped.
bool check_simplicial_map(const ChromaticComplex& src,
                          const ChromaticComplex& dst,
                          const VertexMap& vertex_map);

// The only name-preserving vertex map src -> dst, when dst has exactly
// one vertex per name occurring in src; nullopt if some name is missing
// or ambiguous.
std::optional<VertexMap> unique_name_preserving_map(
    const std::vector<Vertex>& src_vertices,
    const std::vector<Vertex>& dst_vertices);

// ==== Serialization ====

// {"n": int, "facets": [[{"name": int, "value": hex}, ...], ...]}
nlohmann::json complex_to_json(const ChromaticComplex& k);
ChromaticComplex complex_from_json(const nlohmann::json& j);

// Graphviz rendering of the 1-skeleton, vertices labeled name:digest,
// deterministic node and edge order.
std::string export_dot(const ChromaticComplex& k);

std::string hex_encode(const Value& v);
Value hex_decode(const std::string& hex);

}  // namespace toposym
