#include "doctest.h"

#include <nlohmann/json.hpp>

#include "toposym/complex.hpp"

using namespace toposym;

namespace {

Simplex sx(std::initializer_list<std::pair<int, const char*>> vs) {
  std::vector<Vertex> vertices;
  for (const auto& [name, value] : vs) vertices.push_back({name, value});
  return Simplex(std::move(vertices));
}

}  // namespace

// ==== values and vertices ====

TEST_CASE("value_digest keeps short printable values and hashes the rest") {
  CHECK(value_digest("01") == "01");
  CHECK(value_digest("leader") == "leader");
  CHECK(value_digest("") == "~");
  std::string binary("\x01\x02", 2);
  std::string d = value_digest(binary);
  CHECK(d.size() == 12);
  CHECK(d.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(value_digest(binary) == d);
}

TEST_CASE("simplex sorts by name and rejects malformed vertex sets") {
  Simplex s = sx({{3, "a"}, {1, "b"}, {2, "c"}});
  CHECK(s.vertices()[0].name == 1);
  CHECK(s.vertices()[2].name == 3);
  CHECK(s.dimension() == 2);
  CHECK(sx({{1, "x"}}).dimension() == 0);

  CHECK_THROWS_AS(Simplex({}), InvalidConfig);
  CHECK_THROWS_AS(sx({{1, "a"}, {1, "b"}}), InvalidConfig);
  CHECK_THROWS_AS(sx({{0, "a"}}), InvalidConfig);
}

TEST_CASE("simplex containment is vertex subset") {
  Simplex big = sx({{1, "a"}, {2, "b"}, {3, "c"}});
  CHECK(big.contains(sx({{2, "b"}})));
  CHECK(big.contains(big));
  CHECK_FALSE(big.contains(sx({{2, "x"}})));
  CHECK_FALSE(sx({{2, "b"}}).contains(big));
}

// ==== complexes ====

TEST_CASE("complex normalizes facets to a sorted antichain") {
  ChromaticComplex k(3, {sx({{1, "a"}, {2, "b"}}),
                         sx({{2, "b"}}),               // face of the first
                         sx({{1, "a"}, {2, "b"}}),     // duplicate
                         sx({{3, "c"}})});
  CHECK(k.facet_count() == 2);
  CHECK(k.has_simplex(sx({{2, "b"}})));
  CHECK(k.has_simplex(sx({{1, "a"}, {2, "b"}})));
  CHECK_FALSE(k.has_simplex(sx({{1, "a"}, {3, "c"}})));
  CHECK(k.has_vertex({3, "c"}));
  CHECK_FALSE(k.has_vertex({3, "x"}));

  CHECK(k.vertex_set().size() == 3);
  REQUIRE(k.edges().size() == 1);
  CHECK(k.edges()[0].first == Vertex{1, "a"});
  CHECK(k.edges()[0].second == Vertex{2, "b"});
}

TEST_CASE("subcomplex check follows facet membership") {
  ChromaticComplex big(3, {sx({{1, "a"}, {2, "b"}, {3, "c"}})});
  ChromaticComplex small(3, {sx({{1, "a"}, {2, "b"}}), sx({{3, "c"}})});
  CHECK(small.is_subcomplex_of(big));
  CHECK_FALSE(big.is_subcomplex_of(small));
}

// ==== consistency projection ====

TEST_CASE("project_pi splits a facet into maximal same-value parts") {
  // one party saw 1, the other two saw 0: the 1-vertex ends up isolated
  Simplex sigma = sx({{1, "1"}, {2, "0"}, {3, "0"}});
  ChromaticComplex p = project_pi(sigma, 3);
  REQUIRE(p.facet_count() == 2);
  CHECK(p.has_simplex(sx({{1, "1"}})));
  CHECK(p.has_simplex(sx({{2, "0"}, {3, "0"}})));
  CHECK_FALSE(p.has_simplex(sx({{1, "1"}, {2, "0"}})));
}

TEST_CASE("project_pi of a constant facet keeps it whole") {
  ChromaticComplex p = project_pi(sx({{1, "0"}, {2, "0"}}), 2);
  REQUIRE(p.facet_count() == 1);
  CHECK(p.facets()[0].dimension() == 1);
}

TEST_CASE("project_pi_complex re-normalizes the union of projections") {
  ChromaticComplex k(2, {sx({{1, "0"}, {2, "0"}}), sx({{1, "0"}, {2, "1"}})});
  ChromaticComplex p = project_pi_complex(k);
  // {1:0,2:0} stays a facet, the mixed facet contributes isolated 2:1;
  // isolated 1:0 is absorbed into the surviving edge
  REQUIRE(p.facet_count() == 2);
  CHECK(p.has_simplex(sx({{1, "0"}, {2, "0"}})));
  CHECK(p.has_simplex(sx({{2, "1"}})));
}

// ==== simplicial maps ====

TEST_CASE("check_simplicial_map accepts facet-preserving name-preserving maps") {
  ChromaticComplex src(2, {sx({{1, "x"}, {2, "x"}})});
  ChromaticComplex dst(2, {sx({{1, "0"}, {2, "0"}})});
  VertexMap good{{{1, "x"}, {1, "0"}}, {{2, "x"}, {2, "0"}}};
  CHECK(check_simplicial_map(src, dst, good));

  VertexMap renaming{{{1, "x"}, {2, "0"}}, {{2, "x"}, {1, "0"}}};
  CHECK_FALSE(check_simplicial_map(src, dst, renaming));

  VertexMap partial{{{1, "x"}, {1, "0"}}};
  CHECK_THROWS_AS(check_simplicial_map(src, dst, partial), MapIncomplete);
}

TEST_CASE("check_simplicial_map rejects maps whose image is no simplex") {
  ChromaticComplex src(2, {sx({{1, "x"}, {2, "x"}})});
  ChromaticComplex dst(2, {sx({{1, "0"}}), sx({{2, "1"}})});
  VertexMap m{{{1, "x"}, {1, "0"}}, {{2, "x"}, {2, "1"}}};
  CHECK_FALSE(check_simplicial_map(src, dst, m));
}

TEST_CASE("unique_name_preserving_map needs one target vertex per name") {
  std::vector<Vertex> src{{1, "a"}, {2, "b"}};
  std::vector<Vertex> one_each{{1, "0"}, {2, "1"}};
  auto m = unique_name_preserving_map(src, one_each);
  REQUIRE(m.has_value());
  CHECK(m->at({1, "a"}) == Vertex{1, "0"});
  CHECK(m->at({2, "b"}) == Vertex{2, "1"});

  std::vector<Vertex> ambiguous{{1, "0"}, {1, "1"}, {2, "0"}};
  CHECK_FALSE(unique_name_preserving_map(src, ambiguous).has_value());
  std::vector<Vertex> missing{{1, "0"}};
  CHECK_FALSE(unique_name_preserving_map(src, missing).has_value());
}

// ==== serialization ====

TEST_CASE("hex encoding round-trips arbitrary bytes") {
  Value v("\x00\xffzz", 4);
  CHECK(hex_decode(hex_encode(v)) == v);
  CHECK(hex_encode("") == "");
  CHECK_THROWS_AS(hex_decode("abc"), InvalidConfig);
  CHECK_THROWS_AS(hex_decode("zz"), InvalidConfig);
}

TEST_CASE("complex json round-trip preserves the antichain") {
  ChromaticComplex k(3, {sx({{1, "1"}}), sx({{2, "0"}, {3, "0"}})});
  nlohmann::json j = complex_to_json(k);
  CHECK(j["n"] == 3);
  CHECK(j["facets"].size() == 2);
  CHECK(complex_from_json(j) == k);
}

TEST_CASE("export_dot renders the 1-skeleton deterministically") {
  ChromaticComplex k(3, {sx({{1, "1"}}), sx({{2, "0"}, {3, "0"}})});
  std::string dot = export_dot(k);
  CHECK(dot ==
        "graph complex {\n"
        "  \"1:1\";\n"
        "  \"2:0\";\n"
        "  \"3:0\";\n"
        "  \"2:0\" -- \"3:0\";\n"
        "}\n");
}
