#include "doctest.h"

#include <set>

#include <nlohmann/json.hpp>

#include "toposym/knowledge.hpp"

using namespace toposym;

namespace {

PortAssignment circulant(int n) {
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n; ++j) rows[i].push_back((i + j) % n);
  return PortAssignment(n, std::move(rows));
}

}  // namespace

// ==== port assignments ====

TEST_CASE("port targets are 1-indexed and arrival_port inverts them") {
  PortAssignment p = circulant(3);
  CHECK(p.n() == 3);
  CHECK(p.target(0, 1) == 1);
  CHECK(p.target(0, 2) == 2);
  CHECK(p.target(2, 1) == 0);
  CHECK(p.arrival_port(1, 0) == 2);  // party 1 hears party 0 on port 2
  CHECK(p.arrival_port(0, 1) == 1);
  CHECK(validate_ports(p));
}

TEST_CASE("validate_ports rejects self-loops and repeated targets") {
  CHECK_FALSE(validate_ports(PortAssignment(3, {{0, 2}, {2, 0}, {0, 1}})));
  CHECK_FALSE(validate_ports(PortAssignment(3, {{1, 1}, {2, 0}, {0, 1}})));
  CHECK_THROWS_AS(PortAssignment(3, {{1}, {2, 0}, {0, 1}}), InvalidConfig);
  CHECK_THROWS_AS(PortAssignment(3, {{1, 3}, {2, 0}, {0, 1}}), InvalidConfig);
}

TEST_CASE("random_ports is valid and seed-deterministic") {
  for (uint64_t seed : {0ull, 1ull, 99ull}) {
    PortAssignment p = random_ports(5, seed);
    CHECK(validate_ports(p));
    CHECK(p == random_ports(5, seed));
  }
  CHECK(random_ports(5, 1) != random_ports(5, 2));
}

TEST_CASE("ports json round-trips and validates") {
  PortAssignment p = random_ports(4, 7);
  CHECK(ports_from_json(ports_to_json(p)) == p);
  nlohmann::json bad = {{"n", 2}, {"target", {{0}, {0}}}};
  CHECK_THROWS_AS(ports_from_json(bad), InvalidConfig);
}

// ==== knowledge terms ====

TEST_CASE("knowledge terms canonicalize bottom and one step") {
  KnowledgeState bot = KnowledgeState::bottom();
  CHECK(bot.canonical() == "_");
  CHECK(bot.is_bottom());

  KnowledgeState bb = KnowledgeState::step(bot, 0, {bot}, ModelKind::Blackboard);
  CHECK(bb.canonical() == "(_|0|{_})");
  KnowledgeState mp = KnowledgeState::step(bot, 0, {bot}, ModelKind::MessagePassing);
  CHECK(mp.canonical() == "(_|0|(_))");
  CHECK(bb != mp);
  CHECK(bb.prev() == bot);
}

TEST_CASE("blackboard steps sort received terms, message passing keeps order") {
  KnowledgeState bot = KnowledgeState::bottom();
  KnowledgeState a = KnowledgeState::step(bot, 0, {bot}, ModelKind::Blackboard);
  KnowledgeState b = KnowledgeState::step(bot, 1, {bot}, ModelKind::Blackboard);

  KnowledgeState ab = KnowledgeState::step(a, 0, {a, b}, ModelKind::Blackboard);
  KnowledgeState ba = KnowledgeState::step(a, 0, {b, a}, ModelKind::Blackboard);
  CHECK(ab == ba);
  CHECK(ab.canonical() == "((_|0|{_})|0|{(_|0|{_}),(_|1|{_})})");

  KnowledgeState mp_ab = KnowledgeState::step(a, 0, {a, b}, ModelKind::MessagePassing);
  KnowledgeState mp_ba = KnowledgeState::step(a, 0, {b, a}, ModelKind::MessagePassing);
  CHECK(mp_ab != mp_ba);
}

TEST_CASE("evolve_structural produces per-party terms embedding their past") {
  auto bb = Model::blackboard();
  auto terms1 = evolve_structural(bb, Realization{{"0", "1"}});
  REQUIRE(terms1.size() == 2);
  CHECK(terms1[0].canonical() == "(_|0|{_})");
  CHECK(terms1[1].canonical() == "(_|1|{_})");

  auto terms2 = evolve_structural(bb, Realization{{"01", "11"}});
  CHECK(terms2[0].canonical() == "((_|0|{_})|1|{(_|1|{_})})");
  CHECK(terms2[0].prev() == terms1[0]);

  // same strings, same term; the parties cannot be told apart
  auto equal = evolve_structural(bb, Realization{{"01", "01"}});
  CHECK(equal[0] == equal[1]);
}

TEST_CASE("evolve_structural honours the depth cap") {
  Realization deep{{"00000", "00000"}};
  CHECK_THROWS_AS(evolve_structural(Model::blackboard(), deep), CapExceeded);
  CHECK_NOTHROW(evolve_structural(Model::blackboard(), deep, 5));
}

// ==== refinement ====

TEST_CASE("refine splits parties by bit history on the blackboard") {
  ConsistencyPartition part = refine(Model::blackboard(), Realization{{"01", "01", "11"}});
  CHECK(part.t == 2);
  CHECK(part.classes == std::vector<std::vector<int>>{{0, 1}, {2}});
  CHECK(part.class_of == std::vector<int>{0, 0, 1});
  CHECK(part.has_singleton());
  CHECK(part.same_class(0, 1));
  CHECK_FALSE(part.same_class(0, 2));
}

TEST_CASE("refine_history is monotone and starts trivial") {
  auto history = refine_history(Model::blackboard(), Realization{{"01", "00", "11"}});
  REQUIRE(history.size() == 3);
  CHECK(history[0].count() == 1);
  for (size_t s = 1; s < history.size(); ++s) CHECK(history[s].refines(history[s - 1]));
  CHECK(history[2].count() == 3);
}

TEST_CASE("message-passing refine sees circulant neighbours uniformly") {
  Model mp = Model::message_passing(circulant(3));
  ConsistencyPartition part = refine(mp, Realization{{"0", "0", "1"}});
  CHECK(part.classes == std::vector<std::vector<int>>{{0, 1}, {2}});
}

TEST_CASE("refine matches structural term equality on a sample") {
  Model mp = Model::message_passing(random_ports(4, 3));
  Realization rho{{"010", "010", "110", "001"}};
  ConsistencyPartition part = refine(mp, rho);
  auto terms = evolve_structural(mp, rho);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      CHECK(part.same_class(p, q) == (terms[p] == terms[q]));
}

TEST_CASE("project_pi_tilde builds one facet per knowledge class") {
  ChromaticComplex c = project_pi_tilde(Model::blackboard(), Realization{{"01", "01", "11"}});
  REQUIRE(c.facet_count() == 2);
  CHECK(c.has_simplex(Simplex({{1, "01"}, {2, "01"}})));
  CHECK(c.has_simplex(Simplex({{3, "11"}})));
}

// ==== adversarial ports ====

TEST_CASE("shift_map rotates inside blocks of g") {
  CHECK(shift_map(6, 3) == std::vector<int>{1, 2, 0, 4, 5, 3});
  CHECK(shift_map(4, 2) == std::vector<int>{1, 0, 3, 2});
  CHECK(shift_map(3, 1) == std::vector<int>{0, 1, 2});
}

TEST_CASE("adversarial ports for two sources of two parties") {
  auto alpha = RandomnessConfiguration::from_counts({2, 2});
  AdversarialPorts adv = adversarial_ports(alpha);
  CHECK(adv.g == 2);
  CHECK(adv.party_order == std::vector<int>{0, 1, 2, 3});
  CHECK(adv.ports.rows() == std::vector<std::vector<int>>{
                                {3, 2, 1}, {2, 3, 0}, {1, 0, 3}, {0, 1, 2}});
  CHECK(validate_ports(adv.ports));
}

TEST_CASE("adversarial ports with gcd 1 collapse to the circulant") {
  auto alpha = RandomnessConfiguration::from_counts({2, 3});
  AdversarialPorts adv = adversarial_ports(alpha);
  CHECK(adv.g == 1);
  CHECK(adv.ports == circulant(5));

  auto single = RandomnessConfiguration::from_counts({4});
  CHECK(adversarial_ports(single).ports == circulant(4));
}

TEST_CASE("adversarial ports keep same-source parties interchangeable") {
  auto alpha = RandomnessConfiguration::from_counts({3, 3});
  AdversarialPorts adv = adversarial_ports(alpha);
  CHECK(adv.ports.rows()[0] == std::vector<int>{4, 5, 3, 1, 2});

  std::vector<int> f = shift_map(6, adv.g);
  for (int i = 0; i < 6; ++i)
    for (int j = 1; j < 6; ++j)
      CHECK(adv.ports.target(f[i], j) == f[adv.ports.target(i, j)]);

  // every consistency class size is a multiple of g on equal sources
  Model mp = Model::message_passing(adv.ports);
  ConsistencyPartition part = refine(mp, Realization{{"01", "01", "01", "10", "10", "10"}});
  for (const auto& cls : part.classes) CHECK(cls.size() % adv.g == 0);
}

TEST_CASE("adversarial ports rename scattered assignments contiguously") {
  auto alpha = RandomnessConfiguration::from_source_of({1, 2, 1, 2});
  AdversarialPorts adv = adversarial_ports(alpha);
  CHECK(adv.party_order == std::vector<int>{0, 2, 1, 3});
  for (int renamed = 0; renamed < 4; ++renamed)
    CHECK(alpha.source_of(adv.party_order[renamed]) == (renamed < 2 ? 1 : 2));
}
