#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "toposym/errors.hpp"
#include "toposym/rational.hpp"

namespace toposym {

// ==== Configurations ====

// Assignment of parties to shared randomness sources. Source ids are
// contiguous 1..k and every source feeds at least one party; parties on
// the same source see identical bit streams.
class RandomnessConfiguration {
 public:
  // source_of[p] = source id of party p (parties 0-indexed internally)
  static RandomnessConfiguration from_source_of(std::vector<int> source_of);
  // counts (n_1..n_k) with parties grouped contiguously by source
  static RandomnessConfiguration from_counts(const std::vector<int>& counts);

  int n() const { return static_cast<int>(source_of_.size()); }
  int k() const { return k_; }
  int source_of(int party) const { return source_of_[party]; }
  const std::vector<int>& source_map() const { return source_of_; }

  // (n_1..n_k)
  std::vector<int> source_counts() const;
  int min_count() const;
  int gcd_counts() const;
  // parties of each source, ascending
  std::vector<std::vector<int>> source_groups() const;

  bool operator==(const RandomnessConfiguration&) const = default;

 private:
  std::vector<int> source_of_;
  int k_ = 0;
};

// ==== Draws and realizations ====

// One bit string per source, all of length t; round r bit at index r-1.
struct SourceDraw {
  std::vector<std::string> source_strings;
  int t() const { return source_strings.empty() ? 0 : static_cast<int>(source_strings[0].size()); }
};

// One bit string per party, all of length t.
struct Realization {
  std::vector<std::string> strings;
  int t() const { return strings.empty() ? 0 : static_cast<int>(strings[0].size()); }
  int n() const { return static_cast<int>(strings.size()); }
  // first rounds_t rounds only
  Realization prefix(int rounds_t) const;
  int bit(int party, int round) const { return strings[party][round - 1] - '0'; }

  bool operator==(const Realization&) const = default;
};

// party p's string = its source's string
Realization realize(const RandomnessConfiguration& alpha, const SourceDraw& draw);

// parties sharing a source have equal strings
bool consistent(const Realization& rho, const RandomnessConfiguration& alpha);

// 0 when inconsistent with alpha, else exactly 2^-(t*k): all consistent
// realizations of a given length are equiprobable.
Rational probability(const Realization& rho, const RandomnessConfiguration& alpha);

// ==== Enumeration ====

inline constexpr int kDefaultEnumerationCap = 24;

// Visits all 2^(t*k) consistent realizations, source strings counted
// lexicographically. Throws CapExceeded when t*k > cap.
void for_each_consistent(const RandomnessConfiguration& alpha, int t,
                         const std::function<void(const Realization&)>& fn,
                         int cap = kDefaultEnumerationCap);

std::vector<Realization> enumerate_consistent(const RandomnessConfiguration& alpha, int t,
                                              int cap = kDefaultEnumerationCap);

// All 2^(t*n) realizations of n parties, no consistency constraint.
void for_each_realization(int n, int t, const std::function<void(const Realization&)>& fn,
                          int cap = kDefaultEnumerationCap);

// the 2^k one-round extensions of a consistent realization, in draw order
std::vector<Realization> one_round_extensions(const RandomnessConfiguration& alpha,
                                              const Realization& rho);

// ==== Seeded sampling ====

// Deterministic seed derivation; identical on every platform.
uint64_t splitmix64(uint64_t& state);
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Lazy per-source fair bit streams, a pure function of (seed, k).
// Stream i >= 1 is independent of which other streams are consumed.
class SourceStreams {
 public:
  SourceStreams(int k, uint64_t seed);
  // bit of source (1-indexed) at round (1-indexed)
  int bit(int source, int round);

 private:
  uint64_t seed_;
  std::vector<std::vector<int>> bits_;
  std::vector<uint64_t> state_;
};

// First t bits of every source stream for this seed.
SourceDraw sample_draw(const RandomnessConfiguration& alpha, int t, uint64_t seed);

// ==== Serialization ====

// {"n": int, "source_of": [int, ...]}
nlohmann::json config_to_json(const RandomnessConfiguration& alpha);
RandomnessConfiguration config_from_json(const nlohmann::json& j);

// {"t": int, "strings": ["01", ...]}
nlohmann::json realization_to_json(const Realization& rho);
Realization realization_from_json(const nlohmann::json& j);

}  // namespace toposym
