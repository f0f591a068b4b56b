#include "toposym/randomness.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace toposym {

// ==== RandomnessConfiguration ====

RandomnessConfiguration RandomnessConfiguration::from_source_of(std::vector<int> source_of) {
  if (source_of.empty()) throw InvalidConfig("config: no parties");
  int k = *std::max_element(source_of.begin(), source_of.end());
  std::vector<int> seen(k + 1, 0);
  for (int s : source_of) {
    if (s < 1) throw InvalidConfig("config: source ids start at 1");
    seen[s] = 1;
  }
  for (int s = 1; s <= k; ++s)
    if (!seen[s]) throw InvalidConfig("config: source ids must be contiguous, missing " + std::to_string(s));
  RandomnessConfiguration a;
  a.source_of_ = std::move(source_of);
  a.k_ = k;
  return a;
}

RandomnessConfiguration RandomnessConfiguration::from_counts(const std::vector<int>& counts) {
  if (counts.empty()) throw InvalidConfig("config: no sources");
  std::vector<int> source_of;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw InvalidConfig("config: every source needs a party");
    source_of.insert(source_of.end(), counts[i], static_cast<int>(i) + 1);
  }
  return from_source_of(std::move(source_of));
}

std::vector<int> RandomnessConfiguration::source_counts() const {
  std::vector<int> counts(k_, 0);
  for (int s : source_of_) ++counts[s - 1];
  return counts;
}

int RandomnessConfiguration::min_count() const {
  auto c = source_counts();
  return *std::min_element(c.begin(), c.end());
}

int RandomnessConfiguration::gcd_counts() const {
  int g = 0;
  for (int c : source_counts()) g = std::gcd(g, c);
  return g;
}

std::vector<std::vector<int>> RandomnessConfiguration::source_groups() const {
  std::vector<std::vector<int>> groups(k_);
  for (int p = 0; p < n(); ++p) groups[source_of_[p] - 1].push_back(p);
  return groups;
}

// ==== Realizations ====

Realization Realization::prefix(int rounds_t) const {
  Realization out;
  out.strings.reserve(strings.size());
  for (const auto& s : strings) out.strings.push_back(s.substr(0, rounds_t));
  return out;
}

Realization realize(const RandomnessConfiguration& alpha, const SourceDraw& draw) {
  if (static_cast<int>(draw.source_strings.size()) != alpha.k())
    throw InvalidConfig("realize: draw has wrong source count");
  Realization rho;
  rho.strings.reserve(alpha.n());
  for (int p = 0; p < alpha.n(); ++p)
    rho.strings.push_back(draw.source_strings[alpha.source_of(p) - 1]);
  return rho;
}

bool consistent(const Realization& rho, const RandomnessConfiguration& alpha) {
  if (rho.n() != alpha.n()) throw InvalidConfig("consistent: party count mismatch");
  for (int p = 1; p < rho.n(); ++p)
    if (rho.strings[p].size() != rho.strings[0].size())
      throw InvalidConfig("consistent: ragged realization");
  for (const auto& group : alpha.source_groups())
    for (size_t i = 1; i < group.size(); ++i)
      if (rho.strings[group[i]] != rho.strings[group[0]]) return false;
  return true;
}

Rational probability(const Realization& rho, const RandomnessConfiguration& alpha) {
  if (!consistent(rho, alpha)) return 0;
  return dyadic(1, static_cast<unsigned>(rho.t()) * static_cast<unsigned>(alpha.k()));
}

// ==== Enumeration ====

namespace {

// strings s_1..s_k read as one big-endian binary number, counting up
void draw_from_index(SourceDraw& draw, uint64_t index, int k, int t) {
  for (int s = k - 1; s >= 0; --s) {
    std::string& str = draw.source_strings[s];
    for (int r = t - 1; r >= 0; --r) {
      str[r] = static_cast<char>('0' + (index & 1));
      index >>= 1;
    }
  }
}

}  // namespace

void for_each_consistent(const RandomnessConfiguration& alpha, int t,
                         const std::function<void(const Realization&)>& fn, int cap) {
  int bits = t * alpha.k();
  if (bits > cap)
    throw CapExceeded("enumeration of 2^" + std::to_string(bits) + " draws exceeds cap " +
                      std::to_string(cap));
  SourceDraw draw;
  draw.source_strings.assign(alpha.k(), std::string(t, '0'));
  uint64_t total = 1ull << bits;
  for (uint64_t i = 0; i < total; ++i) {
    draw_from_index(draw, i, alpha.k(), t);
    fn(realize(alpha, draw));
  }
}

std::vector<Realization> enumerate_consistent(const RandomnessConfiguration& alpha, int t,
                                              int cap) {
  std::vector<Realization> out;
  for_each_consistent(alpha, t, [&](const Realization& rho) { out.push_back(rho); }, cap);
  return out;
}

void for_each_realization(int n, int t, const std::function<void(const Realization&)>& fn,
                          int cap) {
  auto free_alpha = RandomnessConfiguration::from_counts(std::vector<int>(n, 1));
  for_each_consistent(free_alpha, t, fn, cap);
}

std::vector<Realization> one_round_extensions(const RandomnessConfiguration& alpha,
                                              const Realization& rho) {
  if (!consistent(rho, alpha)) throw InvalidConfig("extensions: inconsistent base realization");
  std::vector<Realization> out;
  int k = alpha.k();
  for (uint64_t mask = 0; mask < (1ull << k); ++mask) {
    Realization ext = rho;
    for (int p = 0; p < alpha.n(); ++p) {
      int source_bit = (mask >> (k - alpha.source_of(p))) & 1;
      ext.strings[p].push_back(static_cast<char>('0' + source_bit));
    }
    out.push_back(std::move(ext));
  }
  return out;
}

// ==== Seeded sampling ====

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  uint64_t state = seed ^ (0xa0761d6478bd642full + stream * 0xe7037ed1a0b428dbull);
  return splitmix64(state);
}

SourceStreams::SourceStreams(int k, uint64_t seed) : seed_(seed) {
  bits_.resize(k);
  state_.resize(k);
  for (int s = 0; s < k; ++s) state_[s] = derive_seed(seed, static_cast<uint64_t>(s) + 1);
}

int SourceStreams::bit(int source, int round) {
  auto& bits = bits_[source - 1];
  while (static_cast<int>(bits.size()) < round) {
    uint64_t word = splitmix64(state_[source - 1]);
    for (int i = 0; i < 64; ++i) bits.push_back(static_cast<int>((word >> i) & 1));
  }
  return bits[round - 1];
}

SourceDraw sample_draw(const RandomnessConfiguration& alpha, int t, uint64_t seed) {
  SourceStreams streams(alpha.k(), seed);
  SourceDraw draw;
  draw.source_strings.assign(alpha.k(), std::string());
  for (int s = 1; s <= alpha.k(); ++s)
    for (int r = 1; r <= t; ++r)
      draw.source_strings[s - 1].push_back(static_cast<char>('0' + streams.bit(s, r)));
  return draw;
}

// ==== Serialization ====

nlohmann::json config_to_json(const RandomnessConfiguration& alpha) {
  return {{"n", alpha.n()}, {"source_of", alpha.source_map()}};
}

RandomnessConfiguration config_from_json(const nlohmann::json& j) {
  auto source_of = j.at("source_of").get<std::vector<int>>();
  if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(source_of.size()))
    throw InvalidConfig("config json: n does not match source_of length");
  return RandomnessConfiguration::from_source_of(std::move(source_of));
}

nlohmann::json realization_to_json(const Realization& rho) {
  return {{"t", rho.t()}, {"strings", rho.strings}};
}

Realization realization_from_json(const nlohmann::json& j) {
  Realization rho;
  rho.strings = j.at("strings").get<std::vector<std::string>>();
  for (const auto& s : rho.strings) {
    if (static_cast<int>(s.size()) != j.at("t").get<int>())
      throw InvalidConfig("realization json: string length does not match t");
    for (char c : s)
      if (c != '0' && c != '1') throw InvalidConfig("realization json: bits must be 0/1");
  }
  return rho;
}

}  // namespace toposym
