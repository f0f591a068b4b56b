#include "toposym/complex.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace toposym {

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool printable(const Value& v) {
  if (v.empty() || v.size() > 16) return false;
  return std::all_of(v.begin(), v.end(), [](unsigned char c) {
    return c >= 0x21 && c <= 0x7e && c != '"' && c != '\\';
  });
}

}  // namespace

std::string value_digest(const Value& v) {
  if (v.empty()) return "~";
  if (printable(v)) return v;
  std::ostringstream os;
  os << std::hex << fnv1a64(v);
  return os.str().substr(0, 12);
}

// ==== Simplex ====

Simplex::Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw InvalidConfig("simplex: empty vertex set");
  std::sort(vertices_.begin(), vertices_.end());
  for (size_t i = 0; i + 1 < vertices_.size(); ++i) {
    if (vertices_[i].name == vertices_[i + 1].name)
      throw InvalidConfig("simplex: duplicate name " + std::to_string(vertices_[i].name));
  }
  for (const Vertex& v : vertices_) {
    if (v.name < 1) throw InvalidConfig("simplex: name must be >= 1");
  }
}

bool Simplex::has_vertex(const Vertex& v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool Simplex::contains(const Simplex& other) const {
  return std::includes(vertices_.begin(), vertices_.end(),
                       other.vertices_.begin(), other.vertices_.end());
}

// ==== ChromaticComplex ====

ChromaticComplex::ChromaticComplex(int n, std::vector<Simplex> facets) : n_(n) {
  if (n < 0) throw InvalidConfig("complex: negative n");
  for (const Simplex& s : facets) {
    for (const Vertex& v : s.vertices()) {
      if (v.name > n) throw InvalidConfig("complex: vertex name exceeds n");
    }
  }
  // keep only maximal simplices, then canonical sort + dedup
  std::sort(facets.begin(), facets.end());
  facets.erase(std::unique(facets.begin(), facets.end()), facets.end());
  for (const Simplex& s : facets) {
    bool maximal = std::none_of(facets.begin(), facets.end(), [&](const Simplex& u) {
      return &u != &s && u.contains(s);
    });
    if (maximal) facets_.push_back(s);
  }
}

bool ChromaticComplex::has_simplex(const Simplex& s) const {
  return std::any_of(facets_.begin(), facets_.end(),
                     [&](const Simplex& f) { return f.contains(s); });
}

bool ChromaticComplex::has_vertex(const Vertex& v) const {
  return std::any_of(facets_.begin(), facets_.end(),
                     [&](const Simplex& f) { return f.has_vertex(v); });
}

std::vector<Vertex> ChromaticComplex::vertex_set() const {
  std::set<Vertex> vs;
  for (const Simplex& f : facets_)
    vs.insert(f.vertices().begin(), f.vertices().end());
  return {vs.begin(), vs.end()};
}

std::vector<std::pair<Vertex, Vertex>> ChromaticComplex::edges() const {
  std::set<std::pair<Vertex, Vertex>> es;
  for (const Simplex& f : facets_) {
    const auto& vs = f.vertices();
    for (size_t i = 0; i < vs.size(); ++i)
      for (size_t j = i + 1; j < vs.size(); ++j)
        es.emplace(vs[i], vs[j]);
  }
  return {es.begin(), es.end()};
}

bool ChromaticComplex::is_subcomplex_of(const ChromaticComplex& other) const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Simplex& f) { return other.has_simplex(f); });
}

// ==== Projections ====

ChromaticComplex project_pi(const Simplex& sigma, int n) {
  std::map<Value, std::vector<Vertex>> by_value;
  for (const Vertex& v : sigma.vertices()) by_value[v.value].push_back(v);
  std::vector<Simplex> facets;
  for (auto& [value, group] : by_value) facets.emplace_back(std::move(group));
  return {n, std::move(facets)};
}

ChromaticComplex project_pi_complex(const ChromaticComplex& k) {
  std::vector<Simplex> facets;
  for (const Simplex& f : k.facets()) {
    ChromaticComplex part = project_pi(f, k.n());
    facets.insert(facets.end(), part.facets().begin(), part.facets().end());
  }
  return {k.n(), std::move(facets)};
}

// ==== Simplicial maps ====

bool check_simplicial_map(const ChromaticComplex& src,
                          const ChromaticComplex& dst,
                          const VertexMap& vertex_map) {
  for (const Vertex& v : src.vertex_set()) {
    auto it = vertex_map.find(v);
    if (it == vertex_map.end())
      throw MapIncomplete("vertex map missing (" + std::to_string(v.name) + "," +
                          value_digest(v.value) + ")");
    if (it->second.name != v.name) return false;
  }
  for (const Simplex& f : src.facets()) {
    std::set<Vertex> image;
    for (const Vertex& v : f.vertices()) image.insert(vertex_map.at(v));
    Simplex mapped(std::vector<Vertex>(image.begin(), image.end()));
    if (!dst.has_simplex(mapped)) return false;
  }
  return true;
}

std::optional<VertexMap> unique_name_preserving_map(
    const std::vector<Vertex>& src_vertices,
    const std::vector<Vertex>& dst_vertices) {
  std::map<int, std::vector<Value>> dst_by_name;
  for (const Vertex& v : dst_vertices) dst_by_name[v.name].push_back(v.value);
  VertexMap m;
  for (const Vertex& v : src_vertices) {
    auto it = dst_by_name.find(v.name);
    if (it == dst_by_name.end() || it->second.size() != 1) return std::nullopt;
    m[v] = Vertex{v.name, it->second.front()};
  }
  return m;
}

// ==== Serialization ====

std::string hex_encode(const Value& v) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(v.size() * 2);
  for (unsigned char c : v) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

Value hex_decode(const std::string& hex) {
  if (hex.size() % 2 != 0) throw InvalidConfig("hex value: odd length");
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InvalidConfig("hex value: bad digit");
  };
  Value out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2)
    out.push_back(static_cast<char>(nib(hex[i]) << 4 | nib(hex[i + 1])));
  return out;
}

nlohmann::json complex_to_json(const ChromaticComplex& k) {
  nlohmann::json facets = nlohmann::json::array();
  for (const Simplex& f : k.facets()) {
    nlohmann::json fv = nlohmann::json::array();
    for (const Vertex& v : f.vertices())
      fv.push_back({{"name", v.name}, {"value", hex_encode(v.value)}});
    facets.push_back(std::move(fv));
  }
  return {{"n", k.n()}, {"facets", std::move(facets)}};
}

ChromaticComplex complex_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("facets"))
    throw InvalidConfig("complex json: need n and facets");
  std::vector<Simplex> facets;
  for (const auto& fj : j.at("facets")) {
    std::vector<Vertex> vs;
    for (const auto& vj : fj)
      vs.push_back({vj.at("name").get<int>(), hex_decode(vj.at("value").get<std::string>())});
    facets.emplace_back(std::move(vs));
  }
  return {j.at("n").get<int>(), std::move(facets)};
}

std::string export_dot(const ChromaticComplex& k) {
  std::ostringstream os;
  os << "graph complex {\n";
  auto node_id = [](const Vertex& v) {
    return "\"" + std::to_string(v.name) + ":" + value_digest(v.value) + "\"";
  };
  for (const Vertex& v : k.vertex_set()) os << "  " << node_id(v) << ";\n";
  for (const auto& [a, b] : k.edges())
    os << "  " << node_id(a) << " -- " << node_id(b) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace toposym
