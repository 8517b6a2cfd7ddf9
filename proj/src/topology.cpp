#include "byzct/topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace byzct {

Simplex::Simplex(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw std::invalid_argument("simplex has duplicate vertices");
  }
}

bool Simplex::contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

bool Simplex::is_face_of(const Simplex& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

Simplex Simplex::united(const Simplex& other) const {
  Simplex out;
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(out.ids_));
  return out;
}

std::vector<Simplex> faces_of(const Simplex& s) {
  const auto& ids = s.ids();
  if (ids.size() > 20) {
    throw BudgetExceeded("simplex too large to enumerate faces");
  }
  std::vector<Simplex> out;
  const std::uint32_t full = (1u << ids.size());
  out.reserve(full - 1);
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::vector<VertexId> face;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (mask & (1u << i)) face.push_back(ids[i]);
    }
    out.emplace_back(std::move(face));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complex

namespace {

void add_closure(std::set<Simplex>& into, const Simplex& s) {
  if (into.contains(s)) return;
  for (auto& f : faces_of(s)) into.insert(std::move(f));
}

}  // namespace

Complex Complex::from_facets(const std::vector<std::vector<std::string>>& facets,
                             const std::vector<std::pair<std::string, Rank>>& ranks) {
  if (facets.empty()) throw std::invalid_argument("complex needs at least one facet");

  std::set<std::string> names;
  for (const auto& facet : facets) {
    if (facet.empty()) throw std::invalid_argument("empty facet");
    std::set<std::string> seen;
    for (const auto& n : facet) {
      if (n.empty()) throw std::invalid_argument("empty vertex name");
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate vertex '" + n + "' in facet");
      names.insert(n);
    }
  }

  std::vector<Vertex> vertices;
  if (ranks.empty()) {
    Rank r = 0;
    for (const auto& n : names) vertices.push_back({n, r++});
  } else {
    std::map<std::string, Rank> given;
    for (const auto& [n, r] : ranks) {
      auto [it, inserted] = given.emplace(n, r);
      if (!inserted && it->second != r) {
        throw std::invalid_argument("conflicting ranks for vertex '" + n + "'");
      }
      if (!names.contains(n)) throw std::invalid_argument("rank given for unknown vertex '" + n + "'");
    }
    std::set<Rank> used;
    for (const auto& n : names) {
      auto it = given.find(n);
      if (it == given.end()) throw std::invalid_argument("missing rank for vertex '" + n + "'");
      if (!used.insert(it->second).second) {
        throw std::invalid_argument("rank " + std::to_string(it->second) + " used twice");
      }
      vertices.push_back({n, it->second});
    }
  }

  std::map<std::string, VertexId> pos;
  for (VertexId i = 0; i < vertices.size(); ++i) pos[vertices[i].name] = i;
  std::vector<Simplex> gens;
  for (const auto& facet : facets) {
    std::vector<VertexId> ids;
    for (const auto& n : facet) ids.push_back(pos.at(n));
    gens.emplace_back(std::move(ids));
  }
  return from_parts(std::move(vertices), gens);
}

Complex Complex::from_parts(std::vector<Vertex> vertices, const std::vector<Simplex>& generators) {
  std::vector<VertexId> order(vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](VertexId a, VertexId b) { return vertices[a].rank < vertices[b].rank; });
  std::vector<VertexId> remap(vertices.size());
  Complex k;
  for (VertexId i = 0; i < order.size(); ++i) {
    remap[order[i]] = i;
    k.vertices_.push_back(vertices[order[i]]);
  }
  for (VertexId i = 0; i < k.vertices_.size(); ++i) {
    if (i > 0 && k.vertices_[i].rank == k.vertices_[i - 1].rank) {
      throw std::invalid_argument("vertex ranks must be distinct");
    }
    if (!k.index_.emplace(k.vertices_[i].name, i).second) {
      throw std::invalid_argument("duplicate vertex name '" + k.vertices_[i].name + "'");
    }
  }
  for (const auto& g : generators) {
    if (g.empty()) throw std::invalid_argument("empty simplex");
    std::vector<VertexId> ids;
    for (auto v : g) {
      if (v >= remap.size()) throw std::invalid_argument("simplex references unknown vertex");
      ids.push_back(remap[v]);
    }
    add_closure(k.simplices_, Simplex(std::move(ids)));
  }
  for (VertexId v = 0; v < k.vertices_.size(); ++v) {
    if (!k.simplices_.contains(Simplex{v})) {
      throw std::invalid_argument("vertex '" + k.vertices_[v].name + "' belongs to no simplex");
    }
  }
  return k;
}

Complex Complex::from_closed(std::vector<Vertex> vertices, std::set<Simplex> closed) {
  Complex k;
  k.vertices_ = std::move(vertices);
  for (VertexId i = 0; i < k.vertices_.size(); ++i) {
    if (!k.index_.emplace(k.vertices_[i].name, i).second) {
      throw std::invalid_argument("duplicate vertex name '" + k.vertices_[i].name + "'");
    }
  }
  k.simplices_ = std::move(closed);
  return k;
}

int Complex::dimension() const {
  int d = -1;
  for (const auto& s : simplices_) d = std::max(d, s.dim());
  return d;
}

std::optional<VertexId> Complex::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VertexId Complex::id_of(std::string_view name) const {
  auto v = find(name);
  if (!v) throw std::invalid_argument("unknown vertex '" + std::string(name) + "'");
  return *v;
}

std::optional<Simplex> Complex::simplex_of(const std::vector<std::string>& names) const {
  if (names.empty()) return std::nullopt;
  std::vector<VertexId> ids;
  for (const auto& n : names) {
    auto v = find(n);
    if (!v) return std::nullopt;
    ids.push_back(*v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Simplex s(std::move(ids));
  if (!contains(s)) return std::nullopt;
  return s;
}

std::vector<std::string> Complex::names_of(const Simplex& s) const {
  std::vector<std::string> out;
  for (auto v : s) out.push_back(name(v));
  return out;
}

std::vector<Simplex> maximal_simplices(std::vector<Simplex> simplices) {
  std::sort(simplices.begin(), simplices.end());
  simplices.erase(std::unique(simplices.begin(), simplices.end()), simplices.end());
  // Larger simplices first so each candidate only needs checking against kept ones.
  std::vector<Simplex> by_size = simplices;
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](const Simplex& a, const Simplex& b) { return a.size() > b.size(); });
  std::vector<Simplex> kept;
  for (const auto& s : by_size) {
    bool covered = std::any_of(kept.begin(), kept.end(),
                               [&](const Simplex& k) { return k.size() > s.size() && s.is_face_of(k); });
    if (!covered) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<Simplex> Complex::facets() const {
  std::vector<Simplex> out;
  for (const auto& s : simplices_) {
    bool maximal = true;
    for (VertexId v = 0; v < vertices_.size() && maximal; ++v) {
      if (s.contains(v)) continue;
      auto ids = s.ids();
      ids.push_back(v);
      if (simplices_.contains(Simplex(std::move(ids)))) maximal = false;
    }
    if (maximal) out.push_back(s);
  }
  return out;
}

std::vector<std::vector<std::string>> Complex::facet_names() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& f : facets()) out.push_back(names_of(f));
  return out;
}

bool operator==(const Complex& a, const Complex& b) {
  if (a.vertices_.size() != b.vertices_.size()) return false;
  for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
    if (a.vertices_[i].name != b.vertices_[i].name || a.vertices_[i].rank != b.vertices_[i].rank) return false;
  }
  return a.simplices_ == b.simplices_;
}

Complex skeleton(const Complex& k, int level) {
  if (level < 0) throw std::invalid_argument("skeleton level must be non-negative");
  Complex out = k;
  std::erase_if(out.simplices_, [&](const Simplex& s) { return s.dim() > level; });
  return out;
}

// ---------------------------------------------------------------------------
// Barycentric subdivision

std::string face_name(std::vector<std::string> member_names) {
  std::sort(member_names.begin(), member_names.end());
  std::string out = "{";
  for (std::size_t i = 0; i < member_names.size(); ++i) {
    if (i) out += ',';
    out += member_names[i];
  }
  out += '}';
  return out;
}

namespace {

struct BaryLevel {
  Complex complex;
  std::vector<Simplex> face;  // face[v]: face of the parent complex
};

BaryLevel bary_with_faces(const Complex& k, std::size_t budget) {
  // Canonical order of faces: (dimension, sorted member names).
  struct Entry {
    Simplex face;
    std::vector<std::string> sorted_names;
  };
  std::vector<Entry> entries;
  entries.reserve(k.simplex_count());
  for (const auto& s : k.simplices()) {
    auto names = k.names_of(s);
    std::sort(names.begin(), names.end());
    entries.push_back({s, std::move(names)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.face.size() != b.face.size()) return a.face.size() < b.face.size();
    return a.sorted_names < b.sorted_names;
  });

  std::map<Simplex, VertexId> id_of_face;
  std::vector<Vertex> vertices;
  BaryLevel out;
  for (VertexId i = 0; i < entries.size(); ++i) {
    id_of_face.emplace(entries[i].face, i);
    vertices.push_back({face_name(entries[i].sorted_names), i});
    out.face.push_back(entries[i].face);
  }

  // proper[i]: ids of proper faces of face i.
  std::vector<std::vector<VertexId>> proper(entries.size());
  for (VertexId i = 0; i < entries.size(); ++i) {
    for (const auto& f : faces_of(entries[i].face)) {
      if (f.size() < entries[i].face.size()) proper[i].push_back(id_of_face.at(f));
    }
  }

  std::set<Simplex> chains;
  std::vector<VertexId> chain;
  auto extend = [&](auto&& self, VertexId top) -> void {
    chain.push_back(top);
    chains.insert(Simplex(chain));
    if (chains.size() > budget) {
      throw BudgetExceeded("barycentric subdivision exceeds simplex budget of " + std::to_string(budget));
    }
    for (auto sub : proper[top]) self(self, sub);
    chain.pop_back();
  };
  for (VertexId i = 0; i < entries.size(); ++i) extend(extend, i);

  out.complex = Complex::from_closed(std::move(vertices), std::move(chains));
  return out;
}

}  // namespace

Complex bary_subdivide(const Complex& k, std::size_t budget) { return bary_with_faces(k, budget).complex; }

Simplex Subdivision::carrier_of(const Simplex& s) const {
  Simplex out;
  for (auto v : s) out = out.united(carrier.at(v));
  return out;
}

Subdivision iterated_bary(const Complex& k, std::size_t times, std::size_t budget) {
  Subdivision sub;
  sub.base = k;
  sub.complex = k;
  for (VertexId v = 0; v < k.vertex_count(); ++v) sub.carrier.push_back(Simplex{v});
  for (std::size_t i = 0; i < times; ++i) {
    auto level = bary_with_faces(sub.complex, budget);
    std::vector<Simplex> carrier;
    carrier.reserve(level.face.size());
    for (const auto& f : level.face) carrier.push_back(sub.carrier_of(f));
    sub.complex = std::move(level.complex);
    sub.carrier = std::move(carrier);
    sub.depth = i + 1;
  }
  return sub;
}

// ---------------------------------------------------------------------------
// Carrier maps

namespace {

bool subcomplex_within(const std::vector<Simplex>& inner, const std::vector<Simplex>& outer) {
  return std::all_of(inner.begin(), inner.end(), [&](const Simplex& s) {
    return std::any_of(outer.begin(), outer.end(), [&](const Simplex& o) { return s.is_face_of(o); });
  });
}

}  // namespace

CarrierMap::CarrierMap(Complex source, Complex target, std::map<Simplex, std::vector<Simplex>> images)
    : source_(std::move(source)), target_(std::move(target)) {
  for (auto& [s, facets] : images) {
    if (!source_.contains(s)) throw std::invalid_argument("carrier map assigns a non-simplex of the source");
    for (const auto& f : facets) {
      if (!target_.contains(f)) throw std::invalid_argument("carrier image contains a non-simplex of the target");
    }
    images_.emplace(s, maximal_simplices(std::move(facets)));
  }
  for (const auto& s : source_.simplices()) {
    if (!images_.contains(s)) throw std::invalid_argument("carrier map is not total on the source");
  }
  if (!is_monotone()) throw std::invalid_argument("carrier map is not monotone");
}

CarrierMap CarrierMap::trivial(Complex source, Complex target) {
  std::map<Simplex, std::vector<Simplex>> images;
  auto all = target.facets();
  for (const auto& s : source.simplices()) images.emplace(s, all);
  return CarrierMap(std::move(source), std::move(target), std::move(images));
}

const std::vector<Simplex>& CarrierMap::image(const Simplex& s) const {
  auto it = images_.find(s);
  if (it == images_.end()) throw std::invalid_argument("simplex is not in the carrier map's source");
  return it->second;
}

bool CarrierMap::carries(const Simplex& s, const Simplex& t) const {
  const auto& facets = image(s);
  return std::any_of(facets.begin(), facets.end(), [&](const Simplex& f) { return t.is_face_of(f); });
}

bool CarrierMap::is_monotone() const {
  // Codimension-one pairs suffice by transitivity.
  for (const auto& [tau, tau_image] : images_) {
    if (tau.size() < 2) continue;
    for (std::size_t drop = 0; drop < tau.size(); ++drop) {
      std::vector<VertexId> ids;
      for (std::size_t i = 0; i < tau.size(); ++i) {
        if (i != drop) ids.push_back(tau.ids()[i]);
      }
      if (!subcomplex_within(images_.at(Simplex(std::move(ids))), tau_image)) return false;
    }
  }
  return true;
}

Simplex SimplicialMap::apply(const Simplex& s) const {
  std::vector<VertexId> ids;
  ids.reserve(s.size());
  for (auto v : s) ids.push_back(image.at(v));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return Simplex(std::move(ids));
}

bool is_simplicial_map(const SimplicialMap& m, const Complex& source, const Complex& target) {
  if (m.image.size() != source.vertex_count()) throw std::invalid_argument("vertex map is not total on the source");
  for (auto w : m.image) {
    if (w >= target.vertex_count()) throw std::invalid_argument("vertex map leaves the target");
  }
  return std::all_of(source.simplices().begin(), source.simplices().end(),
                     [&](const Simplex& s) { return target.contains(m.apply(s)); });
}

bool is_carried_by(const SimplicialMap& m, const CarrierMap& carrier) {
  if (m.image.size() != carrier.source().vertex_count()) {
    throw std::invalid_argument("vertex map source does not match the carrier's source");
  }
  for (auto w : m.image) {
    if (w >= carrier.target().vertex_count()) throw std::invalid_argument("vertex map leaves the carrier's target");
  }
  return std::all_of(carrier.source().simplices().begin(), carrier.source().simplices().end(),
                     [&](const Simplex& s) { return carrier.carries(s, m.apply(s)); });
}

CarrierMap subdivided_carrier(const Subdivision& sub, const CarrierMap& delta) {
  std::map<Simplex, std::vector<Simplex>> images;
  for (const auto& s : sub.complex.simplices()) images.emplace(s, delta.image(sub.carrier_of(s)));
  return CarrierMap(sub.complex, delta.target(), std::move(images));
}

ColorlessTask make_task(Complex input, Complex output, CarrierMap delta) {
  if (!(delta.source() == input)) throw std::invalid_argument("delta's source is not the input complex");
  if (!(delta.target() == output)) throw std::invalid_argument("delta's target is not the output complex");
  return {std::move(input), std::move(output), std::move(delta)};
}

// ---------------------------------------------------------------------------
// Solvability

bool check_count_condition(std::int64_t n_plus_1, std::int64_t t, std::int64_t dim_input) {
  return n_plus_1 > t * (dim_input + 2);
}

namespace {

std::optional<SimplicialMap> search_at_depth(const Subdivision& domain, const CarrierMap& delta,
                                             std::size_t& nodes, std::size_t node_budget) {
  const auto& dom = domain.complex;
  const auto n = dom.vertex_count();

  std::vector<std::vector<VertexId>> allowed(n);
  for (VertexId v = 0; v < n; ++v) {
    for (const auto& f : delta.image(domain.carrier[v])) {
      allowed[v].insert(allowed[v].end(), f.begin(), f.end());
    }
    std::sort(allowed[v].begin(), allowed[v].end());
    allowed[v].erase(std::unique(allowed[v].begin(), allowed[v].end()), allowed[v].end());
    if (allowed[v].empty()) return std::nullopt;
  }

  // Simplices checked once their highest-ranked vertex is assigned.
  struct Pending {
    const Simplex* simplex;
    Simplex carrier;
  };
  std::vector<std::vector<Pending>> closing(n);
  for (const auto& s : dom.simplices()) {
    if (s.size() < 2) continue;
    closing[s.ids().back()].push_back({&s, domain.carrier_of(s)});
  }

  SimplicialMap m;
  m.image.assign(n, 0);
  auto assign = [&](auto&& self, VertexId v) -> bool {
    if (v == n) return true;
    for (auto w : allowed[v]) {
      if (++nodes > node_budget) {
        throw BudgetExceeded("simplicial approximation search exceeds node budget of " +
                             std::to_string(node_budget));
      }
      m.image[v] = w;
      bool ok = std::all_of(closing[v].begin(), closing[v].end(),
                            [&](const Pending& p) { return delta.carries(p.carrier, m.apply(*p.simplex)); });
      if (ok && self(self, v + 1)) return true;
    }
    return false;
  };
  if (assign(assign, 0)) return m;
  return std::nullopt;
}

}  // namespace

SearchResult search_simplicial_approximation(const ColorlessTask& task, int t, std::size_t max_depth,
                                             const SearchLimits& limits) {
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  const auto base = skeleton(task.input, t);
  std::size_t nodes = 0;
  Subdivision domain = iterated_bary(base, 0, limits.simplex_budget);
  for (std::size_t depth = 0; depth <= max_depth; ++depth) {
    if (depth > 0) {
      // Subdivide the previous level once more rather than starting over.
      auto next = iterated_bary(domain.complex, 1, limits.simplex_budget);
      std::vector<Simplex> carrier;
      for (const auto& c : next.carrier) carrier.push_back(domain.carrier_of(c));
      domain.complex = std::move(next.complex);
      domain.carrier = std::move(carrier);
      domain.depth = depth;
    }
    if (auto m = search_at_depth(domain, task.delta, nodes, limits.node_budget)) {
      return Approximation{std::move(*m), depth, std::move(domain)};
    }
  }
  return NotFoundUpTo{max_depth};
}

Verdict decide_solvability(const ColorlessTask& task, std::int64_t n_plus_1, int t, std::size_t max_depth,
                           const SearchLimits& limits) {
  const int dim = task.input.dimension();
  if (!check_count_condition(n_plus_1, t, dim)) {
    std::ostringstream why;
    why << "counting: n+1=" << n_plus_1 << " <= t*(dim(I)+2)=" << static_cast<std::int64_t>(t) * (dim + 2);
    return Unsolvable{why.str()};
  }
  auto found = search_simplicial_approximation(task, t, max_depth, limits);
  if (auto* a = std::get_if<Approximation>(&found)) {
    return Solvable{TaskPlan{t + 1, a->depth, std::move(a->domain), std::move(a->map)}};
  }
  return Unknown{max_depth};
}

}  // namespace byzct
