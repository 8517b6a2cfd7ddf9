#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace byzct {

using VertexId = std::uint32_t;
using Rank = std::uint64_t;

struct Vertex {
  std::string name;
  Rank rank = 0;
};

/// Raised when a construction would exceed the configured simplex budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-empty set of vertex ids, kept sorted and duplicate free.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<VertexId> ids);
  Simplex(std::initializer_list<VertexId> ids) : Simplex(std::vector<VertexId>(ids)) {}

  const std::vector<VertexId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  int dim() const { return static_cast<int>(ids_.size()) - 1; }

  bool contains(VertexId v) const;
  bool is_face_of(const Simplex& other) const;
  Simplex united(const Simplex& other) const;

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend auto operator<=>(const Simplex&, const Simplex&) = default;

 private:
  std::vector<VertexId> ids_;
};

/// Every non-empty subset of `s`.
std::vector<Simplex> faces_of(const Simplex& s);

/// Finite simplicial complex. Vertex ids are positions in rank order, so
/// comparing ids compares ranks.
class Complex {
 public:
  Complex() = default;

  /// Containment closure of `facets`. Ranks default to lexicographic order of
  /// names; when given, every vertex needs exactly one rank and ranks must be
  /// distinct.
  static Complex from_facets(const std::vector<std::vector<std::string>>& facets,
                             const std::vector<std::pair<std::string, Rank>>& ranks = {});

  /// Builds from already-ranked vertices and simplices over their indices
  /// (indices refer to `vertices` as given). Closure is taken.
  static Complex from_parts(std::vector<Vertex> vertices, const std::vector<Simplex>& generators);

  /// Trusts the caller: `vertices` already sorted by strictly increasing rank
  /// and `closed` containment-closed over their indices.
  static Complex from_closed(std::vector<Vertex> vertices, std::set<Simplex> closed);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::set<Simplex>& simplices() const { return simplices_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t simplex_count() const { return simplices_.size(); }
  int dimension() const;

  bool contains(const Simplex& s) const { return simplices_.contains(s); }
  std::optional<VertexId> find(std::string_view name) const;
  VertexId id_of(std::string_view name) const;
  const std::string& name(VertexId v) const { return vertices_.at(v).name; }

  /// Simplex with the given vertex names; nullopt if some name is unknown or
  /// the set is not a simplex of this complex.
  std::optional<Simplex> simplex_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(const Simplex& s) const;

  /// Maximal simplices in canonical order.
  std::vector<Simplex> facets() const;

  /// Vertex names of each facet, sorted by rank, facets in canonical order.
  std::vector<std::vector<std::string>> facet_names() const;

  friend bool operator==(const Complex& a, const Complex& b);
  friend Complex skeleton(const Complex& k, int level);

 private:
  std::vector<Vertex> vertices_;
  std::set<Simplex> simplices_;
  std::map<std::string, VertexId, std::less<>> index_;
};

/// Simplices of dimension at most `level`.
Complex skeleton(const Complex& k, int level);

/// Canonical name of a barycentric vertex: member names sorted
/// lexicographically, wrapped in braces.
std::string face_name(std::vector<std::string> member_names);

inline constexpr std::size_t kDefaultSimplexBudget = 1'000'000;

/// Barycentric subdivision. New ranks follow (dimension, sorted member names).
Complex bary_subdivide(const Complex& k, std::size_t budget = kDefaultSimplexBudget);

/// `k` subdivided `times` times, with each vertex's carrier in the base.
struct Subdivision {
  Complex base;
  Complex complex;
  std::size_t depth = 0;
  /// carrier[v]: smallest simplex of `base` containing vertex v of `complex`.
  std::vector<Simplex> carrier;

  Simplex carrier_of(const Simplex& s) const;
};

Subdivision iterated_bary(const Complex& k, std::size_t times,
                          std::size_t budget = kDefaultSimplexBudget);

/// Monotone assignment of subcomplexes of `target` to simplices of `source`.
/// Images are stored as facet lists over target vertex ids.
class CarrierMap {
 public:
  CarrierMap() = default;

  /// Every simplex of `source` must be assigned. Throws std::invalid_argument
  /// on missing entries, foreign simplices or non-monotone assignments.
  CarrierMap(Complex source, Complex target, std::map<Simplex, std::vector<Simplex>> images);

  /// Everything maps to the whole target.
  static CarrierMap trivial(Complex source, Complex target);

  const Complex& source() const { return source_; }
  const Complex& target() const { return target_; }
  const std::vector<Simplex>& image(const Simplex& s) const;

  /// True iff `t` is a simplex of the subcomplex assigned to `s`.
  bool carries(const Simplex& s, const Simplex& t) const;

  /// σ ⊂ τ ⇒ image(σ) ⊆ image(τ), checked on codimension-one pairs.
  bool is_monotone() const;

  const std::map<Simplex, std::vector<Simplex>>& images() const { return images_; }

 private:
  Complex source_;
  Complex target_;
  std::map<Simplex, std::vector<Simplex>> images_;
};

/// Reduces a simplex list to its maximal members (sorted).
std::vector<Simplex> maximal_simplices(std::vector<Simplex> simplices);

/// Vertex map given as one target id per source vertex id.
struct SimplicialMap {
  std::vector<VertexId> image;

  Simplex apply(const Simplex& s) const;
};

bool is_simplicial_map(const SimplicialMap& m, const Complex& source, const Complex& target);
bool is_carried_by(const SimplicialMap& m, const CarrierMap& carrier);

/// Δ pulled back to a subdivision: τ ↦ Δ(carrier(τ)).
CarrierMap subdivided_carrier(const Subdivision& sub, const CarrierMap& delta);

struct ColorlessTask {
  Complex input;
  Complex output;
  CarrierMap delta;
};

/// Validates that delta runs from `input` to `output`.
ColorlessTask make_task(Complex input, Complex output, CarrierMap delta);

bool check_count_condition(std::int64_t n_plus_1, std::int64_t t, std::int64_t dim_input);

struct Approximation {
  SimplicialMap map;
  std::size_t depth = 0;
  Subdivision domain;
};

struct NotFoundUpTo {
  std::size_t max_depth = 0;
};

using SearchResult = std::variant<Approximation, NotFoundUpTo>;

struct SearchLimits {
  std::size_t simplex_budget = kDefaultSimplexBudget;
  /// Backtracking nodes allowed across all depths.
  std::size_t node_budget = 50'000'000;
};

/// Smallest-depth vertex map bary^N(skel^t(I)) → O that is simplicial and
/// carried by the subdivided Δ, or NotFoundUpTo(max_depth).
SearchResult search_simplicial_approximation(const ColorlessTask& task, int t, std::size_t max_depth,
                                             const SearchLimits& limits = {});

struct TaskPlan {
  int k = 0;
  std::size_t depth = 0;
  Subdivision domain;
  SimplicialMap approx;
};

struct Solvable {
  TaskPlan plan;
};
struct Unsolvable {
  std::string reason;
};
struct Unknown {
  std::size_t searched_depth = 0;
};

using Verdict = std::variant<Solvable, Unsolvable, Unknown>;

/// Counting condition first, then bounded search. Search exhaustion gives
/// Unknown, never Unsolvable.
Verdict decide_solvability(const ColorlessTask& task, std::int64_t n_plus_1, int t, std::size_t max_depth,
                           const SearchLimits& limits = {});

}  // namespace byzct
