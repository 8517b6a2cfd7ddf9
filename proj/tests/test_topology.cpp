#include <algorithm>
#include <functional>
#include <random>

#include "byzct/fixtures.hpp"
#include "byzct/task_io.hpp"
#include "byzct/topology.hpp"
#include "doctest.h"

using namespace byzct;

namespace {

Complex simplex_closure(int d) {
  std::vector<std::string> names;
  for (int i = 0; i <= d; ++i) names.push_back("v" + std::to_string(i));
  return Complex::from_facets({names});
}

std::size_t count_dim(const Complex& k, int dim) {
  return static_cast<std::size_t>(
      std::count_if(k.simplices().begin(), k.simplices().end(), [&](const Simplex& s) { return s.dim() == dim; }));
}

// Brute force: every vertex map from the depth-N subdivision of skel^t(I)
// into O, tested with plain set containment. Returns the number of valid
// maps.
std::size_t brute_force_maps(const ColorlessTask& task, int t, std::size_t depth) {
  const auto sub = iterated_bary(skeleton(task.input, t), depth);
  const auto& dom = sub.complex;
  const std::size_t nv = dom.vertex_count();
  const std::size_t no = task.output.vertex_count();
  std::vector<VertexId> f(nv, 0);
  std::size_t valid = 0;
  auto in_some_facet = [](const std::set<VertexId>& img, const std::vector<Simplex>& facets) {
    for (const auto& facet : facets) {
      if (std::all_of(img.begin(), img.end(), [&](VertexId w) { return facet.contains(w); })) return true;
    }
    return false;
  };
  for (;;) {
    bool ok = true;
    for (const auto& s : dom.simplices()) {
      std::set<VertexId> img;
      for (auto v : s) img.insert(f[v]);
      std::set<VertexId> base;
      for (auto v : s) base.insert(sub.carrier[v].begin(), sub.carrier[v].end());
      const Simplex carrier(std::vector<VertexId>(base.begin(), base.end()));
      if (!in_some_facet(img, task.delta.image(carrier))) {
        ok = false;
        break;
      }
    }
    valid += ok ? 1 : 0;
    std::size_t i = 0;
    while (i < nv && ++f[i] == no) f[i++] = 0;
    if (i == nv) break;
  }
  return valid;
}

}  // namespace

TEST_CASE("make_complex closes facets under containment") {
  auto consensus_input = Complex::from_facets({{"0", "1"}});
  CHECK(consensus_input.vertex_count() == 2);
  CHECK(consensus_input.simplex_count() == 3);

  auto single = Complex::from_facets({{"a"}});
  CHECK(single.vertex_count() == 1);
  CHECK(single.simplex_count() == 1);

  auto tri = Complex::from_facets({{"x", "y", "z"}});
  CHECK(tri.simplex_count() == 7);
  CHECK(count_dim(tri, 0) == 3);
  CHECK(count_dim(tri, 1) == 3);
  CHECK(count_dim(tri, 2) == 1);
  CHECK(tri.dimension() == 2);
}

TEST_CASE("make_complex ranks and rejections") {
  auto k = Complex::from_facets({{"b", "a"}});
  CHECK(k.name(0) == "a");
  CHECK(k.name(1) == "b");

  auto ranked = Complex::from_facets({{"b", "a"}}, {{"b", 0}, {"a", 5}});
  CHECK(ranked.name(0) == "b");

  CHECK_THROWS(Complex::from_facets({}));
  CHECK_THROWS(Complex::from_facets({{}}));
  CHECK_THROWS(Complex::from_facets({{"a", "a"}}));
  CHECK_THROWS(Complex::from_facets({{"a", "b"}}, {{"a", 0}, {"a", 1}, {"b", 2}}));
  CHECK_THROWS(Complex::from_facets({{"a", "b"}}, {{"a", 0}}));
  CHECK_THROWS(Complex::from_facets({{"a", "b"}}, {{"a", 0}, {"b", 0}}));
  CHECK_THROWS(Complex::from_facets({{"a"}}, {{"a", 0}, {"q", 1}}));
}

TEST_CASE("skeleton") {
  auto tri = simplex_closure(2);
  auto one = skeleton(tri, 1);
  CHECK(one.vertex_count() == 3);
  CHECK(count_dim(one, 1) == 3);
  CHECK(count_dim(one, 2) == 0);
  CHECK(skeleton(tri, 2) == tri);
  CHECK(skeleton(tri, 5) == tri);
  auto zero = skeleton(tri, 0);
  CHECK(zero.simplex_count() == 3);
  CHECK(skeleton(one, 1) == one);
  CHECK_THROWS(skeleton(tri, -1));
}

TEST_CASE("barycentric subdivision") {
  auto tri = Complex::from_facets({{"v0", "v1", "v2"}});
  auto b = bary_subdivide(tri);
  CHECK(b.vertex_count() == 7);
  CHECK(count_dim(b, 2) == 6);
  CHECK(b.simplex_of({"{v0}", "{v0,v1}", "{v0,v1,v2}"}).has_value());
  CHECK_FALSE(b.simplex_of({"{v0}", "{v1}"}).has_value());

  auto point = bary_subdivide(Complex::from_facets({{"p"}}));
  CHECK(point.vertex_count() == 1);
  CHECK(point.name(0) == "{p}");

  // Ranks follow (dimension, member names).
  CHECK(b.name(0) == "{v0}");
  CHECK(b.name(3) == "{v0,v1}");
  CHECK(b.name(6) == "{v0,v1,v2}");
}

TEST_CASE("subdivision counts against chain enumeration") {
  for (int d = 1; d <= 3; ++d) {
    // Oracle: maximal chains of subsets of a (d+1)-set are orderings of it.
    std::size_t factorial = 1;
    for (int i = 2; i <= d + 1; ++i) factorial *= static_cast<std::size_t>(i);
    auto b = bary_subdivide(simplex_closure(d));
    CHECK(b.vertex_count() == (std::size_t{1} << (d + 1)) - 1);
    CHECK(count_dim(b, d) == factorial);
    CHECK(b.facets().size() == factorial);
  }
}

TEST_CASE("iterated_bary on an edge") {
  auto edge = Complex::from_facets({{"a", "b"}});
  auto zero = iterated_bary(edge, 0);
  CHECK(zero.complex == edge);
  auto one = iterated_bary(edge, 1);
  CHECK(one.complex.vertex_count() == 3);
  CHECK(count_dim(one.complex, 1) == 2);
  auto two = iterated_bary(edge, 2);
  CHECK(two.complex.vertex_count() == 5);
  CHECK(count_dim(two.complex, 1) == 4);
  // Carriers: the midpoint of level one is carried by the whole edge.
  auto mid = one.complex.id_of("{a,b}");
  CHECK(one.carrier[mid] == Simplex{0, 1});
  auto left = one.complex.id_of("{a}");
  CHECK(one.carrier[left] == Simplex{0});
}

TEST_CASE("subdivision budget") {
  CHECK_THROWS_AS(bary_subdivide(simplex_closure(3), 10), BudgetExceeded);
  CHECK_THROWS_AS(iterated_bary(simplex_closure(2), 3, 100), BudgetExceeded);
}

TEST_CASE("is_simplicial_map") {
  auto edge = Complex::from_facets({{"0", "1"}});
  auto consensus_out = Complex::from_facets({{"0"}, {"1"}});
  CHECK(is_simplicial_map(SimplicialMap{{0, 1}}, edge, edge));
  CHECK(is_simplicial_map(SimplicialMap{{0, 0}}, edge, consensus_out));
  CHECK_FALSE(is_simplicial_map(SimplicialMap{{0, 1}}, edge, consensus_out));
  CHECK_THROWS(is_simplicial_map(SimplicialMap{{0}}, edge, edge));
}

TEST_CASE("is_carried_by") {
  auto task = consensus_task();
  // Both vertices to output 0: vertex 1 is only allowed output 1.
  CHECK_FALSE(is_carried_by(SimplicialMap{{0, 0}}, task.delta));
  CHECK_FALSE(is_carried_by(SimplicialMap{{1, 1}}, task.delta));
  // Identity on vertices is carried vertex-wise but the edge image {0,1} is
  // not a simplex of O.
  CHECK_FALSE(is_carried_by(SimplicialMap{{0, 1}}, task.delta));

  auto trivial = CarrierMap::trivial(task.input, task.output);
  CHECK(is_carried_by(SimplicialMap{{0, 0}}, trivial));
  // Swapped vertices still span {0,1}, which O lacks.
  CHECK_FALSE(is_carried_by(SimplicialMap{{1, 0}}, trivial));

  // A map over a different source.
  CHECK_THROWS(is_carried_by(SimplicialMap{{0}}, task.delta));
}

TEST_CASE("carrier maps reject bad assignments") {
  auto edge = Complex::from_facets({{"0", "1"}});
  std::map<Simplex, std::vector<Simplex>> missing{{Simplex{0}, {Simplex{0}}}};
  CHECK_THROWS(CarrierMap(edge, edge, missing));
  std::map<Simplex, std::vector<Simplex>> shrinking{
      {Simplex{0}, {Simplex{0, 1}}}, {Simplex{1}, {Simplex{1}}}, {Simplex{0, 1}, {Simplex{0}}}};
  CHECK_THROWS(CarrierMap(edge, edge, shrinking));
  auto k = kset_task({"a", "b", "c"}, 2);
  CHECK(k.delta.is_monotone());
}

TEST_CASE("subdivided carrier is monotone and uses base carriers") {
  auto task = path_task();
  auto sub = iterated_bary(task.input, 2);
  auto delta = subdivided_carrier(sub, task.delta);
  CHECK(delta.is_monotone());
  auto left = sub.complex.id_of("{{a}}");
  CHECK(delta.image(Simplex{left}) == task.delta.image(Simplex{task.input.id_of("a")}));
}

TEST_CASE("count condition") {
  CHECK(check_count_condition(7, 2, 1));
  CHECK_FALSE(check_count_condition(6, 2, 1));
  CHECK_FALSE(check_count_condition(4, 1, 2));
  CHECK(check_count_condition(1, 0, 5));
}

TEST_CASE("search agrees with brute force") {
  // Oracle values first, then the search.
  const auto two_set = kset_task({"0", "1"}, 2);
  CHECK(brute_force_maps(two_set, 1, 0) > 0);
  const auto consensus = consensus_task();
  for (std::size_t n = 0; n <= 2; ++n) CHECK(brute_force_maps(consensus, 1, n) == 0);
  const auto path = path_task();
  CHECK(brute_force_maps(path, 1, 0) == 0);
  CHECK(brute_force_maps(path, 1, 1) > 0);

  auto found = search_simplicial_approximation(two_set, 1, 2);
  REQUIRE(std::holds_alternative<Approximation>(found));
  CHECK(std::get<Approximation>(found).depth == 0);

  auto none = search_simplicial_approximation(consensus, 1, 2);
  REQUIRE(std::holds_alternative<NotFoundUpTo>(none));
  CHECK(std::get<NotFoundUpTo>(none).max_depth == 2);

  auto p = search_simplicial_approximation(path, 1, 2);
  REQUIRE(std::holds_alternative<Approximation>(p));
  const auto& a = std::get<Approximation>(p);
  CHECK(a.depth == 1);
  CHECK(is_simplicial_map(a.map, a.domain.complex, path.output));
  CHECK(is_carried_by(a.map, subdivided_carrier(a.domain, path.delta)));
  CHECK(path.output.name(a.map.image[a.domain.complex.id_of("{a,b}")]) == "m");
}

TEST_CASE("search with a complete carrier finds a constant map at depth 0") {
  auto input = Complex::from_facets({{"x", "y", "z"}});
  auto output = Complex::from_facets({{"p", "q"}});
  auto task = make_task(input, output, CarrierMap::trivial(input, output));
  auto r = search_simplicial_approximation(task, 2, 1);
  REQUIRE(std::holds_alternative<Approximation>(r));
  CHECK(std::get<Approximation>(r).depth == 0);
  CHECK(std::get<Approximation>(r).map.image == std::vector<VertexId>{0, 0, 0});
}

TEST_CASE("search soundness on random tasks") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto input = Complex::from_facets({{"a", "b"}, {"b", "c"}});
    auto output = Complex::from_facets({{"p", "q"}, {"q", "r"}, {"r", "s"}});
    std::map<Simplex, std::vector<Simplex>> images;
    // Random vertex images, edges get the union closure when it is a simplex
    // and the whole output otherwise.
    std::vector<VertexId> choice(3);
    for (auto& c : choice) c = static_cast<VertexId>(rng() % 4);
    for (const auto& s : input.simplices()) {
      if (s.size() == 1) {
        images[s] = {Simplex{choice[s.ids()[0]]}};
      } else {
        images[s] = output.facets();
      }
    }
    auto task = make_task(input, output, CarrierMap(input, output, images));
    auto r = search_simplicial_approximation(task, 1, 2);
    if (auto* a = std::get_if<Approximation>(&r)) {
      CHECK(is_simplicial_map(a->map, a->domain.complex, output));
      CHECK(is_carried_by(a->map, subdivided_carrier(a->domain, task.delta)));
      CHECK(brute_force_maps(task, 1, a->depth) > 0);
      if (a->depth > 0) CHECK(brute_force_maps(task, 1, a->depth - 1) == 0);
    } else {
      for (std::size_t n = 0; n <= 2; ++n) CHECK(brute_force_maps(task, 1, n) == 0);
    }
  }
}

TEST_CASE("decide_solvability") {
  auto two_set = kset_task({"0", "1"}, 2);
  auto v = decide_solvability(two_set, 7, 1, 1);
  REQUIRE(std::holds_alternative<Solvable>(v));
  CHECK(std::get<Solvable>(v).plan.k == 2);
  CHECK(std::get<Solvable>(v).plan.depth == 0);

  auto u = decide_solvability(consensus_task(), 7, 1, 3);
  CHECK(std::holds_alternative<Unknown>(u));

  auto tri = kset_task({"a", "b", "c"}, 2);
  auto no = decide_solvability(tri, 4, 1, 2);
  REQUIRE(std::holds_alternative<Unsolvable>(no));
  CHECK(std::get<Unsolvable>(no).reason.find("counting") == 0);

  // Never Solvable when the counting condition fails.
  for (std::int64_t n1 = 1; n1 <= 6; ++n1) {
    for (int t = 0; t <= 2; ++t) {
      auto r = decide_solvability(two_set, n1, t, 1);
      if (!check_count_condition(n1, t, 1)) CHECK(std::holds_alternative<Unsolvable>(r));
    }
  }
}

TEST_CASE("task files") {
  const char* text = R"({
    "input_complex": {"facets": [["a", "b", "c"]]},
    "output_complex": {"facets": [["p", "q"], ["q", "r"]]},
    "delta": [
      {"simplex": ["a", "b"], "image_facets": [["p"]]},
      {"simplex": ["b", "c"], "image_facets": [["p", "q"]]},
      {"simplex": ["a", "b", "c"], "image_facets": [["p", "q"], ["q", "r"]]},
      {"simplex": ["c"], "image_facets": [["q"]]}
    ]
  })";
  auto task = task_from_text(text);
  const auto& in = task.input;
  const auto& out = task.output;
  // "a" inherits from {a,b}; "b" from the intersection of {a,b} and {b,c};
  // {a,c} from {a,b,c}.
  CHECK(task.delta.image(Simplex{in.id_of("a")}) == std::vector<Simplex>{Simplex{out.id_of("p")}});
  CHECK(task.delta.image(Simplex{in.id_of("b")}) == std::vector<Simplex>{Simplex{out.id_of("p")}});
  CHECK(task.delta.image(Simplex{in.id_of("a"), in.id_of("c")}).size() == 2);

  auto round = task_from_json(task_to_json(task));
  CHECK(round.input == task.input);
  CHECK(round.output == task.output);
  CHECK(round.delta.images() == task.delta.images());
}

TEST_CASE("task file errors carry a location") {
  auto error_of = [](const char* text) {
    try {
      task_from_text(text);
    } catch (const TaskLoadError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("{").find("byte") != std::string::npos);
  CHECK(error_of(R"({"input_complex": {"facets": [["a"]]}, "output_complex": {"facets": [["p"]]},
                    "delta": [{"simplex": ["z"], "image_facets": [["p"]]}]})")
            .find("delta[0].simplex") == 0);
  CHECK(error_of(R"({"input_complex": {"facets": [["a", "b"]]}, "output_complex": {"facets": [["p"]]},
                    "delta": [{"simplex": ["a"], "image_facets": [["p"]]}]})")
            .find("delta") == 0);
  CHECK(error_of(R"({"input_complex": {"facets": []}, "output_complex": {"facets": [["p"]]}, "delta": []})")
            .find("input_complex") == 0);
}
