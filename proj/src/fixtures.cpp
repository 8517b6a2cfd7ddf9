#include "byzct/fixtures.hpp"

#include <stdexcept>

namespace byzct {

ColorlessTask kset_task(const std::vector<std::string>& values, int k) {
  if (values.empty() || k < 1) throw std::invalid_argument("kset_task needs values and k >= 1");
  auto input = Complex::from_facets({values});
  auto output = skeleton(input, k - 1);
  std::map<Simplex, std::vector<Simplex>> images;
  for (const auto& s : input.simplices()) {
    std::vector<Simplex> image;
    for (const auto& f : output.simplices()) {
      if (f.is_face_of(s)) image.push_back(f);
    }
    images.emplace(s, maximal_simplices(std::move(image)));
  }
  CarrierMap delta(input, output, std::move(images));
  return make_task(std::move(input), std::move(output), std::move(delta));
}

ColorlessTask consensus_task() {
  auto input = Complex::from_facets({{"0", "1"}});
  auto output = Complex::from_facets({{"0"}, {"1"}});
  std::map<Simplex, std::vector<Simplex>> images{
      {Simplex{0}, {Simplex{0}}},
      {Simplex{1}, {Simplex{1}}},
      {Simplex{0, 1}, {Simplex{0}, Simplex{1}}},
  };
  CarrierMap delta(input, output, std::move(images));
  return make_task(std::move(input), std::move(output), std::move(delta));
}

ColorlessTask path_task() {
  auto input = Complex::from_facets({{"a", "b"}});
  auto output = Complex::from_facets({{"a", "m"}, {"m", "b"}}, {{"a", 0}, {"m", 1}, {"b", 2}});
  const auto a = output.id_of("a");
  const auto m = output.id_of("m");
  const auto b = output.id_of("b");
  std::map<Simplex, std::vector<Simplex>> images{
      {Simplex{input.id_of("a")}, {Simplex{a}}},
      {Simplex{input.id_of("b")}, {Simplex{b}}},
      {Simplex{input.id_of("a"), input.id_of("b")}, {Simplex{a, m}, Simplex{m, b}}},
  };
  CarrierMap delta(input, output, std::move(images));
  return make_task(std::move(input), std::move(output), std::move(delta));
}

}  // namespace byzct
