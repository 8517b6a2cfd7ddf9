#include "byzct/task_io.hpp"

#include <fstream>
#include <sstream>

namespace byzct {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw TaskLoadError(where + ": " + what); }

std::vector<std::string> name_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of vertex names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(where + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::set<Simplex> closure(const std::vector<Simplex>& facets) {
  std::set<Simplex> out;
  for (const auto& f : facets) {
    for (auto& s : faces_of(f)) out.insert(std::move(s));
  }
  return out;
}

std::vector<Simplex> intersect_images(const std::vector<const std::vector<Simplex>*>& images) {
  auto common = closure(*images.front());
  for (std::size_t i = 1; i < images.size(); ++i) {
    auto other = closure(*images[i]);
    std::erase_if(common, [&](const Simplex& s) { return !other.contains(s); });
  }
  return maximal_simplices({common.begin(), common.end()});
}

}  // namespace

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("facets")) fail(where, "missing \"facets\"");
  const auto& facets_j = j.at("facets");
  if (!facets_j.is_array()) fail(where + ".facets", "expected an array");
  std::vector<std::vector<std::string>> facets;
  for (std::size_t i = 0; i < facets_j.size(); ++i) {
    facets.push_back(name_list(facets_j[i], where + ".facets[" + std::to_string(i) + "]"));
  }
  std::vector<std::pair<std::string, Rank>> ranks;
  if (j.contains("ranks")) {
    const auto& r = j.at("ranks");
    if (!r.is_object()) fail(where + ".ranks", "expected an object");
    for (const auto& [name, value] : r.items()) {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        fail(where + ".ranks." + name, "expected a non-negative integer");
      }
      ranks.emplace_back(name, value.get<Rank>());
    }
  }
  try {
    return Complex::from_facets(facets, ranks);
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

json complex_to_json(const Complex& k) {
  json out;
  out["facets"] = k.facet_names();
  json ranks = json::object();
  for (const auto& v : k.vertices()) ranks[v.name] = v.rank;
  out["ranks"] = ranks;
  return out;
}

ColorlessTask task_from_json(const json& j) {
  if (!j.is_object()) fail("$", "expected an object");
  for (const char* key : {"input_complex", "output_complex", "delta"}) {
    if (!j.contains(key)) fail("$", std::string("missing \"") + key + "\"");
  }
  auto input = complex_from_json(j.at("input_complex"), "input_complex");
  auto output = complex_from_json(j.at("output_complex"), "output_complex");

  const auto& delta_j = j.at("delta");
  if (!delta_j.is_array()) fail("delta", "expected an array");
  std::map<Simplex, std::vector<Simplex>> listed;
  for (std::size_t i = 0; i < delta_j.size(); ++i) {
    const std::string at = "delta[" + std::to_string(i) + "]";
    const auto& entry = delta_j[i];
    if (!entry.is_object() || !entry.contains("simplex") || !entry.contains("image_facets")) {
      fail(at, "expected {\"simplex\": [...], \"image_facets\": [[...], ...]}");
    }
    auto names = name_list(entry.at("simplex"), at + ".simplex");
    auto s = input.simplex_of(names);
    if (!s || names.empty()) fail(at + ".simplex", "not a simplex of the input complex");
    const auto& img_j = entry.at("image_facets");
    if (!img_j.is_array()) fail(at + ".image_facets", "expected an array");
    std::vector<Simplex> image;
    for (std::size_t f = 0; f < img_j.size(); ++f) {
      const std::string fat = at + ".image_facets[" + std::to_string(f) + "]";
      auto t = output.simplex_of(name_list(img_j[f], fat));
      if (!t) fail(fat, "not a simplex of the output complex");
      image.push_back(*t);
    }
    if (!listed.emplace(*s, std::move(image)).second) fail(at + ".simplex", "listed twice");
  }

  std::map<Simplex, std::vector<Simplex>> images;
  for (const auto& s : input.simplices()) {
    if (auto it = listed.find(s); it != listed.end()) {
      images.emplace(s, it->second);
      continue;
    }
    std::vector<const Simplex*> supers;
    for (const auto& [l, img] : listed) {
      if (s.is_face_of(l)) supers.push_back(&l);
    }
    std::vector<const std::vector<Simplex>*> minimal;
    for (const auto* a : supers) {
      bool is_min = std::none_of(supers.begin(), supers.end(),
                                 [&](const Simplex* b) { return b != a && b->is_face_of(*a); });
      if (is_min) minimal.push_back(&listed.at(*a));
    }
    if (minimal.empty()) {
      auto names = input.names_of(s);
      std::string label;
      for (const auto& n : names) label += (label.empty() ? "" : ",") + n;
      fail("delta", "no entry applies to input simplex {" + label + "}");
    }
    images.emplace(s, intersect_images(minimal));
  }

  try {
    CarrierMap delta(input, output, std::move(images));
    return make_task(std::move(input), std::move(output), std::move(delta));
  } catch (const std::invalid_argument& e) {
    fail("delta", e.what());
  }
}

ColorlessTask task_from_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TaskLoadError("$: byte " + std::to_string(e.byte) + ": invalid JSON");
  }
  return task_from_json(j);
}

ColorlessTask load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TaskLoadError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return task_from_text(buf.str());
  } catch (const TaskLoadError& e) {
    throw TaskLoadError(path + ": " + e.what());
  }
}

json task_to_json(const ColorlessTask& task) {
  json out;
  out["input_complex"] = complex_to_json(task.input);
  out["output_complex"] = complex_to_json(task.output);
  json delta = json::array();
  for (const auto& [s, image] : task.delta.images()) {
    json facets = json::array();
    for (const auto& f : image) facets.push_back(task.output.names_of(f));
    delta.push_back({{"simplex", task.input.names_of(s)}, {"image_facets", facets}});
  }
  out["delta"] = delta;
  return out;
}

}  // namespace byzct
