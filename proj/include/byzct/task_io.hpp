#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "byzct/topology.hpp"
#include "json.hpp"

namespace byzct {

/// Task or complex file could not be loaded. what() starts with the JSON
/// location of the problem, e.g. "delta[2].simplex: ...".
class TaskLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Complex complex_from_json(const nlohmann::json& j, const std::string& where = "complex");

/// {"facets": [[...], ...], "ranks": {...}} with facets in canonical order.
nlohmann::json complex_to_json(const Complex& k);

/// Task file layout:
///   {"input_complex": {...}, "output_complex": {...},
///    "delta": [{"simplex": [...], "image_facets": [[...], ...]}, ...]}
/// Unlisted input simplices take the image of their minimal listed
/// superfaces (intersected when there are several).
ColorlessTask task_from_json(const nlohmann::json& j);
ColorlessTask task_from_text(std::string_view text);
ColorlessTask load_task(const std::string& path);

nlohmann::json task_to_json(const ColorlessTask& task);

}  // namespace byzct
