#include "byzct/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "byzct/task_io.hpp"

namespace byzct {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

AdversarySpec adversary_from_json(const json& j) {
  AdversarySpec a;
  if (!j.is_object()) throw ConfigError("adversary: expected an object");
  const auto name = field<std::string>(j, "kind", "mute");
  auto kind = adversary_from_string(name);
  if (!kind) throw ConfigError("adversary.kind: unknown strategy '" + name + "'");
  a.kind = *kind;
  a.crash_step = field<std::size_t>(j, "crash_step", 0);
  a.values = field<std::vector<std::string>>(j, "values", {});
  a.garbage_seed = field<std::uint64_t>(j, "garbage_seed", 0);
  a.garbage_budget = field<std::size_t>(j, "garbage_budget", 0);
  a.target = field<std::string>(j, "target", "");
  if (j.contains("per_receiver")) {
    const auto& pr = j.at("per_receiver");
    if (!pr.is_object()) throw ConfigError("adversary.per_receiver: expected an object");
    for (const auto& [k, v] : pr.items()) {
      try {
        a.per_receiver[pid(static_cast<std::uint32_t>(std::stoul(k)))] = v.get<std::string>();
      } catch (const std::exception&) {
        throw ConfigError("adversary.per_receiver." + k + ": expected process index -> string");
      }
    }
  }
  return a;
}

}  // namespace

SimConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  SimConfig c;
  c.n_plus_1 = field<std::uint32_t>(j, "n_plus_1", c.n_plus_1);
  c.t = field<std::uint32_t>(j, "t", c.t);
  if (j.contains("core_size")) c.core_size = field<std::uint32_t>(j, "core_size", 0);
  for (auto p : field<std::vector<std::uint32_t>>(j, "faulty", {})) c.faulty.insert(pid(p));
  if (j.contains("adversary")) c.adversary = adversary_from_json(j.at("adversary"));
  c.seed = field<std::uint64_t>(j, "seed", c.seed);
  c.fairness_bound = field<std::size_t>(j, "fairness_bound", c.fairness_bound);
  const auto proto = field<std::string>(j, "protocol", to_string(c.protocol));
  auto kind = protocol_from_string(proto);
  if (!kind) throw ConfigError("protocol: unknown protocol '" + proto + "'");
  c.protocol = *kind;
  c.inputs = field<std::vector<std::string>>(j, "inputs", {});
  c.depth = field<std::size_t>(j, "depth", c.depth);
  c.max_subdiv = field<std::size_t>(j, "max_subdiv", c.max_subdiv);
  c.record_trace = field<bool>(j, "record_trace", c.record_trace);
  c.ideal_broadcast = field<bool>(j, "ideal_broadcast", c.ideal_broadcast);
  if (j.contains("mutation")) {
    const auto& m = j.at("mutation");
    c.mutation.quorum_threshold_shift = field<int>(m, "quorum_threshold_shift", 0);
    c.mutation.echo_threshold_shift = field<int>(m, "echo_threshold_shift", 0);
  }
  try {
    if (j.contains("task")) {
      c.task = std::make_shared<const ColorlessTask>(task_from_json(j.at("task")));
    } else if (j.contains("task_file")) {
      auto path = std::filesystem::path(base_dir) / field<std::string>(j, "task_file", "");
      c.task = std::make_shared<const ColorlessTask>(load_task(path.string()));
    }
  } catch (const TaskLoadError& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": byte " + std::to_string(e.byte) + ": invalid JSON");
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const SimConfig& c) {
  json j;
  j["n_plus_1"] = c.n_plus_1;
  j["t"] = c.t;
  if (c.core_size) j["core_size"] = *c.core_size;
  std::vector<std::uint32_t> faulty;
  for (auto p : c.faulty) faulty.push_back(index(p));
  j["faulty"] = faulty;
  json a;
  a["kind"] = to_string(c.adversary.kind);
  a["crash_step"] = c.adversary.crash_step;
  a["values"] = c.adversary.values;
  a["garbage_seed"] = c.adversary.garbage_seed;
  a["garbage_budget"] = c.adversary.garbage_budget;
  a["target"] = c.adversary.target;
  json pr = json::object();
  for (const auto& [p, v] : c.adversary.per_receiver) pr[std::to_string(index(p))] = v;
  a["per_receiver"] = pr;
  j["adversary"] = a;
  j["seed"] = c.seed;
  j["fairness_bound"] = c.fairness_bound;
  j["protocol"] = to_string(c.protocol);
  j["inputs"] = c.inputs;
  j["depth"] = c.depth;
  j["max_subdiv"] = c.max_subdiv;
  j["mutation"] = {{"quorum_threshold_shift", c.mutation.quorum_threshold_shift},
                   {"echo_threshold_shift", c.mutation.echo_threshold_shift}};
  j["record_trace"] = c.record_trace;
  j["ideal_broadcast"] = c.ideal_broadcast;
  if (c.task) j["task"] = task_to_json(*c.task);
  return j;
}

}  // namespace byzct
