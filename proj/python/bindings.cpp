// Python bindings. Structured results cross the boundary as JSON text and
// are decoded on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "byzct/config_io.hpp"
#include "byzct/simnet.hpp"
#include "byzct/task_io.hpp"

namespace py = pybind11;
using namespace byzct;
using nlohmann::json;

namespace {

std::string check(const std::string& task_text, std::int64_t n_plus_1, int t, std::size_t max_subdiv,
                  std::size_t budget) {
  const auto task = task_from_text(task_text);
  SearchLimits limits;
  limits.simplex_budget = budget;
  const auto verdict = decide_solvability(task, n_plus_1, t, max_subdiv, limits);
  json out{{"n_plus_1", n_plus_1}, {"t", t}, {"dim_input", task.input.dimension()}};
  if (const auto* s = std::get_if<Solvable>(&verdict)) {
    const auto& dom = s->plan.domain.complex;
    json map = json::object();
    for (VertexId v = 0; v < dom.vertex_count(); ++v) {
      map[dom.name(v)] = task.output.name(s->plan.approx.image[v]);
    }
    out.update({{"verdict", "SOLVABLE"}, {"k", s->plan.k}, {"N", s->plan.depth}, {"map", map}});
  } else if (const auto* u = std::get_if<Unsolvable>(&verdict)) {
    out.update({{"verdict", "UNSOLVABLE"}, {"reason", u->reason}});
  } else {
    out.update({{"verdict", "UNKNOWN"}, {"searched_depth", std::get<Unknown>(verdict).searched_depth}});
  }
  return out.dump();
}

SimConfig parse_config(const std::string& text, const std::string& base_dir) {
  return config_from_json(json::parse(text), base_dir);
}

std::string run_one(const std::string& config_text, const std::string& base_dir, std::optional<std::uint64_t> seed,
                    std::size_t max_steps) {
  auto config = parse_config(config_text, base_dir);
  if (seed) config.seed = *seed;
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run(config, max_steps);
  }
  json decisions = json::array();
  for (const auto& m : r.machines) {
    if (!m) {
      decisions.push_back(nullptr);
    } else if (const auto d = m->decision()) {
      decisions.push_back(*d);
    } else {
      decisions.push_back("");
    }
  }
  json undecided = json::array();
  for (auto p : r.verdict.undecided) undecided.push_back(index(p));
  return json{{"verdict", to_string(r.verdict.kind)},
              {"seed", r.config.seed},
              {"steps", r.steps},
              {"decisions", decisions},
              {"undecided", undecided},
              {"violations", r.verdict.violations},
              {"trace", r.trace.serialize()}}
      .dump();
}

std::string explore_seeds(const std::string& config_text, const std::string& base_dir,
                          const std::vector<std::uint64_t>& seeds, std::size_t max_steps) {
  const auto config = parse_config(config_text, base_dir);
  ExploreReport r;
  {
    py::gil_scoped_release release;
    r = explore(config, seeds, max_steps);
  }
  json out{{"runs", r.runs},
           {"violating_runs", r.violating_runs},
           {"verdicts", r.verdicts},
           {"failures", r.failures},
           {"outcomes", r.outcomes}};
  if (r.counterexample_seed) {
    out["counterexample"] = {
        {"seed", *r.counterexample_seed}, {"detail", r.counterexample_detail}, {"trace", r.counterexample_trace}};
  }
  return out.dump();
}

std::string exhaustive(const std::string& config_text, const std::string& base_dir, std::size_t max_messages) {
  const auto config = parse_config(config_text, base_dir);
  ExhaustiveReport r;
  {
    py::gil_scoped_release release;
    r = explore_exhaustive(config, max_messages);
  }
  return json{{"states", r.states},
              {"terminal_states", r.terminal_states},
              {"messages", r.messages},
              {"verdicts", r.verdicts},
              {"violations", r.violations},
              {"outcomes", r.outcomes}}
      .dump();
}

const Complex& pick(const ColorlessTask& task, const std::string& which) {
  if (which == "input") return task.input;
  if (which == "output") return task.output;
  throw ConfigError("which: expected \"input\" or \"output\"");
}

}  // namespace

PYBIND11_MODULE(_byzct, m) {
  m.doc() = "Byzantine colorless-task engine (native part)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TaskLoadError>(m, "TaskLoadError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  m.attr("DEFAULT_SIMPLEX_BUDGET") = kDefaultSimplexBudget;

  m.def("check", &check, py::arg("task"), py::arg("n_plus_1"), py::arg("t"), py::arg("max_subdiv") = 2,
        py::arg("budget") = kDefaultSimplexBudget);
  m.def("run", &run_one, py::arg("config"), py::arg("base_dir") = ".", py::arg("seed") = py::none(),
        py::arg("max_steps") = 2'000'000);
  m.def("explore", &explore_seeds, py::arg("config"), py::arg("base_dir"), py::arg("seeds"),
        py::arg("max_steps") = 2'000'000);
  m.def("explore_exhaustive", &exhaustive, py::arg("config"), py::arg("base_dir") = ".",
        py::arg("max_messages") = 12);
  m.def(
      "subdivide",
      [](const std::string& task_text, const std::string& which, std::size_t times, std::size_t budget) {
        return complex_to_json(iterated_bary(pick(task_from_text(task_text), which), times, budget).complex).dump();
      },
      py::arg("task"), py::arg("which") = "input", py::arg("times") = 1, py::arg("budget") = kDefaultSimplexBudget);
  m.def(
      "skeleton",
      [](const std::string& task_text, const std::string& which, int level) {
        return complex_to_json(skeleton(pick(task_from_text(task_text), which), level)).dump();
      },
      py::arg("task"), py::arg("which") = "input", py::arg("level"));
  m.def(
      "normalize_task", [](const std::string& task_text) { return task_to_json(task_from_text(task_text)).dump(); },
      py::arg("task"));
}
