// byzct: solvability checks, simulations and subdivisions from the shell.
//
// Exit codes
//   0  success (SOLVABLE, AllDecided, no violations)
//   1  bad input: unreadable/invalid task or config, invalid flags
//   2  UNSOLVABLE
//   3  UNKNOWN
//   4  StepBudgetExceeded
//   5  simplex budget exceeded
//   6  Quiescent with undecided processes
//   7  PropertyViolation

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "byzct/config_io.hpp"
#include "byzct/simnet.hpp"
#include "byzct/task_io.hpp"

using namespace byzct;

namespace {

enum Exit : int {
  kOk = 0,
  kBadInput = 1,
  kUnsolvable = 2,
  kUnknown = 3,
  kStepBudget = 4,
  kSimplexBudget = 5,
  kQuiescent = 6,
  kViolation = 7,
};

std::size_t simplex_budget() {
  if (const char* env = std::getenv("BYZCT_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring BYZCT_BUDGET=" << env << "\n";
    }
  }
  return kDefaultSimplexBudget;
}

int verdict_exit(RunVerdict::Kind k) {
  switch (k) {
    case RunVerdict::Kind::kAllDecided: return kOk;
    case RunVerdict::Kind::kQuiescent: return kQuiescent;
    case RunVerdict::Kind::kStepBudgetExceeded: return kStepBudget;
    case RunVerdict::Kind::kPropertyViolation: return kViolation;
  }
  return kBadInput;
}

const Complex& pick(const ColorlessTask& task, const std::string& which) {
  return which == "output" ? task.output : task.input;
}

int cmd_check(const std::string& path, std::int64_t n_plus_1, std::optional<int> t, std::optional<int> core,
              std::size_t max_subdiv) {
  const int resilience = core ? *core - 1 : *t;
  if (resilience < 0) {
    std::cerr << "error: t must be non-negative\n";
    return kBadInput;
  }
  const auto task = load_task(path);
  SearchLimits limits;
  limits.simplex_budget = simplex_budget();
  const auto verdict = decide_solvability(task, n_plus_1, resilience, max_subdiv, limits);
  std::cout << "n_plus_1=" << n_plus_1 << "\n"
            << "t=" << resilience << "\n"
            << "dim_input=" << task.input.dimension() << "\n";
  if (const auto* s = std::get_if<Solvable>(&verdict)) {
    const auto& dom = s->plan.domain.complex;
    std::cout << "verdict=SOLVABLE\n"
              << "k=" << s->plan.k << "\n"
              << "N=" << s->plan.depth << "\n"
              << "domain_vertices=" << dom.vertex_count() << "\n";
    for (VertexId v = 0; v < dom.vertex_count(); ++v) {
      std::cout << "map=" << dom.name(v) << " -> " << task.output.name(s->plan.approx.image[v]) << "\n";
    }
    return kOk;
  }
  if (const auto* u = std::get_if<Unsolvable>(&verdict)) {
    std::cout << "verdict=UNSOLVABLE\n"
              << "reason=" << u->reason << "\n";
    return kUnsolvable;
  }
  std::cout << "verdict=UNKNOWN\n"
            << "searched_depth=" << std::get<Unknown>(verdict).searched_depth << "\n"
            << "note=no simplicial approximation up to this depth; a continuous map is not ruled out\n";
  return kUnknown;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::size_t max_steps,
            const std::string& trace_out) {
  auto config = load_config(path);
  if (seed) config.seed = *seed;
  config.record_trace = true;
  const auto result = run(config, max_steps);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << trace_out << "\n";
      return kBadInput;
    }
    out << result.trace.serialize();
  }
  std::cout << "protocol=" << to_string(result.config.protocol) << "\n"
            << "seed=" << result.config.seed << "\n"
            << "verdict=" << to_string(result.verdict.kind) << "\n"
            << "steps=" << result.steps << "\n";
  for (std::uint32_t p = 0; p < result.machines.size(); ++p) {
    const auto& m = result.machines[p];
    std::cout << "decision.P" << p << "=" << (m ? m->decision().value_or("-") : "faulty") << "\n";
  }
  for (auto p : result.verdict.undecided) std::cout << "undecided=P" << index(p) << "\n";
  for (const auto& v : result.verdict.violations) std::cout << "violation=" << v << "\n";
  return verdict_exit(result.verdict.kind);
}

int cmd_explore(const std::string& path, std::uint64_t count, std::uint64_t first, std::size_t max_steps,
                bool exhaustive, std::size_t max_messages, const std::string& counterexample_out) {
  auto config = load_config(path);
  if (exhaustive) {
    const auto r = explore_exhaustive(config, max_messages);
    std::cout << "mode=exhaustive\n"
              << "states=" << r.states << "\n"
              << "terminal_states=" << r.terminal_states << "\n"
              << "messages=" << r.messages << "\n";
    for (const auto& [k, n] : r.verdicts) std::cout << "verdict." << k << "=" << n << "\n";
    for (const auto& v : r.violations) std::cout << "violation=" << v << "\n";
    return r.violations.empty() ? kOk : kViolation;
  }
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  const auto r = explore(config, seeds, max_steps);
  std::cout << "mode=random\n"
            << "runs=" << r.runs << "\n"
            << "violating_runs=" << r.violating_runs << "\n";
  for (const auto& [k, n] : r.verdicts) std::cout << "verdict." << k << "=" << n << "\n";
  for (const auto& [k, n] : r.failures) std::cout << "failure." << k << "=" << n << "\n";
  for (const auto& [k, n] : r.outcomes) std::cout << "outcome." << k << "=" << n << "\n";
  if (r.counterexample_seed) {
    std::cout << "counterexample_seed=" << *r.counterexample_seed << "\n"
              << "counterexample=" << r.counterexample_detail << "\n";
    if (!counterexample_out.empty()) std::ofstream(counterexample_out, std::ios::binary) << r.counterexample_trace;
  }
  return r.violating_runs == 0 ? kOk : kViolation;
}

void print_complex(const Complex& k, bool stats) {
  if (stats) {
    std::cout << "vertices=" << k.vertex_count() << "\n"
              << "simplices=" << k.simplex_count() << "\n"
              << "facets=" << k.facets().size() << "\n"
              << "dimension=" << k.dimension() << "\n";
    return;
  }
  std::cout << complex_to_json(k).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine colorless-task engine"};
  app.require_subcommand(1, 1);

  std::string task_path;
  std::string config_path;

  auto* check = app.add_subcommand("check", "Decide solvability of a task file");
  std::int64_t n_plus_1 = 0;
  std::optional<int> t;
  std::optional<int> core;
  std::size_t max_subdiv = 2;
  check->add_option("task", task_path, "Task file")->required();
  check->add_option("--n", n_plus_1, "Number of processes (n+1)")->required();
  auto* t_opt = check->add_option("--t", t, "Faulty processes tolerated");
  auto* c_opt = check->add_option("--core-size", core, "Core size c; sets t = c-1");
  t_opt->excludes(c_opt);
  check->add_option("--max-subdiv", max_subdiv, "Largest subdivision depth to search")->capture_default_str();

  auto* run_cmd = app.add_subcommand("run", "Simulate one execution");
  std::optional<std::uint64_t> seed;
  std::size_t max_steps = 2'000'000;
  std::string trace_out;
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--seed", seed, "Scheduler seed (overrides the config)");
  run_cmd->add_option("--max-steps", max_steps, "Delivery budget")->capture_default_str();
  run_cmd->add_option("--trace-out", trace_out, "Write the trace here");

  auto* explore_cmd = app.add_subcommand("explore", "Sweep seeds or enumerate interleavings");
  std::uint64_t seed_count = 100;
  std::uint64_t seed_start = 1;
  bool exhaustive = false;
  std::size_t max_messages = 12;
  std::string counterexample_out;
  explore_cmd->add_option("config", config_path, "Config file")->required();
  explore_cmd->add_option("--seeds", seed_count, "Number of seeds")->capture_default_str();
  explore_cmd->add_option("--seed-start", seed_start, "First seed")->capture_default_str();
  explore_cmd->add_option("--max-steps", max_steps, "Delivery budget per run")->capture_default_str();
  explore_cmd->add_flag("--exhaustive", exhaustive, "Enumerate every interleaving (ideal broadcast, n+1 <= 4)");
  explore_cmd->add_option("--max-messages", max_messages, "Message bound for --exhaustive")->capture_default_str();
  explore_cmd->add_option("--counterexample-out", counterexample_out, "Write the first violating trace here");

  std::string which = "input";
  std::size_t times = 1;
  int level = 0;
  bool stats = false;
  auto* subdivide = app.add_subcommand("subdivide", "Iterated barycentric subdivision of a task complex");
  subdivide->add_option("task", task_path, "Task file")->required();
  subdivide->add_option("--which", which, "input or output")->check(CLI::IsMember({"input", "output"}));
  subdivide->add_option("--n-times", times, "Number of subdivisions")->capture_default_str();
  subdivide->add_flag("--stats", stats, "Print counts instead of the complex");

  auto* skel = app.add_subcommand("skeleton", "Skeleton of a task complex");
  skel->add_option("task", task_path, "Task file")->required();
  skel->add_option("--which", which, "input or output")->check(CLI::IsMember({"input", "output"}));
  skel->add_option("--level", level, "Largest simplex dimension kept")->required()->check(CLI::NonNegativeNumber);
  skel->add_flag("--stats", stats, "Print counts instead of the complex");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*check) {
      if (!t && !core) {
        std::cerr << "error: one of --t or --core-size is required\n";
        return kBadInput;
      }
      return cmd_check(task_path, n_plus_1, t, core, max_subdiv);
    }
    if (*run_cmd) return cmd_run(config_path, seed, max_steps, trace_out);
    if (*explore_cmd) {
      return cmd_explore(config_path, seed_count, seed_start, max_steps, exhaustive, max_messages, counterexample_out);
    }
    if (*subdivide) {
      const auto task = load_task(task_path);
      print_complex(iterated_bary(pick(task, which), times, simplex_budget()).complex, stats);
      return kOk;
    }
    if (*skel) {
      const auto task = load_task(task_path);
      print_complex(skeleton(pick(task, which), level), stats);
      return kOk;
    }
  } catch (const TaskLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimplexBudget;
  }
  return kBadInput;
}
