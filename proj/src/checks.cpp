#include "byzct/checks.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "byzct/simnet.hpp"

namespace byzct {

namespace {

std::string pname(ProcessId p) { return "P" + std::to_string(index(p)); }

std::vector<const ProcessMachine*> correct_machines(const CheckContext& ctx) {
  std::vector<const ProcessMachine*> out;
  for (const auto& m : ctx.machines) {
    if (m) out.push_back(&*m);
  }
  return out;
}

/// Phase records of one kind, grouped by instance, for every correct process.
std::map<std::uint32_t, std::vector<std::pair<ProcessId, const PhaseRecord*>>> phases_of(
    const CheckContext& ctx, std::initializer_list<PhaseKind> kinds) {
  std::map<std::uint32_t, std::vector<std::pair<ProcessId, const PhaseRecord*>>> out;
  for (const auto* m : correct_machines(ctx)) {
    for (const auto& rec : m->phases()) {
      if (std::find(kinds.begin(), kinds.end(), rec.kind) != kinds.end()) {
        out[rec.instance].emplace_back(m->self(), &rec);
      }
    }
  }
  return out;
}

MessageSet intersect(const MessageSet& a, const MessageSet& b) {
  MessageSet out;
  for (const auto& [s, c] : a) {
    auto it = b.find(s);
    if (it != b.end() && it->second == c) out.emplace(s, c);
  }
  return out;
}

std::size_t difference_size(const MessageSet& a, const MessageSet& b) { return a.size() - intersect(a, b).size(); }

std::string set_label(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& v : s) out += (out.size() > 1 ? "," : "") + v;
  return out + "}";
}

}  // namespace

std::string checker_name(const std::string& violation) { return violation.substr(0, violation.find(':')); }

std::optional<std::vector<std::string>> parse_face_name(const std::string& name) {
  if (name.size() < 2 || name.front() != '{' || name.back() != '}') return std::nullopt;
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 1; i + 1 < name.size(); ++i) {
    const char c = name[i];
    if (c == '{') ++depth;
    if (c == '}' && --depth < 0) return std::nullopt;
    if (c == ',' && depth == 0) {
      if (cur.empty()) return std::nullopt;
      out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (depth != 0 || cur.empty()) return std::nullopt;
  out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> check_broadcast(const CheckContext& ctx) {
  std::vector<std::string> v;
  const auto machines = correct_machines(ctx);
  std::set<ProcessId> correct;
  for (const auto* m : machines) correct.insert(m->self());

  std::map<std::pair<ProcessId, RbTag>, Payload> sent;
  for (const auto* m : machines) {
    for (const auto& s : m->sent()) sent.emplace(std::make_pair(s.origin, s.tag), s.content);
  }

  std::map<std::pair<ProcessId, RbTag>, std::pair<ProcessId, Payload>> first;
  std::map<std::pair<ProcessId, RbTag>, std::set<ProcessId>> receivers;
  for (const auto* m : machines) {
    for (const auto& d : m->delivered()) {
      const auto key = std::make_pair(d.origin, d.tag);
      if (correct.contains(d.origin)) {
        auto it = sent.find(key);
        if (it == sent.end() || it->second != d.content) {
          v.push_back("rb-integrity: " + pname(m->self()) + " delivered " + tag_label(d.tag, Phase::kInit) +
                      " from " + pname(d.origin) + " that was never broadcast");
        }
      }
      auto [it, inserted] = first.emplace(key, std::make_pair(m->self(), d.content));
      if (!inserted && it->second.second != d.content) {
        v.push_back("rb-uniqueness: " + pname(it->second.first) + " and " + pname(m->self()) +
                    " delivered different contents for " + tag_label(d.tag, Phase::kInit) + " from " +
                    pname(d.origin));
      }
      receivers[key].insert(m->self());
    }
  }

  if (!ctx.quiescent) return v;
  for (const auto& [key, who] : receivers) {
    if (who.size() != correct.size()) {
      v.push_back("rb-global-liveness: " + tag_label(key.second, Phase::kInit) + " from " + pname(key.first) +
                  " delivered by " + std::to_string(who.size()) + " of " + std::to_string(correct.size()) +
                  " correct processes");
    }
  }
  for (const auto& [key, content] : sent) {
    auto it = receivers.find(key);
    if (it == receivers.end() || it->second.size() != correct.size()) {
      v.push_back("rb-liveness: broadcast " + tag_label(key.second, Phase::kInit) + " of " + pname(key.first) +
                  " not delivered everywhere");
    }
  }
  return v;
}

std::vector<std::string> check_quorum(const CheckContext& ctx) {
  std::vector<std::string> v;
  const auto n1 = ctx.config.n_plus_1;
  const auto t = ctx.config.t;
  for (const auto& [inst, recs] : phases_of(ctx, {PhaseKind::kQuorum, PhaseKind::kKset})) {
    std::vector<std::pair<ProcessId, const MessageSet*>> done;
    for (const auto& [p, rec] : recs) {
      if (!rec->returned) continue;
      const auto& m = *rec->returned;
      if (m.size() < n1 - t) {
        v.push_back("quorum-size: " + pname(p) + " returned " + std::to_string(m.size()) + " messages");
      }
      if (quorum_of(m, t + 1).empty()) v.push_back("quorum-empty: " + pname(p) + " returned without a quorum");
      done.emplace_back(p, &m);
    }
    for (const auto& [pi, mi] : done) {
      for (const auto& [pj, mj] : done) {
        if (pi != pj && difference_size(*mi, *mj) > t) {
          v.push_back("quorum-difference: |M_" + std::to_string(index(pi)) + " \\ M_" + std::to_string(index(pj)) +
                      "| > t in instance " + std::to_string(inst));
        }
      }
    }
  }
  return v;
}

std::vector<std::string> check_stable(const CheckContext& ctx) {
  std::vector<std::string> v;
  const auto n1 = ctx.config.n_plus_1;
  const auto t = ctx.config.t;
  std::set<ProcessId> correct;
  for (const auto* m : correct_machines(ctx)) correct.insert(m->self());

  for (const auto* m : correct_machines(ctx)) {
    for (const auto& [inst, sc] : m->stable_collectors()) {
      if (!sc.own_reports_monotone()) {
        v.push_back("stable-monotone: " + pname(m->self()) + " sent a shrinking report in instance " +
                    std::to_string(inst));
      }
      for (auto p : sc.shrinking_reporters()) {
        if (correct.contains(p)) {
          v.push_back("stable-monotone: " + pname(m->self()) + " saw the report slot of " + pname(p) + " shrink");
        }
      }
    }
  }

  for (const auto& [inst, recs] : phases_of(ctx, {PhaseKind::kStable, PhaseKind::kBary})) {
    std::vector<std::pair<ProcessId, const MessageSet*>> done;
    for (const auto& [p, rec] : recs) {
      if (rec->returned) done.emplace_back(p, &*rec->returned);
    }
    for (std::size_t a = 0; a < done.size(); ++a) {
      for (std::size_t b = a + 1; b < done.size(); ++b) {
        const auto& [pi, mi] = done[a];
        const auto& [pj, mj] = done[b];
        const auto both = intersect(*mi, *mj);
        const std::string pair = pname(pi) + "/" + pname(pj) + " instance " + std::to_string(inst);
        if (both.size() < n1 - t) v.push_back("stable-intersection: " + pair);
        if (quorum_of(both, t + 1).empty()) v.push_back("stable-common-quorum: " + pair);
        if (!is_subset(*mi, *mj) && !is_subset(*mj, *mi)) v.push_back("stable-chain: " + pair);
      }
    }
  }
  return v;
}

std::vector<std::string> check_kset(const CheckContext& ctx) {
  std::vector<std::string> v;
  const auto k = ctx.config.t + 1;
  for (const auto& [inst, recs] : phases_of(ctx, {PhaseKind::kKset})) {
    std::set<std::string> inputs;
    for (const auto* m : correct_machines(ctx)) {
      for (const auto& rec : m->phases()) {
        if (rec.instance == inst) inputs.insert(rec.input);
      }
    }
    std::set<std::string> decisions;
    for (const auto& [p, rec] : recs) {
      if (!rec->output) continue;
      if (!inputs.contains(*rec->output)) {
        v.push_back("kset-validity: " + pname(p) + " decided " + *rec->output + " which no correct process input");
      }
      decisions.insert(*rec->output);
    }
    if (decisions.size() > k) {
      v.push_back("kset-agreement: " + std::to_string(decisions.size()) + " distinct decisions " +
                  set_label(decisions) + " for k=" + std::to_string(k));
    }
  }
  return v;
}

std::vector<std::string> check_bary(const CheckContext& ctx) {
  std::vector<std::string> v;
  for (const auto& [inst, recs] : phases_of(ctx, {PhaseKind::kBary})) {
    std::set<std::string> inputs;
    for (const auto& [p, rec] : recs) inputs.insert(rec->input);
    // The inputs of this phase are assumed to span σ; the oracle is bary(σ).
    const std::vector<std::string> sigma(inputs.begin(), inputs.end());
    Complex oracle;
    try {
      oracle = bary_subdivide(Complex::from_facets({sigma}));
    } catch (const std::exception& e) {
      v.push_back("bary-simplex: cannot build oracle for instance " + std::to_string(inst) + ": " + e.what());
      continue;
    }

    std::vector<std::pair<ProcessId, std::set<std::string>>> outs;
    std::vector<std::string> out_names;
    for (const auto& [p, rec] : recs) {
      if (!rec->output) continue;
      auto members = parse_face_name(*rec->output);
      if (!members || members->empty()) {
        v.push_back("bary-validity: " + pname(p) + " output malformed face " + *rec->output);
        continue;
      }
      std::set<std::string> face(members->begin(), members->end());
      for (const auto& x : face) {
        if (!inputs.contains(x)) {
          v.push_back("bary-validity: " + pname(p) + " output " + *rec->output + " contains non-input " + x);
        }
      }
      outs.emplace_back(p, std::move(face));
      out_names.push_back(*rec->output);
    }
    for (std::size_t a = 0; a < outs.size(); ++a) {
      for (std::size_t b = a + 1; b < outs.size(); ++b) {
        const auto& fa = outs[a].second;
        const auto& fb = outs[b].second;
        const bool ab = std::includes(fb.begin(), fb.end(), fa.begin(), fa.end());
        const bool ba = std::includes(fa.begin(), fa.end(), fb.begin(), fb.end());
        if (!ab && !ba) {
          v.push_back("bary-chain: " + pname(outs[a].first) + " and " + pname(outs[b].first) +
                      " output incomparable faces in instance " + std::to_string(inst));
        }
      }
    }
    if (!out_names.empty() && !oracle.simplex_of(out_names)) {
      v.push_back("bary-simplex: outputs of instance " + std::to_string(inst) + " do not span a simplex of bary(sigma)");
    }
  }

  if (ctx.config.protocol == ProtocolKind::kBaryIterated && ctx.config.depth > 0) {
    std::set<std::string> inputs;
    std::vector<std::string> decisions;
    for (const auto* m : correct_machines(ctx)) {
      inputs.insert(m->input());
      if (m->decision()) decisions.push_back(*m->decision());
    }
    if (!decisions.empty()) {
      try {
        auto sub = iterated_bary(Complex::from_facets({{inputs.begin(), inputs.end()}}), ctx.config.depth);
        if (!sub.complex.simplex_of(decisions)) {
          v.push_back("bary-iterated-simplex: decisions do not span a simplex of bary^" +
                      std::to_string(ctx.config.depth) + "(sigma)");
        }
      } catch (const BudgetExceeded& e) {
        v.push_back(std::string("bary-iterated-simplex: oracle budget: ") + e.what());
      }
    }
  }
  return v;
}

std::vector<std::string> check_task(const CheckContext& ctx) {
  std::vector<std::string> v;
  if (!ctx.config.task) return v;
  const auto& task = *ctx.config.task;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  for (const auto* m : correct_machines(ctx)) {
    inputs.push_back(m->input());
    if (m->decision()) outputs.push_back(*m->decision());
  }
  auto sigma = task.input.simplex_of(inputs);
  if (!sigma) {
    v.push_back("task-precondition: correct inputs do not span an input simplex");
    return v;
  }
  if (outputs.empty()) return v;
  auto tau = task.output.simplex_of(outputs);
  if (!tau) {
    v.push_back("task-delta: outputs do not form a simplex of the output complex");
  } else if (!task.delta.carries(*sigma, *tau)) {
    v.push_back("task-delta: outputs are not in delta(sigma)");
  }
  return v;
}

std::vector<std::string> check_all(const CheckContext& ctx) {
  std::vector<std::string> v = check_broadcast(ctx);
  auto add = [&](std::vector<std::string> more) { v.insert(v.end(), more.begin(), more.end()); };
  switch (ctx.config.protocol) {
    case ProtocolKind::kBroadcast:
      break;
    case ProtocolKind::kQuorum:
      add(check_quorum(ctx));
      break;
    case ProtocolKind::kStable:
      add(check_stable(ctx));
      break;
    case ProtocolKind::kKset:
      add(check_quorum(ctx));
      add(check_kset(ctx));
      break;
    case ProtocolKind::kBary:
    case ProtocolKind::kBaryIterated:
      add(check_stable(ctx));
      add(check_bary(ctx));
      break;
    case ProtocolKind::kTask:
      add(check_quorum(ctx));
      add(check_kset(ctx));
      add(check_stable(ctx));
      add(check_bary(ctx));
      add(check_task(ctx));
      break;
  }
  return v;
}

}  // namespace byzct
