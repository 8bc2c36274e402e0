// Copyright 2026 The hooksmith Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Scenario interpreter. Entry methods are invoked directly (an app reaching
// a service through the SDK, reflection or raw IPC lands on the same service
// method) and their bodies are executed depth-first.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/policy.hpp"
#include "hooksmith/uppt.hpp"
#include "json.hpp"

namespace hooksmith {

struct ScenarioCall {
  std::string entry;
  std::vector<std::string> args;
  bool operator==(const ScenarioCall&) const = default;
};

struct Scenario {
  RuntimeContext context;
  std::vector<ScenarioCall> calls;
  bool operator==(const Scenario&) const = default;
};

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json calls = nlohmann::json::array();
  for (const auto& c : s.calls) calls.push_back({{"entry", c.entry}, {"args", c.args}});
  return {{"clock", format_clock(s.context.clock)},
          {"location", s.context.location},
          {"status",
           {{"foreground_app", s.context.foreground_app},
            {"category", s.context.category},
            {"back_stack", s.context.back_stack}}},
          {"calls", calls}};
}

inline Scenario parse_scenario(const nlohmann::json& j, const std::string& where = "scenario") {
  if (!j.is_object()) fail_validation(where + ": expected an object");
  detail::reject_unknown_keys(j, {"clock", "location", "status", "calls"}, where);
  Scenario s;
  s.context.clock = parse_clock(detail::require_string(detail::require(j, "clock", where), where + ".clock"));
  if (j.contains("location")) s.context.location = detail::require_string(j.at("location"), where + ".location");
  if (j.contains("status")) {
    const auto& st = j.at("status");
    detail::reject_unknown_keys(st, {"foreground_app", "category", "back_stack"}, where + ".status");
    if (st.contains("foreground_app")) {
      s.context.foreground_app = detail::require_string(st.at("foreground_app"), where + ".status.foreground_app");
    }
    if (st.contains("category")) s.context.category = detail::require_string(st.at("category"), where + ".status.category");
    if (st.contains("back_stack")) {
      if (!st.at("back_stack").is_array()) fail_validation(where + ".status.back_stack: expected an array");
      for (const auto& n : st.at("back_stack")) {
        s.context.back_stack.push_back(detail::require_string(n, where + ".status.back_stack[]"));
      }
    }
  }
  const auto& calls = detail::require(j, "calls", where);
  if (!calls.is_array()) fail_validation(where + ".calls: expected an array");
  for (const auto& c : calls) {
    ScenarioCall call;
    call.entry = detail::require_string(detail::require(c, "entry", where + ".calls[]"), where + ".calls[].entry");
    if (c.contains("args")) {
      for (const auto& a : c.at("args")) call.args.push_back(a.is_string() ? a.get<std::string>() : a.dump());
    }
    s.calls.push_back(std::move(call));
  }
  return s;
}

// Frames are numbered from 1 in activation order within one simulation.
struct HookFired {
  std::string method;
  std::string resource;
  Decision decision = Decision::allow;
  std::size_t frame = 0;
  bool operator==(const HookFired&) const = default;
};

struct OpExecuted {
  std::string method;
  std::string op;
  std::size_t frame = 0;
  std::vector<std::size_t> active_frames;  // outermost first, ends with frame
  bool operator==(const OpExecuted&) const = default;
};

struct DataReturned {
  std::string method;
  std::string resource;
  ValueClass value_class = ValueClass::real;
  std::string value;
  std::size_t frame = 0;
  bool operator==(const DataReturned&) const = default;
};

struct TraceEvent {
  std::size_t call = 0;  // index into Scenario::calls
  std::variant<HookFired, OpExecuted, DataReturned> event;
  bool operator==(const TraceEvent&) const = default;
};

using Trace = std::vector<TraceEvent>;

inline nlohmann::json to_json(const TraceEvent& e) {
  return std::visit(
      [&](const auto& ev) -> nlohmann::json {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, HookFired>) {
          return {{"call", e.call}, {"kind", "HookFired"}, {"method", ev.method}, {"resource", ev.resource},
                  {"decision", to_string(ev.decision)}, {"frame", ev.frame}};
        } else if constexpr (std::is_same_v<T, OpExecuted>) {
          return {{"call", e.call}, {"kind", "OpExecuted"}, {"method", ev.method}, {"op", ev.op},
                  {"frame", ev.frame}, {"active_frames", ev.active_frames}};
        } else {
          return {{"call", e.call}, {"kind", "DataReturned"}, {"method", ev.method}, {"resource", ev.resource},
                  {"value_class", to_string(ev.value_class)}, {"value", ev.value}, {"frame", ev.frame}};
        }
      },
      e.event);
}

inline nlohmann::json to_json(const Trace& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : t) out.push_back(to_json(e));
  return out;
}

inline constexpr std::size_t kMaxCallDepth = 64;

// Static facts about the corpus the interpreter needs; build once, run many.
class Simulator {
 public:
  Simulator(const Corpus& c, const OalTable& oal) : corpus_(c), index_(corpus_) {
    for (const auto& [name, op] : oal.operations()) {
      for (const auto& k : op.keywords) {
        if (k.kind == KeywordKind::sds_type && !sds_resource_.count(k.text)) sds_resource_[k.text] = op.resource;
      }
    }
    corpus_.for_each_method([&](const UnitDecl&, const MethodRecord& m) {
      const auto ops = performed_operations(m, oal);
      local_ops_[m.id] = {ops.begin(), ops.end()};
      for (const auto& call : m.callees()) callees_[m.id].push_back(index_.resolve(call));
    });
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const Corpus& corpus() const { return corpus_; }

  Trace run(const Uppt& u, const Scenario& s, std::uint64_t seed) const {
    for (const auto& call : s.calls) {
      if (!index_.find(call.entry)) fail_validation("scenario entry '" + call.entry + "' is not a method of the corpus");
    }
    Run r{*this, u, s.context, seed, {}, 0, 0, {}, {}};
    for (std::size_t i = 0; i < s.calls.size(); ++i) {
      r.call = i;
      r.execute(s.calls[i].entry, false);
    }
    return std::move(r.trace);
  }

 private:
  struct Run {
    const Simulator& sim;
    const Uppt& uppt;
    const RuntimeContext& ctx;
    std::uint64_t seed;
    Trace trace;
    std::size_t call = 0;
    std::size_t frames = 0;
    std::vector<std::size_t> stack;
    std::set<std::string> active;

    void emit(auto ev) { trace.push_back({call, std::move(ev)}); }

    struct Outcome {
      std::optional<Datum> value;    // sensor data handed back to the caller
      std::set<std::string> reached; // ops performed anywhere in this activation
    };

    Outcome execute(const std::string& id, bool obfuscating) {
      if (stack.size() >= kMaxCallDepth || active.count(id)) return {};
      const auto& m = sim.index_.at(id);
      const auto frame = ++frames;
      stack.push_back(frame);
      active.insert(id);
      auto result = body(m, frame, obfuscating);
      active.erase(id);
      stack.pop_back();
      return result;
    }

    // An operation is attributed to the deepest activation performing it: a
    // method whose callee already performed (or was stopped from performing)
    // the same operation does not perform it a second time.
    Outcome body(const MethodRecord& m, std::size_t frame, bool obfuscating) {
      const auto& own = sim.local_ops_.at(m.id);
      Outcome out;
      std::map<std::string, Datum> vars;
      std::map<std::string, Datum> received;  // sds type -> latest datum from a callee
      std::size_t call_index = 0;
      const auto finish = [&] {
        for (const auto& op : own) {
          if (!out.reached.count(op)) emit(OpExecuted{m.id, op, frame, stack});
        }
        out.reached.insert(own.begin(), own.end());
      };
      const auto returned_resource = sim.sds_resource_.find(m.return_type);

      for (const auto& s : m.body) {
        if (std::holds_alternative<CallStmt>(s.node)) {
          for (const auto& callee : sim.callees_.at(m.id)[call_index]) {
            auto r = execute(callee, obfuscating);
            if (r.value) received[sim.index_.at(callee).return_type] = *r.value;
            out.reached.merge(r.reached);
          }
          ++call_index;
        } else if (const auto* v = std::get_if<VarDeclStmt>(&s.node)) {
          const auto res = sim.sds_resource_.find(v->type);
          if (res == sim.sds_resource_.end()) continue;
          const auto from = received.find(v->type);
          vars[v->name] = from != received.end() ? from->second : Datum{ValueClass::real, res->second, res->second + "@" + m.id};
        } else if (const auto* h = std::get_if<HookCheckStmt>(&s.node)) {
          bool abort = false;
          for (const auto& r : h->resources) {
            auto d = check_policy(uppt, r, ctx);
            // A hook can only enforce the controls it was instantiated with.
            const auto needed = std::string(control_for(d));
            if (d != Decision::allow && std::find(h->controls.begin(), h->controls.end(), needed) == h->controls.end()) {
              d = Decision::allow;
            }
            emit(HookFired{m.id, r, d, frame});
            if (d == Decision::disallow) abort = true;
            if (d == Decision::obfuscate) {
              obfuscating = true;
              if (h->sds_var) {
                if (auto it = vars.find(*h->sds_var); it != vars.end()) it->second = obfuscate(it->second, seed);
              }
            }
          }
          if (abort) {
            out.reached.insert(own.begin(), own.end());
            if (returned_resource == sim.sds_resource_.end()) return out;
            Datum denied{ValueClass::denied, returned_resource->second, "null"};
            emit(DataReturned{m.id, denied.resource, denied.cls, denied.value, frame});
            out.value = denied;
            return out;
          }
        } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
          finish();
          if (r->kind != ReturnStmt::Kind::var) return out;
          const auto it = vars.find(r->var);
          if (it == vars.end()) return out;
          auto d = it->second;
          if (obfuscating && d.cls == ValueClass::real) d = obfuscate(d, seed);
          emit(DataReturned{m.id, d.resource, d.cls, d.value, frame});
          out.value = d;
          return out;
        }
      }
      finish();
      return out;
    }
  };

  Corpus corpus_;
  CorpusIndex index_;
  std::map<std::string, std::string> sds_resource_;            // sds type -> resource
  std::map<std::string, std::vector<std::string>> local_ops_;  // method -> ops, sorted
  std::map<std::string, std::vector<std::vector<std::string>>> callees_;  // per call stmt
};

inline Trace simulate(const Corpus& c, const OalTable& oal, const Uppt& u, const Scenario& s, std::uint64_t seed) {
  return Simulator(c, oal).run(u, s, seed);
}

// ---------------------------------------------------------------------------
// Scenario generation

namespace detail {

struct ContextVocabulary {
  std::vector<std::string> locations{"Elsewhere"};
  std::vector<std::string> apps{"com.example.notes"};
  std::vector<std::string> categories{"tools"};
  std::vector<std::string> activities{"MainActivity"};
  std::vector<int> clocks;
};

inline void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (s != "*" && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

inline ContextVocabulary vocabulary_of(const Uppt& u) {
  ContextVocabulary v;
  for (const auto& row : u.rows()) {
    const auto& c = row.context;
    if (c.location) add_unique(v.locations, *c.location);
    if (c.time) {
      v.clocks.push_back(c.time->start);
      v.clocks.push_back(c.time->end - 1);
      v.clocks.push_back(c.time->end);
    }
    if (c.status) {
      if (c.status->foreground_app) add_unique(v.apps, *c.status->foreground_app);
      if (c.status->category) add_unique(v.categories, *c.status->category);
      if (c.status->back_stack) {
        for (const auto& a : *c.status->back_stack) add_unique(v.activities, a);
      }
    }
  }
  return v;
}

inline std::vector<std::string> service_methods(const Corpus& c) {
  std::vector<std::string> out;
  c.for_each_method([&](const UnitDecl& u, const MethodRecord& m) {
    if (u.side == Side::service) out.push_back(m.id);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Contexts are drawn from the values the table mentions (plus one value it
// does not), so rows match often enough to exercise every branch.
inline std::vector<Scenario> random_scenarios(const Corpus& c, const Uppt& u, std::size_t n, std::uint64_t seed) {
  const auto vocab = detail::vocabulary_of(u);
  const auto entries = detail::service_methods(c);
  if (entries.empty()) fail_validation("corpus has no service-side method to call");
  Rng rng(seed);
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < n; ++i) {
    Scenario s;
    auto& ctx = s.context;
    ctx.clock = !vocab.clocks.empty() && rng.chance(0.6) ? rng.pick(vocab.clocks) : static_cast<int>(rng.below(24 * 60));
    ctx.location = rng.pick(vocab.locations);
    ctx.foreground_app = rng.pick(vocab.apps);
    ctx.category = rng.pick(vocab.categories);
    for (const auto& a : vocab.activities) {
      if (rng.chance(0.5)) ctx.back_stack.push_back(a);
    }
    const auto calls = 1 + rng.below(6);
    for (std::size_t k = 0; k < calls; ++k) s.calls.push_back({rng.pick(entries), {"arg" + std::to_string(k)}});
    out.push_back(std::move(s));
  }
  return out;
}

// One scenario per mediating row: the context satisfies that row exactly and
// every service-side method is invoked on its own.
inline std::vector<Scenario> adversarial_scenarios(const Corpus& c, const Uppt& u) {
  const auto entries = detail::service_methods(c);
  std::vector<Scenario> out;
  for (const auto& row : u.rows()) {
    if (row.control == "allow") continue;
    Scenario s;
    auto& ctx = s.context;
    const auto& spec = row.context;
    ctx.clock = spec.time ? spec.time->start : 12 * 60;
    ctx.location = spec.location.value_or("Elsewhere");
    ctx.foreground_app = "com.example.notes";
    ctx.category = "tools";
    if (spec.status) {
      const auto& st = *spec.status;
      if (st.foreground_app && *st.foreground_app != "*") ctx.foreground_app = *st.foreground_app;
      if (st.category && *st.category != "*") ctx.category = *st.category;
      if (st.back_stack) ctx.back_stack = *st.back_stack;
    }
    for (const auto& id : entries) s.calls.push_back({id, {}});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hooksmith
