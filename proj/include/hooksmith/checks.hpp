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
// Detectors for the three placement mistakes: hooks an app can get around
// (bypass), hooks running inside the app's own process (isolation), and hooks
// that protect nothing (useless).

#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/instrumenter.hpp"
#include "hooksmith/mapping.hpp"
#include "hooksmith/policy.hpp"
#include "hooksmith/selector.hpp"
#include "hooksmith/simulator.hpp"
#include "json.hpp"

namespace hooksmith {

struct BypassViolation {
  std::size_t scenario = 0;
  std::size_t call = 0;
  std::string method;
  std::string op;
  std::string resource;
  Decision required = Decision::allow;
  bool operator==(const BypassViolation&) const = default;
};

// An operation is protected in ctx when the policy asks for a control on its
// resource and the layer-1 map ties the operation to that control. It must
// then be preceded by a hook firing that same decision from a frame that is
// still on the stack.
inline std::vector<BypassViolation> check_bypass(const Trace& trace, const Uppt& u, const RuntimeContext& ctx,
                                                 const Layer1Map& l1, const OalTable& oal) {
  std::map<std::size_t, std::set<std::pair<std::string, Decision>>> fired;  // frame -> hooks
  std::map<std::string, Decision> decision;
  std::vector<BypassViolation> out;
  for (const auto& e : trace) {
    if (const auto* h = std::get_if<HookFired>(&e.event)) {
      fired[h->frame].emplace(h->resource, h->decision);
      continue;
    }
    const auto* op = std::get_if<OpExecuted>(&e.event);
    if (!op) continue;
    const auto& resource = oal.resource_of(op->op);
    auto it = decision.find(resource);
    if (it == decision.end()) it = decision.emplace(resource, check_policy(u, resource, ctx)).first;
    const auto d = it->second;
    if (d == Decision::allow) continue;
    const auto word = resource + "_" + std::string(control_for(d));
    if (!l1.at(word).count(op->op)) continue;
    bool guarded = false;
    for (auto f : op->active_frames) {
      const auto hooks = fired.find(f);
      if (hooks != fired.end() && hooks->second.count({resource, d})) {
        guarded = true;
        break;
      }
    }
    if (!guarded) out.push_back({0, e.call, op->method, op->op, resource, d});
  }
  return out;
}

struct UselessHook {
  std::string method;
  std::string reason;
  bool operator==(const UselessHook&) const = default;
};

// Hooks are read off the corpus itself, so hand-inserted ones are judged too.
// A hook missing from the plan is credited with the ops its method performs
// on the hook's resources.
inline std::vector<UselessHook> check_useless(const Corpus& instrumented, const HookPlan& plan, const Uppt& u,
                                              const MethodAoMap& aomap, const Layer1Map& l1, const OalTable& oal) {
  const auto relevant = relevant_operations(extract_resource_control_words(u), l1);
  const auto g = build_call_graph(instrumented);
  std::vector<bool> reachable(g.size(), false);
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.predecessors(i).empty()) {
      reachable[i] = true;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    const auto v = work.back();
    work.pop_back();
    for (auto s : g.successors(v)) {
      if (!reachable[s]) {
        reachable[s] = true;
        work.push_back(s);
      }
    }
  }
  std::map<std::string, const HookPlanEntry*> planned;
  for (const auto& e : plan.entries) planned[e.method_id] = &e;
  const CorpusIndex idx(instrumented);

  std::vector<UselessHook> out;
  for (const auto& site : detect_existing_hooks(instrumented)) {
    const auto& hook = std::get<HookCheckStmt>(idx.at(site.method_id).body[site.position].node);
    std::set<std::string> guarded;
    if (const auto it = planned.find(site.method_id); it != planned.end()) {
      guarded = it->second->guarded_ops;
    } else {
      for (const auto& op : aomap.ops_of(site.method_id)) {
        if (std::find(hook.resources.begin(), hook.resources.end(), oal.resource_of(op)) != hook.resources.end()) {
          guarded.insert(op);
        }
      }
    }
    bool relevant_hit = false;
    for (const auto& op : guarded) relevant_hit = relevant_hit || relevant.count(op);
    if (!relevant_hit) {
      out.push_back({site.method_id, "guards no operation the privacy preference table asks to control"});
    } else if (!reachable[g.index_of(site.method_id)]) {
      out.push_back({site.method_id, "unreachable from every service entry point"});
    }
  }
  return out;
}

struct IsolationViolation {
  std::string method;
  std::string unit;
  std::string process;
  bool operator==(const IsolationViolation&) const = default;
};

inline std::vector<IsolationViolation> check_isolation(const HookPlan& plan, const Corpus& c) {
  const CorpusIndex idx(c);
  std::vector<IsolationViolation> out;
  for (const auto& e : plan.entries) {
    const auto& unit = idx.unit_of(e.method_id);
    if (unit.side == Side::app) out.push_back({e.method_id, unit.name, unit.process});
  }
  return out;
}

struct VerifyReport {
  std::vector<BypassViolation> bypass;
  std::vector<UselessHook> useless;
  std::vector<IsolationViolation> isolation;
  std::string trace_digest;
  std::size_t scenarios = 0;

  bool clean() const { return bypass.empty() && useless.empty() && isolation.empty(); }
};

inline nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json bypass = nlohmann::json::array();
  for (const auto& v : r.bypass) {
    bypass.push_back({{"scenario", v.scenario}, {"call", v.call}, {"method", v.method}, {"op", v.op},
                      {"resource", v.resource}, {"required", to_string(v.required)}});
  }
  nlohmann::json useless = nlohmann::json::array();
  for (const auto& v : r.useless) useless.push_back({{"method", v.method}, {"reason", v.reason}});
  nlohmann::json isolation = nlohmann::json::array();
  for (const auto& v : r.isolation) {
    isolation.push_back({{"method", v.method}, {"unit", v.unit}, {"process", v.process}});
  }
  return {{"bypass", bypass},
          {"useless", useless},
          {"isolation", isolation},
          {"trace_digest", r.trace_digest},
          {"scenarios", r.scenarios}};
}

struct VerifyInputs {
  const Corpus& instrumented;
  const Uppt& uppt;
  const HookPlan& plan;
  const Layer1Map& l1;
  const OalTable& oal;
  const MethodAoMap& aomap;
};

// Scenario i runs with seed + i; scenarios run concurrently and are merged
// back in index order, so the report does not depend on scheduling.
inline VerifyReport verify(const VerifyInputs& in, const std::vector<Scenario>& scenarios, std::uint64_t seed) {
  const Simulator sim(in.instrumented, in.oal);
  struct Outcome {
    std::string digest;
    std::vector<BypassViolation> bypass;
  };
  std::vector<Outcome> outcomes(scenarios.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < scenarios.size(); i += workers) {
        const auto trace = sim.run(in.uppt, scenarios[i], seed + i);
        auto& o = outcomes[i];
        o.digest = fingerprint_of(to_json(trace).dump());
        o.bypass = check_bypass(trace, in.uppt, scenarios[i].context, in.l1, in.oal);
        for (auto& v : o.bypass) v.scenario = i;
      }
    }));
  }
  for (auto& j : jobs) j.get();
  VerifyReport r;
  Fingerprint digest;
  for (const auto& o : outcomes) {
    digest.add(o.digest);
    r.bypass.insert(r.bypass.end(), o.bypass.begin(), o.bypass.end());
  }
  r.trace_digest = digest.hex();
  r.scenarios = scenarios.size();
  r.useless = check_useless(in.instrumented, in.plan, in.uppt, in.aomap, in.l1, in.oal);
  r.isolation = check_isolation(in.plan, in.instrumented);
  return r;
}

}  // namespace hooksmith
