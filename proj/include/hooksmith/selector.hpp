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
// Hook selection. The candidate methods are cut out of the call graph, the
// resulting subgraph is enumerated into entry-to-leaf call chains, and for
// every (chain, operation) only the deepest service-side performer keeps a
// hook. The union over chains is the final hooked set.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/mapping.hpp"
#include "hooksmith/uppt.hpp"
#include "json.hpp"

namespace hooksmith {

// Nodes = tm; edges = the edges of g with both endpoints in tm.
inline CallGraph induced_subgraph(const CallGraph& g, const std::set<std::string>& tm) {
  for (const auto& id : tm) {
    if (!g.contains(id)) fail_validation("'" + id + "' is not a call graph node");
  }
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& id : tm) {
    const auto i = g.index_of(id);
    for (auto j : g.successors(i)) {
      if (tm.count(g.nodes()[j])) edges.emplace(id, g.nodes()[j]);
    }
  }
  return CallGraph({tm.begin(), tm.end()}, edges);
}

// tm plus every method lying on a call path between two tm members, with
// induced edges. The extra nodes are pass-throughs: they carry no candidate
// operations but keep chains connected across them.
inline CallGraph closure_subgraph(const CallGraph& g, const std::set<std::string>& tm) {
  const std::size_t n = g.size();
  auto reach = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> work;
    for (const auto& id : tm) {
      const auto i = g.index_of(id);
      for (auto j : forward ? g.successors(i) : g.predecessors(i)) {
        if (!seen[j]) {
          seen[j] = true;
          work.push_back(j);
        }
      }
    }
    while (!work.empty()) {
      const auto v = work.back();
      work.pop_back();
      for (auto j : forward ? g.successors(v) : g.predecessors(v)) {
        if (!seen[j]) {
          seen[j] = true;
          work.push_back(j);
        }
      }
    }
    return seen;
  };
  const auto below = reach(true);
  const auto above = reach(false);
  std::set<std::string> keep = tm;
  for (std::size_t i = 0; i < n; ++i) {
    if (below[i] && above[i]) keep.insert(g.nodes()[i]);
  }
  return induced_subgraph(g, keep);
}

using CallChain = std::vector<std::string>;

// Every maximal path through the condensation, from a component with no
// callers to a component with no callees. A component contributes all of
// its members in id order. Chains come back sorted.
inline std::vector<CallChain> enumerate_chains(const CallGraph& sub, std::size_t cap = 10000) {
  std::vector<CallChain> out;
  const auto& comps = sub.components();
  std::vector<std::size_t> path;
  auto emit = [&] {
    if (out.size() >= cap) {
      fail_stage("call chain count exceeds " + std::to_string(cap) +
                 "; narrow the privacy preference table to reduce the candidate method set");
    }
    CallChain chain;
    for (auto c : path) {
      for (auto node : comps[c]) chain.push_back(sub.nodes()[node]);
    }
    out.push_back(std::move(chain));
  };
  // Explicit stack of (component, next successor slot).
  for (std::size_t root = 0; root < comps.size(); ++root) {
    if (!sub.component_predecessors(root).empty()) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    path.assign(1, root);
    while (!stack.empty()) {
      auto& [c, next] = stack.back();
      const auto& succ = sub.component_successors(c);
      if (succ.empty()) {
        emit();
      }
      if (next < succ.size()) {
        const auto child = succ[next++];
        stack.emplace_back(child, 0);
        path.push_back(child);
        continue;
      }
      stack.pop_back();
      path.pop_back();
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ChainMark {
  std::size_t chain = 0;
  std::string op;
  std::string method;
  bool operator==(const ChainMark&) const = default;
};

struct PickResult {
  std::map<std::string, std::set<std::string>> marked;  // method -> ops it guards
  std::vector<ChainMark> marks;
  std::vector<std::string> warnings;
};

// For each (chain, op): among the chain's performers of op, mark the one with
// the greatest index. App-side performers cannot host a hook; the mark falls
// to the deepest service-side performer instead.
inline PickResult pick_and_remove(const std::vector<CallChain>& chains, const MethodAoMap& aomap,
                                  const std::set<std::string>& relevant_ops,
                                  const std::map<std::string, Side>& side_of) {
  PickResult r;
  std::set<std::string> warnings;
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    const auto& chain = chains[ci];
    for (const auto& op : relevant_ops) {
      bool any = false;
      std::optional<std::size_t> pick;
      for (std::size_t k = chain.size(); k-- > 0;) {
        if (!aomap.ops_of(chain[k]).count(op)) continue;
        any = true;
        const auto side = side_of.find(chain[k]);
        if (side != side_of.end() && side->second == Side::app) {
          warnings.insert("excluded app-side method " + chain[k] + " for " + op);
          continue;
        }
        pick = k;
        break;
      }
      if (!any) continue;
      if (!pick) {
        warnings.insert("no service-side method can guard " + op + " on chain " + join(chain, " -> "));
        continue;
      }
      r.marked[chain[*pick]].insert(op);
      r.marks.push_back({ci, op, chain[*pick]});
    }
  }
  r.warnings.assign(warnings.begin(), warnings.end());
  return r;
}

struct HookPlanEntry {
  std::string method_id;
  std::set<std::string> guarded_ops;
  std::set<std::string> resources;
  std::set<std::string> controls;
  std::optional<std::string> sds_var;
  bool operator==(const HookPlanEntry&) const = default;
};

struct HookPlan {
  std::string uppt_fingerprint;
  std::string corpus_fingerprint;
  std::vector<HookPlanEntry> entries;
  std::vector<std::string> warnings;
  bool operator==(const HookPlan&) const = default;
};

// The first variable whose type is an SDS keyword of one of the given ops.
inline std::optional<std::string> select_sds_var(const MethodRecord& m, const std::set<std::string>& ops,
                                                 const OalTable& oal) {
  std::set<std::string> sds_types;
  for (const auto& op : ops) {
    for (const auto& k : oal.at(op).keywords) {
      if (k.kind == KeywordKind::sds_type) sds_types.insert(k.text);
    }
  }
  for (const auto& s : m.body) {
    if (const auto* v = std::get_if<VarDeclStmt>(&s.node); v && sds_types.count(v->type)) return v->name;
  }
  return std::nullopt;
}

// op -> controls requested for it by the words in play.
inline std::map<std::string, std::set<std::string>> controls_by_operation(const std::set<std::string>& words,
                                                                          const Layer1Map& l1) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& w : words) {
    const auto control = split_word(w).second;
    for (const auto& op : l1.at(w)) out[op].insert(control);
  }
  return out;
}

struct SelectOptions {
  bool closure = false;
  std::size_t chain_cap = 10000;
};

struct SelectOutcome {
  Selection selection;
  CallGraph subgraph;
  std::vector<CallChain> chains;
  PickResult picks;
  HookPlan plan;
};

inline SelectOutcome select_hooks(const Corpus& c, const CallGraph& g, const MethodAoMap& aomap, const Uppt& u,
                                  const Layer1Map& l1, const OalTable& oal, const SelectOptions& opts = {}) {
  const CorpusIndex idx(c);
  SelectOutcome out;
  const auto words = extract_resource_control_words(u);
  out.selection = resolve_methods(words, l1, aomap);
  out.subgraph = opts.closure ? closure_subgraph(g, out.selection.tm) : induced_subgraph(g, out.selection.tm);
  out.chains = enumerate_chains(out.subgraph, opts.chain_cap);
  std::map<std::string, Side> sides;
  for (const auto& id : out.subgraph.nodes()) sides[id] = idx.unit_of(id).side;
  const auto relevant = relevant_operations(words, l1);
  out.picks = pick_and_remove(out.chains, aomap, relevant, sides);

  const auto controls = controls_by_operation(words, l1);
  auto& plan = out.plan;
  plan.uppt_fingerprint = uppt_fingerprint(u);
  plan.corpus_fingerprint = corpus_fingerprint(c);
  for (const auto& [id, ops] : out.picks.marked) {
    HookPlanEntry e;
    e.method_id = id;
    e.guarded_ops = ops;
    for (const auto& op : ops) {
      e.resources.insert(oal.resource_of(op));
      const auto it = controls.find(op);
      if (it != controls.end()) e.controls.insert(it->second.begin(), it->second.end());
    }
    e.sds_var = select_sds_var(idx.at(id), ops, oal);
    plan.entries.push_back(std::move(e));
  }
  plan.warnings = out.selection.warnings;
  plan.warnings.insert(plan.warnings.end(), l1.warnings.begin(), l1.warnings.end());
  plan.warnings.insert(plan.warnings.end(), out.picks.warnings.begin(), out.picks.warnings.end());
  return out;
}

inline nlohmann::json to_json(const HookPlan& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"method_id", e.method_id},
                       {"guarded_ops", e.guarded_ops},
                       {"resources", e.resources},
                       {"controls", e.controls},
                       {"sds_var", e.sds_var ? nlohmann::json(*e.sds_var) : nlohmann::json(nullptr)}});
  }
  return {{"uppt_fingerprint", p.uppt_fingerprint},
          {"corpus_fingerprint", p.corpus_fingerprint},
          {"entries", entries},
          {"warnings", p.warnings}};
}

inline std::string plan_fingerprint(const HookPlan& p) { return fingerprint_of(to_json(p).dump()); }

inline HookPlan parse_plan(const nlohmann::json& doc) {
  if (!doc.is_object()) fail_validation("hook plan must be a JSON object");
  detail::reject_unknown_keys(doc, {"uppt_fingerprint", "corpus_fingerprint", "entries", "warnings"}, "plan");
  HookPlan p;
  p.uppt_fingerprint = detail::require_string(detail::require(doc, "uppt_fingerprint", "plan"), "plan.uppt_fingerprint");
  if (doc.contains("corpus_fingerprint")) {
    p.corpus_fingerprint = detail::require_string(doc.at("corpus_fingerprint"), "plan.corpus_fingerprint");
  }
  const auto& entries = detail::require(doc, "entries", "plan");
  if (!entries.is_array()) fail_validation("plan.entries: expected an array");
  const auto string_set = [](const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) fail_validation(where + ": expected an array");
    std::set<std::string> out;
    for (const auto& v : j) out.insert(detail::require_string(v, where + "[]"));
    return out;
  };
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto where = "plan.entries[" + std::to_string(i) + "]";
    const auto& j = entries[i];
    detail::reject_unknown_keys(j, {"method_id", "guarded_ops", "resources", "controls", "sds_var"}, where);
    HookPlanEntry e;
    e.method_id = detail::require_string(detail::require(j, "method_id", where), where + ".method_id");
    if (!seen.insert(e.method_id).second) fail_validation(where + ": duplicate method '" + e.method_id + "'");
    e.guarded_ops = string_set(detail::require(j, "guarded_ops", where), where + ".guarded_ops");
    e.resources = string_set(detail::require(j, "resources", where), where + ".resources");
    e.controls = string_set(detail::require(j, "controls", where), where + ".controls");
    for (const auto& r : e.resources) {
      if (!is_resource(r)) fail_validation(where + ": unknown resource '" + r + "'");
    }
    for (const auto& c : e.controls) {
      if (!is_control(c)) fail_validation(where + ": unknown control '" + c + "'");
    }
    if (j.contains("sds_var") && !j.at("sds_var").is_null()) {
      e.sds_var = detail::require_string(j.at("sds_var"), where + ".sds_var");
    }
    p.entries.push_back(std::move(e));
  }
  if (doc.contains("warnings")) {
    const auto& w = doc.at("warnings");
    if (!w.is_array()) fail_validation("plan.warnings: expected an array");
    for (const auto& v : w) p.warnings.push_back(detail::require_string(v, "plan.warnings[]"));
  }
  return p;
}

}  // namespace hooksmith
