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
// Call graph construction and the method -> abstract-operation annotation.
//
// Keywords are gathered per method from its tagged tokens, then propagated
// bottom-up: a method inherits the keywords of every callee that is in the
// potential method set. Strongly connected components are solved to a fixed
// point, so the result is the least solution of
//
//   Keywords(f) = gathered(f) ∪ ⋃ { Keywords(g) : f calls g, g ∈ PMS }
//
// and each PMS method is annotated with every operation one of its keywords
// names.

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"

namespace hooksmith {

// Directed graph over method ids with its SCC condensation. Node order is
// lexicographic by id; successor lists are sorted and unique.
class CallGraph {
 public:
  CallGraph() = default;

  CallGraph(std::vector<std::string> nodes, const std::set<std::pair<std::string, std::string>>& edges)
      : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
    succ_.resize(nodes_.size());
    pred_.resize(nodes_.size());
    for (const auto& [from, to] : edges) {
      const auto f = index_of(from);
      const auto t = index_of(to);
      succ_[f].push_back(t);
      pred_[t].push_back(f);
    }
    for (auto& s : succ_) std::sort(s.begin(), s.end());
    for (auto& p : pred_) std::sort(p.begin(), p.end());
    condense();
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  std::size_t index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) fail_validation("'" + id + "' is not a call graph node");
    return it->second;
  }

  const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }
  const std::vector<std::size_t>& predecessors(std::size_t i) const { return pred_[i]; }

  std::set<std::pair<std::string, std::string>> edges() const {
    std::set<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < succ_.size(); ++i)
      for (auto j : succ_[i]) out.emplace(nodes_[i], nodes_[j]);
    return out;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& s : succ_) n += s.size();
    return n;
  }

  // Components in reverse topological order: every component appears after
  // all components it can reach. Members are sorted by id.
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }
  std::size_t component_of(std::size_t node) const { return comp_of_[node]; }

  // Condensation successors of a component, sorted and unique.
  const std::vector<std::size_t>& component_successors(std::size_t c) const { return comp_succ_[c]; }
  const std::vector<std::size_t>& component_predecessors(std::size_t c) const { return comp_pred_[c]; }

 private:
  // Iterative Tarjan.
  void condense() {
    const std::size_t n = nodes_.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    comp_of_.assign(n, 0);
    for (std::size_t root = 0; root < n; ++root) {
      if (index[root] != unvisited) continue;
      std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!work.empty()) {
        auto& [v, next] = work.back();
        if (next < succ_[v].size()) {
          const std::size_t w = succ_[v][next++];
          if (index[w] == unvisited) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            work.emplace_back(w, 0);
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
          continue;
        }
        const std::size_t done = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        if (low[done] == index[done]) {
          std::vector<std::size_t> comp;
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp_of_[w] = components_.size();
            comp.push_back(w);
          } while (w != done);
          std::sort(comp.begin(), comp.end());
          components_.push_back(std::move(comp));
        }
      }
    }
    comp_succ_.assign(components_.size(), {});
    comp_pred_.assign(components_.size(), {});
    for (std::size_t v = 0; v < n; ++v) {
      for (auto w : succ_[v]) {
        if (comp_of_[v] != comp_of_[w]) {
          comp_succ_[comp_of_[v]].push_back(comp_of_[w]);
          comp_pred_[comp_of_[w]].push_back(comp_of_[v]);
        }
      }
    }
    for (auto* lists : {&comp_succ_, &comp_pred_}) {
      for (auto& s : *lists) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
      }
    }
  }

  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::vector<std::size_t>> pred_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::size_t> comp_of_;
  std::vector<std::vector<std::size_t>> comp_succ_;
  std::vector<std::vector<std::size_t>> comp_pred_;
};

inline CallGraph build_call_graph(const Corpus& c) {
  const CorpusIndex idx(c);
  std::vector<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  c.for_each_method([&](const UnitDecl&, const MethodRecord& m) {
    nodes.push_back(m.id);
    for (const auto& call : m.callees()) {
      for (const auto& target : idx.resolve(call)) edges.emplace(m.id, target);
    }
  });
  return CallGraph(std::move(nodes), edges);
}

enum class KeywordKind { sds_type, ipc_interface, hw_interface, command_const };

inline std::string_view to_string(KeywordKind k) {
  switch (k) {
    case KeywordKind::sds_type: return "sds_type";
    case KeywordKind::ipc_interface: return "ipc_interface";
    case KeywordKind::hw_interface: return "hw_interface";
    case KeywordKind::command_const: return "command_const";
  }
  return "?";
}

inline KeywordKind parse_keyword_kind(std::string_view s) {
  if (s == "sds_type") return KeywordKind::sds_type;
  if (s == "ipc_interface") return KeywordKind::ipc_interface;
  if (s == "hw_interface") return KeywordKind::hw_interface;
  if (s == "command_const") return KeywordKind::command_const;
  fail_validation("unknown keyword kind '" + std::string(s) +
                  "' (expected sds_type, ipc_interface, hw_interface, command_const)");
}

// Which token class a keyword kind is matched against.
inline TokenClass token_class_for(KeywordKind k) {
  switch (k) {
    case KeywordKind::sds_type: return TokenClass::type;
    case KeywordKind::ipc_interface:
    case KeywordKind::hw_interface: return TokenClass::ident;
    case KeywordKind::command_const: return TokenClass::string;
  }
  return TokenClass::ident;
}

struct KeywordEntry {
  KeywordKind kind;
  std::string text;
  auto operator<=>(const KeywordEntry&) const = default;
};

using KeywordSet = std::set<KeywordEntry>;

struct AbstractOperation {
  std::string resource;
  std::vector<KeywordEntry> keywords;
  bool operator==(const AbstractOperation&) const = default;
};

class OalTable {
 public:
  OalTable() = default;

  explicit OalTable(std::map<std::string, AbstractOperation> ops) : ops_(std::move(ops)) {
    Fingerprint fp;
    for (const auto& [name, op] : ops_) {
      const auto cut = name.find('_');
      if (cut == std::string::npos || cut == 0 || cut + 1 == name.size()) {
        fail_validation("abstract operation '" + name + "' is not of the form verb_RESOURCE");
      }
      for (char ch : name) {
        if (!detail::is_ident_char(ch)) {
          fail_validation("abstract operation '" + name + "' is not an identifier");
        }
      }
      if (op.resource.empty()) fail_validation("abstract operation '" + name + "' has no resource");
      if (op.keywords.empty()) fail_validation("abstract operation '" + name + "' has no keywords");
      std::set<KeywordEntry> seen;
      fp.add(name).add(op.resource);
      for (const auto& k : op.keywords) {
        if (k.text.empty()) fail_validation("abstract operation '" + name + "' has an empty keyword");
        if (!seen.insert(k).second) {
          fail_validation("abstract operation '" + name + "' lists keyword '" + k.text + "' twice");
        }
        by_keyword_[k].insert(name);
        fp.add(to_string(k.kind)).add(k.text);
      }
    }
    fingerprint_ = fp.hex();
  }

  const std::map<std::string, AbstractOperation>& operations() const { return ops_; }
  bool contains(const std::string& op) const { return ops_.count(op) != 0; }

  const AbstractOperation& at(const std::string& op) const {
    const auto it = ops_.find(op);
    if (it == ops_.end()) fail_validation("unknown abstract operation '" + op + "'");
    return it->second;
  }

  const std::string& resource_of(const std::string& op) const { return at(op).resource; }

  // Every distinct keyword in the table.
  KeywordSet keywords() const {
    KeywordSet out;
    for (const auto& [k, _] : by_keyword_) out.insert(k);
    return out;
  }

  const std::set<std::string>* operations_for(const KeywordEntry& k) const {
    const auto it = by_keyword_.find(k);
    return it == by_keyword_.end() ? nullptr : &it->second;
  }

  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::map<std::string, AbstractOperation> ops_;
  std::map<KeywordEntry, std::set<std::string>> by_keyword_;
  std::string fingerprint_;
};

// Exact, case-sensitive token equality per keyword kind.
inline KeywordSet gather_keywords(const MethodRecord& m, const OalTable& table) {
  std::set<std::pair<TokenClass, std::string>> tokens;
  for (auto& t : method_tokens(m)) tokens.emplace(t.cls, std::move(t.text));
  KeywordSet out;
  for (const auto& k : table.keywords()) {
    if (tokens.count({token_class_for(k.kind), k.text})) out.insert(k);
  }
  return out;
}

inline std::set<std::string> lookup_abstract_operations(const KeywordSet& keywords, const OalTable& table) {
  std::set<std::string> out;
  for (const auto& k : keywords) {
    if (const auto* ops = table.operations_for(k)) out.insert(ops->begin(), ops->end());
  }
  return out;
}

// Operations a method performs on its own, ignoring its callees.
inline std::set<std::string> performed_operations(const MethodRecord& m, const OalTable& table) {
  return lookup_abstract_operations(gather_keywords(m, table), table);
}

struct MethodAoMap {
  std::set<std::string> pms;
  std::map<std::string, KeywordSet> keywords;            // every node
  std::map<std::string, std::set<std::string>> ops;      // PMS members only

  const std::set<std::string>& ops_of(const std::string& id) const {
    static const std::set<std::string> none;
    const auto it = ops.find(id);
    return it == ops.end() ? none : it->second;
  }

  const KeywordSet& keywords_of(const std::string& id) const {
    static const KeywordSet none;
    const auto it = keywords.find(id);
    return it == keywords.end() ? none : it->second;
  }
};

inline MethodAoMap propagate_keywords(const CallGraph& g, const std::map<std::string, KeywordSet>& gathered,
                                      const std::set<std::string>& pms, const OalTable& table) {
  for (const auto& id : pms) {
    if (!g.contains(id)) fail_validation("PMS member '" + id + "' is not a call graph node");
  }
  const auto& nodes = g.nodes();
  std::vector<KeywordSet> kw(nodes.size());
  std::vector<bool> in_pms(nodes.size(), false);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    in_pms[i] = pms.count(nodes[i]) != 0;
    if (const auto it = gathered.find(nodes[i]); it != gathered.end()) kw[i] = it->second;
  }
  // components() is already callee-first.
  for (const auto& comp : g.components()) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto f : comp) {
        for (auto callee : g.successors(f)) {
          if (!in_pms[callee] || callee == f) continue;
          for (const auto& k : kw[callee]) changed = kw[f].insert(k).second || changed;
        }
      }
    }
  }
  MethodAoMap out;
  out.pms = pms;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (in_pms[i]) out.ops[nodes[i]] = lookup_abstract_operations(kw[i], table);
    out.keywords[nodes[i]] = std::move(kw[i]);
  }
  return out;
}

inline MethodAoMap propagate_keywords(const Corpus& c, const CallGraph& g, const std::set<std::string>& pms,
                                      const OalTable& table) {
  std::map<std::string, KeywordSet> gathered;
  c.for_each_method([&](const UnitDecl&, const MethodRecord& m) { gathered[m.id] = gather_keywords(m, table); });
  return propagate_keywords(g, gathered, pms, table);
}

}  // namespace hooksmith
