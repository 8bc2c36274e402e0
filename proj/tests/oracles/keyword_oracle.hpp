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
// Brute-force keyword propagation: a method's keyword set is its own plus
// those of every method reachable from it along a path whose nodes after
// the first are all in the PMS. Reachability by plain BFS per start node.

#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hooksmith/callgraph.hpp"

namespace oracle {

struct PropagationResult {
  std::map<std::string, hooksmith::KeywordSet> keywords;
  std::map<std::string, std::set<std::string>> ops;  // PMS members only
};

inline PropagationResult propagate(const std::vector<std::string>& nodes,
                                   const std::set<std::pair<std::string, std::string>>& edges,
                                   const std::map<std::string, hooksmith::KeywordSet>& gathered,
                                   const std::set<std::string>& pms, const hooksmith::OalTable& oal) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [f, t] : edges) succ[f].push_back(t);
  const auto own = [&](const std::string& n) {
    const auto it = gathered.find(n);
    return it == gathered.end() ? hooksmith::KeywordSet{} : it->second;
  };

  PropagationResult r;
  for (const auto& start : nodes) {
    auto kws = own(start);
    std::set<std::string> seen;
    std::deque<std::string> todo;
    for (const auto& s : succ[start]) {
      if (pms.count(s) && seen.insert(s).second) todo.push_back(s);
    }
    while (!todo.empty()) {
      const auto n = todo.front();
      todo.pop_front();
      const auto k = own(n);
      kws.insert(k.begin(), k.end());
      for (const auto& s : succ[n]) {
        if (pms.count(s) && seen.insert(s).second) todo.push_back(s);
      }
    }
    if (pms.count(start)) {
      auto& ops = r.ops[start];
      for (const auto& [name, op] : oal.operations()) {
        for (const auto& k : op.keywords) {
          if (kws.count(k)) ops.insert(name);
        }
      }
    }
    r.keywords[start] = std::move(kws);
  }
  return r;
}

}  // namespace oracle
