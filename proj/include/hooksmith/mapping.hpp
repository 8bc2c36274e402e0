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

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/uppt.hpp"
#include "json.hpp"

namespace hooksmith {

// Splits "onboard_sensors_disable" into ("onboard_sensors", "disable").
inline std::pair<std::string, std::string> split_word(std::string_view word) {
  const auto cut = word.rfind('_');
  if (cut == std::string_view::npos) return {std::string(word), ""};
  return {std::string(word.substr(0, cut)), std::string(word.substr(cut + 1))};
}

// resource_control word -> abstract operations.
struct Layer1Map {
  std::map<std::string, std::set<std::string>> words;
  std::set<std::string> allow_empty;
  nlohmann::json confidence = nlohmann::json::object();  // carried, not interpreted
  std::vector<std::string> warnings;

  const std::set<std::string>& at(const std::string& word) const {
    const auto it = words.find(word);
    if (it == words.end()) fail_validation("word '" + word + "' is not in the layer-1 map");
    return it->second;
  }
};

inline Layer1Map load_layer1(const nlohmann::json& doc, const OalTable& oal) {
  if (!doc.is_object()) fail_validation("layer-1 map must be a JSON object");
  Layer1Map l1;
  for (const auto& [key, value] : doc.items()) {
    if (key == "_confidence") {
      if (!value.is_object()) fail_validation("layer-1 '_confidence' must be an object");
      l1.confidence = value;
      continue;
    }
    if (key == "_allow_empty") {
      if (!value.is_array()) fail_validation("layer-1 '_allow_empty' must be an array");
      for (const auto& w : value) l1.allow_empty.insert(detail::require_string(w, "layer-1 _allow_empty[]"));
      continue;
    }
    const auto [resource, control] = split_word(key);
    if (!is_resource(resource) || (control != "disable" && control != "obfuscate")) {
      fail_validation("unknown layer-1 word '" + key + "' (expected RESOURCE_disable or RESOURCE_obfuscate with RESOURCE in: " +
                      lexicon_listing("resource") + ")");
    }
    if (!value.is_array()) fail_validation("layer-1 '" + key + "' must list operation names");
    auto& ops = l1.words[key];
    for (const auto& op : value) {
      const auto name = detail::require_string(op, "layer-1 " + key + "[]");
      if (!oal.contains(name)) {
        fail_validation("layer-1 word '" + key + "' names operation '" + name + "' which is not in the operation table");
      }
      ops.insert(name);
    }
  }
  for (const auto& r : kResources) {
    for (const char* c : {"disable", "obfuscate"}) {
      const auto word = std::string(r) + "_" + c;
      const auto it = l1.words.find(word);
      if (it == l1.words.end()) fail_validation("layer-1 map has no entry for '" + word + "'");
      if (it->second.empty()) {
        if (!l1.allow_empty.count(word)) {
          fail_validation("layer-1 word '" + word + "' maps to no operation and is not listed in _allow_empty");
        }
        l1.warnings.push_back("layer-1 word '" + word + "' maps to no operation");
      }
    }
  }
  return l1;
}

struct Selection {
  std::set<std::string> tm;
  // word -> operation -> methods
  std::map<std::string, std::map<std::string, std::set<std::string>>> provenance;
  std::vector<std::string> warnings;
};

inline std::set<std::string> relevant_operations(const std::set<std::string>& words, const Layer1Map& l1) {
  std::set<std::string> out;
  for (const auto& w : words) {
    const auto& ops = l1.at(w);
    out.insert(ops.begin(), ops.end());
  }
  return out;
}

inline Selection resolve_methods(const std::set<std::string>& words, const Layer1Map& l1, const MethodAoMap& aomap) {
  std::map<std::string, std::set<std::string>> performers;
  for (const auto& [id, ops] : aomap.ops) {
    for (const auto& op : ops) performers[op].insert(id);
  }
  Selection s;
  for (const auto& w : words) {
    auto& prov = s.provenance[w];
    for (const auto& op : l1.at(w)) {
      const auto it = performers.find(op);
      if (it == performers.end()) {
        s.warnings.push_back("operation '" + op + "' (from '" + w + "') is performed by no method");
        prov[op];
        continue;
      }
      prov[op] = it->second;
      s.tm.insert(it->second.begin(), it->second.end());
    }
  }
  return s;
}

}  // namespace hooksmith
