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
// On-disk JSON forms of the stage artifacts. Objects are nlohmann::json's
// default std::map-backed type, so keys come out sorted and every dump of
// the same value is byte-identical.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/classifier.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/uppt.hpp"
#include "json.hpp"

namespace hooksmith {

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail_validation("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, std::string_view text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail_stage("cannot write " + p.string());
  out << text;
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  const auto text = read_text(p);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_validation(p.string() + " is not valid JSON: " + e.what());
  }
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) { write_text(p, dump_json(j)); }

// ---------------------------------------------------------------------------
// Feature lexicon: [{category, matcher, pattern}]

inline nlohmann::json to_json(const FeatureLexicon& lex) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : lex.entries()) {
    out.push_back({{"category", to_string(e.category)}, {"matcher", to_string(e.matcher)}, {"pattern", e.pattern}});
  }
  return out;
}

inline FeatureLexicon parse_lexicon(const nlohmann::json& j) {
  if (!j.is_array()) fail_validation("feature lexicon must be a JSON array");
  std::vector<LexiconEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = "lexicon[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(j[i], {"category", "matcher", "pattern"}, where);
    entries.push_back({parse_feature_category(detail::require_string(detail::require(j[i], "category", where), where)),
                       parse_matcher(detail::require_string(detail::require(j[i], "matcher", where), where)),
                       detail::require_string(detail::require(j[i], "pattern", where), where)});
  }
  return FeatureLexicon(std::move(entries));
}

// ---------------------------------------------------------------------------
// Labels: {method_id: 0|1}. In memory the classifier uses -1/+1.

inline std::map<std::string, int> parse_labels(const nlohmann::json& j) {
  if (!j.is_object()) fail_validation("labels must be a JSON object of method id -> 0|1");
  std::map<std::string, int> out;
  for (const auto& [id, v] : j.items()) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      fail_validation("label for '" + id + "' must be 0 or 1");
    }
    out[id] = v.get<int>() == 1 ? 1 : -1;
  }
  return out;
}

inline nlohmann::json labels_to_json(const std::map<std::string, int>& labels) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, y] : labels) out[id] = y > 0 ? 1 : 0;
  return out;
}

// ---------------------------------------------------------------------------
// SVM model

inline std::string bits_to_string(const FeatureVector& v) {
  std::string s;
  for (auto b : v.bits) s += b ? '1' : '0';
  return s;
}

inline FeatureVector bits_from_string(std::string_view s) {
  FeatureVector v;
  for (char c : s) {
    if (c != '0' && c != '1') fail_validation("support vector must be a string of 0/1");
    v.bits.push_back(c == '1' ? 1 : 0);
  }
  return v;
}

inline nlohmann::json to_json(const SvmModel& m) {
  nlohmann::json svs = nlohmann::json::array();
  for (const auto& sv : m.support_vectors) svs.push_back(bits_to_string(sv));
  return {{"support_vectors", svs}, {"alphas", m.alphas},   {"labels", m.labels},
          {"bias", m.bias},         {"C", m.C},             {"gamma", m.gamma},
          {"lexicon_fingerprint", m.lexicon_fingerprint}, {"seed", m.seed}};
}

inline SvmModel parse_model(const nlohmann::json& j) {
  const std::string where = "model";
  if (!j.is_object()) fail_validation("model must be a JSON object");
  detail::reject_unknown_keys(j, {"support_vectors", "alphas", "labels", "bias", "C", "gamma", "lexicon_fingerprint", "seed"},
                              where);
  SvmModel m;
  for (const auto& sv : detail::require(j, "support_vectors", where)) {
    m.support_vectors.push_back(bits_from_string(detail::require_string(sv, "model.support_vectors[]")));
  }
  try {
    m.alphas = detail::require(j, "alphas", where).get<std::vector<double>>();
    m.labels = detail::require(j, "labels", where).get<std::vector<int>>();
    m.bias = detail::require(j, "bias", where).get<double>();
    m.C = detail::require(j, "C", where).get<double>();
    m.gamma = detail::require(j, "gamma", where).get<double>();
    m.seed = detail::require(j, "seed", where).get<std::uint64_t>();
  } catch (const nlohmann::json::type_error& e) {
    fail_validation(std::string("model has a field of the wrong type: ") + e.what());
  }
  m.lexicon_fingerprint = detail::require_string(detail::require(j, "lexicon_fingerprint", where), "model.lexicon_fingerprint");
  if (m.alphas.size() != m.support_vectors.size() || m.labels.size() != m.support_vectors.size()) {
    fail_validation("model support_vectors, alphas and labels differ in length");
  }
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
    if (m.support_vectors[i].size() != m.dimension()) fail_validation("model support vectors differ in length");
    if (m.labels[i] != 1 && m.labels[i] != -1) fail_validation("model labels must be -1 or +1");
  }
  if (!(m.gamma > 0.0) || !std::isfinite(m.bias)) fail_validation("model gamma must be positive and bias finite");
  return m;
}

// ---------------------------------------------------------------------------
// Operation table: {op: {resource, keywords: [{kind, text}]}}

inline nlohmann::json to_json(const OalTable& t) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, op] : t.operations()) {
    nlohmann::json kws = nlohmann::json::array();
    for (const auto& k : op.keywords) kws.push_back({{"kind", to_string(k.kind)}, {"text", k.text}});
    out[name] = {{"resource", op.resource}, {"keywords", kws}};
  }
  return out;
}

inline OalTable parse_oal(const nlohmann::json& j) {
  if (!j.is_object()) fail_validation("operation table must be a JSON object");
  std::map<std::string, AbstractOperation> ops;
  for (const auto& [name, v] : j.items()) {
    const auto where = "oal." + name;
    detail::reject_unknown_keys(v, {"resource", "keywords"}, where);
    AbstractOperation op;
    op.resource = detail::require_string(detail::require(v, "resource", where), where + ".resource");
    if (!is_resource(op.resource)) {
      fail_validation(where + ": unknown resource '" + op.resource + "' (lexicon: " + lexicon_listing("resource") + ")");
    }
    const auto& kws = detail::require(v, "keywords", where);
    if (!kws.is_array()) fail_validation(where + ".keywords: expected an array");
    for (const auto& k : kws) {
      detail::reject_unknown_keys(k, {"kind", "text"}, where + ".keywords[]");
      op.keywords.push_back({parse_keyword_kind(detail::require_string(detail::require(k, "kind", where), where + ".kind")),
                             detail::require_string(detail::require(k, "text", where), where + ".text")});
    }
    ops.emplace(name, std::move(op));
  }
  return OalTable(std::move(ops));
}

// ---------------------------------------------------------------------------
// PMS: {corpus_fingerprint, methods: [...]}

inline nlohmann::json pms_to_json(const std::set<std::string>& pms, const std::string& corpus_fp) {
  return {{"corpus_fingerprint", corpus_fp}, {"methods", pms}};
}

struct PmsFile {
  std::set<std::string> methods;
  std::string corpus_fingerprint;
};

inline PmsFile parse_pms(const nlohmann::json& j) {
  if (!j.is_object()) fail_validation("PMS file must be a JSON object");
  detail::reject_unknown_keys(j, {"corpus_fingerprint", "methods"}, "pms");
  PmsFile out;
  if (j.contains("corpus_fingerprint")) {
    out.corpus_fingerprint = detail::require_string(j.at("corpus_fingerprint"), "pms.corpus_fingerprint");
  }
  for (const auto& m : detail::require(j, "methods", "pms")) out.methods.insert(detail::require_string(m, "pms.methods[]"));
  return out;
}

// ---------------------------------------------------------------------------
// Annotations: {method_id: {keywords: [{kind, text}], ops: [...]}, "_meta": {...}}
// Methods outside the PMS carry keywords but no "ops" key.

inline nlohmann::json aomap_to_json(const MethodAoMap& m, const std::string& corpus_fp, const std::string& oal_fp) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, kws] : m.keywords) {
    nlohmann::json k = nlohmann::json::array();
    for (const auto& e : kws) k.push_back({{"kind", to_string(e.kind)}, {"text", e.text}});
    out[id] = {{"keywords", k}};
    if (m.pms.count(id)) out[id]["ops"] = m.ops_of(id);
  }
  out["_meta"] = {{"corpus_fingerprint", corpus_fp}, {"oal_fingerprint", oal_fp}};
  return out;
}

struct AoMapFile {
  MethodAoMap map;
  std::string corpus_fingerprint;
  std::string oal_fingerprint;
};

inline AoMapFile parse_aomap(const nlohmann::json& j) {
  if (!j.is_object()) fail_validation("annotation map must be a JSON object");
  AoMapFile out;
  for (const auto& [id, v] : j.items()) {
    if (id == "_meta") {
      if (v.contains("corpus_fingerprint")) out.corpus_fingerprint = detail::require_string(v.at("corpus_fingerprint"), "_meta");
      if (v.contains("oal_fingerprint")) out.oal_fingerprint = detail::require_string(v.at("oal_fingerprint"), "_meta");
      continue;
    }
    const auto where = "ao_map." + id;
    detail::reject_unknown_keys(v, {"keywords", "ops"}, where);
    auto& kws = out.map.keywords[id];
    for (const auto& k : detail::require(v, "keywords", where)) {
      kws.insert({parse_keyword_kind(detail::require_string(detail::require(k, "kind", where), where)),
                  detail::require_string(detail::require(k, "text", where), where)});
    }
    if (v.contains("ops")) {
      out.map.pms.insert(id);
      auto& ops = out.map.ops[id];
      for (const auto& op : v.at("ops")) ops.insert(detail::require_string(op, where + ".ops[]"));
    }
  }
  return out;
}

// Stage boundaries compare the fingerprint an artifact was built against
// with the one in hand.
inline void require_same_fingerprint(const std::string& recorded, const std::string& actual, const std::string& producer,
                                     const std::string& consumer) {
  if (!recorded.empty() && recorded != actual) {
    fail_validation("fingerprint mismatch between " + producer + " (" + recorded + ") and " + consumer + " (" + actual + ")");
  }
}

}  // namespace hooksmith
