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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/selector.hpp"
#include "json.hpp"

namespace hooksmith {

struct RenderedHook {
  HookCheckStmt stmt;
  std::string rendered_template;
  std::optional<std::string> warning;
};

// return_type only shapes the expanded template ("return;" vs "return null;").
inline RenderedHook render_hook(const HookPlanEntry& e, std::string_view return_type = "") {
  if (e.resources.empty()) fail_validation("plan entry '" + e.method_id + "' names no resource");
  if (e.controls.empty()) fail_validation("plan entry '" + e.method_id + "' names no control");
  RenderedHook out;
  auto controls = e.controls;
  if (controls.count("obfuscate") && !e.sds_var) {
    controls.erase("obfuscate");
    controls.insert("disable");
    out.warning = "method " + e.method_id + " holds no sensor data variable; obfuscate downgraded to disable";
  }
  out.stmt.resources.assign(e.resources.begin(), e.resources.end());
  out.stmt.controls.assign(controls.begin(), controls.end());
  out.stmt.sds_var = controls.count("obfuscate") ? e.sds_var : std::nullopt;

  std::string t;
  const auto res = join(out.stmt.resources, "|");
  t += "String level = ContextAwarePolicy.check(\"" + res + "\", currentContext());\n";
  const char* kw = "if";
  if (controls.count("disable")) {
    t += std::string(kw) + " (level == \"DISALLOW\") {\n";
    t += return_type == "void" ? "  return;\n" : "  return null;\n";
    t += "}";
    kw = " else if";
  }
  if (controls.count("obfuscate")) {
    t += std::string(kw) + " (level == \"OBFUSCATE\") {\n";
    t += "  " + *out.stmt.sds_var + " = ContextAwarePolicy.obfuscate(" + *out.stmt.sds_var + ");\n";
    t += "}";
  }
  out.rendered_template = t + "\n";
  return out;
}

struct ManifestEntry {
  std::string method_id;
  std::string file;
  int line = 0;
  std::vector<std::string> resources;
  std::vector<std::string> controls;
  std::vector<std::string> guarded_ops;
  std::string rendered_template;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::string plan_fingerprint;
  std::string corpus_fingerprint;
  std::vector<ManifestEntry> entries;
  bool operator==(const Manifest&) const = default;
};

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"method_id", e.method_id},
                       {"file", e.file},
                       {"line", e.line},
                       {"resources", e.resources},
                       {"controls", e.controls},
                       {"guarded_ops", e.guarded_ops},
                       {"rendered_template", e.rendered_template}});
  }
  return {{"plan_fingerprint", m.plan_fingerprint}, {"corpus_fingerprint", m.corpus_fingerprint}, {"entries", entries}};
}

struct HookSite {
  std::string method_id;
  std::size_t position = 0;
  bool operator==(const HookSite&) const = default;
};

inline std::vector<HookSite> detect_existing_hooks(const Corpus& c) {
  std::vector<HookSite> out;
  c.for_each_method([&](const UnitDecl&, const MethodRecord& m) {
    for (std::size_t i = 0; i < m.body.size(); ++i) {
      if (std::holds_alternative<HookCheckStmt>(m.body[i].node)) out.push_back({m.id, i});
    }
  });
  return out;
}

// The corpus with every hookcheck removed; undoes instrument().
inline Corpus strip_hooks(Corpus c) {
  for (auto& u : c.units) {
    for (auto& m : u.methods) {
      std::erase_if(m.body, [](const Stmt& s) { return std::holds_alternative<HookCheckStmt>(s.node); });
    }
  }
  return c;
}

struct Instrumented {
  Corpus corpus;
  Manifest manifest;
  std::vector<std::string> warnings;
};

inline Instrumented instrument(const Corpus& c, const HookPlan& plan) {
  if (const auto existing = detect_existing_hooks(c); !existing.empty()) {
    fail_validation("corpus is already instrumented (hookcheck in " + existing.front().method_id + ")");
  }
  const auto fp = corpus_fingerprint(c);
  if (!plan.corpus_fingerprint.empty() && plan.corpus_fingerprint != fp) {
    fail_validation("plan was selected for corpus " + plan.corpus_fingerprint + " but this corpus is " + fp);
  }
  Instrumented out;
  out.corpus = c;
  std::map<std::string, MethodRecord*> by_id;
  for (auto& u : out.corpus.units) {
    for (auto& m : u.methods) by_id[m.id] = &m;
  }
  std::vector<RenderedHook> rendered;
  for (const auto& e : plan.entries) {
    const auto it = by_id.find(e.method_id);
    if (it == by_id.end()) fail_validation("plan entry names unknown method '" + e.method_id + "'");
    auto& m = *it->second;
    auto r = render_hook(e, m.return_type);
    if (r.warning) out.warnings.push_back(*r.warning);
    m.body.insert(m.body.begin(), Stmt{r.stmt, m.pos});
    rendered.push_back(std::move(r));
  }
  // Re-parse the printed form so manifest lines are the real ones.
  const auto docs = print_corpus(out.corpus);
  out.corpus = parse_corpus(docs);
  const CorpusIndex idx(out.corpus);
  out.manifest.plan_fingerprint = plan_fingerprint(plan);
  out.manifest.corpus_fingerprint = fp;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    const auto& m = idx.at(e.method_id);
    ManifestEntry me;
    me.method_id = e.method_id;
    me.file = m.body.front().pos.file;
    me.line = m.body.front().pos.line;
    me.resources = rendered[i].stmt.resources;
    me.controls = rendered[i].stmt.controls;
    me.guarded_ops.assign(e.guarded_ops.begin(), e.guarded_ops.end());
    me.rendered_template = rendered[i].rendered_template;
    out.manifest.entries.push_back(std::move(me));
  }
  return out;
}

}  // namespace hooksmith
