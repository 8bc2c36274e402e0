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
// Stage drivers. Each stage reads its inputs from disk, checks the
// fingerprints recorded by the stages before it, and writes its artifact;
// the pipeline runs the same drivers back to back, so re-running a single
// subcommand on saved artifacts reproduces the pipeline's output byte for
// byte.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/checks.hpp"
#include "hooksmith/classifier.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/defaults.hpp"
#include "hooksmith/instrumenter.hpp"
#include "hooksmith/io.hpp"
#include "hooksmith/mapping.hpp"
#include "hooksmith/selector.hpp"
#include "hooksmith/simulator.hpp"
#include "hooksmith/synthetic.hpp"
#include "hooksmith/uppt.hpp"

namespace hooksmith {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStage = 3;
inline constexpr int kExitViolations = 4;

inline int exit_code_for(const Error& e) { return e.kind() == ErrorKind::validation ? kExitValidation : kExitStage; }

// Runs body and prefixes any error with the stage name, keeping its kind.
template <typename Fn>
auto in_stage(const std::string& stage, Fn&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), stage + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, stage + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorKind::stage, stage + ": " + e.what());
  }
}

using Note = std::function<void(const std::string&)>;

// ---------------------------------------------------------------------------
// Inputs with built-in fallbacks

inline FeatureLexicon load_lexicon(const fs::path& p) { return p.empty() ? default_lexicon() : parse_lexicon(read_json(p)); }

inline OalTable load_oal(const fs::path& p) { return p.empty() ? default_oal() : parse_oal(read_json(p)); }

inline Layer1Map load_layer1_file(const fs::path& p, const OalTable& oal) {
  return load_layer1(p.empty() ? default_layer1_json() : read_json(p), oal);
}

inline Uppt load_uppt(const fs::path& p) { return parse_uppt(read_json(p)); }

inline nlohmann::json corpus_summary(const Corpus& c) {
  const CorpusIndex idx(c);
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : c.units) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : u.methods) {
      std::set<std::string> callees;
      for (const auto& call : m.callees()) {
        for (auto& id : idx.resolve(call)) callees.insert(std::move(id));
      }
      nlohmann::json params = nlohmann::json::array();
      for (const auto& p : m.params) params.push_back({{"type", p.type}, {"name", p.name}});
      methods.push_back({{"id", m.id},
                         {"return_type", m.return_type},
                         {"params", params},
                         {"statements", m.body.size()},
                         {"callees", callees},
                         {"file", m.pos.file},
                         {"line", m.pos.line}});
    }
    units.push_back({{"name", u.name},
                     {"process", u.process},
                     {"side", to_string(u.side)},
                     {"lang", to_string(u.lang)},
                     {"methods", methods}});
  }
  return {{"corpus_fingerprint", corpus_fingerprint(c)}, {"units", units}};
}

// ---------------------------------------------------------------------------
// Stages. Each returns what it wrote so callers can chain in memory.

struct TrainOptions {
  SvmParams svm;
  bool gamma_set = false;  // false: gamma = 1/|lexicon|
};

inline SvmParams effective_params(const TrainOptions& o, const FeatureLexicon& lex) {
  auto p = o.svm;
  if (!o.gamma_set) p.gamma = 1.0 / static_cast<double>(lex.size());
  return p;
}

struct LabeledData {
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  std::vector<std::string> ids;
};

inline LabeledData labeled_features(const Corpus& c, const std::map<std::string, int>& labels,
                                    const FeatureLexicon& lex) {
  const CorpusIndex idx(c);
  LabeledData d;
  for (const auto& [id, y] : labels) {
    const auto* m = idx.find(id);
    if (!m) fail_validation("labeled method '" + id + "' is not in the corpus");
    d.xs.push_back(featurize(*m, lex));
    d.ys.push_back(y);
    d.ids.push_back(id);
  }
  if (d.xs.empty()) fail_validation("no labeled methods");
  return d;
}

inline SvmModel stage_train(const Corpus& c, const std::map<std::string, int>& labels, const FeatureLexicon& lex,
                            const TrainOptions& o) {
  return in_stage("train", [&] {
    const auto d = labeled_features(c, labels, lex);
    return train_svm(d.xs, d.ys, effective_params(o, lex), lex.fingerprint());
  });
}

inline std::set<std::string> stage_discover(const Corpus& c, const SvmModel& model, const FeatureLexicon& lex) {
  return in_stage("discover", [&] { return discover_pms(c, model, lex); });
}

inline MethodAoMap stage_annotate(const Corpus& c, const std::set<std::string>& pms, const OalTable& oal) {
  return in_stage("annotate", [&] { return propagate_keywords(c, build_call_graph(c), pms, oal); });
}

inline SelectOutcome stage_select(const Corpus& c, const MethodAoMap& aomap, const Uppt& u, const Layer1Map& l1,
                                  const OalTable& oal, const SelectOptions& opts) {
  return in_stage("select", [&] { return select_hooks(c, build_call_graph(c), aomap, u, l1, oal, opts); });
}

inline Instrumented stage_instrument(const Corpus& c, const HookPlan& plan) {
  return in_stage("instrument", [&] { return instrument(c, plan); });
}

struct ScenarioOptions {
  fs::path dir;             // *.json scenario files, optional
  std::size_t fuzz = 0;     // random scenarios
  bool adversarial = false;
};

inline std::vector<Scenario> gather_scenarios(const Corpus& pristine, const Uppt& u, const ScenarioOptions& o,
                                              std::uint64_t seed) {
  std::vector<Scenario> out;
  if (!o.dir.empty()) {
    if (!fs::is_directory(o.dir)) fail_validation("scenario directory not found: " + o.dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o.dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(parse_scenario(read_json(f), f.filename().string()));
  }
  if (o.fuzz > 0) {
    auto r = random_scenarios(pristine, u, o.fuzz, seed);
    out.insert(out.end(), r.begin(), r.end());
  }
  if (o.adversarial) {
    auto a = adversarial_scenarios(pristine, u);
    out.insert(out.end(), a.begin(), a.end());
  }
  if (out.empty()) fail_validation("no scenarios to run (give --scenarios, --fuzz or --adversarial)");
  return out;
}

inline VerifyReport stage_verify(const Corpus& instrumented, const Uppt& u, const HookPlan& plan, const Layer1Map& l1,
                                 const OalTable& oal, const MethodAoMap& aomap, const ScenarioOptions& so,
                                 std::uint64_t seed) {
  return in_stage("verify", [&] {
    const auto pristine = strip_hooks(instrumented);
    require_same_fingerprint(plan.corpus_fingerprint, corpus_fingerprint(pristine), "select", "verify");
    require_same_fingerprint(plan.uppt_fingerprint, uppt_fingerprint(u), "select", "verify");
    const auto scenarios = gather_scenarios(pristine, u, so, seed);
    return verify({instrumented, u, plan, l1, oal, aomap}, scenarios, seed);
  });
}

// ---------------------------------------------------------------------------
// Whole pipeline

struct PipelineConfig {
  fs::path corpus_dir;
  fs::path lexicon;  // empty: built-in
  fs::path labels;
  fs::path model;    // used instead of training when set
  fs::path oal;      // empty: built-in
  fs::path layer1;   // empty: built-in
  fs::path uppt;
  fs::path out_dir;
  std::uint64_t seed = 0;
  TrainOptions train;
  SelectOptions select;
  ScenarioOptions scenarios{{}, 100, true};
};

struct PipelineResult {
  int exit_code = kExitOk;
  SvmModel model;
  std::set<std::string> pms;
  MethodAoMap aomap;
  HookPlan plan;
  Manifest manifest;
  VerifyReport report;
};

inline PipelineResult run_pipeline(const PipelineConfig& cfg, const Note& note = {}) {
  const auto say = [&](const std::string& s) {
    if (note) note(s);
  };
  PipelineResult r;
  const auto& out = cfg.out_dir;
  if (out.empty()) fail_validation("pipeline needs an output directory");

  const auto corpus = in_stage("parse", [&] { return load_corpus_dir(cfg.corpus_dir); });
  const auto cfp = corpus_fingerprint(corpus);
  say("parse: " + std::to_string(corpus.method_count()) + " methods in " + std::to_string(corpus.units.size()) + " units");

  const auto lex = in_stage("train", [&] { return load_lexicon(cfg.lexicon); });
  if (!cfg.model.empty()) {
    r.model = in_stage("train", [&] { return parse_model(read_json(cfg.model)); });
    say("train: loaded model " + cfg.model.string());
  } else {
    if (cfg.labels.empty()) throw Error(ErrorKind::stage, "train: no model given and no labels to train one");
    auto seed_opts = cfg.train;
    seed_opts.svm.seed = cfg.seed;
    const auto labels = in_stage("train", [&] { return parse_labels(read_json(cfg.labels)); });
    r.model = stage_train(corpus, labels, lex, seed_opts);
    say("train: " + std::to_string(r.model.support_vectors.size()) + " support vectors");
  }
  write_json(out / "model.json", to_json(r.model));

  r.pms = stage_discover(corpus, r.model, lex);
  write_json(out / "pms.json", pms_to_json(r.pms, cfp));
  say("discover: " + std::to_string(r.pms.size()) + " methods in the PMS");

  const auto oal = in_stage("annotate", [&] { return load_oal(cfg.oal); });
  r.aomap = stage_annotate(corpus, r.pms, oal);
  write_json(out / "ao_map.json", aomap_to_json(r.aomap, cfp, oal.fingerprint()));

  const auto u = in_stage("select", [&] { return load_uppt(cfg.uppt); });
  const auto l1 = in_stage("select", [&] { return load_layer1_file(cfg.layer1, oal); });
  const auto sel = stage_select(corpus, r.aomap, u, l1, oal, cfg.select);
  r.plan = sel.plan;
  write_json(out / "plan.json", to_json(r.plan));
  say("select: " + std::to_string(sel.selection.tm.size()) + " candidate methods, " +
      std::to_string(sel.chains.size()) + " chains, " + std::to_string(r.plan.entries.size()) + " hooks");

  const auto inst = stage_instrument(corpus, r.plan);
  r.manifest = inst.manifest;
  in_stage("instrument", [&] {
    write_corpus_dir(inst.corpus, out / "instrumented");
    write_json(out / "manifest.json", to_json(r.manifest));
  });

  r.report = stage_verify(inst.corpus, u, r.plan, l1, oal, r.aomap, cfg.scenarios, cfg.seed);
  write_json(out / "report.json", to_json(r.report));
  say("verify: " + std::to_string(r.report.scenarios) + " scenarios, " + std::to_string(r.report.bypass.size()) +
      " bypass, " + std::to_string(r.report.useless.size()) + " useless, " +
      std::to_string(r.report.isolation.size()) + " isolation");
  r.exit_code = r.report.clean() ? kExitOk : kExitViolations;
  return r;
}

}  // namespace hooksmith
