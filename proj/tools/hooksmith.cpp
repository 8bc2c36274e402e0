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
// hooksmith command line. Every subcommand reads and writes the same
// artifacts as `pipeline`, so stages can be re-run one at a time.
//
// Exit codes: 0 ok, 2 validation error, 3 stage failure, 4 violations found.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hooksmith/pipeline.hpp"

namespace hs = hooksmith;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
};

struct SvmFlags {
  double C = 1.0;
  double gamma = 0.0;
  double tol = 1e-3;
  int max_passes = 10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--C", C, "SVM box constraint")->capture_default_str();
    cmd->add_option("--gamma", gamma, "RBF width (default 1/|lexicon|)");
    cmd->add_option("--tol", tol, "KKT tolerance")->capture_default_str();
    cmd->add_option("--max-passes", max_passes, "SMO passes without change before stopping")->capture_default_str();
  }

  hs::TrainOptions options(std::uint64_t seed) const {
    hs::TrainOptions o;
    o.svm.C = C;
    o.svm.tol = tol;
    o.svm.max_passes = max_passes;
    o.svm.seed = seed;
    o.gamma_set = gamma > 0.0;
    if (o.gamma_set) o.svm.gamma = gamma;
    return o;
  }
};

void note(const Globals& g, const std::string& s) {
  if (!g.quiet) std::cerr << s << "\n";
}

const std::string& need_out(const Globals& g, const std::string& what) {
  if (g.out.empty()) hs::fail_validation(what + " needs --out");
  return g.out;
}

void emit_json(const Globals& g, const nlohmann::json& j) {
  if (g.out.empty()) {
    std::cout << hs::dump_json(j);
  } else {
    hs::write_json(g.out, j);
  }
}

hs::Corpus load_corpus(const std::string& dir) {
  return hs::in_stage("parse", [&] { return hs::load_corpus_dir(dir); });
}

// Artifacts carry the fingerprints of what they were computed from; reject
// stale ones before doing any work.
void check_corpus(const std::string& recorded, const hs::Corpus& c, const std::string& producer,
                  const std::string& consumer) {
  hs::require_same_fingerprint(recorded, hs::corpus_fingerprint(c), producer, consumer);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware privacy hook placement over a mini-framework corpus"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory");
  app.add_flag("--quiet", g.quiet, "No progress notes on stderr");

  std::string corpus_dir, labels, lexicon, model, oal, layer1, uppt, plan, pms, ao_map, scenarios_dir, truth, script,
      manifest;
  std::size_t folds = 10, fuzz = 0, methods = 1000, chain_cap = 10000;
  double noise = 0.05;
  bool adversarial = false, closure = false, no_adversarial = false;
  SvmFlags svm;

  auto add_corpus = [&](CLI::App* cmd) {
    cmd->add_option("--corpus-dir,--corpus", corpus_dir, "Directory of .mfw files")->required();
  };

  auto* parse = app.add_subcommand("parse", "Parse a corpus; print a summary or the canonical text");
  add_corpus(parse);
  std::string canonical;
  parse->add_option("--canonical", canonical, "Write the canonical re-print of the corpus to this directory");

  auto* gen = app.add_subcommand("gen-corpus", "Generate a labeled synthetic corpus");
  gen->add_option("--methods", methods, "Number of methods")->capture_default_str();
  gen->add_option("--noise", noise, "Label flip probability")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train the sensitive-method classifier");
  add_corpus(train);
  train->add_option("--labels", labels, "Labels file {method id: 0|1}")->required();
  train->add_option("--lexicon", lexicon, "Feature lexicon (default built in)");
  svm.attach(train);

  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation of the classifier");
  add_corpus(crossval);
  crossval->add_option("--labels", labels, "Labels used for training")->required();
  crossval->add_option("--truth", truth, "Reference labels to score held-out folds against");
  crossval->add_option("--lexicon", lexicon, "Feature lexicon (default built in)");
  crossval->add_option("--folds", folds, "Number of folds")->capture_default_str();
  svm.attach(crossval);

  auto* discover = app.add_subcommand("discover", "Classify every method; write the sensitive set");
  add_corpus(discover);
  discover->add_option("--model", model, "Trained model")->required();
  discover->add_option("--lexicon", lexicon, "Feature lexicon (default built in)");

  auto* annotate = app.add_subcommand("annotate", "Attach abstract operations to the sensitive set");
  add_corpus(annotate);
  annotate->add_option("--pms", pms, "Sensitive method set from discover")->required();
  annotate->add_option("--oal", oal, "Operation table (default built in)");

  auto* select = app.add_subcommand("select", "Choose hook methods for a preference table");
  add_corpus(select);
  select->add_option("--uppt", uppt, "Preference table")->required();
  select->add_option("--ao-map", ao_map, "Annotations from annotate")->required();
  select->add_option("--layer1", layer1, "Layer-1 map (default built in)");
  select->add_option("--oal", oal, "Operation table (default built in)");
  select->add_flag("--closure", closure, "Also keep methods on paths between candidates");
  select->add_option("--chain-cap", chain_cap, "Give up past this many call chains")->capture_default_str();

  auto* instrument = app.add_subcommand("instrument", "Insert hooks per a plan");
  add_corpus(instrument);
  instrument->add_option("--plan", plan, "Hook plan")->required();
  instrument->add_option("--out-dir", g.out, "Directory for the instrumented corpus");
  instrument->add_option("--manifest", manifest, "Manifest file (default <out-dir>/manifest.json)");

  auto* verify = app.add_subcommand("verify", "Simulate scenarios and check for bypass, useless and isolation mistakes");
  add_corpus(verify);
  verify->add_option("--uppt", uppt, "Preference table")->required();
  verify->add_option("--plan", plan, "Hook plan")->required();
  verify->add_option("--ao-map", ao_map, "Annotations, for hooks the plan does not describe");
  verify->add_option("--layer1", layer1, "Layer-1 map (default built in)");
  verify->add_option("--oal", oal, "Operation table (default built in)");
  verify->add_option("--scenarios", scenarios_dir, "Directory of scenario .json files");
  verify->add_option("--fuzz", fuzz, "Number of random scenarios")->capture_default_str();
  verify->add_flag("--adversarial", adversarial, "Add one scenario per protective row calling every service method");
  verify->add_option("--report", g.out, "Report file");

  auto* wizard = app.add_subcommand("wizard", "Build a preference table interactively");
  wizard->add_option("--script", script, "Answers file, one per line, instead of stdin");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
  add_corpus(pipeline);
  pipeline->add_option("--uppt", uppt, "Preference table")->required();
  pipeline->add_option("--labels", labels, "Labels to train on");
  pipeline->add_option("--model", model, "Use this model instead of training");
  pipeline->add_option("--lexicon", lexicon, "Feature lexicon (default built in)");
  pipeline->add_option("--oal", oal, "Operation table (default built in)");
  pipeline->add_option("--layer1", layer1, "Layer-1 map (default built in)");
  pipeline->add_option("--scenarios", scenarios_dir, "Directory of scenario .json files");
  std::size_t pipeline_fuzz = 100;
  pipeline->add_option("--fuzz", pipeline_fuzz, "Number of random scenarios")->capture_default_str();
  pipeline->add_flag("--no-adversarial", no_adversarial, "Skip the adversarial scenarios");
  pipeline->add_flag("--closure", closure, "Also keep methods on paths between candidates");
  pipeline->add_option("--chain-cap", chain_cap, "Give up past this many call chains")->capture_default_str();
  svm.attach(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? hs::kExitOk : hs::kExitValidation;
  }

  try {
    if (*parse) {
      const auto c = load_corpus(corpus_dir);
      if (!canonical.empty()) {
        hs::write_corpus_dir(c, canonical);
        note(g, "parse: wrote " + std::to_string(c.units.size()) + " units to " + canonical);
      }
      emit_json(g, hs::corpus_summary(c));
      return hs::kExitOk;
    }

    if (*gen) {
      const auto& out = need_out(g, "gen-corpus");
      const auto s = hs::in_stage("gen-corpus", [&] { return hs::generate_synthetic_corpus(g.seed, methods, noise); });
      hs::write_corpus_dir(s.corpus, fs::path(out) / "corpus");
      hs::write_json(fs::path(out) / "labels.json", hs::labels_to_json(s.labels));
      hs::write_json(fs::path(out) / "truth.json", hs::labels_to_json(s.truth));
      hs::write_json(fs::path(out) / "oal.json", hs::to_json(s.oal));
      note(g, "gen-corpus: " + std::to_string(s.corpus.method_count()) + " methods in " + out);
      return hs::kExitOk;
    }

    if (*train) {
      const auto c = load_corpus(corpus_dir);
      const auto lex = hs::in_stage("train", [&] { return hs::load_lexicon(lexicon); });
      const auto ls = hs::in_stage("train", [&] { return hs::parse_labels(hs::read_json(labels)); });
      const auto m = hs::stage_train(c, ls, lex, svm.options(g.seed));
      note(g, "train: " + std::to_string(m.support_vectors.size()) + " support vectors");
      emit_json(g, hs::to_json(m));
      return hs::kExitOk;
    }

    if (*crossval) {
      const auto c = load_corpus(corpus_dir);
      const auto metrics = hs::in_stage("crossval", [&] {
        const auto lex = hs::load_lexicon(lexicon);
        const auto d = hs::labeled_features(c, hs::parse_labels(hs::read_json(labels)), lex);
        std::vector<int> eval = d.ys;
        if (!truth.empty()) {
          const auto t = hs::parse_labels(hs::read_json(truth));
          for (std::size_t i = 0; i < d.ids.size(); ++i) {
            const auto it = t.find(d.ids[i]);
            if (it == t.end()) hs::fail_validation("reference labels miss '" + d.ids[i] + "'");
            eval[i] = it->second;
          }
        }
        return hs::cross_validate(d.xs, d.ys, eval, folds, hs::effective_params(svm.options(g.seed), lex), g.seed);
      });
      nlohmann::json per = nlohmann::json::array();
      for (const auto& f : metrics.per_fold) per.push_back({{"precision", f.precision}, {"recall", f.recall}});
      note(g, "crossval: precision " + std::to_string(metrics.precision) + ", recall " + std::to_string(metrics.recall));
      emit_json(g, {{"folds", folds}, {"precision", metrics.precision}, {"recall", metrics.recall}, {"per_fold", per}});
      return hs::kExitOk;
    }

    if (*discover) {
      const auto c = load_corpus(corpus_dir);
      const auto lex = hs::in_stage("discover", [&] { return hs::load_lexicon(lexicon); });
      const auto m = hs::in_stage("discover", [&] { return hs::parse_model(hs::read_json(model)); });
      const auto set = hs::stage_discover(c, m, lex);
      note(g, "discover: " + std::to_string(set.size()) + " methods in the PMS");
      emit_json(g, hs::pms_to_json(set, hs::corpus_fingerprint(c)));
      return hs::kExitOk;
    }

    if (*annotate) {
      const auto c = load_corpus(corpus_dir);
      const auto table = hs::in_stage("annotate", [&] { return hs::load_oal(oal); });
      const auto p = hs::in_stage("annotate", [&] {
        auto f = hs::parse_pms(hs::read_json(pms));
        check_corpus(f.corpus_fingerprint, c, "discover", "annotate");
        return f;
      });
      const auto m = hs::stage_annotate(c, p.methods, table);
      emit_json(g, hs::aomap_to_json(m, hs::corpus_fingerprint(c), table.fingerprint()));
      return hs::kExitOk;
    }

    if (*select) {
      const auto c = load_corpus(corpus_dir);
      const auto table = hs::in_stage("select", [&] { return hs::load_oal(oal); });
      const auto am = hs::in_stage("select", [&] {
        auto f = hs::parse_aomap(hs::read_json(ao_map));
        check_corpus(f.corpus_fingerprint, c, "annotate", "select");
        hs::require_same_fingerprint(f.oal_fingerprint, table.fingerprint(), "annotate", "select");
        return f;
      });
      const auto u = hs::in_stage("select", [&] { return hs::load_uppt(uppt); });
      const auto l1 = hs::in_stage("select", [&] { return hs::load_layer1_file(layer1, table); });
      const auto sel = hs::stage_select(c, am.map, u, l1, table, {closure, chain_cap});
      for (const auto& w : sel.plan.warnings) note(g, "select: warning: " + w);
      note(g, "select: " + std::to_string(sel.plan.entries.size()) + " hooks");
      emit_json(g, hs::to_json(sel.plan));
      return hs::kExitOk;
    }

    if (*instrument) {
      const auto& out = need_out(g, "instrument");
      const auto c = load_corpus(corpus_dir);
      const auto p = hs::in_stage("instrument", [&] { return hs::parse_plan(hs::read_json(plan)); });
      const auto inst = hs::stage_instrument(c, p);
      for (const auto& w : inst.warnings) note(g, "instrument: warning: " + w);
      hs::in_stage("instrument", [&] {
        hs::write_corpus_dir(inst.corpus, out);
        hs::write_json(manifest.empty() ? fs::path(out) / "manifest.json" : fs::path(manifest), hs::to_json(inst.manifest));
      });
      note(g, "instrument: " + std::to_string(inst.manifest.entries.size()) + " hooks inserted");
      return hs::kExitOk;
    }

    if (*verify) {
      const auto c = load_corpus(corpus_dir);
      const auto table = hs::in_stage("verify", [&] { return hs::load_oal(oal); });
      const auto u = hs::in_stage("verify", [&] { return hs::load_uppt(uppt); });
      const auto l1 = hs::in_stage("verify", [&] { return hs::load_layer1_file(layer1, table); });
      const auto p = hs::in_stage("verify", [&] { return hs::parse_plan(hs::read_json(plan)); });
      const auto am = hs::in_stage("verify", [&] {
        return ao_map.empty() ? hs::AoMapFile{} : hs::parse_aomap(hs::read_json(ao_map));
      });
      const auto report = hs::stage_verify(c, u, p, l1, table, am.map, {scenarios_dir, fuzz, adversarial}, g.seed);
      note(g, "verify: " + std::to_string(report.scenarios) + " scenarios, " + std::to_string(report.bypass.size()) +
                  " bypass, " + std::to_string(report.useless.size()) + " useless, " +
                  std::to_string(report.isolation.size()) + " isolation");
      emit_json(g, hs::to_json(report));
      return report.clean() ? hs::kExitOk : hs::kExitViolations;
    }

    if (*wizard) {
      const auto u = hs::in_stage("wizard", [&] {
        if (script.empty()) {
          hs::StreamDriver d(std::cin, std::cerr);
          return hs::wizard(d);
        }
        std::vector<std::string> answers;
        std::istringstream in(hs::read_text(script));
        for (std::string line; std::getline(in, line);) answers.push_back(line);
        hs::ScriptedDriver d(std::move(answers));
        return hs::wizard(d);
      });
      emit_json(g, hs::to_json(u));
      return hs::kExitOk;
    }

    if (*pipeline) {
      hs::PipelineConfig cfg;
      cfg.corpus_dir = corpus_dir;
      cfg.lexicon = lexicon;
      cfg.labels = labels;
      cfg.model = model;
      cfg.oal = oal;
      cfg.layer1 = layer1;
      cfg.uppt = uppt;
      cfg.out_dir = need_out(g, "pipeline");
      cfg.seed = g.seed;
      cfg.train = svm.options(g.seed);
      cfg.select = {closure, chain_cap};
      cfg.scenarios = {scenarios_dir, pipeline_fuzz, !no_adversarial};
      const auto r = hs::run_pipeline(cfg, [&](const std::string& s) { note(g, s); });
      return r.exit_code;
    }
  } catch (const hs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hs::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hs::kExitStage;
  }
  return hs::kExitOk;
}
