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
// Labeled synthetic framework corpora for classifier evaluation.
//
// Positive methods (sensor data access / sensor control) get a resource stem
// in their name, sensor-ish parameters and return types, and bodies that
// touch the resource's operation keywords. Negatives use service plumbing
// names. The two populations overlap on purpose: negatives often live in
// sensor units and share the generic get/set/on prefixes, and some positives
// live in unrelated services.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"
#include "hooksmith/defaults.hpp"

namespace hooksmith {

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, int> labels;  // annotated, possibly flipped; -1/+1
  std::map<std::string, int> truth;   // -1/+1
  OalTable oal;
};

namespace detail {

struct ResourceVocabulary {
  std::string resource;
  std::vector<std::string> stems;
  std::vector<std::string> units;
  std::vector<std::string> data_types;
};

inline const std::vector<ResourceVocabulary>& resource_vocabularies() {
  static const std::vector<ResourceVocabulary> v{
      {"gps", {"Location", "Gps", "Position"}, {"LocationManagerService", "GpsLocationProvider", "GnssHal"},
       {"Location", "GpsLocation"}},
      {"camera", {"Camera", "Picture", "Preview", "Frame"}, {"CameraService", "CameraClient", "CameraHardware"},
       {"CameraFrame", "Picture"}},
      {"microphone", {"Audio", "Record", "Mic"}, {"AudioFlinger", "AudioRecordService", "AudioPolicyManager"},
       {"AudioBuffer", "AudioRecordData"}},
      {"wifi", {"Wifi", "Scan"}, {"WifiService", "WifiStateMachine", "WifiNative"}, {"ScanResult"}},
      {"bluetooth", {"Bluetooth", "Discovery"}, {"BluetoothManagerService", "BluetoothAdapterService"},
       {"BluetoothDevice"}},
      {"onboard_sensors", {"Sensor", "Event"}, {"SensorService", "SensorDevice", "SensorEventConnection"},
       {"SensorEvent", "sensors_event_t"}},
  };
  return v;
}

inline const std::vector<std::string>& neutral_units() {
  static const std::vector<std::string> v{"PackageManagerService", "ActivityManagerService", "WindowManagerService",
                                          "PowerManagerService",   "NotificationService",    "UserManagerService",
                                          "AlarmManagerService",   "InputMethodService"};
  return v;
}

inline const std::vector<std::string>& neutral_names() {
  static const std::vector<std::string> v{
      "dump",           "setTheme",          "getPackageName", "toString",       "onTrimMemory", "checkPermission",
      "getUserId",      "notifyConfigChanged", "reset",        "binderDied",     "isEnabled",    "setWallpaper",
      "getDisplayName", "killProcess",       "registerReceiver", "clearCache",   "getVersion",   "handleMessage",
      "onCreate",       "onDestroy",         "setPriority",    "getTimeout",     "applyPolicy",  "writeToParcel",
      "readFromParcel", "startActivity",     "updateConfig",   "onBind"};
  return v;
}

}  // namespace detail

// n_methods >= 20, 0 <= noise_rate < 0.5. Deterministic per seed.
inline SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n_methods, double noise_rate) {
  if (n_methods < 20) fail_validation("synthetic corpus needs at least 20 methods");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) fail_validation("noise rate must be in [0, 0.5)");
  Rng rng(seed);
  const auto& vocab = detail::resource_vocabularies();
  const auto oal = default_oal();

  // unit -> method texts
  std::map<std::string, std::vector<std::string>> bodies;
  std::map<std::string, std::string> unit_lang;
  std::set<std::string> ids;
  std::vector<std::string> made;  // method ids, for call targets
  SyntheticCorpus out;

  static const std::vector<std::string> pos_prefix{"get", "start", "on", "report", "handle", "set", "enable",
                                                   "callback", "dispatch", "native_read", "update"};
  static const std::vector<std::string> lexicon_prefix{"get", "start", "on", "report", "handle", "set", "enable"};
  static const std::vector<std::string> bland_nouns{"Status", "State", "Config", "Mode", "Request"};
  static const std::vector<std::string> pos_suffix{"", "Locked", "Changed", "Info", "Updates", "Native", "Data"};
  static const std::vector<std::string> pos_param_names{"buffer", "event", "listener", "callback", "request",
                                                        "provider", "data", "userId", "sensors_event_t_ptr"};
  static const std::vector<std::string> neg_param_names{"name", "flags", "id", "index", "value", "config",
                                                        "intent", "token", "count", "mode"};
  static const std::vector<std::string> neg_types{"int", "String", "Intent", "Bundle", "IBinder", "boolean", "long"};
  static const std::vector<std::string> neg_returns{"void", "int", "String", "boolean", "Bundle", "long"};
  static const std::vector<std::string> neg_tokens{"DUMP", "TAG", "PACKAGE_ADDED", "UNKNOWN", "DEBUG"};

  for (std::size_t i = 0; i < n_methods; ++i) {
    const bool positive = rng.chance(0.5);
    const auto& rv = rng.pick(vocab);
    std::string unit;
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    std::string ret;
    std::vector<std::string> stmts;

    if (positive) {
      unit = rng.chance(0.15) ? rng.pick(detail::neutral_units()) : rng.pick(rv.units);
      // A few positives hide the stem and are recognizable only by unit,
      // parameters and return type.
      name = rng.chance(0.05) ? rng.pick(lexicon_prefix) + rng.pick(bland_nouns)
                              : rng.pick(pos_prefix) + rng.pick(rv.stems) + rng.pick(pos_suffix);
      const auto arity = rng.below(4);
      for (std::size_t p = 0; p < arity; ++p) {
        const auto& t = rng.chance(0.6) ? rng.pick(rv.data_types) : rng.pick(neg_types);
        params.emplace_back(t, rng.pick(pos_param_names) + std::to_string(p));
      }
      const auto r = rng.below(4);
      ret = r == 0 ? "void" : r == 1 ? "boolean" : rng.pick(rv.data_types);
      // One to three keyword-bearing statements from this resource's operations.
      std::vector<const KeywordEntry*> kws;
      for (const auto& [op_name, op] : oal.operations()) {
        if (op.resource != rv.resource) continue;
        for (const auto& k : op.keywords) kws.push_back(&k);
      }
      const auto n_kw = 1 + rng.below(3);
      for (std::size_t k = 0; k < n_kw; ++k) {
        const auto* kw = rng.pick(kws);
        switch (kw->kind) {
          case KeywordKind::sds_type: stmts.push_back("var " + kw->text + " v" + std::to_string(k) + ";"); break;
          case KeywordKind::ipc_interface:
          case KeywordKind::hw_interface: stmts.push_back("call " + kw->text + ";"); break;
          case KeywordKind::command_const: stmts.push_back("tok \"" + kw->text + "\";"); break;
        }
      }
    } else {
      unit = rng.chance(0.4) ? rng.pick(rv.units) : rng.pick(detail::neutral_units());
      name = rng.pick(detail::neutral_names());
      const auto arity = rng.below(4);
      for (std::size_t p = 0; p < arity; ++p) {
        params.emplace_back(rng.pick(neg_types), rng.pick(neg_param_names) + std::to_string(p));
      }
      ret = rng.pick(neg_returns);
      const auto n_stmt = rng.below(3);
      for (std::size_t k = 0; k < n_stmt; ++k) {
        stmts.push_back(rng.chance(0.5) ? "tok \"" + rng.pick(neg_tokens) + "\";"
                                        : "var " + rng.pick(neg_types) + " t" + std::to_string(k) + ";");
      }
    }
    // Distinct ids: bump a numeric suffix until free.
    std::string base = name;
    for (int bump = 2; ids.count(make_method_id(unit, name, params.size())); ++bump) name = base + std::to_string(bump);
    const auto id = make_method_id(unit, name, params.size());
    ids.insert(id);
    if (!made.empty() && rng.chance(0.3)) {
      const auto& target = rng.pick(made);
      const auto dot = target.find('.');
      const auto slash = target.rfind('/');
      stmts.push_back("call " + target.substr(0, dot) + "." + target.substr(dot + 1, slash - dot - 1) + ";");
    }
    made.push_back(id);
    if (ret != "void" && rng.chance(0.5)) stmts.push_back("return null;");

    std::vector<std::string> ps;
    for (const auto& [t, n] : params) ps.push_back(t + " " + n);
    std::string text = "  " + ret + " " + name + "(" + join(ps, ", ") + ") {";
    for (const auto& s : stmts) text += "\n    " + s;
    text += stmts.empty() ? " }" : "\n  }";
    bodies[unit].push_back(text);
    unit_lang.try_emplace(unit, rng.chance(0.5) ? "java" : "cpp");

    out.truth[id] = positive ? 1 : -1;
    out.labels[id] = rng.chance(noise_rate) ? -out.truth[id] : out.truth[id];
  }

  std::vector<SourceDocument> docs;
  for (const auto& [unit, methods] : bodies) {
    std::string text = "service " + unit + " [process=system_server, side=service, lang=" + unit_lang[unit] + "] {\n";
    for (const auto& m : methods) text += m + "\n";
    text += "}\n";
    docs.push_back({unit + ".mfw", text});
  }
  out.corpus = parse_corpus(docs);
  out.oal = oal;
  return out;
}

}  // namespace hooksmith
