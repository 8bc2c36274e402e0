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
// The context-aware policy service the inserted hooks consult.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hooksmith/common.hpp"
#include "hooksmith/uppt.hpp"

namespace hooksmith {

// Declared in severity order so max() resolves conflicts.
enum class Decision { allow = 0, obfuscate = 1, disallow = 2 };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::allow: return "ALLOW";
    case Decision::obfuscate: return "OBFUSCATE";
    case Decision::disallow: return "DISALLOW";
  }
  return "?";
}

inline Decision parse_decision(std::string_view s) {
  if (s == "ALLOW") return Decision::allow;
  if (s == "OBFUSCATE") return Decision::obfuscate;
  if (s == "DISALLOW") return Decision::disallow;
  fail_validation("unknown policy decision '" + std::string(s) + "'");
}

inline Decision decision_for_control(std::string_view control) {
  if (control == "disable") return Decision::disallow;
  if (control == "obfuscate") return Decision::obfuscate;
  return Decision::allow;
}

// The control word a decision enforces; empty for ALLOW.
inline std::string_view control_for(Decision d) {
  switch (d) {
    case Decision::disallow: return "disable";
    case Decision::obfuscate: return "obfuscate";
    default: return "";
  }
}

inline Decision check_policy(const Uppt& u, std::string_view resource, const RuntimeContext& ctx) {
  Decision out = Decision::allow;
  for (const auto& row : u.rows()) {
    if (row.resource != resource || !row.context.matches(ctx)) continue;
    out = std::max(out, decision_for_control(row.control));
  }
  return out;
}

enum class ValueClass { real, obfuscated, denied };

inline std::string_view to_string(ValueClass v) {
  switch (v) {
    case ValueClass::real: return "real";
    case ValueClass::obfuscated: return "obfuscated";
    case ValueClass::denied: return "denied";
  }
  return "?";
}

// A symbolic piece of sensor data, e.g. real "gps@LocationProvider.read/0".
struct Datum {
  ValueClass cls = ValueClass::real;
  std::string resource;
  std::string value;
  bool operator==(const Datum&) const = default;
};

// Randomizes the payload; the result is always tagged obfuscated. Denied
// data stays denied: there is nothing to randomize.
inline Datum obfuscate(const Datum& d, std::uint64_t seed) {
  if (d.cls == ValueClass::denied) return d;
  Fingerprint fp;
  fp.add(d.value);
  const auto r = mix64(seed ^ fp.value());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (int shift = 60; shift >= 0; shift -= 4) hex += kHex[(r >> shift) & 0xf];
  return {ValueClass::obfuscated, d.resource, d.resource + "@r" + hex};
}

}  // namespace hooksmith
