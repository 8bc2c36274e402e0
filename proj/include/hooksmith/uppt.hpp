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
// User privacy preference tables: rows of (context, resource, control).
// Words come from a small closed lexicon so a non-expert can fill a table
// through the three-step wizard.

#pragma once

#include <array>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/common.hpp"
#include "json.hpp"

namespace hooksmith {

inline constexpr std::array<std::string_view, 6> kResources = {
    "gps", "camera", "microphone", "wifi", "bluetooth", "onboard_sensors"};
inline constexpr std::array<std::string_view, 3> kControls = {"disable", "obfuscate", "allow"};
inline constexpr std::array<std::string_view, 3> kStatusKeys = {"foreground_app", "category",
                                                                 "back_stack"};

inline bool is_resource(std::string_view w) {
  return std::find(kResources.begin(), kResources.end(), w) != kResources.end();
}
inline bool is_control(std::string_view w) {
  return std::find(kControls.begin(), kControls.end(), w) != kControls.end();
}

inline std::string lexicon_listing(std::string_view kind) {
  if (kind == "resource") return join(kResources, ", ");
  if (kind == "control") return join(kControls, ", ");
  return join(kStatusKeys, ", ");
}

// Minutes since midnight, "HH:MM". 24:00 is accepted as an end of day.
inline int parse_clock(std::string_view s) {
  const auto bad = [&] { fail_validation("malformed time '" + std::string(s) + "' (expected HH:MM)"); };
  if (s.size() != 5 || s[2] != ':') bad();
  for (std::size_t i : {0u, 1u, 3u, 4u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad();
  }
  const int h = (s[0] - '0') * 10 + (s[1] - '0');
  const int m = (s[3] - '0') * 10 + (s[4] - '0');
  if (m > 59 || h > 24 || (h == 24 && m != 0)) bad();
  return h * 60 + m;
}

inline std::string format_clock(int minutes) {
  std::string out = "00:00";
  out[0] = static_cast<char>('0' + minutes / 600);
  out[1] = static_cast<char>('0' + (minutes / 60) % 10);
  out[3] = static_cast<char>('0' + (minutes % 60) / 10);
  out[4] = static_cast<char>('0' + minutes % 10);
  return out;
}

struct TimeWindow {
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  bool operator==(const TimeWindow&) const = default;
};

struct StatusSpec {
  std::optional<std::string> foreground_app;  // exact name or "*"
  std::optional<std::string> category;        // exact name or "*"
  std::optional<std::vector<std::string>> back_stack;
  bool empty() const { return !foreground_app && !category && !back_stack; }
  bool operator==(const StatusSpec&) const = default;
};

// The observable state a context is matched against.
struct RuntimeContext {
  int clock = 0;
  std::string location;
  std::string foreground_app;
  std::string category;
  std::vector<std::string> back_stack;
  bool operator==(const RuntimeContext&) const = default;
};

struct ContextSpec {
  std::optional<TimeWindow> time;
  std::optional<std::string> location;
  std::optional<StatusSpec> status;

  bool operator==(const ContextSpec&) const = default;

  void validate() const {
    if (!time && !location && !status) fail_validation("context has no time, location or status");
    if (time && time->start >= time->end) {
      fail_validation("time window " + format_clock(time->start) + "-" + format_clock(time->end) +
                      " is empty (start must precede end)");
    }
    if (status && status->empty()) fail_validation("context status has no keys");
  }

  // Conjunctive; absent fields match anything. The time window is half-open.
  bool matches(const RuntimeContext& ctx) const {
    if (time && !(ctx.clock >= time->start && ctx.clock < time->end)) return false;
    if (location && *location != ctx.location) return false;
    if (status) {
      const auto field_ok = [](const std::optional<std::string>& want, const std::string& have) {
        return !want || *want == "*" || *want == have;
      };
      if (!field_ok(status->foreground_app, ctx.foreground_app)) return false;
      if (!field_ok(status->category, ctx.category)) return false;
      if (status->back_stack) {
        for (const auto& name : *status->back_stack) {
          if (std::find(ctx.back_stack.begin(), ctx.back_stack.end(), name) == ctx.back_stack.end()) {
            return false;
          }
        }
      }
    }
    return true;
  }
};

struct UpptRow {
  ContextSpec context;
  std::string resource;
  std::string control;
  bool operator==(const UpptRow&) const = default;
};

class Uppt {
 public:
  explicit Uppt(std::vector<UpptRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) fail_validation("privacy preference table has no rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      if (!is_resource(r.resource)) {
        fail_validation("unknown resource '" + r.resource + "' (lexicon: " + lexicon_listing("resource") + ")");
      }
      if (!is_control(r.control)) {
        fail_validation("unknown control '" + r.control + "' (lexicon: " + lexicon_listing("control") + ")");
      }
      r.context.validate();
      for (std::size_t j = 0; j < i; ++j) {
        if (rows_[j] == r) fail_validation("duplicate row " + std::to_string(i) + " (same as row " + std::to_string(j) + ")");
      }
    }
  }

  const std::vector<UpptRow>& rows() const { return rows_; }

 private:
  std::vector<UpptRow> rows_;
};

inline nlohmann::json to_json(const ContextSpec& c) {
  nlohmann::json j = nlohmann::json::object();
  if (c.time) j["time"] = {{"start", format_clock(c.time->start)}, {"end", format_clock(c.time->end)}};
  if (c.location) j["location"] = *c.location;
  if (c.status) {
    nlohmann::json s = nlohmann::json::object();
    if (c.status->foreground_app) s["foreground_app"] = *c.status->foreground_app;
    if (c.status->category) s["category"] = *c.status->category;
    if (c.status->back_stack) s["back_stack"] = *c.status->back_stack;
    j["status"] = s;
  }
  return j;
}

inline nlohmann::json to_json(const Uppt& u) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : u.rows()) {
    rows.push_back({{"context", to_json(r.context)}, {"resource", r.resource}, {"control", r.control}});
  }
  return {{"rows", rows}};
}

inline std::string uppt_fingerprint(const Uppt& u) { return fingerprint_of(to_json(u).dump()); }

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail_validation(where + ": missing '" + key + "'");
  return j.at(key);
}

inline std::string require_string(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) fail_validation(where + ": expected a string");
  return j.get<std::string>();
}

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& [k, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail_validation(where + ": unknown key '" + k + "'");
    }
  }
}

}  // namespace detail

inline ContextSpec context_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) fail_validation(where + ": context must be an object");
  detail::reject_unknown_keys(j, {"time", "location", "status"}, where);
  ContextSpec c;
  if (j.contains("time")) {
    const auto& t = j.at("time");
    detail::reject_unknown_keys(t, {"start", "end"}, where + ".time");
    c.time = TimeWindow{parse_clock(detail::require_string(detail::require(t, "start", where + ".time"), where + ".time.start")),
                        parse_clock(detail::require_string(detail::require(t, "end", where + ".time"), where + ".time.end"))};
  }
  if (j.contains("location")) c.location = detail::require_string(j.at("location"), where + ".location");
  if (j.contains("status")) {
    const auto& s = j.at("status");
    if (!s.is_object()) fail_validation(where + ".status: expected an object");
    for (const auto& [k, _] : s.items()) {
      if (std::find(kStatusKeys.begin(), kStatusKeys.end(), k) == kStatusKeys.end()) {
        fail_validation("unknown status key '" + k + "' (lexicon: " + lexicon_listing("status") + ")");
      }
    }
    StatusSpec st;
    if (s.contains("foreground_app")) st.foreground_app = detail::require_string(s.at("foreground_app"), where + ".status.foreground_app");
    if (s.contains("category")) st.category = detail::require_string(s.at("category"), where + ".status.category");
    if (s.contains("back_stack")) {
      const auto& b = s.at("back_stack");
      if (!b.is_array()) fail_validation(where + ".status.back_stack: expected an array");
      std::vector<std::string> names;
      for (const auto& n : b) names.push_back(detail::require_string(n, where + ".status.back_stack[]"));
      st.back_stack = std::move(names);
    }
    c.status = std::move(st);
  }
  return c;
}

inline Uppt parse_uppt(const nlohmann::json& doc) {
  if (!doc.is_object()) fail_validation("privacy preference table must be a JSON object");
  detail::reject_unknown_keys(doc, {"rows"}, "uppt");
  const auto& rows = detail::require(doc, "rows", "uppt");
  if (!rows.is_array()) fail_validation("uppt.rows: expected an array");
  std::vector<UpptRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto where = "uppt.rows[" + std::to_string(i) + "]";
    const auto& r = rows[i];
    detail::reject_unknown_keys(r, {"context", "resource", "control"}, where);
    UpptRow row;
    row.context = context_from_json(detail::require(r, "context", where), where + ".context");
    row.resource = detail::require_string(detail::require(r, "resource", where), where + ".resource");
    row.control = detail::require_string(detail::require(r, "control", where), where + ".control");
    out.push_back(std::move(row));
  }
  return Uppt(std::move(out));
}

inline Uppt parse_uppt_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_validation(std::string("privacy preference table is not valid JSON: ") + e.what());
  }
  return parse_uppt(doc);
}

// "resource_control" for every row that needs mediation; allow rows need none.
inline std::set<std::string> extract_resource_control_words(const Uppt& u) {
  std::set<std::string> out;
  for (const auto& r : u.rows()) {
    if (r.control != "allow") out.insert(r.resource + "_" + r.control);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wizard

class PromptDriver {
 public:
  virtual ~PromptDriver() = default;
  virtual void say(const std::string& line) = 0;
  // nullopt means the user left (EOF).
  virtual std::optional<std::string> ask(const std::string& prompt) = 0;
};

// Replays canned answers and keeps the whole dialogue.
class ScriptedDriver : public PromptDriver {
 public:
  explicit ScriptedDriver(std::vector<std::string> answers) : answers_(std::move(answers)) {}

  void say(const std::string& line) override { transcript_.push_back(line); }

  std::optional<std::string> ask(const std::string& prompt) override {
    transcript_.push_back(prompt);
    if (next_ >= answers_.size()) return std::nullopt;
    transcript_.push_back("> " + answers_[next_]);
    return answers_[next_++];
  }

  const std::vector<std::string>& transcript() const { return transcript_; }

 private:
  std::vector<std::string> answers_;
  std::size_t next_ = 0;
  std::vector<std::string> transcript_;
};

class StreamDriver : public PromptDriver {
 public:
  StreamDriver(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  void say(const std::string& line) override { out_ << line << "\n"; }

  std::optional<std::string> ask(const std::string& prompt) override {
    out_ << prompt << " " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    return line;
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view answer) {
  std::vector<std::string> out;
  for (auto& w : split(answer, ',')) {
    auto t = trim(w);
    if (!t.empty() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

inline std::string wizard_answer(PromptDriver& d, const std::string& prompt) {
  auto a = d.ask(prompt);
  if (!a) fail_stage("wizard aborted: no answer to \"" + prompt + "\"");
  auto t = trim(*a);
  if (t == "quit" || t == "abort") fail_stage("wizard aborted by user");
  return t;
}

// "time=09:00-11:00; location=HotelX; foreground_app=x; category=y; back_stack=a,b"
inline ContextSpec parse_context_answer(std::string_view answer) {
  ContextSpec c;
  StatusSpec st;
  for (const auto& part : split(answer, ';')) {
    const auto item = trim(part);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail_validation("context item '" + item + "' is not key=value");
    const auto key = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    if (key == "time") {
      const auto dash = value.find('-');
      if (dash == std::string::npos) fail_validation("time '" + value + "' is not HH:MM-HH:MM");
      c.time = TimeWindow{parse_clock(trim(value.substr(0, dash))), parse_clock(trim(value.substr(dash + 1)))};
    } else if (key == "location") {
      c.location = value;
    } else if (key == "foreground_app") {
      st.foreground_app = value;
    } else if (key == "category") {
      st.category = value;
    } else if (key == "back_stack") {
      st.back_stack = split_words(value);
    } else {
      fail_validation("unknown context key '" + key + "' (expected time, location, " + lexicon_listing("status") + ")");
    }
  }
  if (!st.empty()) c.status = std::move(st);
  c.validate();
  return c;
}

}  // namespace detail

// Three steps: pick resources, then controls for each picked resource, then
// a context for each (resource, control). Resources not picked in step one
// never come up again.
inline Uppt wizard(PromptDriver& d) {
  d.say("Step 1: sensor resources: " + lexicon_listing("resource"));
  const auto resources = detail::split_words(detail::wizard_answer(d, "Select resources to protect (comma-separated):"));
  if (resources.empty()) fail_validation("no resources selected");
  for (const auto& r : resources) {
    if (!is_resource(r)) fail_validation("unknown resource '" + r + "' (lexicon: " + lexicon_listing("resource") + ")");
  }

  std::vector<std::pair<std::string, std::string>> picks;
  d.say("Step 2: control measures");
  for (const auto& r : resources) {
    const auto controls = detail::split_words(
        detail::wizard_answer(d, "Control measures for " + r + " [" + lexicon_listing("control") + "]:"));
    if (controls.empty()) fail_validation("no control measure chosen for " + r);
    for (const auto& c : controls) {
      if (!is_control(c)) fail_validation("unknown control '" + c + "' (lexicon: " + lexicon_listing("control") + ")");
      picks.emplace_back(r, c);
    }
  }

  std::vector<UpptRow> rows;
  d.say("Step 3: contexts (time=HH:MM-HH:MM; location=NAME; foreground_app=APP; category=CAT; back_stack=A,B)");
  for (const auto& [r, c] : picks) {
    const auto answer = detail::wizard_answer(d, "Context for " + r + "/" + c + ":");
    rows.push_back({detail::parse_context_answer(answer), r, c});
  }
  return Uppt(std::move(rows));
}

}  // namespace hooksmith
