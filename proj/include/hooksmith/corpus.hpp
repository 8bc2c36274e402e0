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
// The mini-framework language (.mfw): a closed stand-in for framework
// service code. A corpus is a list of units (services or app-side
// components), each holding methods whose bodies are flat statement lists:
//
//   service LocationManagerService [process=system_server, side=service, lang=java] {
//     Location getLastLocation(String provider) {
//       var Location notifyLocation;
//       call LocationProvider.fetch;
//       return notifyLocation;
//     }
//   }
//
// Tokens are identifiers, double-quoted strings (no escapes) and the
// punctuation [ ] = , { } ( ) ; . and `#` starts a comment to end of line.

#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hooksmith/common.hpp"

namespace hooksmith {

enum class Side { service, app };
enum class Lang { java, cpp };

inline std::string_view to_string(Side s) { return s == Side::service ? "service" : "app"; }
inline std::string_view to_string(Lang l) { return l == Lang::java ? "java" : "cpp"; }

// Diagnostic position. Positions never take part in structural equality:
// a corpus and its re-printed form compare equal.
struct SourcePos {
  std::string file;
  int line = 0;
};
inline bool operator==(const SourcePos&, const SourcePos&) { return true; }

struct CallStmt {
  std::optional<std::string> qualifier;
  std::string name;
  bool operator==(const CallStmt&) const = default;
};

struct VarDeclStmt {
  std::string type;
  std::string name;
  bool operator==(const VarDeclStmt&) const = default;
};

struct TokStmt {
  std::string text;
  bool operator==(const TokStmt&) const = default;
};

struct ReturnStmt {
  enum class Kind { none, null, var };
  Kind kind = Kind::none;
  std::string var;  // set iff kind == var
  bool operator==(const ReturnStmt&) const = default;
};

// Only ever present in instrumented corpora.
struct HookCheckStmt {
  std::vector<std::string> resources;
  std::vector<std::string> controls;
  std::optional<std::string> sds_var;
  bool operator==(const HookCheckStmt&) const = default;
};

using StmtNode = std::variant<CallStmt, VarDeclStmt, TokStmt, ReturnStmt, HookCheckStmt>;

struct Stmt {
  StmtNode node;
  SourcePos pos;
  bool operator==(const Stmt&) const = default;
};

struct Param {
  std::string type;
  std::string name;
  bool operator==(const Param&) const = default;
};

inline std::string make_method_id(std::string_view unit, std::string_view name, std::size_t arity) {
  return std::string(unit) + "." + std::string(name) + "/" + std::to_string(arity);
}

struct MethodRecord {
  std::string id;
  std::string unit;
  std::string name;
  std::vector<Param> params;
  std::string return_type;
  std::vector<Stmt> body;
  SourcePos pos;

  // Call statements of the body, in body order.
  std::vector<CallStmt> callees() const {
    std::vector<CallStmt> out;
    for (const auto& s : body) {
      if (const auto* c = std::get_if<CallStmt>(&s.node)) out.push_back(*c);
    }
    return out;
  }

  bool operator==(const MethodRecord&) const = default;
};

struct UnitDecl {
  std::string name;
  std::string process;
  Side side = Side::service;
  Lang lang = Lang::java;
  std::vector<MethodRecord> methods;
  SourcePos pos;
  bool operator==(const UnitDecl&) const = default;
};

struct Corpus {
  std::vector<UnitDecl> units;
  std::vector<std::string> source_paths;

  // Structural equality over units only; file bookkeeping is metadata.
  bool operator==(const Corpus& o) const { return units == o.units; }

  template <typename Fn>
  void for_each_method(Fn&& fn) const {
    for (const auto& u : units)
      for (const auto& m : u.methods) fn(u, m);
  }

  std::size_t method_count() const {
    std::size_t n = 0;
    for (const auto& u : units) n += u.methods.size();
    return n;
  }
};

struct SourceDocument {
  std::string path;
  std::string text;
  bool operator==(const SourceDocument&) const = default;
};

// Id -> (unit, method) lookup over a corpus that outlives the index.
class CorpusIndex {
 public:
  explicit CorpusIndex(const Corpus& c) : corpus_(&c) {
    for (std::size_t ui = 0; ui < c.units.size(); ++ui) {
      const auto& u = c.units[ui];
      for (std::size_t mi = 0; mi < u.methods.size(); ++mi) {
        by_id_.emplace(u.methods[mi].id, std::pair{ui, mi});
        by_name_[u.methods[mi].name].push_back(u.methods[mi].id);
        by_unit_name_[u.name + "." + u.methods[mi].name].push_back(u.methods[mi].id);
      }
    }
  }

  const MethodRecord* find(std::string_view id) const {
    const auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return nullptr;
    return &corpus_->units[it->second.first].methods[it->second.second];
  }

  const MethodRecord& at(std::string_view id) const {
    const auto* m = find(id);
    if (m == nullptr) fail_validation("unknown method id '" + std::string(id) + "'");
    return *m;
  }

  const UnitDecl& unit_of(std::string_view id) const {
    const auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) fail_validation("unknown method id '" + std::string(id) + "'");
    return corpus_->units[it->second.first];
  }

  // Name-based resolution: `U.m` hits every arity of m in U; bare `m` hits
  // every method named m anywhere in the corpus.
  std::vector<std::string> resolve(const CallStmt& call) const {
    const auto& table = call.qualifier ? by_unit_name_ : by_name_;
    const auto key = call.qualifier ? *call.qualifier + "." + call.name : call.name;
    const auto it = table.find(key);
    if (it == table.end()) return {};
    return it->second;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(by_id_.size());
    for (const auto& [id, _] : by_id_) out.push_back(id);
    return out;
  }

  const Corpus& corpus() const { return *corpus_; }

 private:
  const Corpus* corpus_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_id_;
  std::map<std::string, std::vector<std::string>> by_name_;
  std::map<std::string, std::vector<std::string>> by_unit_name_;
};

namespace detail {

struct Lexeme {
  enum class Kind { ident, string, punct, end };
  Kind kind = Kind::end;
  std::string text;
  int line = 0;
};

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Lexeme> lex(const std::string& path, std::string_view text) {
  std::vector<Lexeme> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (is_ident_start(c)) {
      const std::size_t b = i;
      while (i < text.size() && is_ident_char(text[i])) ++i;
      out.push_back({Lexeme::Kind::ident, std::string(text.substr(b, i - b)), line});
    } else if (c == '"') {
      const std::size_t b = ++i;
      while (i < text.size() && text[i] != '"' && text[i] != '\n') ++i;
      if (i >= text.size() || text[i] != '"') {
        fail_validation(path + ":" + std::to_string(line) + ": unterminated string literal");
      }
      out.push_back({Lexeme::Kind::string, std::string(text.substr(b, i - b)), line});
      ++i;
    } else if (std::string_view("[]=,{}();.").find(c) != std::string_view::npos) {
      out.push_back({Lexeme::Kind::punct, std::string(1, c), line});
      ++i;
    } else {
      fail_validation(path + ":" + std::to_string(line) + ": unexpected character '" +
                      std::string(1, c) + "'");
    }
  }
  out.push_back({Lexeme::Kind::end, "<end of file>", line});
  return out;
}

class Parser {
 public:
  Parser(std::string path, std::string_view text) : path_(std::move(path)), toks_(lex(path_, text)) {}

  std::vector<UnitDecl> units() {
    std::vector<UnitDecl> out;
    while (peek().kind != Lexeme::Kind::end) out.push_back(unit());
    return out;
  }

 private:
  const Lexeme& peek() const { return toks_[pos_]; }

  [[noreturn]] void expected(std::string_view what) const {
    const auto& t = peek();
    fail_validation(path_ + ":" + std::to_string(t.line) + ": expected " + std::string(what) +
                    ", found '" + t.text + "'");
  }

  bool at_punct(char p) const {
    return peek().kind == Lexeme::Kind::punct && peek().text[0] == p;
  }

  void punct(char p) {
    if (!at_punct(p)) expected(std::string("'") + p + "'");
    ++pos_;
  }

  void keyword(std::string_view kw) {
    if (peek().kind != Lexeme::Kind::ident || peek().text != kw) expected("'" + std::string(kw) + "'");
    ++pos_;
  }

  std::string ident(std::string_view what = "identifier") {
    if (peek().kind != Lexeme::Kind::ident) expected(what);
    return toks_[pos_++].text;
  }

  std::string string_lit() {
    if (peek().kind != Lexeme::Kind::string) expected("string literal");
    return toks_[pos_++].text;
  }

  UnitDecl unit() {
    UnitDecl u;
    u.pos = {path_, peek().line};
    keyword("service");
    u.name = ident("unit name");
    punct('[');
    keyword("process");
    punct('=');
    u.process = ident("process name");
    punct(',');
    keyword("side");
    punct('=');
    const auto side = ident("'service' or 'app'");
    if (side == "service") {
      u.side = Side::service;
    } else if (side == "app") {
      u.side = Side::app;
    } else {
      --pos_;
      expected("'service' or 'app'");
    }
    punct(',');
    keyword("lang");
    punct('=');
    const auto lang = ident("'java' or 'cpp'");
    if (lang == "java") {
      u.lang = Lang::java;
    } else if (lang == "cpp") {
      u.lang = Lang::cpp;
    } else {
      --pos_;
      expected("'java' or 'cpp'");
    }
    punct(']');
    punct('{');
    while (!at_punct('}')) {
      if (peek().kind == Lexeme::Kind::end) expected("'}'");
      u.methods.push_back(method(u.name));
    }
    punct('}');
    return u;
  }

  MethodRecord method(const std::string& unit_name) {
    MethodRecord m;
    m.unit = unit_name;
    m.pos = {path_, peek().line};
    m.return_type = ident("return type");
    m.name = ident("method name");
    punct('(');
    if (!at_punct(')')) {
      while (true) {
        Param p;
        p.type = ident("parameter type");
        p.name = ident("parameter name");
        m.params.push_back(std::move(p));
        if (at_punct(',')) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    punct(')');
    punct('{');
    while (!at_punct('}')) m.body.push_back(stmt());
    punct('}');
    m.id = make_method_id(unit_name, m.name, m.params.size());
    return m;
  }

  Stmt stmt() {
    Stmt s;
    s.pos = {path_, peek().line};
    if (peek().kind != Lexeme::Kind::ident) expected("statement or '}'");
    const auto& kw = peek().text;
    if (kw == "call") {
      ++pos_;
      CallStmt c;
      auto first = ident("callee");
      if (at_punct('.')) {
        ++pos_;
        c.qualifier = std::move(first);
        c.name = ident("callee method name");
      } else {
        c.name = std::move(first);
      }
      s.node = std::move(c);
    } else if (kw == "var") {
      ++pos_;
      VarDeclStmt v;
      v.type = ident("variable type");
      v.name = ident("variable name");
      s.node = std::move(v);
    } else if (kw == "tok") {
      ++pos_;
      s.node = TokStmt{string_lit()};
    } else if (kw == "return") {
      ++pos_;
      ReturnStmt r;
      if (peek().kind == Lexeme::Kind::ident) {
        auto name = ident();
        if (name == "null") {
          r.kind = ReturnStmt::Kind::null;
        } else {
          r.kind = ReturnStmt::Kind::var;
          r.var = std::move(name);
        }
      }
      s.node = std::move(r);
    } else if (kw == "hookcheck") {
      ++pos_;
      HookCheckStmt h;
      punct('(');
      h.resources = split(string_lit(), '|');
      punct(',');
      h.controls = split(string_lit(), '|');
      punct(',');
      auto var = ident("SDS variable or '_'");
      if (var != "_") h.sds_var = std::move(var);
      punct(')');
      s.node = std::move(h);
    } else {
      expected("statement ('call', 'var', 'tok', 'return', 'hookcheck') or '}'");
    }
    punct(';');
    return s;
  }

  std::string path_;
  std::vector<Lexeme> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses every document and merges the units in document order. Documents
// are parsed concurrently; each parse is independent.
inline Corpus parse_corpus(std::span<const SourceDocument> files) {
  std::vector<std::future<std::vector<UnitDecl>>> parsed;
  parsed.reserve(files.size());
  for (const auto& f : files) {
    parsed.push_back(std::async(files.size() > 1 ? std::launch::async : std::launch::deferred,
                                [&f] { return detail::Parser(f.path, f.text).units(); }));
  }
  Corpus c;
  for (std::size_t i = 0; i < files.size(); ++i) {
    c.source_paths.push_back(files[i].path);
    for (auto& u : parsed[i].get()) c.units.push_back(std::move(u));
  }
  std::map<std::string, SourcePos> seen;
  for (const auto& u : c.units) {
    for (const auto& m : u.methods) {
      const auto [it, fresh] = seen.emplace(m.id, m.pos);
      if (!fresh) {
        fail_validation("duplicate method id '" + m.id + "': defined at " + it->second.file + ":" +
                        std::to_string(it->second.line) + " and " + m.pos.file + ":" +
                        std::to_string(m.pos.line));
      }
    }
  }
  return c;
}

inline Corpus parse_corpus(std::string_view path, std::string_view text) {
  const SourceDocument doc{std::string(path), std::string(text)};
  return parse_corpus(std::span<const SourceDocument>(&doc, 1));
}

inline std::string render_stmt(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CallStmt>) {
          return "call " + (n.qualifier ? *n.qualifier + "." : std::string()) + n.name + ";";
        } else if constexpr (std::is_same_v<T, VarDeclStmt>) {
          return "var " + n.type + " " + n.name + ";";
        } else if constexpr (std::is_same_v<T, TokStmt>) {
          return "tok \"" + n.text + "\";";
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          switch (n.kind) {
            case ReturnStmt::Kind::none: return "return;";
            case ReturnStmt::Kind::null: return "return null;";
            case ReturnStmt::Kind::var: return "return " + n.var + ";";
          }
          return "return;";
        } else {
          return "hookcheck(\"" + join(n.resources, "|") + "\",\"" + join(n.controls, "|") + "\"," +
                 n.sds_var.value_or("_") + ");";
        }
      },
      s.node);
}

inline std::string render_unit(const UnitDecl& u) {
  std::ostringstream os;
  os << "service " << u.name << " [process=" << u.process << ", side=" << to_string(u.side)
     << ", lang=" << to_string(u.lang) << "] {\n";
  for (const auto& m : u.methods) {
    os << "  " << m.return_type << " " << m.name << "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) os << ", ";
      os << m.params[i].type << " " << m.params[i].name;
    }
    os << ") {\n";
    for (const auto& s : m.body) os << "    " << render_stmt(s) << "\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

// Canonical text, one document per source file that holds at least one unit.
// Units without a known file land in "corpus.mfw".
inline std::vector<SourceDocument> print_corpus(const Corpus& c) {
  std::vector<std::string> order = c.source_paths;
  std::map<std::string, std::string> text;
  for (const auto& u : c.units) {
    const auto file = u.pos.file.empty() ? std::string("corpus.mfw") : u.pos.file;
    if (std::find(order.begin(), order.end(), file) == order.end()) order.push_back(file);
    auto& t = text[file];
    if (!t.empty()) t += "\n";
    t += render_unit(u);
  }
  std::vector<SourceDocument> out;
  for (const auto& f : order) {
    const auto it = text.find(f);
    if (it != text.end()) out.push_back({f, it->second});
  }
  return out;
}

enum class TokenClass { type, ident, string };

inline std::string_view to_string(TokenClass c) {
  switch (c) {
    case TokenClass::type: return "type";
    case TokenClass::ident: return "ident";
    case TokenClass::string: return "string";
  }
  return "?";
}

struct Token {
  TokenClass cls;
  std::string text;
  bool operator==(const Token&) const = default;
};

// Signature types first (return type unless void, then parameter types),
// then body tokens in statement order. Hook checks contribute nothing.
inline std::vector<Token> method_tokens(const MethodRecord& m) {
  std::vector<Token> out;
  if (m.return_type != "void") out.push_back({TokenClass::type, m.return_type});
  for (const auto& p : m.params) out.push_back({TokenClass::type, p.type});
  for (const auto& s : m.body) {
    std::visit(
        [&out](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CallStmt>) {
            if (n.qualifier) out.push_back({TokenClass::ident, *n.qualifier});
            out.push_back({TokenClass::ident, n.name});
          } else if constexpr (std::is_same_v<T, VarDeclStmt>) {
            out.push_back({TokenClass::type, n.type});
            out.push_back({TokenClass::ident, n.name});
          } else if constexpr (std::is_same_v<T, TokStmt>) {
            out.push_back({TokenClass::string, n.text});
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.kind == ReturnStmt::Kind::var) out.push_back({TokenClass::ident, n.var});
          }
        },
        s.node);
  }
  return out;
}

inline std::string corpus_fingerprint(const Corpus& c) {
  Fingerprint fp;
  for (const auto& u : c.units) fp.add(render_unit(u));
  return fp.hex();
}

inline std::vector<SourceDocument> read_corpus_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) fail_validation("corpus directory not found: " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".mfw") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<SourceDocument> docs;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    docs.push_back({p.filename().string(), ss.str()});
  }
  return docs;
}

inline Corpus load_corpus_dir(const std::filesystem::path& dir) {
  const auto docs = read_corpus_dir(dir);
  return parse_corpus(docs);
}

inline void write_corpus_dir(const Corpus& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& doc : print_corpus(c)) {
    std::ofstream out(dir / doc.path, std::ios::binary);
    out << doc.text;
    if (!out) fail_stage("cannot write " + (dir / doc.path).string());
  }
}

}  // namespace hooksmith
