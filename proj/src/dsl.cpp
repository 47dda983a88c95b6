#include "forcelab/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace forcelab::dsl {

const char* diag_name(Diag d) {
  switch (d) {
    case Diag::Syntax: return "syntax";
    case Diag::DuplicateName: return "duplicate-name";
    case Diag::UnresolvedReference: return "unresolved-reference";
    case Diag::MissingBottom: return "missing-bottom";
    case Diag::Cycle: return "cycle";
    case Diag::Invalid: return "invalid";
  }
  return "?";
}

ParseError::ParseError(Diag code, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": error[" + diag_name(code) +
                         "]: " + message),
      code_(code), line_(line), column_(column), message_(message) {}

const std::string& name_of(const Declaration& d) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

const char* kind_of(const Declaration& d) {
  static const char* names[] = {"poset", "map", "sweet", "tower", "hechler", "amalgam"};
  return names[d.index()];
}

const Declaration* Document::find(const std::string& name) const {
  for (const auto& d : declarations)
    if (name_of(d) == name) return &d;
  return nullptr;
}

Position Document::position_of(const std::string& name) const {
  for (std::size_t i = 0; i < declarations.size(); ++i)
    if (name_of(declarations[i]) == name) return i < positions.size() ? positions[i] : Position{};
  return {};
}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok { Word, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line, column;
};

bool word_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '_': case '.': case '/': case '|': case '(': case ')': case '\'': case '*': case '+': case '!': case '-':
    case '^': case '~': case '@': case '$': case '%': case '&': case '?':
      return true;
    default:
      return false;
  }
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Tok::Punct, "->", line, col});
      advance(2);
      continue;
    }
    if (std::string_view("{}[];:,<=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    if (word_char(c)) {
      Token t{Tok::Word, "", line, col};
      while (i < text.size() && word_char(text[i]) && !(text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>')) {
        t.text += text[i];
        advance(1);
      }
      out.push_back(std::move(t));
      continue;
    }
    throw ParseError(Diag::Syntax, line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Document document() {
    Document doc;
    std::map<std::string, Position> seen;
    while (peek().kind != Tok::End) {
      const Token& kw = expect_word("a directive");
      const Token& name = expect_word("a name");
      Declaration d = directive(kw, name.text);
      if (auto it = seen.find(name.text); it != seen.end())
        throw ParseError(Diag::DuplicateName, name.line, name.column,
                         "'" + name.text + "' already declared at line " + std::to_string(it->second.line));
      seen[name.text] = {name.line, name.column};
      doc.declarations.push_back(std::move(d));
      doc.positions.push_back({name.line, name.column});
    }
    return doc;
  }

 private:
  std::vector<Token> t_;
  std::size_t pos_ = 0;

  const Token& peek() const { return t_[pos_]; }
  bool at_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    const std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(Diag::Syntax, t.line, t.column, "expected " + what + ", found " + got);
  }
  const Token& expect_word(const std::string& what) {
    if (peek().kind != Tok::Word) fail(peek(), what);
    return t_[pos_++];
  }
  const Token& expect(const char* p) {
    if (!at_punct(p)) fail(peek(), std::string("'") + p + "'");
    return t_[pos_++];
  }
  void expect_keyword(const char* kw) {
    if (peek().kind != Tok::Word || peek().text != kw) fail(peek(), std::string("'") + kw + "'");
    ++pos_;
  }
  std::vector<std::string> words_until(const char* stop) {
    std::vector<std::string> out;
    while (!at_punct(stop)) out.push_back(expect_word("a name or '" + std::string(stop) + "'").text);
    return out;
  }
  int integer(const Token& t) {
    if (t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        t.text.size() > 6)
      throw ParseError(Diag::Syntax, t.line, t.column, "expected a non-negative integer, found '" + t.text + "'");
    return std::stoi(t.text);
  }
  // ([a b] [c])+ up to ';'
  std::vector<std::vector<std::string>> blocks() {
    std::vector<std::vector<std::string>> out;
    while (at_punct("[")) {
      ++pos_;
      out.push_back(words_until("]"));
      ++pos_;
    }
    if (out.empty()) fail(peek(), "'['");
    expect(";");
    return out;
  }
  const Token& section(std::set<std::string>& done, const std::set<std::string>& allowed) {
    const Token& s = expect_word("a section name or '}'");
    if (!allowed.count(s.text)) throw ParseError(Diag::Syntax, s.line, s.column, "unknown section '" + s.text + "'");
    if (!done.insert(s.text).second)
      throw ParseError(Diag::Syntax, s.line, s.column, "section '" + s.text + "' repeated");
    expect(":");
    return s;
  }

  Declaration directive(const Token& kw, const std::string& name) {
    if (kw.text == "poset") return poset(name, kw);
    if (kw.text == "map") return map(name);
    if (kw.text == "sweet") return sweet(name);
    if (kw.text == "tower") return tower(name);
    if (kw.text == "hechler") return hechler(name);
    if (kw.text == "amalgam") return amalgam(name);
    throw ParseError(Diag::Syntax, kw.line, kw.column, "unknown directive '" + kw.text + "'");
  }

  PosetDecl poset(const std::string& name, const Token& kw) {
    PosetDecl d{name, {}, {}, {}};
    expect("{");
    std::set<std::string> done;
    while (!at_punct("}")) {
      const Token& s = section(done, {"elements", "bottom", "covers"});
      if (s.text == "elements") {
        d.elements = words_until(";");
        ++pos_;
      } else if (s.text == "bottom") {
        d.bottom = expect_word("the bottom element").text;
        expect(";");
      } else {
        while (!at_punct(";")) {
          std::string lo = expect_word("an element").text;
          expect("<");
          for (;;) {
            std::string hi = expect_word("an element").text;
            d.covers.emplace_back(lo, hi);
            lo = std::move(hi);
            if (!at_punct("<")) break;
            ++pos_;
          }
          if (!at_punct(";")) expect(",");
        }
        ++pos_;
      }
    }
    ++pos_;
    if (!done.count("elements")) throw ParseError(Diag::Syntax, kw.line, kw.column, "poset '" + name + "' has no elements section");
    if (!done.count("bottom"))
      throw ParseError(Diag::MissingBottom, kw.line, kw.column, "poset '" + name + "' does not declare its bottom");
    return d;
  }

  MapDecl map(const std::string& name) {
    MapDecl d{name, {}, {}, {}};
    expect(":");
    d.source = expect_word("a source poset").text;
    expect("->");
    d.target = expect_word("a target poset").text;
    expect("{");
    while (!at_punct("}")) {
      std::string a = expect_word("an element or '}'").text;
      expect("->");
      std::string b = expect_word("an element").text;
      expect(";");
      d.pairs.emplace_back(std::move(a), std::move(b));
    }
    ++pos_;
    return d;
  }

  SweetDecl sweet(const std::string& name) {
    SweetDecl d{name, {}, {}, {}};
    expect_keyword("on");
    d.poset = expect_word("a poset").text;
    expect("{");
    bool dense = false;
    while (!at_punct("}")) {
      const Token& s = expect_word("a section name or '}'");
      expect(":");
      if (s.text == "dense") {
        if (dense) throw ParseError(Diag::Syntax, s.line, s.column, "section 'dense' repeated");
        dense = true;
        d.dense = words_until(";");
        ++pos_;
      } else if (s.text.size() > 1 && s.text[0] == 'E' &&
                 std::all_of(s.text.begin() + 1, s.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        if (s.text != "E" + std::to_string(d.relations.size()))
          throw ParseError(Diag::Syntax, s.line, s.column,
                           "expected E" + std::to_string(d.relations.size()) + ", found " + s.text);
        d.relations.push_back(blocks());
      } else {
        throw ParseError(Diag::Syntax, s.line, s.column, "unknown section '" + s.text + "'");
      }
    }
    const Token& close = t_[pos_++];
    if (!dense) throw ParseError(Diag::Syntax, close.line, close.column, "sweet '" + name + "' has no dense section");
    if (d.relations.empty())
      throw ParseError(Diag::Syntax, close.line, close.column, "sweet '" + name + "' has no E0 section");
    return d;
  }

  TowerDecl tower(const std::string& name) {
    TowerDecl d{name, {}};
    expect("{");
    while (!at_punct("}")) {
      expect_keyword("level");
      expect(":");
      TowerLevelDecl l;
      l.poset = expect_word("a poset").text;
      l.sweet = expect_word("a sweetness model").text;
      expect(";");
      d.levels.push_back(std::move(l));
    }
    const Token& close = t_[pos_++];
    if (d.levels.empty()) throw ParseError(Diag::Syntax, close.line, close.column, "tower '" + name + "' has no levels");
    return d;
  }

  HechlerDecl hechler(const std::string& name) {
    HechlerDecl d{name, 0, 0};
    bool m = false, h = false;
    while (!at_punct(";")) {
      const Token& key = expect_word("'m' or 'h'");
      expect("=");
      const int v = integer(expect_word("an integer"));
      if (key.text == "m" && !m) {
        d.m = v;
        m = true;
      } else if (key.text == "h" && !h) {
        d.h = v;
        h = true;
      } else {
        throw ParseError(Diag::Syntax, key.line, key.column, "unexpected parameter '" + key.text + "'");
      }
    }
    const Token& semi = t_[pos_++];
    if (!m || !h) throw ParseError(Diag::Syntax, semi.line, semi.column, "hechler needs m= and h=");
    return d;
  }

  AmalgamDecl amalgam(const std::string& name) {
    AmalgamDecl d{name, {}, {}, {}, {}};
    expect_keyword("of");
    d.left = expect_word("the left factor").text;
    d.right = expect_word("the right factor").text;
    expect("{");
    std::set<std::string> done;
    while (!at_punct("}")) {
      const Token& s = section(done, {"f1", "f2"});
      (s.text == "f1" ? d.f1 : d.f2) = blocks();
    }
    const Token& close = t_[pos_++];
    if (done.size() != 2) throw ParseError(Diag::Syntax, close.line, close.column, "amalgam needs f1 and f2");
    return d;
  }
};

// ---------------------------------------------------------------- canonical form

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void canonicalize(Declaration& d) {
  std::visit(
      [](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PosetDecl>) {
          std::map<std::string, std::size_t> order;
          for (std::size_t i = 0; i < x.elements.size(); ++i) order.emplace(x.elements[i], i);
          auto rank = [&](const std::string& s) {
            auto it = order.find(s);
            return it == order.end() ? x.elements.size() : it->second;
          };
          std::sort(x.covers.begin(), x.covers.end(), [&](const auto& a, const auto& b) {
            return std::make_tuple(rank(a.first), rank(a.second), a) < std::make_tuple(rank(b.first), rank(b.second), b);
          });
          x.covers.erase(std::unique(x.covers.begin(), x.covers.end()), x.covers.end());
        } else if constexpr (std::is_same_v<T, MapDecl>) {
          std::sort(x.pairs.begin(), x.pairs.end());
        } else if constexpr (std::is_same_v<T, SweetDecl>) {
          std::sort(x.dense.begin(), x.dense.end());
          for (auto& family : x.relations) {
            for (auto& cls : family) std::sort(cls.begin(), cls.end());
            std::sort(family.begin(), family.end());
          }
        } else if constexpr (std::is_same_v<T, AmalgamDecl>) {
          for (auto& b : x.f1) std::sort(b.begin(), b.end());
          for (auto& b : x.f2) std::sort(b.begin(), b.end());
        }
      },
      d);
}

void canonicalize(Document& doc) {
  for (auto& d : doc.declarations) canonicalize(d);
  std::vector<std::size_t> idx(doc.declarations.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return name_of(doc.declarations[a]) < name_of(doc.declarations[b]); });
  Document out;
  for (std::size_t i : idx) {
    out.declarations.push_back(std::move(doc.declarations[i]));
    out.positions.push_back(i < doc.positions.size() ? doc.positions[i] : Position{});
  }
  doc = std::move(out);
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string blocks_text(const std::vector<std::vector<std::string>>& b) {
  std::string out;
  for (const auto& cls : b) out += "[" + join(cls) + "]";
  return out;
}

}  // namespace

Document parse(std::string_view text) {
  Document doc = Parser(lex(text)).document();
  canonicalize(doc);
  return doc;
}

std::string emit_dsl(const Document& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& decl : doc.declarations) {
    if (!first) os << "\n";
    first = false;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, PosetDecl>) {
            os << "poset " << x.name << " {\n  elements: " << join(x.elements) << ";\n  bottom: " << x.bottom
               << ";\n";
            if (!x.covers.empty()) {
              os << "  covers:";
              for (std::size_t i = 0; i < x.covers.size(); ++i)
                os << (i ? ", " : " ") << x.covers[i].first << "<" << x.covers[i].second;
              os << ";\n";
            }
            os << "}\n";
          } else if constexpr (std::is_same_v<T, MapDecl>) {
            os << "map " << x.name << ": " << x.source << " -> " << x.target << " {\n";
            for (const auto& [a, b] : x.pairs) os << "  " << a << " -> " << b << ";\n";
            os << "}\n";
          } else if constexpr (std::is_same_v<T, SweetDecl>) {
            os << "sweet " << x.name << " on " << x.poset << " {\n  dense: " << join(x.dense) << ";\n";
            for (std::size_t n = 0; n < x.relations.size(); ++n)
              os << "  E" << n << ": " << blocks_text(x.relations[n]) << ";\n";
            os << "}\n";
          } else if constexpr (std::is_same_v<T, TowerDecl>) {
            os << "tower " << x.name << " {\n";
            for (const auto& l : x.levels) os << "  level: " << l.poset << " " << l.sweet << ";\n";
            os << "}\n";
          } else if constexpr (std::is_same_v<T, HechlerDecl>) {
            os << "hechler " << x.name << " m=" << x.m << " h=" << x.h << ";\n";
          } else if constexpr (std::is_same_v<T, AmalgamDecl>) {
            os << "amalgam " << x.name << " of " << x.left << " " << x.right << " {\n  f1: " << blocks_text(x.f1)
               << ";\n  f2: " << blocks_text(x.f2) << ";\n}\n";
          }
        },
        decl);
  }
  return os.str();
}

// ---------------------------------------------------------------- JSON

namespace {

using nlohmann::json;

constexpr const char* kSchema = "forcelab/v1";

json pairs_json(const std::vector<std::pair<std::string, std::string>>& v) {
  json out = json::array();
  for (const auto& [a, b] : v) out.push_back({a, b});
  return out;
}

[[noreturn]] void json_fail(const std::string& path, const std::string& msg) {
  throw ParseError(Diag::Syntax, 0, 0, path + ": " + msg);
}

void exact_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) json_fail(path, "expected an object");
  std::set<std::string> want(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!want.count(k)) json_fail(path, "unknown field '" + k + "'");
  for (const auto& k : want)
    if (!j.contains(k)) json_fail(path, "missing field '" + k + "'");
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) json_fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> strs(const json& j, const std::string& path) {
  if (!j.is_array()) json_fail(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<std::string>> blocks_of(const json& j, const std::string& path) {
  if (!j.is_array()) json_fail(path, "expected an array");
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(strs(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_of(const json& j, const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : blocks_of(j, path)) {
    if (p.size() != 2) json_fail(path, "expected pairs");
    out.emplace_back(p[0], p[1]);
  }
  return out;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) json_fail(path, "expected an integer");
  return j.get<int>();
}

}  // namespace

std::string emit_json(const Document& doc) {
  json decls = json::array();
  for (const auto& decl : doc.declarations) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          json o;
          o["kind"] = kind_of(decl);
          o["name"] = x.name;
          if constexpr (std::is_same_v<T, PosetDecl>) {
            o["elements"] = x.elements;
            o["bottom"] = x.bottom;
            o["covers"] = pairs_json(x.covers);
          } else if constexpr (std::is_same_v<T, MapDecl>) {
            o["source"] = x.source;
            o["target"] = x.target;
            o["pairs"] = pairs_json(x.pairs);
          } else if constexpr (std::is_same_v<T, SweetDecl>) {
            o["poset"] = x.poset;
            o["dense"] = x.dense;
            o["relations"] = x.relations;
          } else if constexpr (std::is_same_v<T, TowerDecl>) {
            json levels = json::array();
            for (const auto& l : x.levels) levels.push_back({{"poset", l.poset}, {"sweet", l.sweet}});
            o["levels"] = levels;
          } else if constexpr (std::is_same_v<T, HechlerDecl>) {
            o["m"] = x.m;
            o["h"] = x.h;
          } else if constexpr (std::is_same_v<T, AmalgamDecl>) {
            o["left"] = x.left;
            o["right"] = x.right;
            o["f1"] = x.f1;
            o["f2"] = x.f2;
          }
          decls.push_back(std::move(o));
        },
        decl);
  }
  json root{{"schema", kSchema}, {"declarations", decls}};
  return root.dump(2) + "\n";
}

Document parse_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(Diag::Syntax, 0, static_cast<int>(e.byte), std::string("malformed JSON: ") + e.what());
  }
  exact_keys(root, "$", {"schema", "declarations"});
  if (str(root["schema"], "$.schema") != kSchema) json_fail("$.schema", "unsupported schema");
  const json& decls = root["declarations"];
  if (!decls.is_array()) json_fail("$.declarations", "expected an array");
  Document doc;
  std::set<std::string> names;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const std::string path = "$.declarations[" + std::to_string(i) + "]";
    const json& d = decls[i];
    if (!d.is_object() || !d.contains("kind")) json_fail(path, "expected an object with a kind");
    const std::string kind = str(d["kind"], path + ".kind");
    Declaration decl;
    if (kind == "poset") {
      exact_keys(d, path, {"kind", "name", "elements", "bottom", "covers"});
      decl = PosetDecl{str(d["name"], path + ".name"), strs(d["elements"], path + ".elements"),
                       str(d["bottom"], path + ".bottom"), pairs_of(d["covers"], path + ".covers")};
    } else if (kind == "map") {
      exact_keys(d, path, {"kind", "name", "source", "target", "pairs"});
      decl = MapDecl{str(d["name"], path + ".name"), str(d["source"], path + ".source"),
                     str(d["target"], path + ".target"), pairs_of(d["pairs"], path + ".pairs")};
    } else if (kind == "sweet") {
      exact_keys(d, path, {"kind", "name", "poset", "dense", "relations"});
      SweetDecl s{str(d["name"], path + ".name"), str(d["poset"], path + ".poset"), strs(d["dense"], path + ".dense"),
                  {}};
      const json& rel = d["relations"];
      if (!rel.is_array() || rel.empty()) json_fail(path + ".relations", "expected a nonempty array");
      for (std::size_t n = 0; n < rel.size(); ++n)
        s.relations.push_back(blocks_of(rel[n], path + ".relations[" + std::to_string(n) + "]"));
      decl = std::move(s);
    } else if (kind == "tower") {
      exact_keys(d, path, {"kind", "name", "levels"});
      TowerDecl t{str(d["name"], path + ".name"), {}};
      const json& lv = d["levels"];
      if (!lv.is_array() || lv.empty()) json_fail(path + ".levels", "expected a nonempty array");
      for (std::size_t k = 0; k < lv.size(); ++k) {
        const std::string lp = path + ".levels[" + std::to_string(k) + "]";
        exact_keys(lv[k], lp, {"poset", "sweet"});
        t.levels.push_back({str(lv[k]["poset"], lp + ".poset"), str(lv[k]["sweet"], lp + ".sweet")});
      }
      decl = std::move(t);
    } else if (kind == "hechler") {
      exact_keys(d, path, {"kind", "name", "m", "h"});
      decl = HechlerDecl{str(d["name"], path + ".name"), integer(d["m"], path + ".m"), integer(d["h"], path + ".h")};
    } else if (kind == "amalgam") {
      exact_keys(d, path, {"kind", "name", "left", "right", "f1", "f2"});
      decl = AmalgamDecl{str(d["name"], path + ".name"), str(d["left"], path + ".left"),
                         str(d["right"], path + ".right"), blocks_of(d["f1"], path + ".f1"),
                         blocks_of(d["f2"], path + ".f2")};
    } else {
      json_fail(path + ".kind", "unknown kind '" + kind + "'");
    }
    if (!names.insert(name_of(decl)).second)
      throw ParseError(Diag::DuplicateName, 0, 0, path + ": '" + name_of(decl) + "' already declared");
    doc.declarations.push_back(std::move(decl));
    doc.positions.push_back({});
  }
  canonicalize(doc);
  return doc;
}

// ---------------------------------------------------------------- resolution

namespace {

class Resolver {
 public:
  explicit Resolver(const Document& doc) : doc_(doc) {}

  Resolved run() {
    for (const auto& d : doc_.declarations) resolve_name(name_of(d), nullptr);
    return std::move(out_);
  }

 private:
  const Document& doc_;
  Resolved out_;
  std::set<std::string> done_, active_;

  [[noreturn]] void fail(Diag code, const std::string& decl, const std::string& msg) const {
    const Position p = doc_.position_of(decl);
    throw ParseError(code, p.line, p.column, msg);
  }

  const Declaration& lookup(const std::string& name, const std::string& from) {
    const Declaration* d = doc_.find(name);
    if (!d) fail(Diag::UnresolvedReference, from, "'" + from + "' refers to undeclared '" + name + "'");
    return *d;
  }

  void resolve_name(const std::string& name, const std::string* from) {
    if (done_.count(name)) return;
    if (active_.count(name)) fail(Diag::Cycle, from ? *from : name, "circular reference through '" + name + "'");
    const Declaration& d = from ? lookup(name, *from) : *doc_.find(name);
    active_.insert(name);
    try {
      std::visit([&](const auto& x) { build(x); }, d);
    } catch (const InputError& e) {
      fail(Diag::Invalid, name, "'" + name + "': " + e.what());
    } catch (const PreconditionError& e) {
      fail(Diag::Invalid, name, "'" + name + "': " + e.what());
    }
    active_.erase(name);
    done_.insert(name);
  }

  PosetRef poset_ref(const std::string& name, const std::string& from) {
    const Declaration& d = lookup(name, from);
    if (!std::holds_alternative<PosetDecl>(d) && !std::holds_alternative<HechlerDecl>(d) &&
        !std::holds_alternative<AmalgamDecl>(d))
      fail(Diag::UnresolvedReference, from, "'" + name + "' is a " + kind_of(d) + ", not a poset");
    resolve_name(name, &from);
    return out_.posets.at(name);
  }

  int element(const Poset& P, const std::string& label, const std::string& poset, const std::string& from) {
    auto i = P.index_of(label);
    if (!i) fail(Diag::UnresolvedReference, from, "'" + label + "' is not an element of '" + poset + "'");
    return *i;
  }

  void build(const PosetDecl& d) {
    std::map<std::string, int> idx;
    for (const auto& e : d.elements)
      if (!idx.emplace(e, static_cast<int>(idx.size())).second)
        fail(Diag::Invalid, d.name, "element '" + e + "' listed twice");
    if (d.elements.empty()) fail(Diag::Invalid, d.name, "poset '" + d.name + "' has no elements");
    auto at = [&](const std::string& e) {
      auto it = idx.find(e);
      if (it == idx.end()) fail(Diag::UnresolvedReference, d.name, "'" + e + "' is not an element of '" + d.name + "'");
      return it->second;
    };
    const int bottom = at(d.bottom);
    std::vector<std::pair<int, int>> covers;
    std::vector<std::vector<int>> adj(idx.size());
    for (const auto& [a, b] : d.covers) {
      covers.emplace_back(at(a), at(b));
      adj[at(a)].push_back(at(b));
    }
    // cycle search over the cover graph
    std::vector<int> state(idx.size(), 0);
    std::function<void(int)> dfs = [&](int v) {
      state[v] = 1;
      for (int w : adj[v]) {
        if (state[w] == 1)
          fail(Diag::Cycle, d.name, "covers of '" + d.name + "' form a cycle through '" + d.elements[w] + "'");
        if (state[w] == 0) dfs(w);
      }
      state[v] = 2;
    };
    for (std::size_t v = 0; v < idx.size(); ++v)
      if (state[v] == 0) dfs(static_cast<int>(v));
    try {
      out_.posets.emplace(d.name, share(Poset::from_covers(d.elements, covers, bottom)));
    } catch (const InputError& e) {
      fail(e.code() == ErrorCode::MissingBottom ? Diag::MissingBottom : Diag::Invalid, d.name,
           "'" + d.name + "': " + e.what());
    }
  }

  void build(const MapDecl& d) {
    const PosetRef s = poset_ref(d.source, d.name);
    const PosetRef t = poset_ref(d.target, d.name);
    std::vector<int> map(s->size(), -1);
    for (const auto& [a, b] : d.pairs) {
      const int x = element(*s, a, d.source, d.name);
      if (map[x] >= 0) fail(Diag::Invalid, d.name, "'" + a + "' mapped twice");
      map[x] = element(*t, b, d.target, d.name);
    }
    for (int x = 0; x < s->size(); ++x)
      if (map[x] < 0) fail(Diag::Invalid, d.name, "'" + s->label(x) + "' is not mapped");
    out_.maps.emplace(d.name, PosetInclusion(s, t, std::move(map)));
  }

  void build(const SweetDecl& d) {
    const PosetRef P = poset_ref(d.poset, d.name);
    std::vector<int> dense;
    for (const auto& e : d.dense) dense.push_back(element(*P, e, d.poset, d.name));
    std::vector<std::vector<std::vector<int>>> rel;
    for (const auto& family : d.relations) {
      rel.emplace_back();
      for (const auto& cls : family) {
        rel.back().emplace_back();
        for (const auto& e : cls) rel.back().back().push_back(element(*P, e, d.poset, d.name));
      }
    }
    out_.sweets.emplace(d.name, SweetModel(P, dense, rel));
  }

  void build(const TowerDecl& d) {
    std::vector<SweetModel> levels;
    for (const auto& l : d.levels) {
      const PosetRef P = poset_ref(l.poset, d.name);
      const Declaration& s = lookup(l.sweet, d.name);
      if (!std::holds_alternative<SweetDecl>(s))
        fail(Diag::UnresolvedReference, d.name, "'" + l.sweet + "' is a " + kind_of(s) + ", not a sweetness model");
      resolve_name(l.sweet, &d.name);
      const SweetModel& m = out_.sweets.at(l.sweet);
      if (m.poset().get() != P.get())
        fail(Diag::Invalid, d.name, "model '" + l.sweet + "' is not on poset '" + l.poset + "'");
      levels.push_back(m);
    }
    out_.towers.emplace(d.name, Tower(std::move(levels)));
  }

  void build(const HechlerDecl& d) { out_.posets.emplace(d.name, share(hechler_poset({d.m, d.h}))); }

  void build(const AmalgamDecl& d) {
    const PosetRef L = poset_ref(d.left, d.name);
    const PosetRef R = poset_ref(d.right, d.name);
    if (d.f1.size() != d.f2.size()) fail(Diag::Invalid, d.name, "f1 and f2 need the same number of blocks");
    const CompleteAlgebra lc = regular_open_completion(L);
    const CompleteAlgebra rc = regular_open_completion(R);
    auto images = [&](const std::vector<std::vector<std::string>>& blocks, const Poset& P, const CompleteAlgebra& c,
                      const std::string& pname) {
      std::vector<AtomSet> out;
      const Bits maximal = P.maximal_elements();
      for (const auto& b : blocks) {
        AtomSet v = 0;
        for (const auto& e : b) {
          const int x = element(P, e, pname, d.name);
          if (!maximal.test(x)) fail(Diag::Invalid, d.name, "'" + e + "' is not a maximal element of '" + pname + "'");
          v |= c.dense_map[x];
        }
        out.push_back(v);
      }
      return out;
    };
    const int k = static_cast<int>(d.f1.size());
    CompleteAlgebra base;
    base.atom_count = k;
    auto inst = amalgamate_posets(base, L, R,
                                  CompleteEmbedding::from_atom_images(k, lc.atom_count, images(d.f1, *L, lc, d.left)),
                                  CompleteEmbedding::from_atom_images(k, rc.atom_count, images(d.f2, *R, rc, d.right)));
    out_.posets.emplace(d.name, inst.amalgam);
    out_.amalgams.emplace(d.name, std::move(inst));
  }
};

}  // namespace

Resolved resolve(const Document& doc) { return Resolver(doc).run(); }

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_dot(const Poset& poset, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << quoted(name) << " {\n  rankdir=BT;\n";
  for (int p = 0; p < poset.size(); ++p) os << "  " << quoted(poset.label(p)) << ";\n";
  for (const auto& [lo, hi] : poset.covers()) os << "  " << quoted(poset.label(lo)) << " -> " << quoted(poset.label(hi)) << ";\n";
  os << "}\n";
  return os.str();
}

std::string emit_dot(const Document& doc) {
  const Resolved r = resolve(doc);
  std::string out;
  for (const auto& [name, P] : r.posets) out += emit_dot(*P, name);
  return out;
}

PosetDecl poset_decl(const Poset& poset, const std::string& name) {
  PosetDecl d{name, poset.labels(), poset.label(poset.bottom()), {}};
  for (const auto& [lo, hi] : poset.covers()) d.covers.emplace_back(poset.label(lo), poset.label(hi));
  return d;
}

Document document_for(const SweetModel& model, const std::string& poset_name, const std::string& model_name) {
  Document doc;
  doc.declarations.push_back(poset_decl(*model.poset(), poset_name));
  SweetDecl s{model_name, poset_name, {}, {}};
  for (int p : model.dense_members()) s.dense.push_back(model.poset()->label(p));
  for (int n = 0; n < model.relation_count(); ++n) {
    s.relations.emplace_back();
    for (const auto& cls : model.classes(n)) {
      s.relations.back().emplace_back();
      for (int p : cls) s.relations.back().back().push_back(model.poset()->label(p));
    }
  }
  doc.declarations.push_back(std::move(s));
  doc.positions.resize(2);
  canonicalize(doc);
  return doc;
}

}  // namespace forcelab::dsl
