#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "forcelab/amalgam.hpp"
#include "forcelab/sweet.hpp"
#include "forcelab/tower.hpp"

namespace forcelab::dsl {

/// Text format, one directive per block:
///
///   poset P { elements: 0 a b; bottom: 0; covers: 0<a, 0<b; }
///   map m: P -> Q { a -> x; b -> y; }
///   sweet M on P { dense: 0 a b; E0: [0][a][b]; E1: [0][a][b]; }
///   tower T { level: P M; level: Q N; }
///   hechler H m=2 h=1;
///   amalgam A of P Q { f1: [a][b]; f2: [x][y]; }
///
/// `#` starts a comment. Names may be referenced before they are declared.
/// Amalgam blocks list, per base atom, the maximal elements of the factor
/// whose completion atoms form the image of that base atom.

enum class Diag { Syntax, DuplicateName, UnresolvedReference, MissingBottom, Cycle, Invalid };
const char* diag_name(Diag d);

class ParseError : public std::runtime_error {
 public:
  ParseError(Diag code, int line, int column, const std::string& message);
  Diag code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// The message without the position prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Diag code_;
  int line_, column_;
  std::string message_;
};

struct PosetDecl {
  std::string name;
  std::vector<std::string> elements;
  std::string bottom;
  std::vector<std::pair<std::string, std::string>> covers;
  bool operator==(const PosetDecl&) const = default;
};

struct MapDecl {
  std::string name, source, target;
  std::vector<std::pair<std::string, std::string>> pairs;
  bool operator==(const MapDecl&) const = default;
};

struct SweetDecl {
  std::string name, poset;
  std::vector<std::string> dense;
  std::vector<std::vector<std::vector<std::string>>> relations;
  bool operator==(const SweetDecl&) const = default;
};

struct TowerLevelDecl {
  std::string poset, sweet;
  bool operator==(const TowerLevelDecl&) const = default;
};

struct TowerDecl {
  std::string name;
  std::vector<TowerLevelDecl> levels;
  bool operator==(const TowerDecl&) const = default;
};

struct HechlerDecl {
  std::string name;
  int m = 1, h = 1;
  bool operator==(const HechlerDecl&) const = default;
};

struct AmalgamDecl {
  std::string name, left, right;
  std::vector<std::vector<std::string>> f1, f2;
  bool operator==(const AmalgamDecl&) const = default;
};

using Declaration = std::variant<PosetDecl, MapDecl, SweetDecl, TowerDecl, HechlerDecl, AmalgamDecl>;

const std::string& name_of(const Declaration& d);
const char* kind_of(const Declaration& d);

struct Position {
  int line = 0, column = 0;
};

/// Declarations in canonical form: sorted by name, member lists sorted
/// (poset elements, tower levels and amalgam block order are kept).
struct Document {
  std::vector<Declaration> declarations;
  std::vector<Position> positions;  // parallel to declarations; not compared

  bool operator==(const Document& other) const { return declarations == other.declarations; }
  const Declaration* find(const std::string& name) const;
  Position position_of(const std::string& name) const;
};

/// Throws ParseError (Syntax or DuplicateName).
Document parse(std::string_view text);

/// Canonical text; parse(emit_dsl(d)) == d.
std::string emit_dsl(const Document& doc);

/// {"schema": "forcelab/v1", "declarations": [...]}.
std::string emit_json(const Document& doc);
/// Strict reader: unknown fields, missing fields and wrong types are errors.
Document parse_json(std::string_view text);

/// Every declaration after construction and validation of its structure.
struct Resolved {
  std::map<std::string, PosetRef> posets;  // poset, hechler and amalgam declarations
  std::map<std::string, PosetInclusion> maps;
  std::map<std::string, SweetModel> sweets;
  std::map<std::string, Tower> towers;
  std::map<std::string, AmalgamInstance> amalgams;
};

/// Throws ParseError (UnresolvedReference, MissingBottom, Cycle, Invalid)
/// located at the offending declaration.
Resolved resolve(const Document& doc);

/// Hasse diagram of one poset.
std::string emit_dot(const Poset& poset, const std::string& name);
/// Hasse diagrams of every poset-valued declaration, by name.
std::string emit_dot(const Document& doc);

/// A document holding a single sweetness model and its poset, e.g. as a
/// certificate. Element labels are used as written.
Document document_for(const SweetModel& model, const std::string& poset_name, const std::string& model_name);
PosetDecl poset_decl(const Poset& poset, const std::string& name);

}  // namespace forcelab::dsl
