#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace goalinf::pddl {

// One node of an s-expression tree. Atoms are lower-cased on read; PDDL is
// case-insensitive for keywords and names alike.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;

  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  // True for a list whose first item is the given atom.
  bool has_head(std::string_view head) const {
    return is_list && !items.empty() && items.front().is_atom(head);
  }
};

// Reads every top-level expression. Throws SyntaxError on unbalanced
// parentheses or stray tokens; ';' starts a comment running to end of line.
std::vector<SExpr> read_all(std::string_view text);

// Reads exactly one top-level expression.
SExpr read_one(std::string_view text);

std::string to_string(const SExpr& expr);

}  // namespace goalinf::pddl
