#include "goalinf/pddl/sexpr.hpp"

#include <cctype>

#include "goalinf/error.hpp"

namespace goalinf::pddl {
namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", line_, col_);
    SExpr node;
    node.line = line_;
    node.column = col_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError("unexpected ')'", line_, col_);
    if (c == '(') {
      node.is_list = true;
      advance();
      while (true) {
        skip_space();
        if (pos_ >= text_.size())
          throw SyntaxError("unclosed '(' opened", node.line, node.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.items.push_back(read());
      }
      return node;
    }
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')' || ch == ';') break;
      if (ch == '"') throw SyntaxError("string literals are not supported", line_, col_);
      node.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      advance();
    }
    return node;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> read_all(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> out;
  while (!reader.at_end()) out.push_back(reader.read());
  return out;
}

SExpr read_one(std::string_view text) {
  Reader reader(text);
  if (reader.at_end()) throw SyntaxError("empty input", 1, 1);
  SExpr expr = reader.read();
  if (!reader.at_end()) {
    SExpr extra = reader.read();
    throw SyntaxError("trailing expression", extra.line, extra.column);
  }
  return expr;
}

std::string to_string(const SExpr& expr) {
  if (!expr.is_list) return expr.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < expr.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(expr.items[i]);
  }
  return out + ")";
}

}  // namespace goalinf::pddl
