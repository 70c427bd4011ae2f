#ifndef OMINAL_SEXPR_HPP
#define OMINAL_SEXPR_HPP

#include <string>
#include <vector>

#include "ominal/core.hpp"

namespace ominal {

/// Plain s-expression tree with source positions, the surface syntax for
/// every text format the tools accept.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0, col = 0;

  bool is_atom() const { return !is_list; }
  const SExpr& at(std::size_t i) const {
    if (!is_list || i >= items.size())
      throw parse_error("missing list element " + std::to_string(i), line, col);
    return items[i];
  }
  std::size_t size() const { return items.size(); }
  const std::string& head() const {
    if (!is_list || items.empty() || !items[0].is_atom())
      throw parse_error("expected a tagged list", line, col);
    return items[0].atom;
  }

  std::string str() const {
    if (is_atom()) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ' ';
      s += items[i].str();
    }
    return s + ")";
  }
};

namespace detail {

class SexprReader {
public:
  explicit SexprReader(const std::string& text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

private:
  SExpr read() {
    skip_ws();
    if (pos_ >= text_.size()) throw parse_error("unexpected end of input", line_, col_);
    if (text_[pos_] == ')') throw parse_error("unexpected ')'", line_, col_);
    if (text_[pos_] == '(') {
      SExpr e;
      e.is_list = true;
      e.line = line_;
      e.col = col_;
      advance();
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        e.items.push_back(read());
        skip_ws();
      }
      if (pos_ >= text_.size()) throw parse_error("unclosed '('", e.line, e.col);
      advance();  // ')'
      return e;
    }
    SExpr e;
    e.line = line_;
    e.col = col_;
    std::string tok;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      tok += text_[pos_];
      advance();
    }
    if (tok.empty()) throw parse_error("empty token", line_, col_);
    e.atom = std::move(tok);
    return e;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace detail

inline std::vector<SExpr> read_sexprs(const std::string& text) {
  return detail::SexprReader(text).read_all();
}

inline SExpr read_sexpr(const std::string& text) {
  auto all = read_sexprs(text);
  if (all.size() != 1) throw parse_error("expected exactly one expression", 1, 1);
  return all[0];
}

}  // namespace ominal

#endif  // OMINAL_SEXPR_HPP
