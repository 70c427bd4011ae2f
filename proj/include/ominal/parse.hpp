#ifndef OMINAL_PARSE_HPP
#define OMINAL_PARSE_HPP

#include "ominal/formula.hpp"
#include "ominal/sexpr.hpp"

namespace ominal {

namespace detail {

inline bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '~' ||
          c == '\'' || c == '.'))
      return false;
  return true;
}

}  // namespace detail

inline Term parse_term(const SExpr& e) {
  if (e.is_atom()) {
    if (auto r = parse_rational(e.atom)) return Term::constant(*r);
    if (detail::is_identifier(e.atom)) return Term::variable(e.atom);
    throw parse_error("bad term token '" + e.atom + "'", e.line, e.col);
  }
  const std::string& h = e.head();
  if (h == "+") {
    Term acc;
    for (std::size_t i = 1; i < e.size(); ++i) acc += parse_term(e.at(i));
    return acc;
  }
  if (h == "-") {
    if (e.size() == 2) return -parse_term(e.at(1));
    if (e.size() < 2) throw parse_error("'-' needs arguments", e.line, e.col);
    Term acc = parse_term(e.at(1));
    for (std::size_t i = 2; i < e.size(); ++i) acc -= parse_term(e.at(i));
    return acc;
  }
  if (h == "*") {
    if (e.size() != 3) throw parse_error("'*' takes a rational and a term", e.line, e.col);
    const SExpr* cs = &e.at(1);
    const SExpr* ts = &e.at(2);
    auto r = cs->is_atom() ? parse_rational(cs->atom) : std::nullopt;
    if (!r) {
      std::swap(cs, ts);
      r = cs->is_atom() ? parse_rational(cs->atom) : std::nullopt;
    }
    if (!r) throw parse_error("'*' needs a rational factor", e.line, e.col);
    return parse_term(*ts) * *r;
  }
  throw parse_error("unknown term operator '" + h + "'", e.line, e.col);
}

inline Formula parse_formula(const SExpr& e, Mode mode = Mode::Odag) {
  Formula f = [&]() -> Formula {
    if (e.is_atom()) {
      if (e.atom == "true") return Formula::f_true();
      if (e.atom == "false") return Formula::f_false();
      throw parse_error("bad formula token '" + e.atom + "'", e.line, e.col);
    }
    const std::string& h = e.head();
    auto binary = [&](auto mk) {
      if (e.size() != 3) throw parse_error("'" + h + "' takes two terms", e.line, e.col);
      Term a = parse_term(e.at(1));
      Term b = parse_term(e.at(2));
      // DLO sides must be bare variables or constants before any atom
      // normalization can hide a scaled coefficient.
      if (mode == Mode::Dlo && (!a.dlo_side() || !b.dlo_side()))
        throw mode_error("DLO atoms compare variables and constants only");
      return mk(a, b);
    };
    if (h == "<") return binary(f_lt);
    if (h == ">") return binary(f_gt);
    if (h == "=") return binary(f_eq);
    if (h == "<=") return binary(f_le);
    if (h == ">=") return binary(f_ge);
    if (h == "!=") return binary(f_ne);
    if (h == "and" || h == "or") {
      std::vector<Formula> ks;
      for (std::size_t i = 1; i < e.size(); ++i) ks.push_back(parse_formula(e.at(i), mode));
      return h == "and" ? Formula::land(std::move(ks)) : Formula::lor(std::move(ks));
    }
    if (h == "not") {
      if (e.size() != 2) throw parse_error("'not' takes one formula", e.line, e.col);
      return Formula::lnot(parse_formula(e.at(1), mode));
    }
    if (h == "exists" || h == "forall") {
      if (e.size() != 3) throw parse_error("'" + h + "' takes a var list and a body", e.line, e.col);
      const SExpr& vl = e.at(1);
      if (!vl.is_list) throw parse_error("quantifier variable list must be a list", vl.line, vl.col);
      std::vector<Var> vars;
      for (auto& v : vl.items) {
        if (!v.is_atom() || !detail::is_identifier(v.atom))
          throw parse_error("bad bound variable", v.line, v.col);
        vars.push_back(v.atom);
      }
      Formula body = parse_formula(e.at(2), mode);
      return h == "exists" ? Formula::exists(vars, body) : Formula::forall(vars, body);
    }
    throw parse_error("unknown formula operator '" + h + "'", e.line, e.col);
  }();
  validate_mode(f, mode);
  return f;
}

inline Formula parse_formula_text(const std::string& text, Mode mode = Mode::Odag) {
  return parse_formula(read_sexpr(text), mode);
}

inline Term parse_term_text(const std::string& text) { return parse_term(read_sexpr(text)); }

// ---- printing ----

inline std::string print_term(const Term& t) {
  std::vector<std::string> parts;
  for (auto& [v, c] : t.coeffs()) {
    if (c == 1)
      parts.push_back(v);
    else
      parts.push_back("(* " + rat_to_string(c) + " " + v + ")");
  }
  if (t.constant_part() != 0 || parts.empty())
    parts.push_back(rat_to_string(t.constant_part()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (auto& p : parts) s += " " + p;
  return s + ")";
}

namespace detail {

// Splits t into nonnegative sides p, n with t = p - n, so that t < 0 prints
// as (< p n).  Keeps DLO atoms printable within the DLO term grammar.
inline std::pair<Term, Term> split_sides(const Term& t) {
  Term pos, neg;
  for (auto& [v, c] : t.coeffs()) {
    if (c > 0)
      pos += Term::variable(v) * c;
    else
      neg += Term::variable(v) * -c;
  }
  if (t.constant_part() > 0)
    pos += Term::constant(t.constant_part());
  else if (t.constant_part() < 0)
    neg += Term::constant(-t.constant_part());
  return {pos, neg};
}

}  // namespace detail

inline std::string print_formula(const Formula& f) {
  switch (f.kind()) {
    case FKind::True: return "true";
    case FKind::False: return "false";
    case FKind::Lt: {
      auto [p, n] = detail::split_sides(f.atom());
      return "(< " + print_term(p) + " " + print_term(n) + ")";
    }
    case FKind::Eq: {
      auto [p, n] = detail::split_sides(f.atom());
      return "(= " + print_term(p) + " " + print_term(n) + ")";
    }
    case FKind::Not: return "(not " + print_formula(f.kids()[0]) + ")";
    case FKind::And:
    case FKind::Or: {
      std::string s = f.kind() == FKind::And ? "(and" : "(or";
      for (auto& k : f.kids()) s += " " + print_formula(k);
      return s + ")";
    }
    case FKind::Exists:
    case FKind::Forall: {
      std::string s = f.kind() == FKind::Exists ? "(exists (" : "(forall (";
      s += f.qvar();
      s += ") ";
      s += print_formula(f.kids()[0]);
      return s + ")";
    }
  }
  throw error("print_formula: unreachable");
}

}  // namespace ominal

#endif  // OMINAL_PARSE_HPP
