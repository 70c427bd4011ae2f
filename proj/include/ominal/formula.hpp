#ifndef OMINAL_FORMULA_HPP
#define OMINAL_FORMULA_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ominal/term.hpp"

namespace ominal {

enum class FKind { True, False, Lt, Eq, And, Or, Not, Exists, Forall };

/// Immutable first-order formula over the order/group language.  Atoms are
/// kept normalized as t < 0 and t = 0.  Conjunctions and disjunctions are
/// flattened, sorted and deduplicated at construction, so structurally
/// equal formulas share one canonical key.
class Formula {
  struct Node {
    FKind kind = FKind::True;
    Term atom;                  // Lt: atom < 0, Eq: atom = 0
    Var qvar;                   // Exists / Forall
    std::vector<Formula> kids;  // And / Or / Not / quantifiers
    std::string key;            // canonical serialization
  };

public:
  Formula() : n_(true_node()) {}

  FKind kind() const { return n_->kind; }
  const Term& atom() const { return n_->atom; }
  const Var& qvar() const { return n_->qvar; }
  const std::vector<Formula>& kids() const { return n_->kids; }
  const std::string& key() const { return n_->key; }

  bool is_true() const { return n_->kind == FKind::True; }
  bool is_false() const { return n_->kind == FKind::False; }
  bool is_atom() const { return n_->kind == FKind::Lt || n_->kind == FKind::Eq; }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.n_ == b.n_ || a.n_->key == b.n_->key;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) {
    return a.n_->key < b.n_->key;
  }

  // ---- constructors ----

  static Formula f_true() { return Formula(); }
  static Formula f_false() {
    Formula f;
    f.n_ = false_node();
    return f;
  }
  static Formula boolean(bool b) { return b ? f_true() : f_false(); }

  /// t < 0
  static Formula lt0(Term t) {
    if (t.is_constant()) return boolean(t.constant_part() < 0);
    normalize_scale(t, /*signed_scale=*/false);
    Formula f;
    auto n = std::make_shared<Node>();
    n->kind = FKind::Lt;
    n->atom = std::move(t);
    n->key = "L(" + n->atom.str() + ")";
    f.n_ = std::move(n);
    return f;
  }

  /// t = 0
  static Formula eq0(Term t) {
    if (t.is_constant()) return boolean(t.constant_part() == 0);
    normalize_scale(t, /*signed_scale=*/true);
    Formula f;
    auto n = std::make_shared<Node>();
    n->kind = FKind::Eq;
    n->atom = std::move(t);
    n->key = "E(" + n->atom.str() + ")";
    f.n_ = std::move(n);
    return f;
  }

  static Formula land(std::vector<Formula> kids) {
    std::vector<Formula> flat;
    for (auto& k : kids) {
      if (k.is_false()) return f_false();
      if (k.is_true()) continue;
      if (k.kind() == FKind::And)
        flat.insert(flat.end(), k.kids().begin(), k.kids().end());
      else
        flat.push_back(k);
    }
    sort_dedupe(flat);
    if (flat.empty()) return f_true();
    if (flat.size() == 1) return flat[0];
    if (has_clash(flat, /*conjunctive=*/true)) return f_false();
    return make_nary(FKind::And, 'A', std::move(flat));
  }

  static Formula lor(std::vector<Formula> kids) {
    std::vector<Formula> flat;
    for (auto& k : kids) {
      if (k.is_true()) return f_true();
      if (k.is_false()) continue;
      if (k.kind() == FKind::Or)
        flat.insert(flat.end(), k.kids().begin(), k.kids().end());
      else
        flat.push_back(k);
    }
    sort_dedupe(flat);
    if (flat.empty()) return f_false();
    if (flat.size() == 1) return flat[0];
    if (has_clash(flat, /*conjunctive=*/false)) return f_true();
    return make_nary(FKind::Or, 'O', std::move(flat));
  }

  static Formula lnot(const Formula& f) {
    if (f.is_true()) return f_false();
    if (f.is_false()) return f_true();
    if (f.kind() == FKind::Not) return f.kids()[0];
    Formula g;
    auto n = std::make_shared<Node>();
    n->kind = FKind::Not;
    n->kids = {f};
    n->key = "N(" + f.key() + ")";
    g.n_ = std::move(n);
    return g;
  }

  static Formula exists(const std::vector<Var>& vars, Formula body) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = quantifier(FKind::Exists, *it, body);
    return body;
  }
  static Formula forall(const std::vector<Var>& vars, Formula body) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = quantifier(FKind::Forall, *it, body);
    return body;
  }

  // ---- queries ----

  std::set<Var> free_vars() const {
    std::set<Var> acc;
    collect_free(*this, acc);
    return acc;
  }

  std::set<Var> all_vars() const {
    std::set<Var> acc;
    collect_all(*this, acc);
    return acc;
  }

  bool has_quantifiers() const {
    if (n_->kind == FKind::Exists || n_->kind == FKind::Forall) return true;
    for (auto& k : n_->kids)
      if (k.has_quantifiers()) return true;
    return false;
  }

  /// Truth value of a quantifier-free formula at a point.
  bool evaluate_qf(const Assignment& asg) const {
    switch (n_->kind) {
      case FKind::True: return true;
      case FKind::False: return false;
      case FKind::Lt: return n_->atom.evaluate(asg) < 0;
      case FKind::Eq: return n_->atom.evaluate(asg) == 0;
      case FKind::Not: return !n_->kids[0].evaluate_qf(asg);
      case FKind::And:
        for (auto& k : n_->kids)
          if (!k.evaluate_qf(asg)) return false;
        return true;
      case FKind::Or:
        for (auto& k : n_->kids)
          if (k.evaluate_qf(asg)) return true;
        return false;
      default:
        throw error("evaluate_qf: formula has quantifiers");
    }
  }

  /// Capture-avoiding substitution of terms for free variables.
  Formula substitute(const std::map<Var, Term>& m) const {
    if (m.empty()) return *this;
    switch (n_->kind) {
      case FKind::True:
      case FKind::False: return *this;
      case FKind::Lt: {
        Term t = n_->atom;
        for (auto& [v, by] : m) t = t.substitute(v, by);
        return lt0(t);
      }
      case FKind::Eq: {
        Term t = n_->atom;
        for (auto& [v, by] : m) t = t.substitute(v, by);
        return eq0(t);
      }
      case FKind::Not: return lnot(n_->kids[0].substitute(m));
      case FKind::And:
      case FKind::Or: {
        std::vector<Formula> ks;
        ks.reserve(n_->kids.size());
        for (auto& k : n_->kids) ks.push_back(k.substitute(m));
        return n_->kind == FKind::And ? land(std::move(ks)) : lor(std::move(ks));
      }
      case FKind::Exists:
      case FKind::Forall: {
        std::map<Var, Term> inner = m;
        inner.erase(n_->qvar);
        if (inner.empty()) return *this;
        bool capture = false;
        for (auto& [v, by] : inner)
          if (by.mentions(n_->qvar)) capture = true;
        Var bound = n_->qvar;
        Formula body = n_->kids[0];
        if (capture) {
          std::set<Var> avoid = body.all_vars();
          for (auto& [v, by] : inner) {
            avoid.insert(v);
            for (auto& w : by.vars()) avoid.insert(w);
          }
          Var fresh = fresh_var(bound, avoid);
          body = body.substitute({{bound, Term::variable(fresh)}});
          bound = fresh;
        }
        return quantifier(n_->kind, bound, body.substitute(inner));
      }
    }
    throw error("substitute: unreachable");
  }

  Formula rename(const std::map<Var, Var>& m) const {
    std::map<Var, Term> tm;
    for (auto& [a, b] : m) tm.emplace(a, Term::variable(b));
    return substitute(tm);
  }

  static Var fresh_var(const Var& base, const std::set<Var>& avoid) {
    if (!avoid.count(base)) return base;
    for (int i = 0;; ++i) {
      Var cand = base + "~" + std::to_string(i);
      if (!avoid.count(cand)) return cand;
    }
  }

private:
  static void normalize_scale(Term& t, bool signed_scale) {
    const auto& lead = t.coeffs().begin()->second;
    Rational a = lead < 0 ? Rational(-lead) : lead;
    if (signed_scale) a = lead;
    if (a != 1) t = t * (Rational(1) / a);
  }

  static Formula make_nary(FKind k, char tag, std::vector<Formula> kids) {
    Formula f;
    auto n = std::make_shared<Node>();
    n->kind = k;
    std::string key;
    key += tag;
    key += '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) key += ',';
      key += kids[i].key();
    }
    key += ')';
    n->kids = std::move(kids);
    n->key = std::move(key);
    f.n_ = std::move(n);
    return f;
  }

  static Formula quantifier(FKind k, const Var& v, const Formula& body) {
    if (body.is_true() || body.is_false()) return body;
    if (!body.free_vars().count(v)) return body;
    Formula f;
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->qvar = v;
    n->kids = {body};
    n->key = std::string(k == FKind::Exists ? "X(" : "U(") + v + ";" + body.key() + ")";
    f.n_ = std::move(n);
    return f;
  }

  static void sort_dedupe(std::vector<Formula>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  // In a conjunction, t<0 together with t=0 or with -t<0 is already false;
  // dually for disjunctions (which then cover everything except possibly
  // t=0, so the triple including t=0 is true).
  static bool has_clash(const std::vector<Formula>& kids, bool conjunctive) {
    std::unordered_set<std::string> keys;
    keys.reserve(kids.size() * 2);
    for (auto& k : kids) keys.insert(k.key());
    for (auto& k : kids) {
      if (k.kind() != FKind::Lt) continue;
      Formula flip = lt0(-k.atom());
      Formula eq = eq0(k.atom());
      if (conjunctive) {
        if (keys.count(flip.key()) || keys.count(eq.key())) return true;
      } else {
        if (keys.count(flip.key()) && keys.count(eq.key())) return true;
      }
    }
    return false;
  }

  static void collect_free(const Formula& f, std::set<Var>& acc) {
    switch (f.kind()) {
      case FKind::Lt:
      case FKind::Eq:
        for (auto& [v, c] : f.atom().coeffs()) acc.insert(v);
        return;
      case FKind::Exists:
      case FKind::Forall: {
        std::set<Var> inner;
        collect_free(f.kids()[0], inner);
        inner.erase(f.qvar());
        acc.insert(inner.begin(), inner.end());
        return;
      }
      default:
        for (auto& k : f.kids()) collect_free(k, acc);
        return;
    }
  }

  static void collect_all(const Formula& f, std::set<Var>& acc) {
    switch (f.kind()) {
      case FKind::Lt:
      case FKind::Eq:
        for (auto& [v, c] : f.atom().coeffs()) acc.insert(v);
        return;
      case FKind::Exists:
      case FKind::Forall:
        acc.insert(f.qvar());
        collect_all(f.kids()[0], acc);
        return;
      default:
        for (auto& k : f.kids()) collect_all(k, acc);
        return;
    }
  }

  static const std::shared_ptr<const Node>& true_node() {
    static const std::shared_ptr<const Node> n = [] {
      auto p = std::make_shared<Node>();
      p->kind = FKind::True;
      p->key = "T";
      return p;
    }();
    return n;
  }
  static const std::shared_ptr<const Node>& false_node() {
    static const std::shared_ptr<const Node> n = [] {
      auto p = std::make_shared<Node>();
      p->kind = FKind::False;
      p->key = "F";
      return p;
    }();
    return n;
  }

  std::shared_ptr<const Node> n_;
};

// Convenience comparison builders.  le/ge/ne expand into the strict-order
// fragment so downstream passes only ever see < and =.
inline Formula f_lt(const Term& a, const Term& b) { return Formula::lt0(a - b); }
inline Formula f_eq(const Term& a, const Term& b) { return Formula::eq0(a - b); }
inline Formula f_gt(const Term& a, const Term& b) { return f_lt(b, a); }
inline Formula f_le(const Term& a, const Term& b) {
  return Formula::lor({f_lt(a, b), f_eq(a, b)});
}
inline Formula f_ge(const Term& a, const Term& b) { return f_le(b, a); }
inline Formula f_ne(const Term& a, const Term& b) {
  return Formula::lor({f_lt(a, b), f_lt(b, a)});
}
inline Formula f_and(std::vector<Formula> ks) { return Formula::land(std::move(ks)); }
inline Formula f_or(std::vector<Formula> ks) { return Formula::lor(std::move(ks)); }
inline Formula f_not(const Formula& f) { return Formula::lnot(f); }
inline Formula f_implies(const Formula& a, const Formula& b) {
  return Formula::lor({Formula::lnot(a), b});
}

inline Term t_var(const Var& v) { return Term::variable(v); }
inline Term t_const(long long c) { return Term::constant(Rational(c)); }
inline Term t_rat(Rational c) { return Term::constant(std::move(c)); }

/// Checks that every atom of `f` is legal in the given mode.  In DLO mode
/// each atom must compare a variable or constant with a variable or
/// constant.
inline void validate_mode(const Formula& f, Mode mode) {
  if (mode == Mode::Odag) return;
  switch (f.kind()) {
    case FKind::Lt:
    case FKind::Eq: {
      const Term& t = f.atom();
      const auto& cs = t.coeffs();
      if (cs.size() > 2) throw mode_error("DLO atom with more than two variables");
      if (cs.size() == 2) {
        auto it = cs.begin();
        Rational a = it->second;
        Rational b = std::next(it)->second;
        if (!((a == 1 && b == -1) || (a == -1 && b == 1)) || t.constant_part() != 0)
          throw mode_error("DLO atom must compare two bare variables");
      } else if (cs.size() == 1) {
        Rational a = cs.begin()->second;
        if (a != 1 && a != -1) throw mode_error("DLO atom with scaled variable");
      }
      return;
    }
    default:
      for (auto& k : f.kids()) validate_mode(k, mode);
      return;
  }
}

}  // namespace ominal

#endif  // OMINAL_FORMULA_HPP
