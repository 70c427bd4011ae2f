#ifndef OMINAL_TESTS_ORACLE_HPP
#define OMINAL_TESTS_ORACLE_HPP

#include <map>
#include <set>
#include <vector>

#include "ominal/formula.hpp"

// Test-point evaluation oracle for quantified formulas over the ordered
// divisible group on the rationals.  Quantifiers are decided by trying
// finitely many candidate values drawn from the formula's own boundary
// terms, shifted by infinitesimals, plus the two infinities.  Values live
// in a lexicographically ordered vector space Q^(1+1+D): one slot for the
// "infinite" unit, one for the standard part, and one infinitesimal unit
// per nesting level.  This is a different decision route from the
// Fourier-Motzkin elimination in the library and serves as its oracle.

namespace omt {

using namespace ominal;

struct OracleVal {
  static constexpr int kSlots = 18;
  std::vector<Rational> s;  // s[0]: infinite unit, s[1]: standard, s[2+d]: eps_d

  OracleVal() : s(kSlots, Rational(0)) {}
  static OracleVal standard(const Rational& r) {
    OracleVal v;
    v.s[1] = r;
    return v;
  }
  static OracleVal infinite(int sign) {
    OracleVal v;
    v.s[0] = sign;
    return v;
  }
  OracleVal shifted(int depth, int sign) const {
    if (2 + depth >= kSlots) throw error("oracle: nesting too deep");
    OracleVal v = *this;
    v.s[2 + depth] += sign;
    return v;
  }
  friend OracleVal operator*(const OracleVal& a, const Rational& k) {
    OracleVal v;
    for (int i = 0; i < kSlots; ++i) v.s[i] = a.s[i] * k;
    return v;
  }
  OracleVal& operator+=(const OracleVal& o) {
    for (int i = 0; i < kSlots; ++i) s[i] += o.s[i];
    return *this;
  }
  int sign() const {
    for (int i = 0; i < kSlots; ++i) {
      if (s[i] > 0) return 1;
      if (s[i] < 0) return -1;
    }
    return 0;
  }
};

using OracleEnv = std::map<Var, OracleVal>;

inline OracleVal oracle_term(const Term& t, const OracleEnv& env) {
  OracleVal acc = OracleVal::standard(t.constant_part());
  for (auto& [v, c] : t.coeffs()) acc += env.at(v) * c;
  return acc;
}

namespace oracle_detail {

inline void atoms_with(const Formula& f, const Var& v, std::vector<Term>& out) {
  switch (f.kind()) {
    case FKind::Lt:
    case FKind::Eq:
      if (f.atom().mentions(v)) out.push_back(f.atom());
      return;
    case FKind::True:
    case FKind::False: return;
    default:
      for (auto& k : f.kids()) atoms_with(k, v, out);
      return;
  }
}

// Ground values of a solved term, recursing through variables that are not
// yet bound (inner quantified variables) via their own candidate pools.
// Chains are cut when a variable repeats.
inline void expand_term(const Formula& scope, const Term& e, const OracleEnv& env,
                        int depth, std::set<Var> chain, std::vector<OracleVal>& out);

inline std::vector<OracleVal> candidates(const Formula& scope, const Var& v,
                                         const OracleEnv& env, int depth,
                                         std::set<Var> chain) {
  std::vector<Term> atoms;
  atoms_with(scope, v, atoms);
  std::set<std::vector<Rational>> ground;
  for (auto& a : atoms) {
    Term e = a.solved_for(v);
    std::vector<OracleVal> vals;
    expand_term(scope, e, env, depth, chain, vals);
    for (auto& g : vals) ground.insert(g.s);
  }
  std::vector<OracleVal> out;
  out.push_back(OracleVal::infinite(-1));
  out.push_back(OracleVal::infinite(+1));
  for (auto& s : ground) {
    OracleVal g;
    g.s = s;
    out.push_back(g.shifted(depth, -1));
    out.push_back(g);
    out.push_back(g.shifted(depth, +1));
  }
  return out;
}

inline void expand_term(const Formula& scope, const Term& e, const OracleEnv& env,
                        int depth, std::set<Var> chain, std::vector<OracleVal>& out) {
  for (auto& [w, c] : e.coeffs()) {
    if (env.count(w)) continue;
    if (chain.count(w)) return;  // cycle: no new endpoint information
    chain.insert(w);
    std::set<std::vector<Rational>> seen;
    for (auto& wv : candidates(scope, w, env, depth + 1, chain)) {
      if (!seen.insert(wv.s).second) continue;
      OracleEnv env2 = env;
      env2[w] = wv;
      expand_term(scope, e, env2, depth, chain, out);
    }
    return;
  }
  out.push_back(oracle_term(e, env));
}

}  // namespace oracle_detail

inline bool oracle_eval(const Formula& f, const OracleEnv& env, int depth = 0) {
  switch (f.kind()) {
    case FKind::True: return true;
    case FKind::False: return false;
    case FKind::Lt: return oracle_term(f.atom(), env).sign() < 0;
    case FKind::Eq: return oracle_term(f.atom(), env).sign() == 0;
    case FKind::Not: return !oracle_eval(f.kids()[0], env, depth);
    case FKind::And:
      for (auto& k : f.kids())
        if (!oracle_eval(k, env, depth)) return false;
      return true;
    case FKind::Or:
      for (auto& k : f.kids())
        if (oracle_eval(k, env, depth)) return true;
      return false;
    case FKind::Exists:
    case FKind::Forall: {
      bool ex = f.kind() == FKind::Exists;
      auto cands = oracle_detail::candidates(f.kids()[0], f.qvar(), env, depth,
                                             {f.qvar()});
      for (auto& c : cands) {
        OracleEnv env2 = env;
        env2[f.qvar()] = c;
        bool r = oracle_eval(f.kids()[0], env2, depth + 1);
        if (ex && r) return true;
        if (!ex && !r) return false;
      }
      return !ex;
    }
  }
  throw error("oracle_eval: unreachable");
}

inline bool oracle_eval_point(const Formula& f, const Assignment& asg) {
  OracleEnv env;
  for (auto& [v, r] : asg) env[v] = OracleVal::standard(r);
  return oracle_eval(f, env);
}

}  // namespace omt

#endif  // OMINAL_TESTS_ORACLE_HPP
