#ifndef OMINAL_QE_HPP
#define OMINAL_QE_HPP

#include <mutex>
#include <optional>
#include <unordered_map>

#include "ominal/formula.hpp"

namespace ominal {

namespace detail {

/// Negation normal form with negation removed entirely: negated atoms are
/// expanded by trichotomy, so the result is built from atoms, and, or and
/// quantifiers only.
inline Formula nnf(const Formula& f, bool positive = true) {
  switch (f.kind()) {
    case FKind::True: return Formula::boolean(positive);
    case FKind::False: return Formula::boolean(!positive);
    case FKind::Lt:
      if (positive) return f;
      return Formula::lor({Formula::lt0(-f.atom()), Formula::eq0(f.atom())});
    case FKind::Eq:
      if (positive) return f;
      return Formula::lor({Formula::lt0(f.atom()), Formula::lt0(-f.atom())});
    case FKind::Not: return nnf(f.kids()[0], !positive);
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      ks.reserve(f.kids().size());
      for (auto& k : f.kids()) ks.push_back(nnf(k, positive));
      bool conj = (f.kind() == FKind::And) == positive;
      return conj ? Formula::land(std::move(ks)) : Formula::lor(std::move(ks));
    }
    case FKind::Exists:
    case FKind::Forall: {
      bool ex = (f.kind() == FKind::Exists) == positive;
      Formula body = nnf(f.kids()[0], positive);
      return ex ? Formula::exists({f.qvar()}, body) : Formula::forall({f.qvar()}, body);
    }
  }
  throw error("nnf: unreachable");
}

struct LinAtom {
  bool eq;
  Term t;  // eq ? t = 0 : t < 0
};

inline Formula atom_formula(const LinAtom& a) {
  return a.eq ? Formula::eq0(a.t) : Formula::lt0(a.t);
}

/// Conjunction of atoms with a key set for dedup, clash detection and
/// subsumption.
struct Conjunct {
  std::vector<LinAtom> atoms;
  std::set<std::string> keys;

  /// Returns false when the conjunct becomes contradictory.
  bool add(const LinAtom& raw) {
    Formula f = atom_formula(raw);  // normalizes scale and folds constants
    if (f.is_true()) return true;
    if (f.is_false()) return false;
    LinAtom a{f.kind() == FKind::Eq, f.atom()};
    std::string k = (a.eq ? "E:" : "L:") + a.t.str();
    if (keys.count(k)) return true;
    if (a.eq) {
      if (keys.count("L:" + a.t.str())) return false;
      Formula nf = Formula::lt0(-a.t);
      if (nf.is_atom() && keys.count("L:" + nf.atom().str())) return false;
    } else {
      Formula nf = Formula::lt0(-a.t);
      if (nf.is_atom() && keys.count("L:" + nf.atom().str())) return false;
      Formula ef = Formula::eq0(a.t);
      if (ef.is_atom() && keys.count("E:" + ef.atom().str())) return false;
    }
    keys.insert(std::move(k));
    atoms.push_back(std::move(a));
    return true;
  }
};

/// Drops conjuncts whose atom set contains another conjunct's atom set
/// (the superset defines a smaller region and is absorbed by the subset).
inline void absorb_subsumed(std::vector<Conjunct>& cs) {
  if (cs.size() < 2 || cs.size() > 3000) return;
  std::sort(cs.begin(), cs.end(), [](const Conjunct& a, const Conjunct& b) {
    return a.keys.size() < b.keys.size();
  });
  std::vector<Conjunct> kept;
  for (auto& c : cs) {
    bool absorbed = false;
    for (auto& k : kept) {
      if (std::includes(c.keys.begin(), c.keys.end(), k.keys.begin(), k.keys.end())) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) kept.push_back(std::move(c));
  }
  cs = std::move(kept);
}

/// Distributes a negation-free quantifier-free formula into pruned
/// disjunctive normal form.  Guarded by the DNF budget.
inline void dnf(const Ctx& ctx, const Formula& f, std::vector<Conjunct>& out) {
  switch (f.kind()) {
    case FKind::True: out.push_back({}); return;
    case FKind::False: return;
    case FKind::Lt:
    case FKind::Eq: {
      Conjunct c;
      if (c.add({f.kind() == FKind::Eq, f.atom()})) out.push_back(std::move(c));
      return;
    }
    case FKind::Or:
      for (auto& k : f.kids()) {
        dnf(ctx, k, out);
        if (out.size() > ctx.budgets.qe_dnf_limit)
          throw budget_error("QE: disjunctive normal form exceeds budget");
      }
      absorb_subsumed(out);
      return;
    case FKind::And: {
      std::vector<Conjunct> acc{{}};
      for (auto& k : f.kids()) {
        std::vector<Conjunct> part;
        dnf(ctx, k, part);
        std::vector<Conjunct> next;
        next.reserve(acc.size());
        for (auto& a : acc)
          for (auto& b : part) {
            Conjunct c = a;
            bool alive = true;
            for (auto& atom : b.atoms)
              if (!c.add(atom)) {
                alive = false;
                break;
              }
            if (!alive) continue;
            next.push_back(std::move(c));
            if (next.size() > ctx.budgets.qe_dnf_limit)
              throw budget_error("QE: disjunctive normal form exceeds budget");
          }
        acc = std::move(next);
        if (acc.empty()) return;
        absorb_subsumed(acc);
      }
      out.insert(out.end(), acc.begin(), acc.end());
      return;
    }
    default:
      throw error("dnf: input not negation-free/quantifier-free");
  }
}

/// One Fourier-Motzkin step on a conjunction of atoms: the variable is
/// removed by equality substitution when possible, otherwise by combining
/// strict lower and upper bounds (density of the order makes the pairwise
/// combination exact).
inline Formula fm_conjunct(const Conjunct& conj, const Var& v) {
  const std::vector<LinAtom>& atoms = conj.atoms;
  // Equality pivot first: it avoids the lower-by-upper product entirely.
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const LinAtom& a = atoms[i];
    if (!a.eq || !a.t.mentions(v)) continue;
    Term e = a.t.solved_for(v);
    std::vector<Formula> rest;
    rest.reserve(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (j == i) continue;
      const LinAtom& b = atoms[j];
      Term s = b.t.substitute(v, e);
      rest.push_back(b.eq ? Formula::eq0(s) : Formula::lt0(s));
    }
    return Formula::land(std::move(rest));
  }

  std::vector<Term> lowers, uppers;
  std::vector<Formula> rest;
  for (const LinAtom& a : atoms) {
    Rational c = a.t.coeff(v);
    if (c == 0) {
      rest.push_back(atom_formula(a));
      continue;
    }
    // a.t = c*(v - e) < 0
    Term e = a.t.solved_for(v);
    if (c > 0)
      uppers.push_back(std::move(e));
    else
      lowers.push_back(std::move(e));
  }
  for (auto& l : lowers)
    for (auto& u : uppers) rest.push_back(f_lt(l, u));
  return Formula::land(std::move(rest));
}

}  // namespace detail

/// Eliminates one existential quantifier from a quantifier-free formula.
inline Formula eliminate_exists_var(const Ctx& ctx, const Formula& f, const Var& v) {
  ctx.cancel.check();
  if (!f.free_vars().count(v)) return f;

  static std::mutex cache_mu;
  static std::unordered_map<std::string, Formula> cache;
  std::string key = v + "#" + f.key();
  {
    std::lock_guard<std::mutex> lk(cache_mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  ctx.bump_qe();
  Formula g = detail::nnf(f);

  // Recursive structure walk: disjunctions distribute, conjunction kids
  // free of v are pulled out, and only the v-relevant residue is expanded
  // to disjunctive form.
  Formula result = [&]() -> Formula {
    struct Rec {
      const Ctx& ctx;
      const Var& v;
      Formula operator()(const Formula& h) const {
        if (h.kind() == FKind::Or) {
          std::vector<Formula> ks;
          for (auto& k : h.kids()) ks.push_back((*this)(k));
          return Formula::lor(std::move(ks));
        }
        std::vector<Formula> keep, active;
        if (h.kind() == FKind::And) {
          for (auto& k : h.kids())
            (k.free_vars().count(v) ? active : keep).push_back(k);
        } else {
          (h.free_vars().count(v) ? active : keep).push_back(h);
        }
        if (active.empty()) return Formula::land(std::move(keep));
        std::vector<detail::Conjunct> cs;
        detail::dnf(ctx, Formula::land(std::move(active)), cs);
        std::vector<Formula> branches;
        branches.reserve(cs.size());
        for (auto& c : cs) branches.push_back(detail::fm_conjunct(c, v));
        keep.push_back(Formula::lor(std::move(branches)));
        return Formula::land(std::move(keep));
      }
    };
    return Rec{ctx, v}(g);
  }();

  {
    std::lock_guard<std::mutex> lk(cache_mu);
    if (cache.size() > 400000) cache.clear();
    cache.emplace(std::move(key), result);
  }
  return result;
}

/// Full quantifier elimination: returns an equivalent quantifier-free
/// formula with free variables among those of the input.
inline Formula eliminate(const Ctx& ctx, const Formula& f) {
  switch (f.kind()) {
    case FKind::True:
    case FKind::False:
    case FKind::Lt:
    case FKind::Eq: return f;
    case FKind::Not: return Formula::lnot(eliminate(ctx, f.kids()[0]));
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      ks.reserve(f.kids().size());
      for (auto& k : f.kids()) ks.push_back(eliminate(ctx, k));
      return f.kind() == FKind::And ? Formula::land(std::move(ks))
                                    : Formula::lor(std::move(ks));
    }
    case FKind::Exists:
      return eliminate_exists_var(ctx, eliminate(ctx, f.kids()[0]), f.qvar());
    case FKind::Forall:
      return Formula::lnot(eliminate_exists_var(
          ctx, Formula::lnot(eliminate(ctx, f.kids()[0])), f.qvar()));
  }
  throw error("eliminate: unreachable");
}

/// Truth value at a point; quantifiers are handled by elimination.
inline bool evaluate(const Ctx& ctx, const Formula& f, const Assignment& asg) {
  if (!f.has_quantifiers()) return f.evaluate_qf(asg);
  return eliminate(ctx, f).evaluate_qf(asg);
}

/// Truth of a sentence.
inline bool holds(const Ctx& ctx, const Formula& sentence) {
  Formula g = eliminate(ctx, sentence);
  if (!g.free_vars().empty())
    throw error("holds: sentence has free variables");
  return g.evaluate_qf({});
}

namespace detail {

inline void collect_solved(const Formula& f, const Var& v, std::vector<Rational>& out,
                           const Assignment& asg) {
  switch (f.kind()) {
    case FKind::Lt:
    case FKind::Eq: {
      if (!f.atom().mentions(v)) return;
      Term e = f.atom().solved_for(v);
      out.push_back(e.evaluate(asg));
      return;
    }
    default:
      for (auto& k : f.kids()) collect_solved(k, v, out, asg);
      return;
  }
}

/// Candidate values for one variable: every critical value of the formula,
/// midpoints between neighbours, and points beyond the extremes.  Over a
/// dense order without endpoints this probe set is exhaustive.
inline std::vector<Rational> candidate_values(const Formula& f, const Var& v,
                                              const Assignment& asg) {
  std::vector<Rational> crit;
  collect_solved(f, v, crit, asg);
  std::sort(crit.begin(), crit.end());
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
  std::vector<Rational> cands;
  if (crit.empty()) {
    cands.push_back(0);
    return cands;
  }
  cands.push_back(crit.front() - 1);
  for (std::size_t i = 0; i < crit.size(); ++i) {
    cands.push_back(crit[i]);
    if (i + 1 < crit.size()) cands.push_back((crit[i] + crit[i + 1]) / 2);
  }
  cands.push_back(crit.back() + 1);
  return cands;
}

}  // namespace detail

/// Satisfiability of the existential closure, with a rational witness for
/// the free variables when satisfiable.
inline std::optional<Assignment> satisfy(const Ctx& ctx, const Formula& f) {
  Formula qf = eliminate(ctx, f);
  std::set<Var> fv = qf.free_vars();
  std::vector<Var> vars(fv.begin(), fv.end());
  std::vector<Formula> chain(vars.size() + 1);
  chain[vars.size()] = qf;
  for (std::size_t k = vars.size(); k > 0; --k)
    chain[k - 1] = eliminate_exists_var(ctx, chain[k], vars[k - 1]);
  if (!chain[0].evaluate_qf({})) return std::nullopt;

  Assignment asg;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Var& v = vars[k];
    const Formula& g = chain[k + 1];
    bool found = false;
    for (const Rational& c : detail::candidate_values(g, v, asg)) {
      Assignment trial = asg;
      trial[v] = c;
      bool ok = true;
      // g's free variables are v together with already-fixed ones.
      if (g.evaluate_qf(trial)) {
        asg = std::move(trial);
        found = true;
        break;
      }
      (void)ok;
    }
    if (!found) throw error("satisfy: witness extraction failed (internal)");
  }
  // Variables eliminated away by simplification do not affect truth; give
  // them a definite value so the witness covers the full free tuple.
  for (auto& v : f.free_vars())
    if (!asg.count(v)) asg[v] = 0;
  return asg;
}

inline bool satisfiable(const Ctx& ctx, const Formula& f) {
  Formula qf = eliminate(ctx, f);
  std::set<Var> fv = qf.free_vars();
  std::vector<Var> vars(fv.begin(), fv.end());
  Formula g = qf;
  for (auto& v : vars) g = eliminate_exists_var(ctx, g, v);
  return g.evaluate_qf({});
}

/// phi entails psi over their shared free variables.
inline bool entails(const Ctx& ctx, const Formula& phi, const Formula& psi) {
  return !satisfiable(ctx, Formula::land({phi, Formula::lnot(psi)}));
}

inline bool equivalent(const Ctx& ctx, const Formula& phi, const Formula& psi) {
  return entails(ctx, phi, psi) && entails(ctx, psi, phi);
}

}  // namespace ominal

#endif  // OMINAL_QE_HPP
