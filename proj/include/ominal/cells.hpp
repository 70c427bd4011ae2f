#ifndef OMINAL_CELLS_HPP
#define OMINAL_CELLS_HPP

#include <optional>

#include "ominal/qe.hpp"

namespace ominal {

/// Affine function of the base coordinates together with its domain.
struct AffineFunc {
  Term term;
  Formula domain = Formula::f_true();
};

/// A band bound: an affine function or one of the infinities.
struct ExtendedBound {
  enum Kind { NegInf, Func, PosInf };
  Kind kind = Func;
  AffineFunc func;

  static ExtendedBound neg_inf() { return {NegInf, {}}; }
  static ExtendedBound pos_inf() { return {PosInf, {}}; }
  static ExtendedBound of(AffineFunc f) { return {Func, std::move(f)}; }
  bool finite() const { return kind == Func; }
};

/// One layer of a cell: either the graph of a function of the previous
/// coordinates or the open band between two bounds.
struct CellLayer {
  enum Kind { Graph, Band };
  Kind kind = Band;
  ExtendedBound lower, upper;  // Graph stores the function in `lower`

  static CellLayer graph(AffineFunc f) {
    CellLayer l;
    l.kind = Graph;
    l.lower = ExtendedBound::of(std::move(f));
    return l;
  }
  static CellLayer band(ExtendedBound lo, ExtendedBound hi) {
    CellLayer l;
    l.kind = Band;
    l.lower = std::move(lo);
    l.upper = std::move(hi);
    return l;
  }
  const AffineFunc& func() const {
    if (kind != Graph) throw error("CellLayer::func on a band layer");
    return lower.func;
  }
};

/// Layered cell over an ordered coordinate frame.  Layer k's bound terms
/// mention only vars[0..k-1].
struct Cell {
  std::vector<Var> vars;
  std::vector<CellLayer> layers;

  int dim() const {
    int d = 0;
    for (auto& l : layers) d += l.kind == CellLayer::Band;
    return d;
  }

  /// Quantifier-free formula defining exactly the cell's point set.
  Formula formula() const {
    std::vector<Formula> cs;
    for (std::size_t k = 0; k < layers.size(); ++k) {
      Term vk = Term::variable(vars[k]);
      const CellLayer& l = layers[k];
      if (l.kind == CellLayer::Graph) {
        cs.push_back(f_eq(vk, l.func().term));
      } else {
        if (l.lower.finite()) cs.push_back(f_lt(l.lower.func.term, vk));
        if (l.upper.finite()) cs.push_back(f_lt(vk, l.upper.func.term));
      }
    }
    return Formula::land(std::move(cs));
  }

  /// Formula of the prefix cell spanned by the first m layers.
  Formula prefix_formula(std::size_t m) const {
    Cell p;
    p.vars.assign(vars.begin(), vars.begin() + m);
    p.layers.assign(layers.begin(), layers.begin() + m);
    return p.formula();
  }

  /// An exact rational point inside the cell.
  Assignment sample() const {
    Assignment asg;
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const CellLayer& l = layers[k];
      Rational val;
      if (l.kind == CellLayer::Graph) {
        val = l.func().term.evaluate(asg);
      } else if (l.lower.finite() && l.upper.finite()) {
        val = (l.lower.func.term.evaluate(asg) + l.upper.func.term.evaluate(asg)) / 2;
      } else if (l.lower.finite()) {
        val = l.lower.func.term.evaluate(asg) + 1;
      } else if (l.upper.finite()) {
        val = l.upper.func.term.evaluate(asg) - 1;
      } else {
        val = 0;
      }
      asg[vars[k]] = val;
    }
    return asg;
  }
};

struct CellDecomposition {
  std::vector<Var> vars;
  std::vector<Cell> cells;
  std::vector<Formula> targets;
};

inline Formula cell_to_formula(const Cell& c) { return c.formula(); }

namespace detail {

inline void collect_atoms(const Formula& f, std::vector<Term>& eqs, std::vector<Term>& lts) {
  switch (f.kind()) {
    case FKind::Lt: lts.push_back(f.atom()); return;
    case FKind::Eq: eqs.push_back(f.atom()); return;
    case FKind::True:
    case FKind::False: return;
    default:
      for (auto& k : f.kids()) collect_atoms(k, eqs, lts);
      return;
  }
}

inline void decompose_rec(const Ctx& ctx, const std::vector<Formula>& targets,
                          const std::vector<Var>& vars, std::vector<Cell>& out) {
  if (vars.empty()) {
    out.push_back(Cell{});
    return;
  }
  const Var v = vars.back();
  std::vector<Var> prefix(vars.begin(), vars.end() - 1);

  // Boundary terms: solve every atom that mentions the last variable.
  std::vector<Term> eqs, lts, bounds;
  for (auto& t : targets) collect_atoms(t, eqs, lts);
  auto add_bound = [&](const Term& t) {
    if (!t.mentions(v)) return;
    Term e = t.solved_for(v);
    for (auto& b : bounds)
      if (b == e) return;
    bounds.push_back(e);
  };
  for (auto& t : eqs) add_bound(t);
  for (auto& t : lts) add_bound(t);

  // The base must fix the truth of every v-free atom and the relative
  // order of every pair of boundary functions.
  std::vector<Formula> base_targets;
  for (auto& t : eqs)
    if (!t.mentions(v)) base_targets.push_back(Formula::eq0(t));
  for (auto& t : lts)
    if (!t.mentions(v)) base_targets.push_back(Formula::lt0(t));
  for (std::size_t i = 0; i < bounds.size(); ++i)
    for (std::size_t j = i + 1; j < bounds.size(); ++j) {
      base_targets.push_back(f_lt(bounds[i], bounds[j]));
      base_targets.push_back(f_eq(bounds[i], bounds[j]));
    }

  std::vector<Cell> base;
  decompose_rec(ctx, base_targets, prefix, base);

  for (const Cell& bc : base) {
    ctx.cancel.check();
    Assignment sp = bc.sample();
    Formula dom = bc.formula();

    // Group boundary terms equal on this base cell, then order the groups.
    // Compatibility of the base with every pairwise comparison makes a
    // single sample point decisive.
    std::vector<std::pair<Rational, Term>> reps;
    for (auto& e : bounds) {
      Rational val = e.evaluate(sp);
      bool merged = false;
      for (auto& [rv, rt] : reps)
        if (rv == val) {
          if (e < rt) rt = e;
          merged = true;
          break;
        }
      if (!merged) reps.emplace_back(val, e);
    }
    std::sort(reps.begin(), reps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    auto push = [&](CellLayer l) {
      Cell c = bc;
      c.vars = vars;
      c.layers.push_back(std::move(l));
      out.push_back(std::move(c));
    };

    if (reps.empty()) {
      push(CellLayer::band(ExtendedBound::neg_inf(), ExtendedBound::pos_inf()));
      continue;
    }
    push(CellLayer::band(ExtendedBound::neg_inf(),
                         ExtendedBound::of({reps[0].second, dom})));
    for (std::size_t i = 0; i < reps.size(); ++i) {
      push(CellLayer::graph({reps[i].second, dom}));
      if (i + 1 < reps.size())
        push(CellLayer::band(ExtendedBound::of({reps[i].second, dom}),
                             ExtendedBound::of({reps[i + 1].second, dom})));
    }
    push(CellLayer::band(ExtendedBound::of({reps.back().second, dom}),
                         ExtendedBound::pos_inf()));
  }
}

}  // namespace detail

/// Cell decomposition of M^n compatible with every target.  Targets must be
/// quantifier-free up to an internal eliminate; free variables must lie in
/// the frame.
inline CellDecomposition decompose(const Ctx& ctx, std::vector<Formula> targets,
                                   const std::vector<Var>& vars) {
  std::set<Var> frame(vars.begin(), vars.end());
  if (frame.size() != vars.size()) throw error("decompose: repeated frame variable");
  for (auto& t : targets) {
    if (t.has_quantifiers()) t = eliminate(ctx, t);
    for (auto& v : t.free_vars())
      if (!frame.count(v))
        throw error("decompose: target mentions '" + v + "' outside the frame");
  }
  CellDecomposition d;
  d.vars = vars;
  d.targets = targets;
  detail::decompose_rec(ctx, targets, vars, d.cells);
  return d;
}

/// Whether the cell lies inside the target (by compatibility, a sample
/// point decides; targets must be among the decomposition's inputs).
inline bool cell_in_target(const Cell& c, const Formula& target) {
  return target.evaluate_qf(c.sample());
}

/// Symbolic verification of the four decomposition invariants.  Throws
/// certification_error with the violated invariant.
inline void certify_decomposition(const Ctx& ctx, const CellDecomposition& d) {
  std::vector<Formula> fs;
  fs.reserve(d.cells.size());
  for (auto& c : d.cells) fs.push_back(c.formula());

  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!fs[i].evaluate_qf(d.cells[i].sample()))
      throw certification_error("decomposition: cell sample escapes its formula");
    for (std::size_t j = i + 1; j < fs.size(); ++j)
      if (satisfiable(ctx, Formula::land({fs[i], fs[j]})))
        throw certification_error("decomposition: cells " + std::to_string(i) + "," +
                                  std::to_string(j) + " overlap");
  }
  if (satisfiable(ctx, Formula::lnot(Formula::lor(fs))))
    throw certification_error("decomposition: union misses part of the ambient space");

  for (auto& t : d.targets) {
    std::vector<Formula> inside;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      bool in = cell_in_target(d.cells[i], t);
      if (!entails(ctx, fs[i], in ? t : Formula::lnot(t)))
        throw certification_error("decomposition: cell straddles a target");
      if (in) inside.push_back(fs[i]);
    }
    if (!equivalent(ctx, t, Formula::lor(inside)))
      throw certification_error("decomposition: target is not a union of cells");
  }

  for (std::size_t m = 1; m < d.vars.size(); ++m) {
    std::vector<Formula> projs;
    std::set<std::string> seen;
    for (auto& c : d.cells) {
      Formula p = c.prefix_formula(m);
      if (seen.insert(p.key()).second) projs.push_back(p);
    }
    for (std::size_t i = 0; i < projs.size(); ++i)
      for (std::size_t j = i + 1; j < projs.size(); ++j)
        if (satisfiable(ctx, Formula::land({projs[i], projs[j]})))
          throw certification_error("decomposition: projected cells overlap");
    if (satisfiable(ctx, Formula::lnot(Formula::lor(projs))))
      throw certification_error("decomposition: projected cells do not cover");
  }
}

/// Image of a definable set under projection to the first `keep`
/// coordinates, as a quantifier-free formula.
inline Formula project(const Ctx& ctx, const Formula& phi, std::size_t keep,
                       const std::vector<Var>& vars) {
  if (keep >= vars.size()) throw error("project: keep must be below the arity");
  std::vector<Var> dropped(vars.begin() + keep, vars.end());
  return eliminate(ctx, Formula::exists(dropped, phi));
}

/// Dimension of the set defined by phi over the given frame; -1 for the
/// empty set.
inline int dimension(const Ctx& ctx, const Formula& phi, const std::vector<Var>& vars) {
  Formula qf = phi.has_quantifiers() ? eliminate(ctx, phi) : phi;
  if (qf.is_false()) return -1;
  CellDecomposition d = decompose(ctx, {qf}, vars);
  int dim = -1;
  for (auto& c : d.cells)
    if (cell_in_target(c, qf)) dim = std::max(dim, c.dim());
  return dim;
}

/// Joint cell decomposition of an index/object formula; fibers over any
/// index point form a cell decomposition of that fiber.
struct UniformDecomposition {
  CellDecomposition joint;
  std::size_t index_arity = 0;

  std::vector<Var> object_vars() const {
    return {joint.vars.begin() + index_arity, joint.vars.end()};
  }
};

inline UniformDecomposition uniform_decompose(const Ctx& ctx, const Formula& phi,
                                              const std::vector<Var>& index_vars,
                                              const std::vector<Var>& object_vars) {
  std::vector<Var> all = index_vars;
  all.insert(all.end(), object_vars.begin(), object_vars.end());
  UniformDecomposition u;
  u.joint = decompose(ctx, {phi}, all);
  u.index_arity = index_vars.size();
  return u;
}

/// The nonempty fibers of the joint cells over a concrete index point.
inline std::vector<Cell> fiber_cells(const UniformDecomposition& u,
                                     const std::vector<Rational>& index_point) {
  if (index_point.size() != u.index_arity)
    throw arity_error("fiber_cells: index point arity mismatch");
  Assignment asg;
  std::map<Var, Term> sub;
  for (std::size_t i = 0; i < u.index_arity; ++i) {
    asg[u.joint.vars[i]] = index_point[i];
    sub[u.joint.vars[i]] = Term::constant(index_point[i]);
  }
  std::vector<Var> ovars = u.object_vars();
  std::vector<Cell> out;
  for (const Cell& c : u.joint.cells) {
    if (!c.prefix_formula(u.index_arity).evaluate_qf(asg)) continue;
    Cell f;
    f.vars = ovars;
    for (std::size_t k = u.index_arity; k < c.layers.size(); ++k) {
      CellLayer l = c.layers[k];
      auto subst = [&](ExtendedBound& b) {
        if (b.finite()) {
          Term t = b.func.term;
          for (auto& [v, e] : sub) t = t.substitute(v, e);
          b.func.term = t;
          b.func.domain = b.func.domain.substitute(sub);
        }
      };
      subst(l.lower);
      subst(l.upper);
      f.layers.push_back(std::move(l));
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ominal

#endif  // OMINAL_CELLS_HPP
