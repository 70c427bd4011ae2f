#ifndef OMINAL_TYPES_HPP
#define OMINAL_TYPES_HPP

#include "ominal/family.hpp"
#include "ominal/parse.hpp"

namespace ominal {

/// Canonical coordinate names used inside type constructor trees.  All
/// public entry points rename into caller coordinates, so these never leak.
inline Var type_coord(std::size_t i) { return "_c" + std::to_string(i + 1); }

inline std::vector<Var> type_coords(std::size_t n) {
  std::vector<Var> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(type_coord(i));
  return v;
}

/// Uniform family of partial functions M^k -> M with possibly infinite
/// values: a functional graph formula plus formulas carving out the
/// points where the value is +inf or -inf.
struct FunctionFamily {
  std::vector<Var> index_vars;  // x
  Formula index_domain = Formula::f_true();
  std::vector<Var> arg_vars;    // a
  Var value_var;                // t, with graph(x, a, t) functional in t
  Formula graph = Formula::f_false();
  Formula plus_inf = Formula::f_false();
  Formula minus_inf = Formula::f_false();

  std::size_t arg_arity() const { return arg_vars.size(); }

  Formula rename_graph(const std::vector<Var>& xs, const std::vector<Var>& as,
                       const Var& t) const {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < index_vars.size(); ++i)
      sub[index_vars[i]] = Term::variable(xs.at(i));
    for (std::size_t i = 0; i < arg_vars.size(); ++i)
      sub[arg_vars[i]] = Term::variable(as.at(i));
    sub[value_var] = Term::variable(t);
    return graph.substitute(sub);
  }

  Formula rename_infs(const Formula& f, const std::vector<Var>& xs,
                      const std::vector<Var>& as) const {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < index_vars.size(); ++i)
      sub[index_vars[i]] = Term::variable(xs.at(i));
    for (std::size_t i = 0; i < arg_vars.size(); ++i)
      sub[arg_vars[i]] = Term::variable(as.at(i));
    return f.substitute(sub);
  }

  Formula domain_at(const std::vector<Var>& xs, const std::vector<Var>& as) const {
    std::set<Var> used(xs.begin(), xs.end());
    used.insert(as.begin(), as.end());
    Var t = Formula::fresh_var("ffdom_t", used);
    return Formula::lor({Formula::exists({t}, rename_graph(xs, as, t)),
                         rename_infs(plus_inf, xs, as),
                         rename_infs(minus_inf, xs, as)});
  }

  Formula index_domain_at(const std::vector<Var>& xs) const {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < index_vars.size(); ++i)
      sub[index_vars[i]] = Term::variable(xs.at(i));
    return index_domain.substitute(sub);
  }

  /// {(x, a) : h_x(a) < h_y(a)} with the infinities ordered naturally.
  Formula value_lt(const std::vector<Var>& xs, const std::vector<Var>& ys,
                   const std::vector<Var>& as) const {
    std::set<Var> used(xs.begin(), xs.end());
    used.insert(ys.begin(), ys.end());
    used.insert(as.begin(), as.end());
    Var t1 = Formula::fresh_var("fflt_s", used);
    used.insert(t1);
    Var t2 = Formula::fresh_var("fflt_t", used);
    Formula fin = Formula::exists(
        {t1, t2}, Formula::land({rename_graph(xs, as, t1), rename_graph(ys, as, t2),
                                 f_lt(Term::variable(t1), Term::variable(t2))}));
    Formula lo = Formula::land({rename_infs(minus_inf, xs, as),
                                Formula::lnot(rename_infs(minus_inf, ys, as)),
                                domain_at(ys, as)});
    Formula hi = Formula::land({rename_infs(plus_inf, ys, as),
                                Formula::lnot(rename_infs(plus_inf, xs, as)),
                                domain_at(xs, as)});
    return Formula::lor({fin, lo, hi});
  }

  Formula value_le(const std::vector<Var>& xs, const std::vector<Var>& ys,
                   const std::vector<Var>& as) const {
    std::set<Var> used(xs.begin(), xs.end());
    used.insert(ys.begin(), ys.end());
    used.insert(as.begin(), as.end());
    Var t1 = Formula::fresh_var("ffle_s", used);
    used.insert(t1);
    Var t2 = Formula::fresh_var("ffle_t", used);
    Formula fin = Formula::exists(
        {t1, t2}, Formula::land({rename_graph(xs, as, t1), rename_graph(ys, as, t2),
                                 f_le(Term::variable(t1), Term::variable(t2))}));
    Formula lo = Formula::land({rename_infs(minus_inf, xs, as), domain_at(ys, as)});
    Formula hi = Formula::land({rename_infs(plus_inf, ys, as), domain_at(xs, as)});
    return Formula::lor({fin, lo, hi});
  }

  /// {(x, a) : e(a) < h_x(a)} for a concrete bound, or domain conditions
  /// when the bound is infinite.
  Formula value_gt_bound(const ExtendedBound& e, const std::vector<Var>& xs,
                         const std::vector<Var>& as) const {
    std::set<Var> used(xs.begin(), xs.end());
    used.insert(as.begin(), as.end());
    Var t = Formula::fresh_var("ffgb_t", used);
    if (e.kind == ExtendedBound::PosInf) return Formula::f_false();
    Formula fin;
    if (e.kind == ExtendedBound::NegInf) {
      fin = Formula::exists({t}, rename_graph(xs, as, t));
    } else {
      fin = Formula::exists({t}, Formula::land({rename_graph(xs, as, t),
                                                f_lt(e.func.term, Term::variable(t))}));
    }
    return Formula::lor({fin, rename_infs(plus_inf, xs, as)});
  }

  Formula value_lt_bound(const ExtendedBound& e, const std::vector<Var>& xs,
                         const std::vector<Var>& as) const {
    std::set<Var> used(xs.begin(), xs.end());
    used.insert(as.begin(), as.end());
    Var t = Formula::fresh_var("fflb_t", used);
    if (e.kind == ExtendedBound::NegInf) return Formula::f_false();
    Formula fin;
    if (e.kind == ExtendedBound::PosInf) {
      fin = Formula::exists({t}, rename_graph(xs, as, t));
    } else {
      fin = Formula::exists({t}, Formula::land({rename_graph(xs, as, t),
                                                f_lt(Term::variable(t), e.func.term)}));
    }
    return Formula::lor({fin, rename_infs(minus_inf, xs, as)});
  }
};

/// Every fiber is the graph of a partial function, and the finite and
/// infinite parts do not overlap.
inline void check_function_family(const Ctx& ctx, const FunctionFamily& h) {
  std::set<Var> used(h.index_vars.begin(), h.index_vars.end());
  used.insert(h.arg_vars.begin(), h.arg_vars.end());
  used.insert(h.value_var);
  Var t1 = Formula::fresh_var("chk_s", used);
  used.insert(t1);
  Var t2 = Formula::fresh_var("chk_t", used);
  Formula two = Formula::land(
      {h.rename_graph(h.index_vars, h.arg_vars, t1),
       h.rename_graph(h.index_vars, h.arg_vars, t2),
       f_ne(Term::variable(t1), Term::variable(t2))});
  if (satisfiable(ctx, two))
    throw certification_error("function family: fiber is not functional");
  Var t = Formula::fresh_var("chk_u", used);
  Formula fin = Formula::exists({t}, h.rename_graph(h.index_vars, h.arg_vars, t));
  if (satisfiable(ctx, Formula::land({fin, h.plus_inf})) ||
      satisfiable(ctx, Formula::land({fin, h.minus_inf})) ||
      satisfiable(ctx, Formula::land({h.plus_inf, h.minus_inf})))
    throw certification_error("function family: value cases overlap");
}

/// Definable n-type given by a constructor tree.  Membership of any
/// definable set is decided by structural recursion, and membership of a
/// parameterized set is itself a formula over the parameters.
class DefinableType;
using TypePtr = std::shared_ptr<const DefinableType>;

class DefinableType {
public:
  enum Kind {
    Realized,   // the principal type of a rational point
    CutPlus,    // right neighbourhoods (c, t)
    CutMinus,   // left neighbourhoods (t, c)
    PlusInf,    // final segments (t, +inf)
    MinusInf,   // initial segments (-inf, t)
    Graph,      // follow a function's graph over the base type
    Above,      // approach the function from above
    Below,      // approach the function from below
    LimitBelow  // limit of a family of functions with no least element
  };

  Kind kind = PlusInf;
  PointVec point;          // Realized
  Rational cut;            // CutPlus / CutMinus
  ExtendedBound bound;     // Graph / Above / Below, over type_coords(arity-1)
  TypePtr base;            // composite constructors
  FunctionFamily family;   // LimitBelow
  Formula index_set = Formula::f_true();  // LimitBelow: over family.index_vars

  std::size_t arity() const {
    switch (kind) {
      case Realized: return point.size();
      case CutPlus:
      case CutMinus:
      case PlusInf:
      case MinusInf: return 1;
      default: return base->arity() + 1;
    }
  }
};

inline TypePtr type_realized(PointVec p) {
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::Realized;
  t->point = std::move(p);
  return t;
}
inline TypePtr type_cut_plus(Rational c) {
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::CutPlus;
  t->cut = std::move(c);
  return t;
}
inline TypePtr type_cut_minus(Rational c) {
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::CutMinus;
  t->cut = std::move(c);
  return t;
}
inline TypePtr type_plus_inf() {
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::PlusInf;
  return t;
}
inline TypePtr type_minus_inf() {
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::MinusInf;
  return t;
}

Formula type_member_formula(const Ctx& ctx, const TypePtr& p, const Formula& phi,
                            const std::vector<Var>& params,
                            const std::vector<Var>& objs);

bool type_member(const Ctx& ctx, const TypePtr& p, const Formula& x,
                 const std::vector<Var>& x_vars);

namespace detail {

inline void check_bound_domain(const Ctx& ctx, const ExtendedBound& b,
                               const TypePtr& base, const char* who) {
  if (!b.finite()) return;
  auto coords = type_coords(base->arity());
  if (!type_member(ctx, base, b.func.domain, coords))
    throw precondition_error(std::string(who) + ": function domain not in the base type");
}

}  // namespace detail

inline TypePtr type_graph(const Ctx& ctx, AffineFunc f, TypePtr base) {
  detail::check_bound_domain(ctx, ExtendedBound::of(f), base, "graph type");
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::Graph;
  t->bound = ExtendedBound::of(std::move(f));
  t->base = std::move(base);
  return t;
}

inline TypePtr type_above(const Ctx& ctx, ExtendedBound f, TypePtr base) {
  if (f.kind == ExtendedBound::PosInf)
    throw precondition_error("above type: +inf is not a lower edge");
  detail::check_bound_domain(ctx, f, base, "above type");
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::Above;
  t->bound = std::move(f);
  t->base = std::move(base);
  return t;
}

inline TypePtr type_below(const Ctx& ctx, ExtendedBound f, TypePtr base) {
  if (f.kind == ExtendedBound::NegInf)
    throw precondition_error("below type: -inf is not an upper edge");
  detail::check_bound_domain(ctx, f, base, "below type");
  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::Below;
  t->bound = std::move(f);
  t->base = std::move(base);
  return t;
}

/// Total preorder induced by a type on a function family, as a formula
/// over two copies of the index tuple.
Formula induced_preorder(const Ctx& ctx, const TypePtr& p, const FunctionFamily& h,
                         const std::vector<Var>& xs, const std::vector<Var>& ys);

inline TypePtr type_limit_below(const Ctx& ctx, FunctionFamily h, Formula index_set,
                                TypePtr base) {
  if (h.arg_arity() != base->arity())
    throw arity_error("limit type: function arity does not match the base type");
  if (!satisfiable(ctx, Formula::land({index_set, h.index_domain})))
    throw precondition_error("limit type: empty index set");

  std::set<Var> used(h.index_vars.begin(), h.index_vars.end());
  for (auto& v : index_set.all_vars()) used.insert(v);
  auto xs = fresh_vars("lb_x", h.index_vars.size(), used);
  auto ys = fresh_vars("lb_y", h.index_vars.size(), used);

  auto in_q = [&](const std::vector<Var>& vs) {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < vs.size(); ++i)
      sub[h.index_vars[i]] = Term::variable(vs[i]);
    return Formula::land({index_set.substitute(sub), h.index_domain_at(vs)});
  };

  // Every function in the restricted family must have its domain in the
  // base type.
  auto coords = type_coords(base->arity());
  Formula dom_in_base =
      type_member_formula(ctx, base, h.domain_at(xs, coords), xs, coords);
  if (satisfiable(ctx, Formula::land({in_q(xs), Formula::lnot(dom_in_base)})))
    throw precondition_error("limit type: some function's domain is not in the base");

  // The restricted index set must have no minimum in the induced preorder.
  Formula rho = induced_preorder(ctx, base, h, xs, ys);
  Formula is_min = Formula::land(
      {in_q(xs), Formula::forall(ys, f_implies(in_q(ys), rho))});
  if (satisfiable(ctx, is_min))
    throw precondition_error("limit type: index set has a minimum");

  auto t = std::make_shared<DefinableType>();
  t->kind = DefinableType::LimitBelow;
  t->family = std::move(h);
  t->index_set = std::move(index_set);
  t->base = std::move(base);
  return t;
}

namespace detail {

/// {(params, a) : the vertical segment between lo and hi over a lies in
/// phi}; used for the above/below and cut constructors.
inline Formula strip_inside(const Ctx& ctx, const Formula& phi,
                            const std::vector<Var>& params,
                            const std::vector<Var>& pre, const Var& last,
                            const ExtendedBound& lo, const ExtendedBound& hi,
                            bool lo_open_to_hi) {
  // lo_open_to_hi: the strip is (lo, s) for some s < hi when true, and
  // (s, hi) for some s > lo when false.
  std::set<Var> used(params.begin(), params.end());
  used.insert(pre.begin(), pre.end());
  used.insert(last);
  for (auto& v : phi.all_vars()) used.insert(v);
  if (lo.finite())
    for (auto& v : lo.func.term.vars()) used.insert(v);
  if (hi.finite())
    for (auto& v : hi.func.term.vars()) used.insert(v);
  Var s = Formula::fresh_var("st_s", used);
  used.insert(s);
  Var y = Formula::fresh_var("st_y", used);

  Formula phi_y = phi.substitute({{last, Term::variable(y)}});
  Term sy = Term::variable(y);
  Term ss = Term::variable(s);

  std::vector<Formula> range;
  Formula s_side;
  if (lo_open_to_hi) {
    if (lo.finite()) range.push_back(f_lt(lo.func.term, sy));
    range.push_back(f_lt(sy, ss));
    s_side = lo.finite() ? f_lt(lo.func.term, ss) : Formula::f_true();
    if (hi.finite()) s_side = Formula::land({s_side, f_lt(ss, hi.func.term)});
  } else {
    if (hi.finite()) range.push_back(f_lt(sy, hi.func.term));
    range.push_back(f_lt(ss, sy));
    s_side = hi.finite() ? f_lt(ss, hi.func.term) : Formula::f_true();
    if (lo.finite()) s_side = Formula::land({s_side, f_lt(lo.func.term, ss)});
  }
  Formula inner =
      Formula::forall({y}, f_implies(Formula::land(range), phi_y));
  return eliminate(ctx, Formula::exists({s}, Formula::land({s_side, inner})));
}

}  // namespace detail

/// Membership of a parameterized set in the type, as a quantifier-free
/// formula over the parameters.  With an empty parameter tuple this
/// decides plain membership.
inline Formula type_member_formula(const Ctx& ctx, const TypePtr& p, const Formula& phi,
                                   const std::vector<Var>& params,
                                   const std::vector<Var>& objs) {
  if (objs.size() != p->arity())
    throw arity_error("type membership: object arity mismatch");
  for (auto& v : phi.free_vars()) {
    bool known = std::count(params.begin(), params.end(), v) ||
                 std::count(objs.begin(), objs.end(), v);
    if (!known) throw error("type membership: stray variable '" + v + "'");
  }
  switch (p->kind) {
    case DefinableType::Realized: {
      std::map<Var, Term> sub;
      for (std::size_t i = 0; i < objs.size(); ++i)
        sub[objs[i]] = Term::constant(p->point[i]);
      return eliminate(ctx, phi.substitute(sub));
    }
    case DefinableType::CutPlus:
      return detail::strip_inside(ctx, phi, params, {}, objs[0],
                                  ExtendedBound::of({Term::constant(p->cut)}),
                                  ExtendedBound::pos_inf(), true);
    case DefinableType::CutMinus:
      return detail::strip_inside(ctx, phi, params, {}, objs[0],
                                  ExtendedBound::neg_inf(),
                                  ExtendedBound::of({Term::constant(p->cut)}), false);
    case DefinableType::PlusInf:
      return detail::strip_inside(ctx, phi, params, {}, objs[0],
                                  ExtendedBound::neg_inf(), ExtendedBound::pos_inf(),
                                  false);
    case DefinableType::MinusInf:
      return detail::strip_inside(ctx, phi, params, {}, objs[0],
                                  ExtendedBound::neg_inf(), ExtendedBound::pos_inf(),
                                  true);
    case DefinableType::Graph: {
      // pi(phi cap graph f) in base: substitute the function for the last
      // coordinate, restricted to its domain.  The stored function is over
      // the canonical coords; rename into the caller's prefix.
      std::vector<Var> pre(objs.begin(), objs.end() - 1);
      auto coords = type_coords(pre.size());
      std::map<Var, Term> rn;
      for (std::size_t i = 0; i < pre.size(); ++i)
        rn[coords[i]] = Term::variable(pre[i]);
      Term renamed = p->bound.func.term;
      for (std::size_t i = 0; i < pre.size(); ++i)
        renamed = renamed.substitute(coords[i], Term::variable(pre[i]));
      Formula psi = Formula::land({p->bound.func.domain.substitute(rn),
                                   phi.substitute({{objs.back(), renamed}})});
      return type_member_formula(ctx, p->base, eliminate(ctx, psi), params, pre);
    }
    case DefinableType::Above:
    case DefinableType::Below: {
      std::vector<Var> pre(objs.begin(), objs.end() - 1);
      auto coords = type_coords(pre.size());
      std::map<Var, Term> rn;
      for (std::size_t i = 0; i < pre.size(); ++i)
        rn[coords[i]] = Term::variable(pre[i]);
      ExtendedBound b = p->bound;
      Formula dom = Formula::f_true();
      if (b.finite()) {
        dom = b.func.domain.substitute(rn);
        Term t = b.func.term;
        for (std::size_t i = 0; i < pre.size(); ++i)
          t = t.substitute(coords[i], Term::variable(pre[i]));
        b.func.term = t;
      }
      Formula strip =
          p->kind == DefinableType::Above
              ? detail::strip_inside(ctx, phi, params, pre, objs.back(), b,
                                     ExtendedBound::pos_inf(), true)
              : detail::strip_inside(ctx, phi, params, pre, objs.back(),
                                     ExtendedBound::neg_inf(), b, false);
      return type_member_formula(ctx, p->base,
                                 eliminate(ctx, Formula::land({dom, strip})), params,
                                 pre);
    }
    case DefinableType::LimitBelow: {
      // Cell criterion: the set belongs to the limit type exactly when it
      // contains a band cell whose base is in the base type, whose lower
      // edge sits strictly below the whole restricted family, and whose
      // upper edge strictly dominates some member of it.
      std::vector<Var> pre(objs.begin(), objs.end() - 1);
      Formula qf = phi.has_quantifiers() ? eliminate(ctx, phi) : phi;
      UniformDecomposition u = uniform_decompose(ctx, qf, params, objs);
      const FunctionFamily& h = p->family;

      std::set<Var> used(params.begin(), params.end());
      used.insert(objs.begin(), objs.end());
      for (auto& v : qf.all_vars()) used.insert(v);
      for (auto& v : h.index_vars) used.insert(v);
      for (auto& v : p->index_set.all_vars()) used.insert(v);
      auto xs = fresh_vars("mlb_x", h.index_vars.size(), used);

      auto in_q = [&](const std::vector<Var>& vs) {
        std::map<Var, Term> sub;
        for (std::size_t i = 0; i < vs.size(); ++i)
          sub[h.index_vars[i]] = Term::variable(vs[i]);
        return Formula::land({p->index_set.substitute(sub), h.index_domain_at(vs)});
      };

      std::vector<Formula> branches;
      for (const Cell& d : u.joint.cells) {
        if (!cell_in_target(d, qf)) continue;
        const CellLayer& top = d.layers.back();
        if (top.kind != CellLayer::Band) continue;
        Formula base_set = d.prefix_formula(d.layers.size() - 1);

        // pi(C) in base
        Formula c1 = type_member_formula(ctx, p->base, base_set, params, pre);

        // lower edge strictly below every h_x, x in Q
        Formula lt_all = h.value_gt_bound(top.lower, xs, pre);
        Formula c2_inner = type_member_formula(
            ctx, p->base, Formula::land({base_set, lt_all}),
            [&] {
              std::vector<Var> ps = params;
              ps.insert(ps.end(), xs.begin(), xs.end());
              return ps;
            }(),
            pre);
        Formula c2 = Formula::forall(xs, f_implies(in_q(xs), c2_inner));

        // some h_x, x in Q, strictly below the upper edge
        Formula lt_up = h.value_lt_bound(top.upper, xs, pre);
        Formula c3_inner = type_member_formula(
            ctx, p->base, Formula::land({base_set, lt_up}),
            [&] {
              std::vector<Var> ps = params;
              ps.insert(ps.end(), xs.begin(), xs.end());
              return ps;
            }(),
            pre);
        Formula c3 = Formula::exists(xs, Formula::land({in_q(xs), c3_inner}));

        branches.push_back(Formula::land({c1, c2, c3}));
      }
      return eliminate(ctx, Formula::lor(std::move(branches)));
    }
  }
  throw error("type_member_formula: unreachable");
}

inline bool type_member(const Ctx& ctx, const TypePtr& p, const Formula& x,
                        const std::vector<Var>& x_vars) {
  Formula m = type_member_formula(ctx, p, x, {}, x_vars);
  if (!m.free_vars().empty()) throw error("type_member: residual parameters");
  return m.evaluate_qf({});
}

/// Realized -> 0; nonrealized 1-types -> 1; graphs preserve the base
/// dimension; above/below/limit add one.
inline int type_dimension(const TypePtr& p) {
  switch (p->kind) {
    case DefinableType::Realized: return 0;
    case DefinableType::CutPlus:
    case DefinableType::CutMinus:
    case DefinableType::PlusInf:
    case DefinableType::MinusInf: return 1;
    case DefinableType::Graph: return type_dimension(p->base);
    default: return type_dimension(p->base) + 1;
  }
}

inline TypePtr project_type(const TypePtr& p) {
  if (p->arity() < 2) throw arity_error("project_type: arity is already 1");
  if (p->kind == DefinableType::Realized) {
    PointVec q(p->point.begin(), p->point.end() - 1);
    return type_realized(std::move(q));
  }
  return p->base;
}

enum class PreorderCmp { Less, Equivalent, Greater };

/// Classifies two functions against each other along the type: exactly one
/// of {f<g}, {f=g}, {f>g} lies in p.
inline PreorderCmp preorder_compare(const Ctx& ctx, const TypePtr& p,
                                    const AffineFunc& f, const AffineFunc& g) {
  auto coords = type_coords(p->arity());
  if (!type_member(ctx, p, f.domain, coords) || !type_member(ctx, p, g.domain, coords))
    throw precondition_error("preorder_compare: function domain not in the type");
  Formula doms = Formula::land({f.domain, g.domain});
  bool lt = type_member(ctx, p, Formula::land({doms, f_lt(f.term, g.term)}), coords);
  bool eq = type_member(ctx, p, Formula::land({doms, f_eq(f.term, g.term)}), coords);
  bool gt = type_member(ctx, p, Formula::land({doms, f_lt(g.term, f.term)}), coords);
  if (lt + eq + gt != 1)
    throw certification_error("preorder_compare: trichotomy failed");
  return lt ? PreorderCmp::Less : eq ? PreorderCmp::Equivalent : PreorderCmp::Greater;
}

inline Formula induced_preorder(const Ctx& ctx, const TypePtr& p, const FunctionFamily& h,
                                const std::vector<Var>& xs, const std::vector<Var>& ys) {
  auto coords = type_coords(h.arg_arity());
  Formula le = h.value_le(xs, ys, coords);
  Formula dom_both = Formula::land({h.domain_at(xs, coords), h.domain_at(ys, coords)});
  std::vector<Var> ps = xs;
  ps.insert(ps.end(), ys.begin(), ys.end());
  return type_member_formula(ctx, p, Formula::land({dom_both, le}), ps, coords);
}

/// Convenience overload using the family's own index variables renamed
/// apart for the second copy.
inline Formula induced_preorder(const Ctx& ctx, const TypePtr& p,
                                const FunctionFamily& h, std::vector<Var>* xs_out,
                                std::vector<Var>* ys_out) {
  std::set<Var> used(h.index_vars.begin(), h.index_vars.end());
  used.insert(h.arg_vars.begin(), h.arg_vars.end());
  auto xs = fresh_vars("po_x", h.index_vars.size(), used);
  auto ys = fresh_vars("po_y", h.index_vars.size(), used);
  if (xs_out) *xs_out = xs;
  if (ys_out) *ys_out = ys;
  return induced_preorder(ctx, p, h, xs, ys);
}

inline std::string print_type(const TypePtr& p) {
  auto bound_str = [](const ExtendedBound& b) -> std::string {
    switch (b.kind) {
      case ExtendedBound::NegInf: return "minus-inf";
      case ExtendedBound::PosInf: return "plus-inf";
      default: {
        std::string s = "(affine " + print_term(b.func.term);
        if (!b.func.domain.is_true()) s += " " + print_formula(b.func.domain);
        return s + ")";
      }
    }
  };
  switch (p->kind) {
    case DefinableType::Realized: {
      std::string s = "(realized";
      for (auto& r : p->point) s += " " + rat_to_string(r);
      return s + ")";
    }
    case DefinableType::CutPlus: return "(cut+ " + rat_to_string(p->cut) + ")";
    case DefinableType::CutMinus: return "(cut- " + rat_to_string(p->cut) + ")";
    case DefinableType::PlusInf: return "plus-inf";
    case DefinableType::MinusInf: return "minus-inf";
    case DefinableType::Graph:
      return "(graph " + bound_str(p->bound) + " " + print_type(p->base) + ")";
    case DefinableType::Above:
      return "(above " + bound_str(p->bound) + " " + print_type(p->base) + ")";
    case DefinableType::Below:
      return "(below " + bound_str(p->bound) + " " + print_type(p->base) + ")";
    case DefinableType::LimitBelow:
      return "(limit-below " + print_formula(p->index_set) + " " +
             print_type(p->base) + ")";
  }
  throw error("print_type: unreachable");
}

}  // namespace ominal

#endif  // OMINAL_TYPES_HPP
