#ifndef OMINAL_CONSTRUCT_HPP
#define OMINAL_CONSTRUCT_HPP

#include "ominal/types.hpp"

namespace ominal {

/// Record of one base-case branch decision: the set H of thresholds whose
/// initial segment misses some member, its supremum, and the branch taken.
struct BaseTrace {
  Formula h_set;   // over h_var
  Var h_var;
  std::optional<ExtRational> sup;  // nullopt when H is empty
  std::string branch;  // "h-empty", "max-in-h", "sup-not-in-h", "realized"
};

/// Supremum of a definable subset of the line; nullopt for the empty set.
inline std::optional<ExtRational> definable_sup(const Ctx& ctx, const Formula& f,
                                                const Var& v) {
  Formula qf = f.has_quantifiers() ? eliminate(ctx, f) : f;
  if (qf.is_false()) return std::nullopt;
  if (!satisfiable(ctx, qf)) return std::nullopt;
  CellDecomposition d = decompose(ctx, {qf}, {v});
  ExtRational best = ExtRational::neg_inf();
  for (auto& c : d.cells) {
    if (!cell_in_target(c, qf)) continue;
    const CellLayer& l = c.layers[0];
    ExtRational top;
    if (l.kind == CellLayer::Graph) {
      top = ExtRational::finite(l.func().term.evaluate({}));
    } else if (l.upper.finite()) {
      top = ExtRational::finite(l.upper.func.term.evaluate({}));
    } else {
      top = ExtRational::pos_inf();
    }
    if (best < top) best = top;
  }
  return best;
}

/// Projection of a family to the first n-1 object coordinates.
inline DefinableFamily project_family(const Ctx& ctx, const DefinableFamily& f) {
  if (f.object_arity() < 2) throw arity_error("project_family: object arity is 1");
  DefinableFamily g = f;
  Var last = g.object_vars.back();
  g.object_vars.pop_back();
  g.member = eliminate(ctx, Formula::exists({last}, g.member));
  return g;
}

/// The family of fiberwise suprema x -> sup S_x of a family in M^n, as
/// extended-valued functions of the first n-1 coordinates.
inline FunctionFamily sup_function_family(const Ctx& ctx, const DefinableFamily& f) {
  FunctionFamily h;
  h.index_vars = f.index_vars;
  h.index_domain = f.domain;
  h.arg_vars.assign(f.object_vars.begin(), f.object_vars.end() - 1);
  std::set<Var> used = f.all_vars();
  h.value_var = Formula::fresh_var("sup_t", used);
  used.insert(h.value_var);
  Var s = Formula::fresh_var("sup_s", used);
  used.insert(s);
  Var s2 = Formula::fresh_var("sup_r", used);

  Var last = f.object_vars.back();
  Formula member_s = f.member.substitute({{last, Term::variable(s)}});
  Formula member_s2 = f.member.substitute({{last, Term::variable(s2)}});

  Formula upper_bound = Formula::forall(
      {s}, f_implies(member_s, f_le(Term::variable(s), Term::variable(h.value_var))));
  Formula approached = Formula::forall(
      {s2},
      f_implies(f_lt(Term::variable(s2), Term::variable(h.value_var)),
                Formula::exists({s}, Formula::land({member_s,
                                                    f_lt(Term::variable(s2),
                                                         Term::variable(s))}))));
  h.graph = eliminate(ctx, Formula::land({f.domain, upper_bound, approached}));
  Formula nonempty = Formula::exists({s}, member_s);
  Formula unbounded = Formula::forall(
      {s2}, Formula::exists({s}, Formula::land({member_s, f_lt(Term::variable(s2),
                                                               Term::variable(s))})));
  h.plus_inf = eliminate(ctx, Formula::land({f.domain, nonempty, unbounded}));
  h.minus_inf = Formula::f_false();
  return h;
}

/// Canonical nested basis of a nonrealized or realized 1-type.
inline CellFamily basis_family(const TypePtr& leaf, const Var& ovar) {
  Var idx = Formula::fresh_var("t", {ovar});
  switch (leaf->kind) {
    case DefinableType::Realized: {
      AffineFunc pt{Term::constant(leaf->point.at(0))};
      return make_cell_family({CellLayer::graph(pt)}, {idx}, {ovar},
                              f_eq(t_var(idx), t_const(0)));
    }
    case DefinableType::CutPlus: {
      ExtendedBound lo = ExtendedBound::of({Term::constant(leaf->cut)});
      ExtendedBound hi = ExtendedBound::of({t_var(idx)});
      return make_cell_family({CellLayer::band(lo, hi)}, {idx}, {ovar},
                              f_lt(t_rat(leaf->cut), t_var(idx)));
    }
    case DefinableType::CutMinus: {
      ExtendedBound lo = ExtendedBound::of({t_var(idx)});
      ExtendedBound hi = ExtendedBound::of({Term::constant(leaf->cut)});
      return make_cell_family({CellLayer::band(lo, hi)}, {idx}, {ovar},
                              f_lt(t_var(idx), t_rat(leaf->cut)));
    }
    case DefinableType::PlusInf: {
      ExtendedBound lo = ExtendedBound::of({t_var(idx)});
      return make_cell_family({CellLayer::band(lo, ExtendedBound::pos_inf())}, {idx},
                              {ovar}, Formula::f_true());
    }
    case DefinableType::MinusInf: {
      ExtendedBound hi = ExtendedBound::of({t_var(idx)});
      return make_cell_family({CellLayer::band(ExtendedBound::neg_inf(), hi)}, {idx},
                              {ovar}, Formula::f_true());
    }
    default:
      throw error("basis_family: not a 1-type leaf");
  }
}

namespace detail {

/// Base-case analysis shared by the cell-family construction and the type
/// extension: H = {s : some member misses (-inf, s]}, a = sup H, and the
/// branch keyed on whether a is attained.
struct BaseCase {
  BaseTrace trace;
  TypePtr leaf;  // candidate 1-type
};

inline BaseCase base_case_analysis(const Ctx& ctx, const DefinableFamily& f) {
  std::set<Var> used = f.all_vars();
  Var s = Formula::fresh_var("h_s", used);
  const Var v = f.object_vars.at(0);
  Formula misses_initial = Formula::forall(
      {v}, f_implies(f.member, f_lt(Term::variable(s), Term::variable(v))));
  Formula h = eliminate(
      ctx, Formula::exists(f.index_vars, Formula::land({f.domain, misses_initial})));

  BaseCase out;
  out.trace.h_set = h;
  out.trace.h_var = s;
  auto sup = definable_sup(ctx, h, s);
  out.trace.sup = sup;
  if (!sup) {
    out.trace.branch = "h-empty";
    out.leaf = type_minus_inf();
  } else if (sup->kind == ExtRational::PosInf) {
    out.trace.branch = "sup-not-in-h";
    out.leaf = type_plus_inf();
  } else if (h.evaluate_qf({{s, sup->value}})) {
    out.trace.branch = "max-in-h";
    out.leaf = type_cut_plus(sup->value);
  } else {
    out.trace.branch = "sup-not-in-h";
    out.leaf = type_cut_minus(sup->value);
  }
  return out;
}

inline Formula common_point_set(const DefinableFamily& f) {
  return Formula::forall(f.index_vars, f_implies(f.domain, f.member));
}

}  // namespace detail

struct ExtendDdResult {
  TypePtr type;
  std::vector<BaseTrace> traces;
  std::vector<std::string> notes;
};

/// Whether every member of the family belongs to the type, certified
/// symbolically: the membership formula in the index tuple is entailed by
/// the index domain.
inline bool family_in_type(const Ctx& ctx, const TypePtr& p, const DefinableFamily& f) {
  Formula delta = type_member_formula(ctx, p, f.member, f.index_vars, f.object_vars);
  return entails(ctx, f.domain, delta);
}

/// Extends a downward directed definable family to a definable type by
/// induction on the object arity: the projected family gives the base, the
/// fiberwise suprema give a function family, and the induced preorder
/// decides between the graph/below constructors and the limit type.
inline ExtendDdResult extend_dd_to_type(const Ctx& ctx, const DefinableFamily& f) {
  {
    auto dd = is_downward_directed(ctx, f);
    if (!dd) throw precondition_error("extend_dd_to_type: family is not downward directed");
  }
  ExtendDdResult out;

  if (f.object_arity() == 1) {
    auto bc = detail::base_case_analysis(ctx, f);
    out.traces.push_back(bc.trace);
    if (family_in_type(ctx, bc.leaf, f)) {
      out.type = bc.leaf;
      return out;
    }
    // The branch analysis assumed empty total intersection; otherwise the
    // principal type of a common point extends the family.
    if (auto w = satisfy(ctx, detail::common_point_set(f))) {
      out.traces.back().branch = "realized";
      TypePtr r = type_realized(extract_point(*w, f.object_vars));
      if (family_in_type(ctx, r, f)) {
        out.type = r;
        return out;
      }
    }
    throw certification_error("extend_dd_to_type: base case produced no extending type");
  }

  DefinableFamily proj = project_family(ctx, f);
  ExtendDdResult base = extend_dd_to_type(ctx, proj);
  out.traces = base.traces;
  out.notes = base.notes;
  TypePtr p = base.type;

  FunctionFamily sup = sup_function_family(ctx, f);

  std::set<Var> used = f.all_vars();
  used.insert(sup.value_var);
  auto xs = fresh_vars("ext_x", f.index_arity(), used);
  auto ys = fresh_vars("ext_y", f.index_arity(), used);
  Formula rho = induced_preorder(ctx, p, sup, xs, ys);
  Formula is_min = Formula::land(
      {sup.index_domain_at(xs),
       Formula::forall(ys, f_implies(sup.index_domain_at(ys), rho))});

  if (auto w = satisfy(ctx, is_min)) {
    // Case 1: a least supremum function exists.
    PointVec ustar = extract_point(*w, xs);
    std::map<Var, Term> inst;
    for (std::size_t i = 0; i < xs.size(); ++i)
      inst[sup.index_vars[i]] = Term::constant(ustar[i]);
    Formula star_inf = sup.plus_inf.substitute(inst);
    std::vector<Var> pre(f.object_vars.begin(), f.object_vars.end() - 1);

    if (type_member(ctx, p, star_inf, pre)) {
      TypePtr cand = type_below(ctx, ExtendedBound::pos_inf(), p);
      if (family_in_type(ctx, cand, f)) {
        out.type = cand;
        return out;
      }
      throw certification_error("extend_dd_to_type: below(+inf) candidate rejected");
    }

    // Extract the affine piece of the least supremum function whose piece
    // domain lies in the base type.
    Formula star_graph = eliminate(ctx, sup.graph.substitute(inst));
    std::vector<Var> frame = pre;
    frame.push_back(sup.value_var);
    CellDecomposition d = decompose(ctx, {star_graph}, frame);
    std::optional<AffineFunc> piece;
    auto coords = type_coords(pre.size());
    for (auto& c : d.cells) {
      if (!cell_in_target(c, star_graph)) continue;
      if (c.layers.back().kind != CellLayer::Graph) continue;
      Formula dom = c.prefix_formula(pre.size());
      if (!type_member(ctx, p, dom, pre)) continue;
      Term t = c.layers.back().func().term;
      Formula cdom = dom;
      for (std::size_t i = 0; i < pre.size(); ++i) {
        t = t.substitute(pre[i], Term::variable(coords[i]));
        cdom = cdom.substitute({{pre[i], Term::variable(coords[i])}});
      }
      piece = AffineFunc{t, cdom};
      break;
    }
    if (!piece)
      throw certification_error("extend_dd_to_type: no supremum piece in the base type");

    TypePtr graph_cand = type_graph(ctx, *piece, p);
    if (family_in_type(ctx, graph_cand, f)) {
      out.type = graph_cand;
      return out;
    }
    TypePtr below_cand = type_below(ctx, ExtendedBound::of(*piece), p);
    if (family_in_type(ctx, below_cand, f)) {
      out.type = below_cand;
      return out;
    }
    throw certification_error("extend_dd_to_type: neither graph nor below extends");
  }

  // Case 2: no least function; the limit type along the whole index set.
  TypePtr lim = type_limit_below(ctx, sup, f.domain, p);
  out.notes.push_back("limit-below constructor used");
  if (!family_in_type(ctx, lim, f))
    throw certification_error("extend_dd_to_type: limit type rejected the family");
  out.type = lim;
  return out;
}

struct CompleteCellsResult {
  CellFamily family;
  std::vector<BaseTrace> traces;
  std::vector<std::string> notes;
};

namespace detail {

CompleteCellsResult complete_dd_cells_rec(const Ctx& ctx, const DefinableFamily& f);

inline CellFamily singleton_cell_family(const PointVec& pt,
                                        const std::vector<Var>& object_vars) {
  std::vector<CellLayer> schema;
  for (auto& r : pt) schema.push_back(CellLayer::graph({Term::constant(r)}));
  Var idx = Formula::fresh_var(
      "u0", std::set<Var>(object_vars.begin(), object_vars.end()));
  return make_cell_family(std::move(schema), {idx}, object_vars,
                          f_eq(t_var(idx), t_const(0)));
}

/// Rebuilds a concrete lower-dimensional cell as an open cell over its
/// band coordinates: graph coordinates are substituted through, so each
/// bound becomes a term of the earlier band coordinates.
struct CellChart {
  std::vector<std::size_t> band_positions;
  std::vector<Var> band_vars;
  // For every original coordinate, its value as a term of the band vars.
  std::vector<Term> coord_terms;
  Cell image;  // open cell over band_vars
};

inline CellChart cell_chart(const Cell& c) {
  CellChart ch;
  std::map<Var, Term> expand;
  for (std::size_t k = 0; k < c.layers.size(); ++k) {
    const CellLayer& l = c.layers[k];
    if (l.kind == CellLayer::Graph) {
      Term t = l.func().term;
      for (auto& [v, e] : expand) t = t.substitute(v, e);
      expand[c.vars[k]] = t;
      ch.coord_terms.push_back(t);
    } else {
      ch.band_positions.push_back(k);
      ch.band_vars.push_back(c.vars[k]);
      auto rebase = [&](const ExtendedBound& b) {
        if (!b.finite()) return b;
        Term t = b.func.term;
        for (auto& [v, e] : expand) t = t.substitute(v, e);
        return ExtendedBound::of({t});
      };
      ch.image.layers.push_back(CellLayer::band(rebase(l.lower), rebase(l.upper)));
      ch.coord_terms.push_back(Term::variable(c.vars[k]));
    }
  }
  ch.image.vars = ch.band_vars;
  return ch;
}

/// Shortcut case of the construction: a lower-dimensional cell meets every
/// member, so the family transfers through the cell's chart, is handled in
/// lower arity, and the answer is pulled back.
inline CompleteCellsResult via_lower_cell(const Ctx& ctx, const DefinableFamily& f,
                                          const Cell& cell) {
  CellChart ch = cell_chart(cell);

  // Transfer: psi(u, bands) = phi(u, coords(bands)) and bands in image.
  std::map<Var, Term> sub;
  for (std::size_t k = 0; k < f.object_vars.size(); ++k)
    sub[f.object_vars[k]] = ch.coord_terms[k];
  Formula psi = Formula::land({f.member.substitute(sub), ch.image.formula()});
  DefinableFamily g = make_family(psi, f.index_vars, ch.band_vars, f.domain);

  CompleteCellsResult inner = complete_dd_cells_rec(ctx, g);

  // Restrict to fibers inside the image, then pull back through the chart.
  const CellFamily& cf = inner.family;
  std::set<Var> used = cf.fam.all_vars();
  auto bv = fresh_vars("pb_b", ch.band_vars.size(), used);
  Formula inside = Formula::forall(
      bv, f_implies(cf.fam.member_at(cf.fam.index_vars, bv), [&] {
        std::map<Var, Term> rn;
        for (std::size_t i = 0; i < bv.size(); ++i)
          rn[ch.band_vars[i]] = Term::variable(bv[i]);
        return ch.image.formula().substitute(rn);
      }()));
  Formula new_domain = eliminate(ctx, Formula::land({cf.fam.domain, inside}));

  std::vector<CellLayer> schema;
  std::size_t band_at = 0;
  for (std::size_t k = 0; k < f.object_vars.size(); ++k) {
    bool is_band = band_at < ch.band_positions.size() && ch.band_positions[band_at] == k;
    if (!is_band) {
      // Graph coordinate: its term mentions earlier band vars, which carry
      // the same names in the pulled-back frame.
      schema.push_back(CellLayer::graph({ch.coord_terms[k]}));
    } else {
      schema.push_back(cf.schema.at(band_at));
      ++band_at;
    }
  }
  CompleteCellsResult out;
  out.family = make_cell_family(std::move(schema), cf.fam.index_vars, f.object_vars,
                                new_domain);
  out.traces = inner.traces;
  out.notes = inner.notes;
  out.notes.push_back("lower-dimensional cell shortcut taken");
  return out;
}

/// Directions probed for a one-dimensional cell meeting every member: the
/// coordinate axes, the atoms' normal vectors and their pairwise sums and
/// differences.
inline std::vector<std::vector<Rational>> segment_directions(const DefinableFamily& f) {
  std::vector<Term> eqs, lts;
  collect_atoms(f.member, eqs, lts);
  std::vector<std::vector<Rational>> normals;
  auto add = [&](const std::vector<Rational>& d) {
    bool zero = true;
    for (auto& c : d) zero = zero && c == 0;
    if (zero) return;
    // dedupe up to positive scaling: normalize by first nonzero entry
    std::vector<Rational> n = d;
    Rational lead;
    for (auto& c : n)
      if (c != 0) {
        lead = c < 0 ? -c : c;
        break;
      }
    for (auto& c : n) c = c / lead;
    for (auto& m : normals)
      if (m == n) return;
    normals.push_back(n);
  };
  auto normal_of = [&](const Term& t) {
    std::vector<Rational> d;
    for (auto& v : f.object_vars) d.push_back(t.coeff(v));
    return d;
  };
  std::vector<std::vector<Rational>> raw;
  for (auto& t : eqs) raw.push_back(normal_of(t));
  for (auto& t : lts) raw.push_back(normal_of(t));
  for (std::size_t i = 0; i < f.object_vars.size(); ++i) {
    std::vector<Rational> e(f.object_vars.size(), Rational(0));
    e[i] = 1;
    raw.push_back(e);
  }
  for (auto& d : raw) add(d);
  std::size_t base_count = normals.size();
  for (std::size_t i = 0; i < base_count; ++i)
    for (std::size_t j = i + 1; j < base_count; ++j) {
      std::vector<Rational> s, t;
      for (std::size_t k = 0; k < f.object_vars.size(); ++k) {
        s.push_back(normals[i][k] + normals[j][k]);
        t.push_back(normals[i][k] - normals[j][k]);
      }
      add(s);
      add(t);
    }
  return normals;
}

/// Looks for a cell of dimension below the ambient one that meets every
/// member: a common point, a fiber of the uniform decomposition, or an
/// affine segment along a probed direction.
inline std::optional<Cell> find_lower_cell(const Ctx& ctx, const DefinableFamily& f,
                                           const UniformDecomposition& joint) {
  const std::size_t n = f.object_arity();

  // Common point.
  if (auto w = satisfy(ctx, common_point_set(f))) {
    PointVec pt = extract_point(*w, f.object_vars);
    Cell c;
    c.vars = f.object_vars;
    for (auto& r : pt) c.layers.push_back(CellLayer::graph({Term::constant(r)}));
    return c;
  }

  // Fibers of the joint decomposition.
  std::set<Var> used = f.all_vars();
  auto iv2 = fresh_vars("lc_i", f.index_arity(), used);
  for (const Cell& d : joint.joint.cells) {
    ctx.cancel.check();
    std::size_t fiber_dim = 0;
    for (std::size_t k = f.index_arity(); k < d.layers.size(); ++k)
      fiber_dim += d.layers[k].kind == CellLayer::Band;
    if (fiber_dim >= n) continue;
    Formula meets_all = Formula::forall(
        iv2, f_implies(f.domain_at(iv2),
                       Formula::exists(f.object_vars,
                                       Formula::land({d.formula(),
                                                      f.member_at(iv2, f.object_vars)}))));
    if (auto w = satisfy(ctx, Formula::land({d.prefix_formula(f.index_arity()),
                                             meets_all}))) {
      PointVec up = extract_point(*w, std::vector<Var>(joint.joint.vars.begin(),
                                                       joint.joint.vars.begin() +
                                                           f.index_arity()));
      auto fibers = fiber_cells(joint, up);
      // Locate the fiber of this very cell: match by sample membership.
      for (auto& fc : fibers)
        if (fc.dim() == static_cast<int>(fiber_dim)) {
          Assignment sp = fc.sample();
          Assignment full;
          for (std::size_t i = 0; i < up.size(); ++i)
            full[joint.joint.vars[i]] = up[i];
          for (auto& [k, vval] : sp) full[k] = vval;
          if (d.formula().evaluate_qf(full)) return fc;
        }
    }
  }

  if (n < 2) return std::nullopt;

  // Affine lines, rays and segments along probed directions.
  enum Shape { Line, Ray, Segment };
  for (Shape shape : {Line, Ray, Segment}) {
    for (auto& dir : segment_directions(f)) {
      ctx.cancel.check();
      std::size_t pivot = 0;
      while (pivot < dir.size() && dir[pivot] == 0) ++pivot;
      if (pivot == dir.size()) continue;
      // The chart parameterizes by the pivot coordinate; coordinates
      // before it must be constant along the direction.
      bool chartable = true;
      for (std::size_t k = 0; k < pivot; ++k)
        if (dir[k] != 0) chartable = false;
      if (!chartable) continue;

      std::set<Var> used2 = f.all_vars();
      auto base = fresh_vars("sg_p", n, used2);
      for (auto& b : base) used2.insert(b);
      Var len = Formula::fresh_var("sg_l", used2);
      used2.insert(len);
      Var s = Formula::fresh_var("sg_s", used2);

      std::map<Var, Term> param;  // object coords along the segment
      for (std::size_t k = 0; k < n; ++k)
        param[f.object_vars[k]] = Term::variable(base[k]) + Term::variable(s) * dir[k];
      std::vector<Formula> range;
      if (shape != Line) range.push_back(f_lt(t_const(0), Term::variable(s)));
      if (shape == Segment)
        range.push_back(f_lt(Term::variable(s), Term::variable(len)));
      auto iv3 = fresh_vars("sg_i", f.index_arity(), used2);
      Formula meets_all = Formula::forall(
          iv3, f_implies(f.domain_at(iv3),
                         Formula::exists({s}, Formula::land(
                                                  {Formula::land(range),
                                                   f.member_at(iv3, f.object_vars)
                                                       .substitute(param)}))));
      Formula cond = shape == Segment
                         ? Formula::land({f_lt(t_const(0), Term::variable(len)),
                                          meets_all})
                         : meets_all;
      auto w = satisfy(ctx, cond);
      if (!w) continue;
      PointVec p0 = extract_point(*w, base);
      ExtendedBound lo = ExtendedBound::neg_inf(), hi = ExtendedBound::pos_inf();
      if (shape != Line) {
        Rational at0 = p0[pivot];
        if (dir[pivot] > 0)
          lo = ExtendedBound::of({t_rat(at0)});
        else
          hi = ExtendedBound::of({t_rat(at0)});
      }
      if (shape == Segment) {
        Rational at1 = p0[pivot] + dir[pivot] * w->at(len);
        if (dir[pivot] > 0)
          hi = ExtendedBound::of({t_rat(at1)});
        else
          lo = ExtendedBound::of({t_rat(at1)});
      }
      Cell c;
      c.vars = f.object_vars;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == pivot) {
          c.layers.push_back(CellLayer::band(lo, hi));
        } else {
          // x_k = p0_k + (x_pivot - p0_pivot) * dir_k / dir_pivot
          Term t = Term::constant(p0[k]) +
                   (Term::variable(f.object_vars[pivot]) - Term::constant(p0[pivot])) *
                       (dir[k] / dir[pivot]);
          c.layers.push_back(CellLayer::graph({t}));
        }
      }
      return c;
    }
  }
  return std::nullopt;
}

inline CompleteCellsResult complete_dd_cells_rec(const Ctx& ctx,
                                                 const DefinableFamily& f) {
  CompleteCellsResult out;

  if (f.object_arity() == 1) {
    auto bc = base_case_analysis(ctx, f);
    out.traces.push_back(bc.trace);
    CellFamily cand = basis_family(bc.leaf, f.object_vars[0]);
    if (is_finer(ctx, cand.fam, f).value) {
      out.family = std::move(cand);
      return out;
    }
    if (auto w = satisfy(ctx, common_point_set(f))) {
      out.traces.back().branch = "realized";
      out.family = singleton_cell_family(extract_point(*w, f.object_vars),
                                         f.object_vars);
      if (is_finer(ctx, out.family.fam, f).value) return out;
    }
    throw certification_error("complete_dd_cells: base case candidate is not finer");
  }

  Formula member_qf =
      f.member.has_quantifiers() ? eliminate(ctx, f.member) : f.member;
  DefinableFamily fq = f;
  fq.member = member_qf;
  UniformDecomposition joint =
      uniform_decompose(ctx, member_qf, f.index_vars, f.object_vars);

  if (auto cell = find_lower_cell(ctx, fq, joint)) return via_lower_cell(ctx, fq, *cell);

  // Main path: recurse on the projection, refine with its cells, decompose
  // uniformly and select the least eligible band over each index.
  CompleteCellsResult base = complete_dd_cells_rec(ctx, project_family(ctx, fq));
  out.traces = base.traces;
  out.notes = base.notes;
  const CellFamily& b = base.family;

  std::set<Var> used = fq.all_vars();
  for (auto& v : b.fam.all_vars()) used.insert(v);
  auto bw = fresh_vars("cc_w", b.fam.index_arity(), used);
  std::vector<Var> prefix(fq.object_vars.begin(), fq.object_vars.end() - 1);

  std::vector<Var> iv = fq.index_vars;
  iv.insert(iv.end(), bw.begin(), bw.end());
  Formula member2 = Formula::land({fq.member, b.fam.member_at(bw, prefix)});
  Formula domain2 = Formula::land({fq.domain, b.fam.domain_at(bw)});
  DefinableFamily refined = make_family(member2, iv, fq.object_vars, domain2);

  UniformDecomposition d =
      uniform_decompose(ctx, refined.member, refined.index_vars, refined.object_vars);

  auto iv2 = fresh_vars("cc_j", refined.index_arity(), used);

  struct Candidate {
    const Cell* cell;
    Formula eligible;  // over refined.index_vars
  };
  std::vector<Candidate> cands;
  for (const Cell& cell : d.joint.cells) {
    ctx.cancel.check();
    if (!cell_in_target(cell, refined.member)) continue;
    Formula meets_all = Formula::forall(
        iv2, f_implies(refined.domain_at(iv2),
                       Formula::exists(refined.object_vars,
                                       Formula::land({cell.formula(),
                                                      refined.member_at(
                                                          iv2, refined.object_vars)}))));
    Formula elig = eliminate(
        ctx, Formula::land({refined.domain, meets_all}));
    if (!satisfiable(ctx, elig)) continue;
    if (cell.layers.back().kind != CellLayer::Band)
      throw certification_error(
          "complete_dd_cells: a lower-dimensional fiber survives selection; "
          "the shortcut pool missed a witness");
    cands.push_back({&cell, elig});
  }
  if (cands.empty())
    throw certification_error("complete_dd_cells: no eligible cell");

  // Least-band selection: the chosen cell's upper edge lies below every
  // other eligible cell's lower edge on the shared base.
  auto edge_le = [&](const Cell& a, const Cell& c) -> Formula {
    const CellLayer& ta = a.layers.back();
    const CellLayer& tc = c.layers.back();
    Formula shared = Formula::land({a.prefix_formula(a.layers.size() - 1),
                                    c.prefix_formula(c.layers.size() - 1)});
    Formula body;
    if (!ta.upper.finite() || !tc.lower.finite())
      body = Formula::f_false();
    else
      body = f_le(ta.upper.func.term, tc.lower.func.term);
    return Formula::forall(prefix, f_implies(shared, body));
  };

  for (std::size_t i = 0; i < cands.size(); ++i) {
    std::vector<Formula> sel{cands[i].eligible};
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (i == j) continue;
      sel.push_back(f_implies(cands[j].eligible, edge_le(*cands[i].cell, *cands[j].cell)));
    }
    Formula omega = eliminate(ctx, Formula::land(sel));
    if (!satisfiable(ctx, omega)) continue;

    std::vector<CellLayer> schema(cands[i].cell->layers.begin() + refined.index_arity(),
                                  cands[i].cell->layers.end());
    CellFamily cf = make_cell_family(schema, refined.index_vars, refined.object_vars,
                                     omega);
    if (is_finer(ctx, cf.fam, refined).value) {
      out.family = std::move(cf);
      return out;
    }
  }
  throw certification_error("complete_dd_cells: no selected subfamily is finer");
}

}  // namespace detail

namespace detail {

/// Tagged union of cell families: one tag per joint cell whose fibers can
/// lie in the type, with the symbolic membership formula as its domain.
struct TaggedCells {
  DefinableFamily fam;              // index = (tag, original index)
  std::vector<const Cell*> cells;   // tag k corresponds to cells[k]
  Var tag_var;
};

inline TaggedCells cells_in_type(const Ctx& ctx, const TypePtr& p,
                                 const DefinableFamily& s,
                                 const UniformDecomposition& joint) {
  std::set<Var> used = s.all_vars();
  Var tag = Formula::fresh_var("tg", used);
  std::vector<Formula> member_parts, domain_parts;
  TaggedCells out;
  out.tag_var = tag;
  long long k = 0;
  for (const Cell& d : joint.joint.cells) {
    ctx.cancel.check();
    Formula delta =
        type_member_formula(ctx, p, d.formula(), s.index_vars, s.object_vars);
    if (!satisfiable(ctx, delta)) continue;
    Formula tag_is = f_eq(t_var(tag), t_const(k));
    member_parts.push_back(Formula::land({tag_is, d.formula()}));
    domain_parts.push_back(Formula::land({tag_is, delta}));
    out.cells.push_back(&d);
    ++k;
  }
  std::vector<Var> iv{tag};
  iv.insert(iv.end(), s.index_vars.begin(), s.index_vars.end());
  out.fam = make_family(Formula::lor(member_parts), iv, s.object_vars,
                        Formula::lor(domain_parts));
  return out;
}

/// Bound-of-fiber function families for a tagged cell family: the upper
/// (or lower) edges of the fibers' top band layers, tag-dispatched.
inline FunctionFamily edge_family(const TaggedCells& tc, std::size_t joint_index_arity,
                                  bool upper) {
  FunctionFamily h;
  h.index_vars = tc.fam.index_vars;
  h.index_domain = tc.fam.domain;
  h.arg_vars.assign(tc.fam.object_vars.begin(), tc.fam.object_vars.end() - 1);
  std::set<Var> used = tc.fam.all_vars();
  h.value_var = Formula::fresh_var("edge_t", used);

  std::vector<Formula> graph_parts, inf_parts;
  for (std::size_t k = 0; k < tc.cells.size(); ++k) {
    const Cell& d = *tc.cells[k];
    const CellLayer& top = d.layers.back();
    Formula tag_is = f_eq(t_var(tc.fam.index_vars[0]), t_const((long long)k));
    Formula base = d.prefix_formula(d.layers.size() - 1);
    const ExtendedBound& b = upper ? top.upper : top.lower;
    if (top.kind != CellLayer::Band) continue;
    if (b.finite()) {
      graph_parts.push_back(Formula::land(
          {tag_is, base, f_eq(t_var(h.value_var), b.func.term)}));
    } else {
      inf_parts.push_back(Formula::land({tag_is, base}));
    }
  }
  h.graph = Formula::lor(graph_parts);
  (upper ? h.plus_inf : h.minus_inf) = Formula::lor(inf_parts);
  (void)joint_index_arity;
  return h;
}

DefinableFamily refine_cells_rec(const Ctx& ctx, const TypePtr& p,
                                 const TaggedCells& tc);

}  // namespace detail

/// Downward directed definable family inside the type, complete for the
/// given family.  Follows the cell reduction, the graph-member case and
/// the band split on upper/lower edges.
inline DefinableFamily refine_within_type(const Ctx& ctx, const TypePtr& p,
                                          const DefinableFamily& s) {
  if (s.object_arity() != p->arity())
    throw arity_error("refine_within_type: arity mismatch");

  DefinableFamily result = [&]() -> DefinableFamily {
    if (p->kind == DefinableType::Realized)
      return detail::singleton_cell_family(p->point, s.object_vars).fam;
    if (s.object_arity() == 1) return basis_family(p, s.object_vars[0]).fam;

    Formula qf = s.member.has_quantifiers() ? eliminate(ctx, s.member) : s.member;
    DefinableFamily sq = s;
    sq.member = qf;
    UniformDecomposition joint =
        uniform_decompose(ctx, qf, s.index_vars, s.object_vars);
    detail::TaggedCells tc = detail::cells_in_type(ctx, p, sq, joint);
    return detail::refine_cells_rec(ctx, p, tc);
  }();

  if (!is_downward_directed(ctx, result).value)
    throw certification_error("refine_within_type: output is not downward directed");
  if (!entails(ctx, result.domain,
               type_member_formula(ctx, p, result.member, result.index_vars,
                                   result.object_vars)))
    throw certification_error("refine_within_type: some output member is not in the type");
  if (!is_complete_for(ctx, result, s).value)
    throw certification_error("refine_within_type: output is not complete for the input");
  return result;
}

namespace detail {

inline DefinableFamily refine_cells_rec(const Ctx& ctx, const TypePtr& p,
                                        const TaggedCells& tc) {
  const DefinableFamily& c = tc.fam;
  const std::size_t n = c.object_arity();
  std::vector<Var> prefix(c.object_vars.begin(), c.object_vars.end() - 1);

  // Graph-member case: if some fiber in the type is a graph, intersect the
  // whole family with cylinders over a refinement of the projected
  // pairwise intersections.
  bool has_graph = false;
  for (std::size_t k = 0; k < tc.cells.size() && !has_graph; ++k) {
    if (tc.cells[k]->layers.back().kind != CellLayer::Graph) continue;
    Formula tag_is = f_eq(t_var(c.index_vars[0]), t_const((long long)k));
    if (satisfiable(ctx, Formula::land({tag_is, c.domain}))) has_graph = true;
  }

  std::set<Var> used = c.all_vars();
  if (has_graph) {
    auto i1 = fresh_vars("rg_a", c.index_arity(), used);
    auto i2 = fresh_vars("rg_b", c.index_arity(), used);
    Formula pair_member =
        Formula::land({c.member_at(i1, c.object_vars), c.member_at(i2, c.object_vars)});
    std::vector<Var> pair_iv = i1;
    pair_iv.insert(pair_iv.end(), i2.begin(), i2.end());
    DefinableFamily pairs = make_family(pair_member, pair_iv, c.object_vars,
                                        Formula::land({c.domain_at(i1), c.domain_at(i2)}));
    DefinableFamily proj = project_family(ctx, pairs);
    DefinableFamily g = refine_within_type(ctx, project_type(p), proj);

    std::set<Var> used2 = c.all_vars();
    for (auto& v : g.all_vars()) used2.insert(v);
    auto gj = fresh_vars("rg_j", g.index_arity(), used2);
    std::vector<Var> iv = c.index_vars;
    iv.insert(iv.end(), gj.begin(), gj.end());
    return make_family(Formula::land({c.member, g.member_at(gj, prefix)}), iv,
                       c.object_vars,
                       Formula::land({c.domain, g.domain_at(gj)}));
  }

  // Band case: split on the ordering of upper and lower edges.
  FunctionFamily up = edge_family(tc, 0, /*upper=*/true);
  FunctionFamily low = edge_family(tc, 0, /*upper=*/false);

  auto i1 = fresh_vars("rb_a", c.index_arity(), used);
  auto i2 = fresh_vars("rb_b", c.index_arity(), used);
  std::vector<Var> pair_iv = i1;
  pair_iv.insert(pair_iv.end(), i2.begin(), i2.end());
  Formula xle = up.value_le(i1, i2, prefix);
  DefinableFamily xfam = make_family(eliminate(ctx, xle), pair_iv, prefix,
                                     Formula::land({c.domain_at(i1), c.domain_at(i2)}));
  Formula xle_low = low.value_le(i2, i1, prefix);
  DefinableFamily xfam_low =
      make_family(eliminate(ctx, xle_low), pair_iv, prefix,
                  Formula::land({c.domain_at(i1), c.domain_at(i2)}));

  // One refinement complete for both split families at once.
  std::set<Var> used3 = xfam.all_vars();
  for (auto& v : xfam_low.all_vars()) used3.insert(v);
  Var which = Formula::fresh_var("rb_w", used3);
  std::vector<Var> xiv{which};
  xiv.insert(xiv.end(), pair_iv.begin(), pair_iv.end());
  Formula xmember = Formula::lor(
      {Formula::land({f_eq(t_var(which), t_const(0)), xfam.member}),
       Formula::land({f_eq(t_var(which), t_const(1)), xfam_low.member})});
  Formula xdomain = Formula::lor(
      {Formula::land({f_eq(t_var(which), t_const(0)), xfam.domain}),
       Formula::land({f_eq(t_var(which), t_const(1)), xfam_low.domain})});
  DefinableFamily splits = make_family(xmember, xiv, prefix, xdomain);
  DefinableFamily b = refine_within_type(ctx, project_type(p), splits);

  std::set<Var> used4 = c.all_vars();
  for (auto& v : b.all_vars()) used4.insert(v);
  auto j0 = fresh_vars("rb_j", b.index_arity(), used4);
  auto s0 = fresh_vars("rb_s", c.index_arity(), used4);
  auto s1 = fresh_vars("rb_t", c.index_arity(), used4);

  const Var vn = c.object_vars.back();
  ExtendedBound vterm = ExtendedBound::of({t_var(vn)});
  Formula below_upper = up.value_gt_bound(vterm, s0, prefix);
  Formula above_lower = low.value_lt_bound(vterm, s1, prefix);

  std::vector<Var> iv = j0;
  iv.insert(iv.end(), s0.begin(), s0.end());
  iv.insert(iv.end(), s1.begin(), s1.end());
  Formula member = Formula::land({b.member_at(j0, prefix), below_upper, above_lower});
  Formula domain =
      Formula::land({b.domain_at(j0), c.domain_at(s0), c.domain_at(s1)});
  return make_family(eliminate(ctx, member), iv, c.object_vars, domain);
}

}  // namespace detail

struct TypeSearchResult {
  std::optional<TypePtr> type;
  bool budget_exhausted = false;
  std::vector<std::string> notes;
};

/// Candidate constructor trees for the type search: leaves from the
/// members' rational boundary constants, composite levels from the
/// prefix-affine boundary functions plus the infinite edges.
inline std::vector<TypePtr> search_candidate_types(const Ctx& ctx,
                                                   const DefinableFamily& s) {
  std::vector<Term> eqs, lts;
  detail::collect_atoms(s.member, eqs, lts);
  detail::collect_atoms(s.domain, eqs, lts);
  std::vector<Rational> consts{Rational(0)};
  auto add_const = [&](const Rational& r) {
    if (std::find(consts.begin(), consts.end(), r) == consts.end()) consts.push_back(r);
  };
  std::set<Var> ivars(s.index_vars.begin(), s.index_vars.end());
  std::vector<std::vector<AffineFunc>> funcs(s.object_arity());
  for (auto atoms : {&eqs, &lts})
    for (auto& t : *atoms)
      for (std::size_t k = 0; k < s.object_arity(); ++k) {
        const Var& v = s.object_vars[k];
        if (!t.mentions(v)) continue;
        Term e = t.solved_for(v);
        bool index_free = true;
        bool prefix_only = true;
        for (auto& w : e.vars()) {
          if (ivars.count(w)) index_free = false;
          auto pos = std::find(s.object_vars.begin(), s.object_vars.end(), w);
          if (pos == s.object_vars.end() || (std::size_t)(pos - s.object_vars.begin()) >= k)
            prefix_only = false;
        }
        if (!index_free) continue;
        if (e.is_constant()) {
          add_const(e.constant_part());
        } else if (prefix_only && k > 0) {
          Term renamed = e;
          for (std::size_t i = 0; i < k; ++i)
            renamed = renamed.substitute(s.object_vars[i], Term::variable(type_coord(i)));
          funcs[k].push_back({renamed, Formula::f_true()});
        }
      }

  std::vector<TypePtr> level;
  level.push_back(type_plus_inf());
  level.push_back(type_minus_inf());
  for (auto& cint : consts) {
    level.push_back(type_cut_plus(cint));
    level.push_back(type_cut_minus(cint));
  }
  for (std::size_t k = 1; k < s.object_arity(); ++k) {
    std::vector<TypePtr> next;
    for (auto& base : level) {
      next.push_back(type_above(ctx, ExtendedBound::neg_inf(), base));
      next.push_back(type_below(ctx, ExtendedBound::pos_inf(), base));
      std::vector<AffineFunc> fs = funcs[k];
      for (auto& cint : consts) fs.push_back({Term::constant(cint), Formula::f_true()});
      for (auto& fn : fs) {
        next.push_back(type_graph(ctx, fn, base));
        next.push_back(type_above(ctx, ExtendedBound::of(fn), base));
        next.push_back(type_below(ctx, ExtendedBound::of(fn), base));
      }
      if (next.size() > ctx.budgets.search_candidates) break;
    }
    level = std::move(next);
  }
  return level;
}

/// Search for a definable type containing every member of the family.
/// Sound by certification; a miss within budget is reported as not found,
/// never as nonexistence.
inline TypeSearchResult extend_to_definable_type(const Ctx& ctx,
                                                 const DefinableFamily& s) {
  TypeSearchResult out;

  if (is_downward_directed(ctx, s).value) {
    ExtendDdResult r = extend_dd_to_type(ctx, s);
    out.type = r.type;
    out.notes = r.notes;
    out.notes.push_back("family is downward directed; constructed directly");
    return out;
  }

  if (auto w = satisfy(ctx, detail::common_point_set(s))) {
    TypePtr r = type_realized(extract_point(*w, s.object_vars));
    if (family_in_type(ctx, r, s)) {
      out.type = r;
      out.notes.push_back("realized at a common point");
      return out;
    }
  }

  std::size_t tested = 0;
  auto certify = [&](const TypePtr& cand) -> bool {
    ctx.cancel.check();
    ++tested;
    return family_in_type(ctx, cand, s);
  };

  for (auto& cand : search_candidate_types(ctx, s)) {
    if (tested >= ctx.budgets.search_candidates) {
      out.budget_exhausted = true;
      out.notes.push_back("search budget exhausted: result is 'not found'");
      return out;
    }
    if (certify(cand)) {
      out.type = cand;
      return out;
    }
  }
  out.notes.push_back("no extending type found within the search grammar");
  return out;
}

/// Complete downward directed cell family, finer than the input; verified
/// downward directed and finer, and complete for every battery formula.
inline CompleteCellsResult complete_dd_cells(const Ctx& ctx, const DefinableFamily& f,
                                             const std::vector<Formula>& battery = {}) {
  auto dd = is_downward_directed(ctx, f);
  if (!dd) throw precondition_error("complete_dd_cells: family is not downward directed");

  CompleteCellsResult out = detail::complete_dd_cells_rec(ctx, f);

  if (!is_downward_directed(ctx, out.family.fam).value)
    throw certification_error("complete_dd_cells: output is not downward directed");
  if (!is_finer(ctx, out.family.fam, f).value)
    throw certification_error("complete_dd_cells: output is not finer than the input");
  for (auto& x : battery)
    if (!is_complete_for(ctx, out.family.fam, x, f.object_vars))
      throw certification_error("complete_dd_cells: output not complete for a battery set");
  return out;
}

}  // namespace ominal

#endif  // OMINAL_CONSTRUCT_HPP
