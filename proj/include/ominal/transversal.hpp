#ifndef OMINAL_TRANSVERSAL_HPP
#define OMINAL_TRANSVERSAL_HPP

#include <functional>
#include <random>

#include "ominal/construct.hpp"

namespace ominal {

/// Finite list of definable types covering a family: every member belongs
/// to at least one listed type (checked by verify_fft).
struct TameTransversal {
  std::vector<TypePtr> types;
};

/// Definable totally preordered set: a carrier and the order formula over
/// two copies of the coordinate tuple.
struct PreorderedSet {
  Formula carrier;        // over vars
  std::vector<Var> vars;
  std::vector<Var> vars2; // second copy used by order_le
  Formula order_le;       // x preceq y

  Formula le(const std::vector<Var>& xs, const std::vector<Var>& ys) const {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = Term::variable(xs.at(i));
    for (std::size_t i = 0; i < vars2.size(); ++i)
      sub[vars2[i]] = Term::variable(ys.at(i));
    return order_le.substitute(sub);
  }
  Formula lt(const std::vector<Var>& xs, const std::vector<Var>& ys) const {
    return Formula::land({le(xs, ys), Formula::lnot(le(ys, xs))});
  }
  Formula in(const std::vector<Var>& xs) const {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = Term::variable(xs.at(i));
    return carrier.substitute(sub);
  }
};

/// Reflexivity, transitivity and totality of the order on the carrier.
inline void check_preordered_set(const Ctx& ctx, const PreorderedSet& p) {
  std::set<Var> used(p.vars.begin(), p.vars.end());
  used.insert(p.vars2.begin(), p.vars2.end());
  for (auto& v : p.carrier.all_vars()) used.insert(v);
  for (auto& v : p.order_le.all_vars()) used.insert(v);
  auto xs = fresh_vars("po_a", p.vars.size(), used);
  auto ys = fresh_vars("po_b", p.vars.size(), used);
  auto zs = fresh_vars("po_c", p.vars.size(), used);
  Formula inx = p.in(xs), iny = p.in(ys), inz = p.in(zs);
  if (!holds(ctx, Formula::forall(xs, f_implies(inx, p.le(xs, xs)))))
    throw precondition_error("preordered set: order is not reflexive");
  std::vector<Var> xy = xs;
  xy.insert(xy.end(), ys.begin(), ys.end());
  if (!holds(ctx, Formula::forall(xy, f_implies(Formula::land({inx, iny}),
                                                Formula::lor({p.le(xs, ys),
                                                              p.le(ys, xs)})))))
    throw precondition_error("preordered set: order is not total");
  std::vector<Var> xyz = xy;
  xyz.insert(xyz.end(), zs.begin(), zs.end());
  if (!holds(ctx, Formula::forall(
                      xyz, f_implies(Formula::land({inx, iny, inz, p.le(xs, ys),
                                                    p.le(ys, zs)}),
                                     p.le(xs, zs)))))
    throw precondition_error("preordered set: order is not transitive");
}

inline PreorderedSet line_order() {
  PreorderedSet p;
  p.vars = {"ol_x"};
  p.vars2 = {"ol_y"};
  p.carrier = Formula::f_true();
  p.order_le = f_le(t_var("ol_x"), t_var("ol_y"));
  return p;
}

/// On-demand generator of index points with pairwise disjoint fibers; each
/// extension re-certifies disjointness through the satisfiability query.
class DisjointWitness {
public:
  DisjointWitness(Ctx ctx, DefinableFamily fam)
      : ctx_(std::move(ctx)), fam_(std::move(fam)) {}

  const std::vector<PointVec>& found() const { return found_; }

  std::optional<PointVec> next() {
    std::set<Var> used = fam_.all_vars();
    auto ov = fresh_vars("dw_v", fam_.object_arity(), used);
    std::vector<Formula> cs{fam_.domain};
    for (auto& prev : found_) {
      Formula both = Formula::land(
          {fam_.member_at(fam_.index_vars, ov),
           fam_.fiber(prev).rename([&] {
             std::map<Var, Var> rn;
             for (std::size_t i = 0; i < ov.size(); ++i)
               rn[fam_.object_vars[i]] = ov[i];
             return rn;
           }())});
      cs.push_back(Formula::lnot(Formula::exists(ov, both)));
    }
    auto w = satisfy(ctx_, Formula::land(cs));
    if (!w) return std::nullopt;
    PointVec p = extract_point(*w, fam_.index_vars);
    found_.push_back(p);
    return p;
  }

private:
  Ctx ctx_;
  DefinableFamily fam_;
  std::vector<PointVec> found_;
};

struct ConsistencyResult {
  bool value = false;
  std::vector<PointVec> witness;  // an inconsistent tuple on failure
  explicit operator bool() const { return value; }
};

/// Every subfamily of size at most n has a common point; the witness on
/// failure is the smallest inconsistent tuple found.
inline ConsistencyResult n_consistent(const Ctx& ctx, const DefinableFamily& f, int n) {
  if (n < 1) throw precondition_error("n_consistent: n must be positive");
  if (static_cast<std::size_t>(n) * f.index_arity() + f.object_arity() > 40)
    throw budget_error("n_consistent: quantifier budget exceeded");
  for (int k = 1; k <= n; ++k) {
    std::set<Var> used = f.all_vars();
    std::vector<std::vector<Var>> tuples;
    std::vector<Formula> doms;
    std::vector<Formula> members;
    for (int i = 0; i < k; ++i) {
      auto ui = fresh_vars("nc" + std::to_string(i) + "_", f.index_arity(), used);
      for (auto& v : ui) used.insert(v);
      doms.push_back(f.domain_at(ui));
      members.push_back(f.member_at(ui, f.object_vars));
      tuples.push_back(ui);
    }
    Formula common = Formula::exists(f.object_vars, Formula::land(members));
    Formula bad = Formula::land({Formula::land(doms), Formula::lnot(common)});
    if (auto w = satisfy(ctx, bad)) {
      ConsistencyResult r;
      r.value = false;
      for (auto& t : tuples) r.witness.push_back(extract_point(*w, t));
      return r;
    }
  }
  return {true, {}};
}

/// Among any m members some n have a common point; the witness on failure
/// is an m-tuple with no n-consistent subtuple.
inline ConsistencyResult pq_property(const Ctx& ctx, const DefinableFamily& f, int m,
                                     int n) {
  if (n < 1 || m < n) throw precondition_error("pq_property: need m >= n >= 1");
  // Number of n-subsets guard.
  double combos = 1;
  for (int i = 0; i < n; ++i) combos = combos * (m - i) / (i + 1);
  if (combos > 512 || static_cast<std::size_t>(m) * f.index_arity() > 40)
    throw budget_error("pq_property: subset budget exceeded");

  std::set<Var> used = f.all_vars();
  std::vector<std::vector<Var>> tuples;
  std::vector<Formula> doms;
  for (int i = 0; i < m; ++i) {
    auto ui = fresh_vars("pq" + std::to_string(i) + "_", f.index_arity(), used);
    for (auto& v : ui) used.insert(v);
    doms.push_back(f.domain_at(ui));
    tuples.push_back(ui);
  }
  std::vector<Formula> some_subset;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int from, int chosen) {
    if (chosen == n) {
      std::vector<Formula> members;
      for (int i = 0; i < n; ++i)
        members.push_back(f.member_at(tuples[pick[i]], f.object_vars));
      some_subset.push_back(Formula::exists(f.object_vars, Formula::land(members)));
      return;
    }
    for (int i = from; i < m; ++i) {
      pick[chosen] = i;
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
  Formula bad = Formula::land({Formula::land(doms),
                               Formula::lnot(Formula::lor(some_subset))});
  if (auto w = satisfy(ctx, bad)) {
    ConsistencyResult r;
    r.value = false;
    for (auto& t : tuples) r.witness.push_back(extract_point(*w, t));
    return r;
  }
  return {true, {}};
}

struct DisjointCount {
  int k = 0;
  bool exact = true;  // false: k pairwise disjoint found at the probe cap
};

namespace detail {

/// Fibers on the line are convex.
inline bool convex_line_fibers(const Ctx& ctx, const DefinableFamily& f) {
  if (f.object_arity() != 1) return false;
  std::set<Var> used = f.all_vars();
  Var a = Formula::fresh_var("cv_a", used);
  used.insert(a);
  Var b = Formula::fresh_var("cv_b", used);
  used.insert(b);
  Var c = Formula::fresh_var("cv_c", used);
  const Var v = f.object_vars[0];
  auto at = [&](const Var& w) { return f.member.substitute({{v, Term::variable(w)}}); };
  return holds(
      ctx,
      Formula::forall(
          f.index_vars,
          f_implies(f.domain,
                    Formula::forall({a, b, c},
                                    f_implies(Formula::land({at(a), at(c),
                                                             f_lt(t_var(a), t_var(b)),
                                                             f_lt(t_var(b), t_var(c))}),
                                              at(b))))));
}

/// Existence of k pairwise disjoint members.  For convex fibers on the
/// line pairwise disjointness reduces to a consecutive left-of chain,
/// which keeps the query linear in k.
inline bool disjoint_tuple_exists(const Ctx& ctx, const DefinableFamily& f, int k,
                                  bool convex1) {
  std::set<Var> used = f.all_vars();
  std::vector<std::vector<Var>> tuples;
  std::vector<Formula> cs;
  for (int i = 0; i < k; ++i) {
    auto ui = fresh_vars("dj" + std::to_string(i) + "_", f.index_arity(), used);
    for (auto& v : ui) used.insert(v);
    cs.push_back(f.domain_at(ui));
    tuples.push_back(ui);
  }
  auto ov = fresh_vars("dj_v", f.object_arity(), used);
  if (convex1) {
    auto ow = fresh_vars("dj_w", 1, used);
    for (int i = 0; i + 1 < k; ++i)
      cs.push_back(Formula::forall(
          {ov[0], ow[0]},
          f_implies(Formula::land({f.member_at(tuples[i], ov),
                                   f.member_at(tuples[i + 1], ow)}),
                    f_lt(t_var(ov[0]), t_var(ow[0])))));
  } else {
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        cs.push_back(Formula::lnot(Formula::exists(
            ov,
            Formula::land({f.member_at(tuples[i], ov), f.member_at(tuples[j], ov)}))));
  }
  return satisfiable(ctx, Formula::land(cs));
}

}  // namespace detail

/// Largest number of pairwise disjoint members: a greedy lower bound from
/// the witness generator, then one exactness query per candidate k.
inline DisjointCount max_pairwise_disjoint(const Ctx& ctx, const DefinableFamily& f,
                                           int k_max = 0) {
  if (k_max <= 0) k_max = ctx.budgets.disjoint_probe_limit;
  if (!satisfiable(ctx, f.domain))
    throw precondition_error("max_pairwise_disjoint: empty index domain");
  bool convex1 = detail::convex_line_fibers(ctx, f);

  int best = 1;
  {
    DisjointWitness greedy(ctx, f);
    greedy.next();
    while (best < k_max && greedy.next()) ++best;
  }
  if (best >= k_max) return {k_max, false};
  while (best < k_max) {
    ctx.cancel.check();
    if (!detail::disjoint_tuple_exists(ctx, f, best + 1, convex1)) return {best, true};
    ++best;
  }
  return {best, false};
}

/// Disjunction over the types of the symbolic membership formulas, checked
/// against the whole index domain.
inline bool verify_fft(const Ctx& ctx, const DefinableFamily& f,
                       const TameTransversal& t) {
  std::vector<Formula> deltas;
  for (auto& p : t.types) {
    if (p->arity() != f.object_arity())
      throw arity_error("verify_fft: type arity mismatch");
    deltas.push_back(type_member_formula(ctx, p, f.member, f.index_vars, f.object_vars));
  }
  return entails(ctx, f.domain, Formula::lor(deltas));
}

namespace detail {

/// Closed nonempty convex fibers on the line.
inline void check_closed_intervals(const Ctx& ctx, const DefinableFamily& f) {
  if (f.object_arity() != 1)
    throw arity_error("interval family: object arity must be 1");
  if (!is_nonempty_all(ctx, f))
    throw precondition_error("interval family: some fiber is empty");
  std::set<Var> used = f.all_vars();
  Var a = Formula::fresh_var("iv_a", used);
  used.insert(a);
  Var b = Formula::fresh_var("iv_b", used);
  used.insert(b);
  Var c = Formula::fresh_var("iv_c", used);
  const Var v = f.object_vars[0];
  auto at = [&](const Var& w) {
    return f.member.substitute({{v, Term::variable(w)}});
  };
  Formula convex = Formula::forall(
      f.index_vars,
      f_implies(f.domain,
                Formula::forall({a, b, c},
                                f_implies(Formula::land({at(a), at(c),
                                                         f_lt(t_var(a), t_var(b)),
                                                         f_lt(t_var(b), t_var(c))}),
                                          at(b)))));
  if (!holds(ctx, convex))
    throw precondition_error("interval family: some fiber is not convex");
  Formula open_comp = Formula::forall(
      f.index_vars,
      f_implies(f.domain,
                Formula::forall(
                    {a}, f_implies(Formula::lnot(at(a)),
                                   Formula::exists(
                                       {b, c},
                                       Formula::land(
                                           {f_lt(t_var(b), t_var(a)),
                                            f_lt(t_var(a), t_var(c)),
                                            Formula::forall(
                                                {v},
                                                f_implies(
                                                    Formula::land(
                                                        {f_lt(t_var(b), t_var(v)),
                                                         f_lt(t_var(v), t_var(c))}),
                                                    Formula::lnot(f.member)))}))))));
  if (!holds(ctx, open_comp))
    throw precondition_error("interval family: some fiber is not closed");
}

/// 2-consistent closed-interval base case: the supremum of the left
/// endpoints decides between the two cuts and the realized point.
inline TypePtr interval_base_type(const Ctx& ctx, const DefinableFamily& f,
                                  std::vector<std::string>& notes) {
  std::set<Var> used = f.all_vars();
  Var b = Formula::fresh_var("ib_b", used);
  const Var v = f.object_vars[0];
  Formula left_endpoint = Formula::land(
      {f.member,
       Formula::forall({b}, f_implies(f_lt(t_var(b), t_var(v)),
                                      Formula::lnot(f.member.substitute(
                                          {{v, Term::variable(b)}}))))});
  Formula h = eliminate(
      ctx, Formula::exists(f.index_vars, Formula::land({f.domain, left_endpoint})));
  auto sup = definable_sup(ctx, h, v);

  std::vector<TypePtr> cands;
  if (!sup) {
    cands.push_back(type_minus_inf());
  } else if (sup->kind == ExtRational::PosInf) {
    cands.push_back(type_plus_inf());
  } else {
    cands.push_back(type_cut_minus(sup->value));
    cands.push_back(type_cut_plus(sup->value));
    cands.push_back(type_realized({sup->value}));
  }
  for (auto& cand : cands)
    if (family_in_type(ctx, cand, f)) {
      notes.push_back("interval base case: " + print_type(cand));
      return cand;
    }
  throw certification_error("interval transversal: base case has no extending type");
}

}  // namespace detail

struct IntervalTransversalResult {
  std::optional<TameTransversal> transversal;
  bool unbounded = false;  // pairwise-disjoint probing hit the budget
  int k = 0;
  std::vector<std::string> notes;
};

/// Piercing construction for definable families of closed intervals: peel
/// the leftmost-interval subfamily, solve its 2-consistent base case and
/// recurse on the remainder.  |T| equals the maximal number of pairwise
/// disjoint members.
inline IntervalTransversalResult interval_transversal(const Ctx& ctx,
                                                      const DefinableFamily& f) {
  detail::check_closed_intervals(ctx, f);
  IntervalTransversalResult out;
  DisjointCount dc = max_pairwise_disjoint(ctx, f);
  out.k = dc.k;
  if (!dc.exact) {
    out.unbounded = true;
    out.notes.push_back("no finite transversal found within the disjointness budget");
    return out;
  }

  TameTransversal tv;
  DefinableFamily g = f;
  for (int k = dc.k; k >= 1; --k) {
    ctx.cancel.check();
    if (k == 1) {
      tv.types.push_back(detail::interval_base_type(ctx, g, out.notes));
      break;
    }
    // Indices whose interval is the leftmost of some k pairwise-disjoint
    // members.  With convex fibers the chain condition on consecutive
    // members is equivalent and keeps the formula linear in k.
    std::set<Var> used = g.all_vars();
    std::vector<Formula> cs;
    std::vector<std::vector<Var>> chain{g.index_vars};
    auto ov = fresh_vars("it_v", 1, used);
    auto ow = fresh_vars("it_w", 1, used);
    for (int i = 1; i < k; ++i) {
      auto ui = fresh_vars("it" + std::to_string(i) + "_", g.index_arity(), used);
      for (auto& v2 : ui) used.insert(v2);
      cs.push_back(g.domain_at(ui));
      chain.push_back(ui);
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      cs.push_back(Formula::forall(
          {ov[0], ow[0]},
          f_implies(Formula::land({g.member_at(chain[i], ov),
                                   g.member_at(chain[i + 1], ow)}),
                    f_lt(t_var(ov[0]), t_var(ow[0])))));
    Formula leftmost;
    {
      std::vector<Var> all;
      for (std::size_t i = 1; i < chain.size(); ++i)
        all.insert(all.end(), chain[i].begin(), chain[i].end());
      leftmost = Formula::exists(all, Formula::land(cs));
    }
    Formula omega0 = eliminate(ctx, Formula::land({g.domain, leftmost}));
    DefinableFamily g0 = g;
    g0.domain = omega0;
    if (!satisfiable(ctx, omega0))
      throw certification_error("interval transversal: empty leftmost subfamily");
    tv.types.push_back(detail::interval_base_type(ctx, g0, out.notes));

    DefinableFamily rest = g;
    rest.domain = Formula::land({g.domain, Formula::lnot(omega0)});
    if (!satisfiable(ctx, rest.domain))
      throw certification_error("interval transversal: remainder vanished early");
    DisjointCount rc = max_pairwise_disjoint(ctx, rest, k);
    if (!rc.exact || rc.k != k - 1)
      throw certification_error("interval transversal: remainder disjointness is off");
    g = rest;
  }

  if (static_cast<int>(tv.types.size()) != dc.k)
    throw certification_error("interval transversal: size mismatch");
  if (!verify_fft(ctx, f, tv))
    throw certification_error("interval transversal: verification failed");
  out.transversal = std::move(tv);
  return out;
}

// ---- order transversals over a definable preorder ----

/// One class of a transversal along a cut of the preorder: the strict
/// lower set P (or a realized class point), the straddle formula over the
/// family's index tuple, and the witnessing type.
struct CutClass {
  bool realized = false;
  PointVec point;          // when realized
  Formula lower;           // P, over ps.vars (ignored when realized)
  Formula delta;           // over the family's index tuple
  TypePtr type;
};

namespace detail {

/// Members straddling the cut: some nonempty order-interval with endpoints
/// on opposite sides lies inside the fiber.  Edge cuts take the whole
/// initial or final segment.
inline Formula straddle_formula(const Ctx& ctx, const PreorderedSet& ps,
                                const DefinableFamily& f, const Formula& lower) {
  std::set<Var> used = f.all_vars();
  for (auto& v : ps.vars) used.insert(v);
  for (auto& v : ps.order_le.all_vars()) used.insert(v);
  for (auto& v : lower.all_vars()) used.insert(v);
  auto xs = fresh_vars("sd_x", ps.vars.size(), used);
  for (auto& v : xs) used.insert(v);
  auto ys = fresh_vars("sd_y", ps.vars.size(), used);
  for (auto& v : ys) used.insert(v);
  auto zs = fresh_vars("sd_z", ps.vars.size(), used);

  auto in_p = [&](const std::vector<Var>& ws) {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < ps.vars.size(); ++i)
      sub[ps.vars[i]] = Term::variable(ws.at(i));
    return lower.substitute(sub);
  };
  Formula fib_z = f.member_at(f.index_vars, zs);
  Formula inz = ps.in(zs);

  // (x, y) strictly between the sides, nonempty, inside the fiber.
  Formula seg_mid = Formula::land(
      {ps.in(xs), ps.in(ys), in_p(xs), Formula::lnot(in_p(ys)),
       Formula::exists(zs, Formula::land({inz, ps.lt(xs, zs), ps.lt(zs, ys)})),
       Formula::forall(zs, f_implies(Formula::land({inz, ps.lt(xs, zs), ps.lt(zs, ys)}),
                                     fib_z))});
  Formula mid = Formula::exists(xs, Formula::exists(ys, seg_mid));

  // Initial segment below y, when the lower side is empty below y.
  Formula seg_init = Formula::land(
      {ps.in(ys), Formula::lnot(in_p(ys)),
       Formula::forall(zs, f_implies(Formula::land({inz, in_p(zs)}), Formula::f_false())),
       Formula::exists(zs, Formula::land({inz, ps.lt(zs, ys)})),
       Formula::forall(zs, f_implies(Formula::land({inz, ps.lt(zs, ys)}), fib_z))});
  Formula init = Formula::exists(ys, seg_init);

  // Final segment above x, when the upper side is empty above x.
  Formula seg_fin = Formula::land(
      {ps.in(xs), in_p(xs),
       Formula::forall(zs, f_implies(Formula::land({inz, Formula::lnot(in_p(zs))}),
                                     Formula::f_false())),
       Formula::exists(zs, Formula::land({inz, ps.lt(xs, zs)})),
       Formula::forall(zs, f_implies(Formula::land({inz, ps.lt(xs, zs)}), fib_z))});
  Formula fin = Formula::exists(xs, seg_fin);

  // Degenerate cut with both sides trivial: the whole carrier.
  Formula whole = Formula::land(
      {Formula::forall(zs, f_implies(inz, fib_z)),
       Formula::exists(zs, inz)});

  return eliminate(ctx, Formula::lor({mid, init, fin, whole}));
}

/// The nested family of order-intervals across the cut, used to build the
/// witnessing type.
inline std::optional<TypePtr> cut_type(const Ctx& ctx, const PreorderedSet& ps,
                                       const Formula& lower,
                                       std::vector<std::string>& notes) {
  std::set<Var> used(ps.vars.begin(), ps.vars.end());
  for (auto& v : ps.order_le.all_vars()) used.insert(v);
  for (auto& v : lower.all_vars()) used.insert(v);
  for (auto& v : ps.carrier.all_vars()) used.insert(v);
  auto xs = fresh_vars("ct_x", ps.vars.size(), used);
  for (auto& v : xs) used.insert(v);
  auto ys = fresh_vars("ct_y", ps.vars.size(), used);

  auto in_p = [&](const std::vector<Var>& ws) {
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < ps.vars.size(); ++i)
      sub[ps.vars[i]] = Term::variable(ws.at(i));
    return lower.substitute(sub);
  };

  Formula lower_ok = Formula::land({ps.in(xs), in_p(xs)});
  Formula upper_ok = Formula::land({ps.in(ys), Formula::lnot(in_p(ys))});
  bool has_lower = satisfiable(ctx, lower_ok);
  bool has_upper = satisfiable(ctx, upper_ok);

  Formula member, domain;
  std::vector<Var> index;
  if (has_lower && has_upper) {
    member = Formula::land({ps.in(ps.vars), ps.lt(xs, ps.vars), ps.lt(ps.vars, ys)});
    domain = Formula::land({lower_ok, upper_ok});
    index = xs;
    index.insert(index.end(), ys.begin(), ys.end());
  } else if (has_upper) {
    member = Formula::land({ps.in(ps.vars), ps.lt(ps.vars, ys)});
    domain = upper_ok;
    index = ys;
  } else if (has_lower) {
    member = Formula::land({ps.in(ps.vars), ps.lt(xs, ps.vars)});
    domain = lower_ok;
    index = xs;
  } else {
    return std::nullopt;
  }
  DefinableFamily intervals = make_family(eliminate(ctx, member), index, ps.vars,
                                          eliminate(ctx, domain));
  if (!satisfiable(ctx, intervals.domain)) return std::nullopt;
  auto dd = is_downward_directed(ctx, intervals);
  if (!dd.value) return std::nullopt;
  auto r = extend_dd_to_type(ctx, intervals);
  for (auto& nn : r.notes) notes.push_back(nn);
  return r.type;
}

/// Candidate strict-lower parts for cuts read off the family itself.
inline std::vector<Formula> cut_candidates(const Ctx& ctx, const PreorderedSet& ps,
                                           const DefinableFamily& f) {
  std::set<Var> used = f.all_vars();
  for (auto& v : ps.vars) used.insert(v);
  for (auto& v : ps.order_le.all_vars()) used.insert(v);
  auto ys = fresh_vars("cc_y", ps.vars.size(), used);

  Formula fy = f.member_at(f.index_vars, ys);
  Formula below_all_of_fiber = Formula::forall(
      ys, f_implies(Formula::land({ps.in(ys), fy}), ps.lt(ps.vars, ys)));
  Formula weakly_below_some = Formula::exists(
      ys, Formula::land({ps.in(ys), fy, ps.le(ps.vars, ys)}));

  std::vector<Formula> out;
  // Edge cuts.
  out.push_back(Formula::f_false());
  out.push_back(ps.carrier);
  // Below every member entirely / below all fibers of the family.
  out.push_back(eliminate(
      ctx, Formula::exists(f.index_vars, Formula::land({f.domain, below_all_of_fiber}))));
  out.push_back(eliminate(
      ctx, Formula::forall(f.index_vars, f_implies(f.domain, below_all_of_fiber))));
  // Weakly below some point of every / of some fiber.
  out.push_back(eliminate(
      ctx, Formula::forall(f.index_vars, f_implies(f.domain, weakly_below_some))));
  out.push_back(eliminate(
      ctx, Formula::exists(f.index_vars, Formula::land({f.domain, weakly_below_some}))));
  return out;
}

}  // namespace detail

struct OrderTransversalResult {
  std::optional<TameTransversal> transversal;
  std::vector<CutClass> classes;
  std::shared_ptr<DisjointWitness> disjoint;
  bool indeterminate = false;
  std::vector<std::string> notes;
};

/// Dichotomy along a definable total preorder: either finitely many cut
/// classes cover the family, or an infinite pairwise disjoint subfamily is
/// generated on demand.
inline OrderTransversalResult order_transversal(const Ctx& ctx, const PreorderedSet& ps,
                                                const DefinableFamily& f,
                                                bool check_order = true) {
  if (ps.vars.size() != f.object_arity())
    throw arity_error("order_transversal: carrier arity mismatch");
  if (check_order) check_preordered_set(ctx, ps);

  OrderTransversalResult out;
  DisjointCount dc = max_pairwise_disjoint(ctx, f);
  if (!dc.exact) {
    auto gen = std::make_shared<DisjointWitness>(ctx, f);
    for (int i = 0; i < 3; ++i)
      if (!gen->next()) throw certification_error("order_transversal: generator stalled");
    out.disjoint = gen;
    out.notes.push_back("pairwise-disjoint probing passed the budget; returning the generator");
    return out;
  }

  std::vector<CutClass> classes;
  auto covered = [&]() {
    std::vector<Formula> ds;
    for (auto& c : classes) ds.push_back(c.delta);
    return Formula::lor(ds);
  };
  auto fully_covered = [&]() { return entails(ctx, f.domain, covered()); };

  // Realized classes first: points hitting every uncovered member.
  for (int round = 0; round < 4 + dc.k; ++round) {
    std::set<Var> used = f.all_vars();
    Formula uncovered = Formula::land({f.domain, Formula::lnot(covered())});
    Formula hits = Formula::forall(
        f.index_vars, f_implies(uncovered, f.member));
    auto w = satisfy(ctx, Formula::land({ps.in(f.object_vars), hits}));
    if (!w) break;
    CutClass cls;
    cls.realized = true;
    cls.point = extract_point(*w, f.object_vars);
    cls.delta = f.member_at(f.index_vars, f.object_vars)
                    .substitute([&] {
                      std::map<Var, Term> sub;
                      for (std::size_t i = 0; i < f.object_vars.size(); ++i)
                        sub[f.object_vars[i]] = Term::constant(cls.point[i]);
                      return sub;
                    }());
    cls.type = type_realized(cls.point);
    classes.push_back(std::move(cls));
    if (fully_covered()) break;
  }

  if (!fully_covered()) {
    for (auto& lower : detail::cut_candidates(ctx, ps, f)) {
      ctx.cancel.check();
      Formula delta = detail::straddle_formula(ctx, ps, f, lower);
      if (!satisfiable(ctx, Formula::land({f.domain, delta}))) continue;
      auto ty = detail::cut_type(ctx, ps, lower, out.notes);
      if (!ty) continue;
      CutClass cls;
      cls.lower = lower;
      cls.delta = delta;
      cls.type = *ty;
      classes.push_back(std::move(cls));
      if (fully_covered()) break;
    }
  }

  if (!fully_covered()) {
    out.indeterminate = true;
    out.notes.push_back(
        "cut candidates exhausted without covering the family: indeterminate");
    return out;
  }

  TameTransversal tv;
  for (auto& c : classes) tv.types.push_back(c.type);
  if (!verify_fft(ctx, f, tv))
    throw certification_error("order_transversal: verification failed");
  out.classes = std::move(classes);
  out.transversal = std::move(tv);
  return out;
}

// ---- the 2^n-consistency construction ----

namespace detail {

/// A named edge of one joint cell: block, cell, which bound, and the
/// membership formula of the fiber's base in the block's type.
struct EdgeTag {
  int block;
  const Cell* cell;
  bool upper;          // lower edge or upper edge (graphs use lower only)
  bool is_graph;
  Formula base_in_type;  // over the family's index tuple
};

struct BlockData {
  TypePtr type;
  FunctionFamily funcs;  // index = (tag, u)
  std::vector<EdgeTag> tags;
};

}  // namespace detail

struct FipResult {
  TameTransversal transversal;
  std::vector<std::string> notes;
};

/// A 2^n-consistent definable family in M^n has a finite tame transversal:
/// recurse on projected pairwise intersections, read fiber bounds off a
/// uniform cell decomposition, order them along the blocks' types, and
/// split each cut class into the graph/above/below types at its least
/// element or the limit type when there is none.
inline FipResult fip_transversal(const Ctx& ctx, const DefinableFamily& f) {
  const std::size_t n = f.object_arity();
  if (n > 4) throw budget_error("fip_transversal: object arity beyond the budget");
  const int need = 1 << n;
  auto cons = n_consistent(ctx, f, need);
  if (!cons) {
    std::string msg = "fip_transversal: family is not " + std::to_string(need) +
                      "-consistent; a " + std::to_string(cons.witness.size()) +
                      "-inconsistent tuple exists:";
    for (auto& p : cons.witness) {
      msg += " (";
      for (std::size_t i = 0; i < p.size(); ++i)
        msg += (i ? "," : "") + rat_to_string(p[i]);
      msg += ")";
    }
    throw precondition_error(msg);
  }

  FipResult out;
  if (n == 1) {
    auto r = order_transversal(ctx, line_order(), f, /*check_order=*/false);
    if (!r.transversal)
      throw budget_error("fip_transversal: base order transversal is indeterminate");
    out.transversal = *r.transversal;
    out.notes = r.notes;
    return out;
  }

  // Projected pairwise intersections.
  std::set<Var> used0 = f.all_vars();
  auto i1 = fresh_vars("fp_a", f.index_arity(), used0);
  for (auto& v : i1) used0.insert(v);
  auto i2 = fresh_vars("fp_b", f.index_arity(), used0);
  std::vector<Var> piv = i1;
  piv.insert(piv.end(), i2.begin(), i2.end());
  Var last = f.object_vars.back();
  Formula pair_member = eliminate(
      ctx, Formula::exists({last}, Formula::land({f.member_at(i1, f.object_vars),
                                                  f.member_at(i2, f.object_vars)})));
  std::vector<Var> prefix(f.object_vars.begin(), f.object_vars.end() - 1);
  DefinableFamily pairs = make_family(pair_member, piv, prefix,
                                      Formula::land({f.domain_at(i1), f.domain_at(i2)}));
  FipResult base = fip_transversal(ctx, pairs);
  out.notes = base.notes;

  Formula member_qf = f.member.has_quantifiers() ? eliminate(ctx, f.member) : f.member;
  UniformDecomposition joint =
      uniform_decompose(ctx, member_qf, f.index_vars, f.object_vars);

  // Edge tags and per-block function families.
  std::vector<detail::BlockData> blocks;
  for (std::size_t bi = 0; bi < base.transversal.types.size(); ++bi) {
    const TypePtr& p = base.transversal.types[bi];
    detail::BlockData bd;
    bd.type = p;

    std::set<Var> used = f.all_vars();
    Var tagv = Formula::fresh_var("fp_tag", used);
    used.insert(tagv);
    Var valv = Formula::fresh_var("fp_val", used);
    bd.funcs.index_vars = {tagv};
    bd.funcs.index_vars.insert(bd.funcs.index_vars.end(), f.index_vars.begin(),
                               f.index_vars.end());
    bd.funcs.arg_vars = prefix;
    bd.funcs.value_var = valv;

    std::vector<Formula> graph_parts, plus_parts, minus_parts, dom_parts;
    for (const Cell& d : joint.joint.cells) {
      ctx.cancel.check();
      if (!cell_in_target(d, member_qf)) continue;
      Formula base_fiber = d.prefix_formula(d.layers.size() - 1);
      Formula delta =
          type_member_formula(ctx, p, base_fiber, f.index_vars, prefix);
      if (!satisfiable(ctx, Formula::land({f.domain, delta}))) continue;
      const CellLayer& top = d.layers.back();
      auto add_tag = [&](bool upper_side) {
        long long id = static_cast<long long>(bd.tags.size());
        Formula tag_is = f_eq(t_var(tagv), t_const(id));
        const ExtendedBound& bound =
            top.kind == CellLayer::Graph ? top.lower : (upper_side ? top.upper : top.lower);
        if (bound.finite()) {
          graph_parts.push_back(Formula::land(
              {tag_is, base_fiber, f_eq(t_var(valv), bound.func.term)}));
        } else if (bound.kind == ExtendedBound::PosInf) {
          plus_parts.push_back(Formula::land({tag_is, base_fiber}));
        } else {
          minus_parts.push_back(Formula::land({tag_is, base_fiber}));
        }
        dom_parts.push_back(Formula::land({tag_is, f.domain, delta}));
        bd.tags.push_back({static_cast<int>(bi), &d, upper_side,
                           top.kind == CellLayer::Graph, delta});
      };
      if (top.kind == CellLayer::Graph) {
        add_tag(false);
      } else {
        add_tag(false);
        add_tag(true);
      }
    }
    if (bd.tags.empty()) continue;
    bd.funcs.graph = Formula::lor(graph_parts);
    bd.funcs.plus_inf = Formula::lor(plus_parts);
    bd.funcs.minus_inf = Formula::lor(minus_parts);
    bd.funcs.index_domain = Formula::lor(dom_parts);
    blocks.push_back(std::move(bd));
  }
  if (blocks.empty())
    throw certification_error("fip_transversal: no fiber cell lands in any block type");

  // Carrier X = disjoint sum of the blocks' tagged index sets, ordered by
  // block and within a block by the induced preorder.
  std::set<Var> usedx = f.all_vars();
  const std::size_t m = f.index_arity();
  auto xv = fresh_vars("fx", 2 + m, usedx);
  for (auto& v : xv) usedx.insert(v);
  auto yv = fresh_vars("fy", 2 + m, usedx);
  auto tagged = [&](const std::vector<Var>& w) {
    return std::vector<Var>(w.begin() + 1, w.end());
  };

  std::vector<Formula> carrier_parts, order_parts;
  std::vector<Formula> rho_cache(blocks.size());
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    Formula dom = [&] {
      std::map<Var, Term> sub;
      auto tg = tagged(xv);
      for (std::size_t i = 0; i < blocks[bi].funcs.index_vars.size(); ++i)
        sub[blocks[bi].funcs.index_vars[i]] = Term::variable(tg[i]);
      return blocks[bi].funcs.index_domain.substitute(sub);
    }();
    carrier_parts.push_back(
        Formula::land({f_eq(t_var(xv[0]), t_const((long long)bi)), dom}));
    rho_cache[bi] =
        induced_preorder(ctx, blocks[bi].type, blocks[bi].funcs, tagged(xv), tagged(yv));
    order_parts.push_back(Formula::land({f_eq(t_var(xv[0]), t_const((long long)bi)),
                                         f_eq(t_var(yv[0]), t_const((long long)bi)),
                                         rho_cache[bi]}));
  }
  order_parts.push_back(f_lt(t_var(xv[0]), t_var(yv[0])));

  PreorderedSet px;
  px.vars = xv;
  px.vars2 = yv;
  px.carrier = Formula::lor(carrier_parts);
  px.order_le = Formula::lor(order_parts);

  // B_u: the union over cells of the order intervals between the cell's
  // two edges, inside each block.
  std::vector<Formula> beta_parts;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& bd = blocks[bi];
    for (std::size_t lo = 0; lo < bd.tags.size(); ++lo) {
      if (bd.tags[lo].upper) continue;
      // find the matching upper tag of the same cell (graphs pair with
      // themselves)
      std::size_t hi = lo;
      if (!bd.tags[lo].is_graph) {
        for (std::size_t j = 0; j < bd.tags.size(); ++j)
          if (bd.tags[j].cell == bd.tags[lo].cell && bd.tags[j].upper) hi = j;
      }
      // lower(tag_lo, u) preceq mid preceq upper(tag_hi, u), where mid is
      // the carrier tuple yv of the B-family's object side.
      Formula lower_le_mid = [&] {
        Formula rho = rho_cache[bi];
        auto tgx = tagged(xv);
        auto tgy = tagged(yv);
        std::map<Var, Term> s;
        s[tgx[0]] = Term::constant(Rational((long long)lo));
        for (std::size_t i = 0; i < m; ++i)
          s[tgx[1 + i]] = Term::variable(f.index_vars[i]);
        for (std::size_t i = 0; i < tgy.size(); ++i)
          s[tgy[i]] = Term::variable(tgy[i]);
        return rho.substitute(s);
      }();
      Formula mid_le_upper = [&] {
        Formula rho = rho_cache[bi];
        auto tgx = tagged(xv);
        auto tgy = tagged(yv);
        std::map<Var, Term> s;
        // first copy := mid (the yv tags), second copy := (tag_hi, u)
        for (std::size_t i = 0; i < tgx.size(); ++i) s[tgx[i]] = Term::variable(tgy[i]);
        s[tgy[0]] = Term::constant(Rational((long long)hi));
        for (std::size_t i = 0; i < m; ++i)
          s[tgy[1 + i]] = Term::variable(f.index_vars[i]);
        return rho.substitute(s);
      }();
      Formula in_block = f_eq(t_var(yv[0]), t_const((long long)bi));
      Formula delta = bd.tags[lo].base_in_type;
      beta_parts.push_back(Formula::land(
          {in_block, f.domain, delta, lower_le_mid, mid_le_upper}));
    }
  }
  DefinableFamily bfam = make_family(eliminate(ctx, Formula::lor(beta_parts)),
                                     f.index_vars, yv, f.domain);

  auto ord = order_transversal(ctx, px, bfam, /*check_order=*/false);
  if (!ord.transversal && !ord.classes.empty())
    throw certification_error("fip_transversal: order stage returned no cover");
  if (ord.indeterminate || ord.disjoint)
    throw budget_error("fip_transversal: order stage indeterminate");
  for (auto& nn : ord.notes) out.notes.push_back(nn);

  // Per class: least element of the upper side, or the limit type.
  auto bound_to_type_candidates = [&](const detail::BlockData& bd, long long tag_id,
                                      const PointVec& ustar) -> std::vector<TypePtr> {
    const detail::EdgeTag& tag = bd.tags.at(static_cast<std::size_t>(tag_id));
    const CellLayer& top = tag.cell->layers.back();
    const ExtendedBound& bound =
        top.kind == CellLayer::Graph ? top.lower : (tag.upper ? top.upper : top.lower);
    std::vector<TypePtr> cands;
    if (bound.finite()) {
      std::map<Var, Term> inst;
      for (std::size_t i = 0; i < m; ++i)
        inst[f.index_vars[i]] = Term::constant(ustar[i]);
      Term t = bound.func.term;
      for (auto& [v, e] : inst) t = t.substitute(v, e);
      Formula dom = tag.cell->prefix_formula(tag.cell->layers.size() - 1)
                        .substitute(inst);
      auto coords = type_coords(prefix.size());
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        t = t.substitute(prefix[i], Term::variable(coords[i]));
        dom = dom.substitute({{prefix[i], Term::variable(coords[i])}});
      }
      AffineFunc fn{t, eliminate(ctx, dom)};
      cands.push_back(type_graph(ctx, fn, bd.type));
      cands.push_back(type_above(ctx, ExtendedBound::of(fn), bd.type));
      cands.push_back(type_below(ctx, ExtendedBound::of(fn), bd.type));
    } else if (bound.kind == ExtendedBound::PosInf) {
      cands.push_back(type_below(ctx, ExtendedBound::pos_inf(), bd.type));
    } else {
      cands.push_back(type_above(ctx, ExtendedBound::neg_inf(), bd.type));
    }
    return cands;
  };

  TameTransversal result;
  for (auto& cls : ord.classes) {
    std::vector<TypePtr> cands;
    if (cls.realized) {
      long long bi = static_cast<long long>(cls.point.at(0));
      long long tag = static_cast<long long>(cls.point.at(1));
      PointVec ustar(cls.point.begin() + 2, cls.point.end());
      cands = bound_to_type_candidates(blocks.at(bi), tag, ustar);
    } else {
      // Least block meeting the upper side of the cut.
      std::optional<std::size_t> blk;
      Formula qx = Formula::land({px.carrier, Formula::lnot(cls.lower)});
      for (std::size_t bi = 0; bi < blocks.size() && !blk; ++bi)
        if (satisfiable(ctx, Formula::land(
                                 {qx, f_eq(t_var(xv[0]), t_const((long long)bi))})))
          blk = bi;
      if (!blk) throw certification_error("fip_transversal: empty cut upper side");
      const auto& bd = blocks[*blk];

      // Q as a formula over the block's (tag, u) index tuple.
      Formula q = [&] {
        std::map<Var, Term> sub;
        sub[xv[0]] = Term::constant(Rational((long long)*blk));
        auto tg = tagged(xv);
        for (std::size_t i = 0; i < tg.size(); ++i)
          sub[tg[i]] = Term::variable(bd.funcs.index_vars[i]);
        return eliminate(ctx, Formula::land({px.carrier, Formula::lnot(cls.lower)})
                                  .substitute(sub));
      }();

      std::set<Var> usedq(bd.funcs.index_vars.begin(), bd.funcs.index_vars.end());
      for (auto& v : q.all_vars()) usedq.insert(v);
      for (auto& v : bd.funcs.arg_vars) usedq.insert(v);
      auto qa = fresh_vars("fq_a", bd.funcs.index_vars.size(), usedq);
      for (auto& v : qa) usedq.insert(v);
      auto qb = fresh_vars("fq_b", bd.funcs.index_vars.size(), usedq);
      auto q_at = [&](const std::vector<Var>& vs) {
        std::map<Var, Term> sub;
        for (std::size_t i = 0; i < vs.size(); ++i)
          sub[bd.funcs.index_vars[i]] = Term::variable(vs[i]);
        return q.substitute(sub);
      };
      Formula rho = induced_preorder(ctx, bd.type, bd.funcs, qa, qb);
      Formula is_min = Formula::land(
          {q_at(qa), Formula::forall(qb, f_implies(q_at(qb), rho))});
      if (auto w = satisfy(ctx, is_min)) {
        PointVec xhat = extract_point(*w, qa);
        long long tag = static_cast<long long>(xhat.at(0));
        PointVec ustar(xhat.begin() + 1, xhat.end());
        cands = bound_to_type_candidates(bd, tag, ustar);
      } else {
        cands.push_back(type_limit_below(ctx, bd.funcs, q, bd.type));
        out.notes.push_back("limit-below constructor used");
      }
    }

    // The class's members must be covered by its candidates.
    std::vector<Formula> deltas;
    for (auto& cand : cands)
      deltas.push_back(
          type_member_formula(ctx, cand, f.member, f.index_vars, f.object_vars));
    if (!entails(ctx, Formula::land({f.domain, cls.delta}), Formula::lor(deltas)))
      throw certification_error("fip_transversal: class not covered by its types");
    for (auto& cand : cands) result.types.push_back(cand);
  }

  if (!verify_fft(ctx, f, result))
    throw certification_error("fip_transversal: final verification failed");
  out.transversal = std::move(result);
  return out;
}

// ---- the (m,n)-property partition ----

struct FftPartitionResult {
  std::optional<std::vector<Formula>> classes;  // over the index tuple
  std::optional<TameTransversal> transversal;
  bool not_found = false;
  std::vector<std::string> notes;
};

/// Partition of a family with the (m,n)-property, n above the dimension of
/// the union, into finitely many subfamilies extending to definable types.
inline FftPartitionResult fft_partition(const Ctx& ctx, const DefinableFamily& f, int m,
                                        int n) {
  Formula uni = eliminate(
      ctx, Formula::exists(f.index_vars, Formula::land({f.domain, f.member})));
  int d = dimension(ctx, uni, f.object_vars);
  if (n <= d)
    throw precondition_error("fft_partition: n must exceed the dimension of the union");
  auto pq = pq_property(ctx, f, m, n);
  if (!pq)
    throw precondition_error("fft_partition: the family lacks the (m,n)-property");

  FftPartitionResult out;
  auto finish = [&](TameTransversal tv) {
    std::vector<Formula> classes;
    Formula prev = Formula::f_false();
    for (auto& p : tv.types) {
      Formula delta =
          type_member_formula(ctx, p, f.member, f.index_vars, f.object_vars);
      classes.push_back(
          eliminate(ctx, Formula::land({f.domain, delta, Formula::lnot(prev)})));
      prev = Formula::lor({prev, delta});
    }
    out.classes = std::move(classes);
    out.transversal = std::move(tv);
  };

  // Fully consistent families go through the 2^n construction.
  if (f.object_arity() <= 4) {
    auto cons = n_consistent(ctx, f, 1 << f.object_arity());
    if (cons) {
      auto fip = fip_transversal(ctx, f);
      for (auto& nn : fip.notes) out.notes.push_back(nn);
      finish(std::move(fip.transversal));
      return out;
    }
  }

  // Greedy cover from the search grammar.
  TameTransversal tv;
  Formula covered = Formula::f_false();
  for (auto& cand : search_candidate_types(ctx, f)) {
    ctx.cancel.check();
    if (entails(ctx, f.domain, covered)) break;
    Formula delta =
        type_member_formula(ctx, cand, f.member, f.index_vars, f.object_vars);
    if (!satisfiable(ctx, Formula::land({f.domain, delta, Formula::lnot(covered)})))
      continue;
    tv.types.push_back(cand);
    covered = Formula::lor({covered, delta});
  }
  if (!entails(ctx, f.domain, covered)) {
    out.not_found = true;
    out.notes.push_back(
        "partition guaranteed to exist but not found within the search grammar");
    return out;
  }
  finish(std::move(tv));
  return out;
}

// ---- product lift, Venn probes ----

/// F(S) = (S x M^{l-1}) u (M x S x M^{l-2}) u ... u (M^{l-1} x S).
inline DefinableFamily product_lift(const Ctx& ctx, const DefinableFamily& f, int l) {
  if (l < 1) throw precondition_error("product_lift: l must be positive");
  if (l == 1) return f;
  (void)ctx;
  std::set<Var> used = f.all_vars();
  std::vector<std::vector<Var>> blocks;
  for (int i = 0; i < l; ++i) {
    std::vector<Var> blk;
    for (auto& v : f.object_vars) {
      Var fresh = Formula::fresh_var(v + "_" + std::to_string(i + 1), used);
      used.insert(fresh);
      blk.push_back(fresh);
    }
    blocks.push_back(std::move(blk));
  }
  std::vector<Formula> parts;
  for (int i = 0; i < l; ++i)
    parts.push_back(f.member_at(f.index_vars, blocks[i]));
  std::vector<Var> object;
  for (auto& blk : blocks) object.insert(object.end(), blk.begin(), blk.end());
  return make_family(Formula::lor(parts), f.index_vars, object, f.domain);
}

/// Number of nonempty sign patterns carved by the chosen members, the
/// all-outside pattern excluded.
inline int venn_count(const Ctx& ctx, const DefinableFamily& f,
                      const std::vector<PointVec>& indices) {
  if (indices.size() > 16) throw budget_error("venn_count: too many members");
  std::vector<Formula> fibers;
  for (auto& u : indices) fibers.push_back(f.fiber(u));
  int count = 0;
  for (std::uint64_t mask = 1; mask < (1ull << indices.size()); ++mask) {
    std::vector<Formula> cs;
    for (std::size_t i = 0; i < indices.size(); ++i)
      cs.push_back(mask >> i & 1 ? fibers[i] : Formula::lnot(fibers[i]));
    if (satisfiable(ctx, Formula::land(cs))) ++count;
  }
  return count;
}

/// Certified lower bound for the dual shatter function at n: the largest
/// Venn count over probed index n-tuples.
inline int dual_shatter_lower_bound(const Ctx& ctx, const DefinableFamily& f, int n,
                                    int trials = 24) {
  std::mt19937_64 rng(0x5eed + 31 * n);
  std::uniform_int_distribution<int> num(-n - 2, n + 2);
  std::uniform_int_distribution<int> den(1, 2);
  int best = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<PointVec> tuple;
    for (int k = 0; k < n; ++k) {
      PointVec p;
      for (std::size_t c = 0; c < f.index_arity(); ++c) {
        if (t == 0) {
          // deterministic spread-out probe first
          p.push_back(Rational((k + 1) * (static_cast<int>(c) + 2) + k));
        } else {
          p.push_back(Rational(num(rng), den(rng)));
        }
      }
      tuple.push_back(std::move(p));
    }
    bool in_domain = true;
    for (auto& p : tuple)
      in_domain = in_domain && f.domain.evaluate_qf(bind_point(f.index_vars, p));
    if (!in_domain) continue;
    best = std::max(best, venn_count(ctx, f, tuple));
    if (best == (1 << n) - 1) break;
  }
  return best;
}

// ---- bounded interval unions on the line ----

struct KIntervalResult {
  std::optional<std::vector<Rational>> points;
  std::optional<TypePtr> type;
  std::vector<std::string> notes;
};

/// For a (k+1)-consistent family of at-most-k interval unions on the line:
/// a finite rational transversal, or a single definable type containing
/// every member.
inline KIntervalResult kplus1_interval_analysis(const Ctx& ctx, const DefinableFamily& f,
                                                int k) {
  if (f.object_arity() != 1)
    throw arity_error("kplus1_interval_analysis: object arity must be 1");
  Formula member_qf = f.member.has_quantifiers() ? eliminate(ctx, f.member) : f.member;
  UniformDecomposition joint =
      uniform_decompose(ctx, member_qf, f.index_vars, f.object_vars);
  // Pieces per fiber: in-target cells grouped by their index-cell.
  std::map<std::string, int> per_base;
  for (const Cell& c : joint.joint.cells) {
    if (!cell_in_target(c, member_qf)) continue;
    ++per_base[c.prefix_formula(f.index_arity()).key()];
  }
  for (auto& [kk, cnt] : per_base)
    if (cnt > k)
      throw precondition_error("kplus1_interval_analysis: a fiber has more than " +
                               std::to_string(k) + " pieces");
  auto cons = n_consistent(ctx, f, k + 1);
  if (!cons)
    throw precondition_error("kplus1_interval_analysis: family is not " +
                             std::to_string(k + 1) + "-consistent");

  KIntervalResult out;

  // Rational transversal by critical-point enumeration.
  std::vector<Rational> candidates;
  auto add_cand = [&](const Rational& r) {
    if (std::find(candidates.begin(), candidates.end(), r) == candidates.end())
      candidates.push_back(r);
  };
  std::vector<Term> eqs, lts;
  detail::collect_atoms(member_qf, eqs, lts);
  std::set<Var> ivars(f.index_vars.begin(), f.index_vars.end());
  for (auto atoms : {&eqs, &lts})
    for (auto& t : *atoms) {
      if (!t.mentions(f.object_vars[0])) continue;
      Term e = t.solved_for(f.object_vars[0]);
      if (e.is_constant()) add_cand(e.constant_part());
    }
  {
    std::vector<Rational> base = candidates;
    std::sort(base.begin(), base.end());
    for (std::size_t i = 0; i + 1 < base.size(); ++i)
      add_cand((base[i] + base[i + 1]) / 2);
    if (!base.empty()) {
      add_cand(base.front() - 1);
      add_cand(base.back() + 1);
    }
    add_cand(Rational(0));
  }
  std::vector<Rational> picked;
  Formula covered = Formula::f_false();
  for (int round = 0; round < 2 * k + 2; ++round) {
    if (entails(ctx, f.domain, covered)) break;
    bool progress = false;
    for (auto& c : candidates) {
      Formula delta = member_qf.substitute({{f.object_vars[0], Term::constant(c)}});
      if (satisfiable(ctx, Formula::land({f.domain, Formula::lnot(covered), delta})) &&
          entails(ctx, Formula::land({f.domain, Formula::lnot(covered)}), delta)) {
        picked.push_back(c);
        covered = Formula::lor({covered, delta});
        progress = true;
        break;
      }
    }
    if (!progress) {
      // fall back to any candidate making progress
      for (auto& c : candidates) {
        Formula delta = member_qf.substitute({{f.object_vars[0], Term::constant(c)}});
        if (satisfiable(ctx,
                        Formula::land({f.domain, Formula::lnot(covered), delta}))) {
          picked.push_back(c);
          covered = Formula::lor({covered, delta});
          progress = true;
          break;
        }
      }
    }
    if (!progress) break;
  }
  if (entails(ctx, f.domain, covered)) {
    out.points = std::move(picked);
    return out;
  }

  // A single type containing every member.
  for (auto& lower : detail::cut_candidates(ctx, line_order(), f)) {
    Formula delta = detail::straddle_formula(ctx, line_order(), f, lower);
    if (!entails(ctx, f.domain, delta)) continue;
    auto ty = detail::cut_type(ctx, line_order(), lower, out.notes);
    if (!ty) continue;
    if (!family_in_type(ctx, *ty, f)) continue;
    out.type = *ty;
    return out;
  }
  throw budget_error(
      "kplus1_interval_analysis: neither a rational transversal nor a single type found");
}

}  // namespace ominal

#endif  // OMINAL_TRANSVERSAL_HPP
