#ifndef OMINAL_FAMILY_HPP
#define OMINAL_FAMILY_HPP

#include "ominal/cells.hpp"

namespace ominal {

using PointVec = std::vector<Rational>;

inline Assignment bind_point(const std::vector<Var>& vars, const PointVec& p) {
  if (vars.size() != p.size()) throw arity_error("point arity mismatch");
  Assignment asg;
  for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = p[i];
  return asg;
}

inline PointVec extract_point(const Assignment& asg, const std::vector<Var>& vars) {
  PointVec p;
  p.reserve(vars.size());
  for (auto& v : vars) {
    auto it = asg.find(v);
    p.push_back(it == asg.end() ? Rational(0) : it->second);
  }
  return p;
}

inline std::vector<Var> fresh_vars(const std::string& base, std::size_t n,
                                   std::set<Var>& used) {
  std::vector<Var> out;
  for (std::size_t i = 0; i < n; ++i) {
    Var v = Formula::fresh_var(base + std::to_string(i), used);
    used.insert(v);
    out.push_back(v);
  }
  return out;
}

/// Definable family of subsets of M^n: a member formula over index and
/// object tuples plus an index-domain formula.
struct DefinableFamily {
  Formula member;               // phi(u, v)
  std::vector<Var> index_vars;  // u
  std::vector<Var> object_vars; // v
  Formula domain = Formula::f_true();  // Omega(u)

  std::size_t index_arity() const { return index_vars.size(); }
  std::size_t object_arity() const { return object_vars.size(); }

  void validate() const {
    std::set<Var> iv(index_vars.begin(), index_vars.end());
    std::set<Var> ov(object_vars.begin(), object_vars.end());
    if (iv.size() != index_vars.size() || ov.size() != object_vars.size())
      throw error("family: repeated variable in tuple");
    for (auto& v : ov)
      if (iv.count(v)) throw error("family: index/object tuples overlap");
    for (auto& v : member.free_vars())
      if (!iv.count(v) && !ov.count(v))
        throw error("family: member formula mentions stray variable '" + v + "'");
    for (auto& v : domain.free_vars())
      if (!iv.count(v)) throw error("family: domain mentions non-index variable '" + v + "'");
  }

  /// Member formula with both tuples renamed.
  Formula member_at(const std::vector<Var>& iv, const std::vector<Var>& ov) const {
    if (iv.size() != index_arity() || ov.size() != object_arity())
      throw arity_error("member_at: tuple arity mismatch");
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < iv.size(); ++i)
      sub[index_vars[i]] = Term::variable(iv[i]);
    for (std::size_t i = 0; i < ov.size(); ++i)
      sub[object_vars[i]] = Term::variable(ov[i]);
    return member.substitute(sub);
  }

  Formula domain_at(const std::vector<Var>& iv) const {
    if (iv.size() != index_arity()) throw arity_error("domain_at: tuple arity mismatch");
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < iv.size(); ++i)
      sub[index_vars[i]] = Term::variable(iv[i]);
    return domain.substitute(sub);
  }

  /// The fiber over a concrete index point, as a formula over object_vars.
  Formula fiber(const PointVec& u) const {
    if (u.size() != index_arity()) throw arity_error("fiber: index arity mismatch");
    std::map<Var, Term> sub;
    for (std::size_t i = 0; i < u.size(); ++i)
      sub[index_vars[i]] = Term::constant(u[i]);
    return member.substitute(sub);
  }

  std::set<Var> all_vars() const {
    std::set<Var> used(index_vars.begin(), index_vars.end());
    used.insert(object_vars.begin(), object_vars.end());
    for (auto& v : member.all_vars()) used.insert(v);
    for (auto& v : domain.all_vars()) used.insert(v);
    return used;
  }
};

inline DefinableFamily make_family(Formula member, std::vector<Var> index_vars,
                                   std::vector<Var> object_vars,
                                   Formula domain = Formula::f_true()) {
  DefinableFamily f{std::move(member), std::move(index_vars), std::move(object_vars),
                    std::move(domain)};
  f.validate();
  return f;
}

/// Check result carrying index-point witnesses for failures.
struct FamilyCheck {
  bool value = false;
  std::vector<PointVec> witness;  // meaning depends on the predicate
  explicit operator bool() const { return value; }
};

namespace detail {

inline void require_inhabited(const Ctx& ctx, const DefinableFamily& f,
                              const char* op) {
  if (!satisfiable(ctx, f.domain))
    throw precondition_error(std::string(op) + ": empty index domain");
}

}  // namespace detail

/// Every fiber over the index domain is nonempty.
inline bool is_nonempty_all(const Ctx& ctx, const DefinableFamily& f) {
  detail::require_inhabited(ctx, f, "is_nonempty_all");
  Formula inner = Formula::exists(f.object_vars, f.member);
  return holds(ctx, Formula::forall(f.index_vars,
                                    f_implies(f.domain, inner)));
}

/// Downward directed: any two members contain a third; members nonempty.
inline FamilyCheck is_downward_directed(const Ctx& ctx, const DefinableFamily& f) {
  detail::require_inhabited(ctx, f, "is_downward_directed");
  if (!is_nonempty_all(ctx, f)) return {false, {}};

  std::set<Var> used = f.all_vars();
  auto u1 = fresh_vars("dd_a", f.index_arity(), used);
  auto u2 = fresh_vars("dd_b", f.index_arity(), used);
  auto u3 = fresh_vars("dd_c", f.index_arity(), used);

  // Chains are directed; this check has no quantifier alternation over the
  // index tuple and settles the common case cheaply.
  Formula one_in_two = Formula::forall(
      f.object_vars, f_implies(f.member_at(u1, f.object_vars),
                               f.member_at(u2, f.object_vars)));
  Formula two_in_one = Formula::forall(
      f.object_vars, f_implies(f.member_at(u2, f.object_vars),
                               f.member_at(u1, f.object_vars)));
  Formula chain = Formula::forall(
      u1, Formula::forall(
              u2, f_implies(Formula::land({f.domain_at(u1), f.domain_at(u2)}),
                            Formula::lor({one_in_two, two_in_one}))));
  if (holds(ctx, chain)) return {true, {}};

  Formula contained = Formula::forall(
      f.object_vars,
      f_implies(f.member_at(u3, f.object_vars),
                Formula::land({f.member_at(u1, f.object_vars),
                               f.member_at(u2, f.object_vars)})));
  Formula exists_below =
      Formula::exists(u3, Formula::land({f.domain_at(u3), contained}));
  Formula bad = Formula::land({f.domain_at(u1), f.domain_at(u2),
                               Formula::lnot(exists_below)});
  if (auto w = satisfy(ctx, bad))
    return {false, {extract_point(*w, u1), extract_point(*w, u2)}};
  return {true, {}};
}

/// F is finer than G: every member of G contains some member of F.
inline FamilyCheck is_finer(const Ctx& ctx, const DefinableFamily& fine,
                            const DefinableFamily& coarse) {
  if (fine.object_arity() != coarse.object_arity())
    throw arity_error("is_finer: object arity mismatch");
  detail::require_inhabited(ctx, fine, "is_finer");
  detail::require_inhabited(ctx, coarse, "is_finer");

  std::set<Var> used = fine.all_vars();
  for (auto& v : coarse.all_vars()) used.insert(v);
  auto ug = fresh_vars("fn_g", coarse.index_arity(), used);
  auto wf = fresh_vars("fn_f", fine.index_arity(), used);
  auto ov = fresh_vars("fn_v", fine.object_arity(), used);

  Formula inside = Formula::forall(
      ov, f_implies(fine.member_at(wf, ov), coarse.member_at(ug, ov)));
  Formula has_fine = Formula::exists(wf, Formula::land({fine.domain_at(wf), inside}));
  Formula bad = Formula::land({coarse.domain_at(ug), Formula::lnot(has_fine)});
  if (auto w = satisfy(ctx, bad)) return {false, {extract_point(*w, ug)}};
  return {true, {}};
}

/// Complete for a single set X: some member lies inside X or misses it.
inline bool is_complete_for(const Ctx& ctx, const DefinableFamily& f, const Formula& x,
                            const std::vector<Var>& x_vars) {
  auto dd = is_downward_directed(ctx, f);
  if (!dd) throw precondition_error("is_complete_for: family is not downward directed");
  std::set<Var> used = f.all_vars();
  for (auto& v : x.free_vars()) used.insert(v);
  auto wf = fresh_vars("cp_f", f.index_arity(), used);
  auto ov = fresh_vars("cp_v", f.object_arity(), used);
  std::map<Var, Term> xsub;
  if (x_vars.size() != f.object_arity())
    throw arity_error("is_complete_for: set arity mismatch");
  for (auto& v : x.free_vars())
    if (!std::count(x_vars.begin(), x_vars.end(), v))
      throw arity_error("is_complete_for: set mentions stray variable '" + v + "'");
  for (std::size_t i = 0; i < x_vars.size(); ++i)
    xsub[x_vars[i]] = Term::variable(ov[i]);
  Formula xv = x.substitute(xsub);
  Formula inside = Formula::forall(ov, f_implies(f.member_at(wf, ov), xv));
  Formula disjoint =
      Formula::forall(ov, f_implies(f.member_at(wf, ov), Formula::lnot(xv)));
  return holds(ctx, Formula::exists(
                        wf, Formula::land({f.domain_at(wf),
                                           Formula::lor({inside, disjoint})})));
}

/// Complete for every fiber of another family; witness is an offending
/// index point of `xs`.
inline FamilyCheck is_complete_for(const Ctx& ctx, const DefinableFamily& f,
                                   const DefinableFamily& xs) {
  auto dd = is_downward_directed(ctx, f);
  if (!dd) throw precondition_error("is_complete_for: family is not downward directed");
  if (f.object_arity() != xs.object_arity())
    throw arity_error("is_complete_for: object arity mismatch");
  detail::require_inhabited(ctx, xs, "is_complete_for");

  std::set<Var> used = f.all_vars();
  for (auto& v : xs.all_vars()) used.insert(v);
  auto ux = fresh_vars("cx_x", xs.index_arity(), used);
  auto wf = fresh_vars("cx_f", f.index_arity(), used);
  auto ov = fresh_vars("cx_v", f.object_arity(), used);

  Formula xv = xs.member_at(ux, ov);
  Formula inside = Formula::forall(ov, f_implies(f.member_at(wf, ov), xv));
  Formula disjoint =
      Formula::forall(ov, f_implies(f.member_at(wf, ov), Formula::lnot(xv)));
  Formula good = Formula::exists(
      wf, Formula::land({f.domain_at(wf), Formula::lor({inside, disjoint})}));
  Formula bad = Formula::land({xs.domain_at(ux), Formula::lnot(good)});
  if (auto w = satisfy(ctx, bad)) return {false, {extract_point(*w, ux)}};
  return {true, {}};
}

/// The family {S cap X : S in F}.
inline DefinableFamily intersect_family(const Ctx& ctx, const DefinableFamily& f,
                                        const Formula& x, const std::vector<Var>& x_vars) {
  if (x_vars.size() != f.object_arity())
    throw arity_error("intersect_family: arity mismatch");
  (void)ctx;
  std::map<Var, Term> sub;
  for (std::size_t i = 0; i < x_vars.size(); ++i)
    sub[x_vars[i]] = Term::variable(f.object_vars[i]);
  DefinableFamily out = f;
  out.member = Formula::land({f.member, x.substitute(sub)});
  return out;
}

/// Family whose fibers are cells of one fixed layer schema.  Layer bound
/// terms may mention the index tuple and the earlier object coordinates.
struct CellFamily {
  DefinableFamily fam;
  std::vector<CellLayer> schema;
};

/// Builds the member formula for a layer schema and wraps it as a family.
inline CellFamily make_cell_family(std::vector<CellLayer> schema,
                                   std::vector<Var> index_vars,
                                   std::vector<Var> object_vars, Formula domain) {
  std::vector<Formula> cs;
  for (std::size_t k = 0; k < schema.size(); ++k) {
    Term vk = Term::variable(object_vars.at(k));
    const CellLayer& l = schema[k];
    if (l.kind == CellLayer::Graph) {
      cs.push_back(f_eq(vk, l.func().term));
    } else {
      if (l.lower.finite()) cs.push_back(f_lt(l.lower.func.term, vk));
      if (l.upper.finite()) cs.push_back(f_lt(vk, l.upper.func.term));
    }
  }
  CellFamily cf;
  cf.fam = make_family(Formula::land(std::move(cs)), std::move(index_vars),
                       std::move(object_vars), std::move(domain));
  cf.schema = std::move(schema);
  return cf;
}

}  // namespace ominal

#endif  // OMINAL_FAMILY_HPP
