#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ominal/types.hpp"

using namespace omt;

namespace {

AffineFunc identity1() { return {t_var(type_coord(0)), Formula::f_true()}; }
AffineFunc const_fn(long long c) { return {t_const(c), Formula::f_true()}; }

/// h_t(a) = t on the whole line, indexed by t > 0.
FunctionFamily shrinking_constants() {
  FunctionFamily h;
  h.index_vars = {"t"};
  h.index_domain = F("(< 0 t)");
  h.arg_vars = {"a"};
  h.value_var = "s";
  h.graph = F("(= s t)");
  return h;
}

}  // namespace

TEST_CASE("membership for one-dimensional types") {
  Ctx ctx = ctx_odag();
  CHECK(type_member(ctx, type_plus_inf(), F("(!= v 0)"), {"v"}));
  CHECK_FALSE(type_member(ctx, type_cut_plus(2), F("(and (< 0 v) (< v 1))"), {"v"}));
  CHECK(type_member(ctx, type_cut_plus(0), F("(and (< 0 v) (< v 1))"), {"v"}));
  CHECK(type_member(ctx, type_cut_minus(0), F("(< v 0)"), {"v"}));
  CHECK_FALSE(type_member(ctx, type_cut_minus(0), F("(<= 0 v)"), {"v"}));
  CHECK(type_member(ctx, type_minus_inf(), F("(< v -100)"), {"v"}));
  CHECK(type_member(ctx, type_realized({Rational(3)}), F("(<= 3 v)"), {"v"}));
}

TEST_CASE("membership through composite constructors") {
  Ctx ctx = ctx_odag();
  SECTION("the quadrant corner family shape") {
    TypePtr p = type_below(ctx, ExtendedBound::of(const_fn(0)), type_plus_inf());
    CHECK(type_member(ctx, p, F("(and (< y 0) (< 3 x))"), {"x", "y"}));
    CHECK_FALSE(type_member(ctx, p, F("(and (< 0 y) (< 3 x))"), {"x", "y"}));
  }
  SECTION("graph of the identity over the type at +inf") {
    TypePtr p = type_graph(ctx, identity1(), type_plus_inf());
    CHECK(type_member(ctx, p, F("(= y x)"), {"x", "y"}));
    CHECK(type_member(ctx, p, F("(and (< 5 x) (< (- x 1) y) (< y (+ x 1)))"),
                      {"x", "y"}));
    CHECK_FALSE(type_member(ctx, p, F("(< y x)"), {"x", "y"}));
  }
  SECTION("above the horizontal axis approaching zero") {
    TypePtr p = type_above(ctx, ExtendedBound::of(const_fn(0)), type_cut_plus(0));
    CHECK(type_member(ctx, p, F("(and (< 0 x) (< 0 y) (< y x))"), {"x", "y"}));
    CHECK(type_member(ctx, p, F("(and (< 0 x) (< 0 y))"), {"x", "y"}));
    CHECK_FALSE(type_member(ctx, p, F("(< y 0)"), {"x", "y"}));
  }
  SECTION("below +inf: the far upper region") {
    TypePtr p = type_below(ctx, ExtendedBound::pos_inf(), type_plus_inf());
    CHECK(type_member(ctx, p, F("(and (< 3 x) (< x y))"), {"x", "y"}));
    CHECK_FALSE(type_member(ctx, p, F("(< y x)"), {"x", "y"}));
  }
  SECTION("above -inf: the far lower region") {
    TypePtr p = type_above(ctx, ExtendedBound::neg_inf(), type_plus_inf());
    CHECK(type_member(ctx, p, F("(and (< 3 x) (< y (- 0 x)))"), {"x", "y"}));
    CHECK_FALSE(type_member(ctx, p, F("(< 0 y)"), {"x", "y"}));
  }
}

TEST_CASE("limit-below membership via the cell criterion") {
  Ctx ctx = ctx_odag();
  TypePtr q = type_limit_below(ctx, shrinking_constants(), F("(< 0 t)"),
                               type_cut_plus(0));
  CHECK(type_member(ctx, q, F("(and (< 0 x) (< x 1) (< 0 y) (< y 1))"), {"x", "y"}));
  // The pinched wedge 0<y<x is not in the limit type: no constant fits
  // under the wedge on a right neighbourhood of zero.
  CHECK_FALSE(type_member(ctx, q, F("(and (< 0 x) (< 0 y) (< y x))"), {"x", "y"}));
  TypePtr a = type_above(ctx, ExtendedBound::of(const_fn(0)), type_cut_plus(0));
  CHECK(type_member(ctx, a, F("(and (< 0 x) (< 0 y) (< y x))"), {"x", "y"}));
  CHECK_FALSE(type_member(ctx, q, F("(and (< 0 x) (< 2 y) (< y 3))"), {"x", "y"}));
}

TEST_CASE("limit-below construction guards") {
  Ctx ctx = ctx_odag();
  CHECK_THROWS_AS(type_limit_below(ctx, shrinking_constants(), F("(>= t 1)"),
                                   type_cut_plus(0)),
                  precondition_error);
  CHECK_THROWS_AS(type_limit_below(ctx, shrinking_constants(), F("(< t 0)"),
                                   type_cut_plus(0)),
                  precondition_error);
}

TEST_CASE("type dimension") {
  Ctx ctx = ctx_odag();
  CHECK(type_dimension(type_realized({Rational(1), Rational(2)})) == 0);
  CHECK(type_dimension(type_cut_plus(0)) == 1);
  TypePtr above = type_above(ctx, ExtendedBound::of(identity1()), type_cut_plus(0));
  CHECK(type_dimension(above) == 2);
  TypePtr graph = type_graph(ctx, identity1(), type_plus_inf());
  CHECK(type_dimension(graph) == 1);
}

TEST_CASE("project_type") {
  Ctx ctx = ctx_odag();
  TypePtr g = type_graph(ctx, identity1(), type_plus_inf());
  CHECK(project_type(g)->kind == DefinableType::PlusInf);
  TypePtr a = type_above(ctx, ExtendedBound::of(identity1()), type_cut_minus(0));
  CHECK(project_type(a)->kind == DefinableType::CutMinus);
  CHECK_THROWS_AS(project_type(type_plus_inf()), arity_error);

  SECTION("projection coherence on sampled sets") {
    Ctx c2 = ctx_odag();
    Rng rng(8112);
    TypePtr p = type_above(c2, ExtendedBound::of(const_fn(0)), type_cut_plus(0));
    for (int i = 0; i < 15; ++i) {
      Formula x = eliminate(c2, random_formula(rng, {"x", "y"}, 2));
      if (type_member(c2, p, x, {"x", "y"})) {
        Formula px = project(c2, x, 1, {"x", "y"});
        CHECK(type_member(c2, project_type(p), px, {"x"}));
      }
    }
  }
}

TEST_CASE("preorder_compare") {
  Ctx ctx = ctx_odag();
  AffineFunc id = identity1();
  AffineFunc id_plus_1{t_var(type_coord(0)) + t_const(1), Formula::f_true()};
  AffineFunc twice{t_var(type_coord(0)) * Rational(2), Formula::f_true()};
  TypePtr inf = type_plus_inf();
  CHECK(preorder_compare(ctx, inf, id, id_plus_1) == PreorderCmp::Less);
  CHECK(preorder_compare(ctx, inf, id, twice) == PreorderCmp::Less);
  TypePtr cp0 = type_cut_plus(0);
  CHECK(preorder_compare(ctx, cp0, id, twice) == PreorderCmp::Less);
  CHECK(preorder_compare(ctx, cp0, twice, id) == PreorderCmp::Greater);
  CHECK(preorder_compare(ctx, cp0, id, id) == PreorderCmp::Equivalent);
  TypePtr cm0 = type_cut_minus(0);
  CHECK(preorder_compare(ctx, cm0, id, twice) == PreorderCmp::Greater);
}

TEST_CASE("induced preorder as a formula") {
  Ctx ctx = ctx_odag();
  SECTION("shifts ordered by their offset at +inf") {
    FunctionFamily h;
    h.index_vars = {"u"};
    h.arg_vars = {"a"};
    h.value_var = "s";
    h.graph = F("(= s (+ a u))");
    check_function_family(ctx, h);
    Formula rho = induced_preorder(ctx, type_plus_inf(), h, {"u"}, {"u'"});
    CHECK(equivalent(ctx, rho, F("(<= u u')")));
  }
  SECTION("constants ordered by value") {
    FunctionFamily h;
    h.index_vars = {"u"};
    h.arg_vars = {"a"};
    h.value_var = "s";
    h.graph = F("(= s u)");
    Formula rho = induced_preorder(ctx, type_plus_inf(), h, {"u"}, {"u'"});
    CHECK(equivalent(ctx, rho, F("(<= u u')")));
  }
  SECTION("shifts at a right cut") {
    FunctionFamily h;
    h.index_vars = {"u"};
    h.arg_vars = {"a"};
    h.value_var = "s";
    h.graph = F("(= s (+ a u))");
    Formula rho = induced_preorder(ctx, type_cut_plus(0), h, {"u"}, {"u'"});
    CHECK(equivalent(ctx, rho, F("(<= u u')")));
  }
}

TEST_CASE("ultrafilter laws on a random battery") {
  Ctx ctx = ctx_odag();
  Rng rng(550);

  std::vector<std::pair<TypePtr, std::vector<Var>>> types;
  types.push_back({type_plus_inf(), {"x"}});
  types.push_back({type_cut_plus(0), {"x"}});
  types.push_back({type_cut_minus(Rational(1, 2)), {"x"}});
  types.push_back({type_realized({Rational(1), Rational(2)}), {"x", "y"}});
  types.push_back({type_graph(ctx, identity1(), type_plus_inf()), {"x", "y"}});
  types.push_back({type_above(ctx, ExtendedBound::of(const_fn(0)), type_cut_plus(0)),
                   {"x", "y"}});
  types.push_back({type_below(ctx, ExtendedBound::pos_inf(), type_plus_inf()),
                   {"x", "y"}});
  types.push_back({type_limit_below(ctx, shrinking_constants(), F("(< 0 t)"),
                                    type_cut_plus(0)),
                   {"x", "y"}});

  for (auto& [p, vars] : types) {
    CHECK_FALSE(type_member(ctx, p, Formula::f_false(), vars));
    CHECK(type_member(ctx, p, Formula::f_true(), vars));
    std::vector<Formula> members;
    for (int i = 0; i < 10; ++i) {
      Formula x = eliminate(ctx, random_formula(rng, vars, 2));
      bool in = type_member(ctx, p, x, vars);
      bool out = type_member(ctx, p, Formula::lnot(x), vars);
      CHECK(in != out);
      if (in) members.push_back(x);
    }
    for (std::size_t i = 0; i + 1 < members.size(); i += 2)
      CHECK(type_member(ctx, p, Formula::land({members[i], members[i + 1]}), vars));
    for (auto& x : members) {
      Formula y = Formula::lor({x, eliminate(ctx, random_formula(rng, vars, 2))});
      CHECK(type_member(ctx, p, y, vars));
    }
  }
}

TEST_CASE("symbolic membership agrees with pointwise membership") {
  Ctx ctx = ctx_odag();
  Rng rng(977);

  std::vector<std::pair<TypePtr, std::vector<Var>>> types;
  types.push_back({type_plus_inf(), {"v"}});
  types.push_back({type_cut_plus(0), {"v"}});
  types.push_back({type_above(ctx, ExtendedBound::of(const_fn(0)), type_cut_plus(0)),
                   {"v", "w"}});

  for (auto& [p, vars] : types) {
    for (int i = 0; i < 6; ++i) {
      std::vector<Var> all = vars;
      all.push_back("u");
      Formula phi = eliminate(ctx, random_formula(rng, all, 2));
      Formula delta = type_member_formula(ctx, p, phi, {"u"}, vars);
      for (int s = 0; s < 5; ++s) {
        Rational u0 = random_rational(rng);
        Formula inst = phi.substitute({{"u", Term::constant(u0)}});
        CHECK(type_member(ctx, p, inst, vars) ==
              delta.evaluate_qf({{"u", u0}}));
      }
    }
  }

  SECTION("explicit parameterized membership formulas") {
    Formula d1 = type_member_formula(ctx, type_plus_inf(), F("(< u v)"), {"u"}, {"v"});
    CHECK(equivalent(ctx, d1, Formula::f_true()));
    Formula d2 = type_member_formula(ctx, type_plus_inf(), F("(< v u)"), {"u"}, {"v"});
    CHECK(equivalent(ctx, d2, Formula::f_false()));
    Formula d3 = type_member_formula(ctx, type_cut_plus(0),
                                     F("(and (< 0 v) (< v u))"), {"u"}, {"v"});
    CHECK(equivalent(ctx, d3, F("(< 0 u)")));
  }
}

TEST_CASE("preorder totality and transitivity on sampled functions") {
  Ctx ctx = ctx_odag();
  Rng rng(31);
  TypePtr p = type_plus_inf();
  std::vector<AffineFunc> fs;
  for (int i = 0; i < 6; ++i) {
    Term t = t_var(type_coord(0)) * random_rational(rng, 2, 1) +
             Term::constant(random_rational(rng));
    fs.push_back({t, Formula::f_true()});
  }
  auto leq = [&](int i, int j) {
    return preorder_compare(ctx, p, fs[i], fs[j]) != PreorderCmp::Greater;
  };
  for (int i = 0; i < (int)fs.size(); ++i)
    for (int j = 0; j < (int)fs.size(); ++j) {
      CHECK((leq(i, j) || leq(j, i)));
      for (int k = 0; k < (int)fs.size(); ++k)
        if (leq(i, j) && leq(j, k)) CHECK(leq(i, k));
    }
}
