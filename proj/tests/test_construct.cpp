#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ominal/construct.hpp"

using namespace omt;

namespace {

DefinableFamily upper_rays() { return make_family(F("(< t v)"), {"t"}, {"v"}); }

DefinableFamily right_intervals() {
  return make_family(F("(and (< 0 v) (< v t))"), {"t"}, {"v"}, F("(< 0 t)"));
}

DefinableFamily symmetric_intervals() {
  return make_family(F("(and (< (- 0 t) v) (< v t))"), {"t"}, {"v"}, F("(< 0 t)"));
}

DefinableFamily half_open_intervals() {  // {[0, t) : t > 0}
  return make_family(F("(and (<= 0 v) (< v t))"), {"t"}, {"v"}, F("(< 0 t)"));
}

DefinableFamily quadrant_tails() {  // {(x,y) : y < 0, x > t}
  return make_family(F("(and (< y 0) (< t x))"), {"t"}, {"x", "y"});
}

DefinableFamily corner_boxes() {  // {(0,t) x (0,t) : t > 0}
  return make_family(F("(and (< 0 x) (< x t) (< 0 y) (< y t))"), {"t"}, {"x", "y"},
                     F("(< 0 t)"));
}

DefinableFamily product_rays() {  // {[u,inf) x [u,inf) : u}
  return make_family(F("(and (<= u x) (<= u y))"), {"u"}, {"x", "y"});
}

DefinableFamily diagonal_strips() {  // {(x,y): x>0, x-u < y < x+u}, u>0
  return make_family(F("(and (< 0 x) (< (- x u) y) (< y (+ x u)))"), {"u"},
                     {"x", "y"}, F("(< 0 u)"));
}

DefinableFamily crosses() {
  return make_family(F("(or (= a u) (= b w))"), {"u", "w"}, {"a", "b"});
}

bool mutually_finer(const Ctx& ctx, const DefinableFamily& a, const DefinableFamily& b) {
  return is_finer(ctx, a, b).value && is_finer(ctx, b, a).value;
}

}  // namespace

TEST_CASE("extend_dd_to_type base cases with branch traces") {
  Ctx ctx = ctx_odag();
  SECTION("upper rays go to +inf") {
    auto r = extend_dd_to_type(ctx, upper_rays());
    CHECK(r.type->kind == DefinableType::PlusInf);
    REQUIRE(r.traces.size() == 1);
    CHECK(r.traces[0].branch == "sup-not-in-h");
    REQUIRE(r.traces[0].sup);
    CHECK(r.traces[0].sup->kind == ExtRational::PosInf);
    CHECK(equivalent(ctx, r.traces[0].h_set, Formula::f_true()));
  }
  SECTION("right intervals give the right cut at 0") {
    auto r = extend_dd_to_type(ctx, right_intervals());
    REQUIRE(r.type->kind == DefinableType::CutPlus);
    CHECK(r.type->cut == 0);
    CHECK(r.traces[0].branch == "max-in-h");
    CHECK(equivalent(ctx, r.traces[0].h_set,
                     f_le(t_var(r.traces[0].h_var), t_const(0))));
  }
  SECTION("symmetric intervals give the left cut at 0") {
    auto r = extend_dd_to_type(ctx, symmetric_intervals());
    REQUIRE(r.type->kind == DefinableType::CutMinus);
    CHECK(r.type->cut == 0);
    CHECK(r.traces[0].branch == "sup-not-in-h");
    REQUIRE(r.traces[0].sup);
    CHECK(r.traces[0].sup->value == 0);
    CHECK(equivalent(ctx, r.traces[0].h_set, f_lt(t_var(r.traces[0].h_var), t_const(0))));
  }
  SECTION("half-open intervals fall back to the realized common point") {
    auto r = extend_dd_to_type(ctx, half_open_intervals());
    REQUIRE(r.type->kind == DefinableType::Realized);
    CHECK(r.type->point == PointVec{Rational(0)});
    CHECK(r.traces[0].branch == "realized");
  }
  SECTION("precondition") {
    CHECK_THROWS_AS(extend_dd_to_type(ctx, crosses()), precondition_error);
  }
}

TEST_CASE("extend_dd_to_type composite cases") {
  Ctx ctx = ctx_odag();
  SECTION("quadrant tails extend below zero over +inf") {
    auto r = extend_dd_to_type(ctx, quadrant_tails());
    REQUIRE(r.type->kind == DefinableType::Below);
    CHECK(r.type->bound.finite());
    CHECK(r.type->bound.func.term == Term::constant(Rational(0)));
    CHECK(r.type->base->kind == DefinableType::PlusInf);
    CHECK(family_in_type(ctx, r.type, quadrant_tails()));
  }
  SECTION("product rays extend to the corner at (+inf,+inf)") {
    auto r = extend_dd_to_type(ctx, product_rays());
    REQUIRE(r.type->kind == DefinableType::Below);
    CHECK(r.type->bound.kind == ExtendedBound::PosInf);
    CHECK(r.type->base->kind == DefinableType::PlusInf);
    CHECK(family_in_type(ctx, r.type, product_rays()));
  }
  SECTION("diagonal strips need the limit constructor") {
    auto r = extend_dd_to_type(ctx, diagonal_strips());
    REQUIRE(r.type->kind == DefinableType::LimitBelow);
    CHECK(family_in_type(ctx, r.type, diagonal_strips()));
    bool noted = false;
    for (auto& n : r.notes) noted |= n.find("limit-below") != std::string::npos;
    CHECK(noted);
  }
  SECTION("corner boxes extend to a definable type") {
    auto r = extend_dd_to_type(ctx, corner_boxes());
    CHECK(family_in_type(ctx, r.type, corner_boxes()));
  }
}

TEST_CASE("complete_dd_cells fixtures") {
  Ctx ctx = ctx_odag();
  std::vector<Formula> battery1{F("(< 0 v)"), F("(< v 0)"), F("(= v 0)"),
                                F("(and (< -1 v) (< v 1))"), F("(< 1/2 v)")};

  SECTION("right intervals are already the basis of the cut") {
    auto r = complete_dd_cells(ctx, right_intervals(), battery1);
    REQUIRE(r.traces.size() == 1);
    CHECK(r.traces[0].branch == "max-in-h");
    CHECK(equivalent(ctx, r.traces[0].h_set, f_le(t_var(r.traces[0].h_var), t_const(0))));
    CHECK(mutually_finer(ctx, r.family.fam, right_intervals()));
  }
  SECTION("symmetric intervals refine to left approach of 0") {
    auto r = complete_dd_cells(ctx, symmetric_intervals(), battery1);
    CHECK(r.traces[0].branch == "sup-not-in-h");
    REQUIRE(r.traces[0].sup);
    CHECK(r.traces[0].sup->value == 0);
    CHECK(mutually_finer(ctx, r.family.fam,
                         basis_family(type_cut_minus(0), "v").fam));
  }
  SECTION("corner boxes refine through a lower-dimensional cell") {
    std::vector<Formula> battery2{F("(< x y)"), F("(< y x)"), F("(= x y)"),
                                  F("(and (< 0 x) (< 0 y))"),
                                  F("(< (* 2 y) x)"), F("(< 0 (+ x y))")};
    auto r = complete_dd_cells(ctx, corner_boxes(), battery2);
    bool shortcut = false;
    for (auto& n : r.notes) shortcut |= n.find("shortcut") != std::string::npos;
    CHECK(shortcut);
    CHECK(is_finer(ctx, r.family.fam, corner_boxes()).value);
    CHECK(is_downward_directed(ctx, r.family.fam).value);
  }
}

TEST_CASE("complete_dd_cells main inductive path") {
  Ctx ctx = ctx_odag();
  // Quadrant tails have empty total intersection, no lower-dimensional
  // meeting cell, and exercise the projection recursion plus selection.
  std::vector<Formula> battery{F("(< y 0)"), F("(< 0 y)"), F("(< x y)"),
                               F("(and (< 3 x) (< y -1))")};
  auto r = complete_dd_cells(ctx, quadrant_tails(), battery);
  CHECK(is_finer(ctx, r.family.fam, quadrant_tails()).value);
  CHECK(is_downward_directed(ctx, r.family.fam).value);
}

TEST_CASE("refine_within_type") {
  Ctx ctx = ctx_odag();
  SECTION("punctured lines refine at a right cut") {
    auto s = make_family(F("(!= v t)"), {"t"}, {"v"});
    DefinableFamily r = refine_within_type(ctx, type_cut_plus(0), s);
    CHECK(mutually_finer(ctx, r, basis_family(type_cut_plus(0), "v").fam));
  }
  SECTION("a family already inside the type") {
    DefinableFamily r = refine_within_type(ctx, type_plus_inf(), upper_rays());
    CHECK(is_finer(ctx, r, upper_rays()).value);
  }
  SECTION("two-dimensional refinement over above(0, +inf)") {
    TypePtr p = type_above(ctx, ExtendedBound::of(AffineFunc{t_const(0)}),
                           type_plus_inf());
    auto s = make_family(F("(and (< t x) (< 0 y) (< y 1))"), {"t"}, {"x", "y"});
    DefinableFamily r = refine_within_type(ctx, p, s);
    CHECK(is_complete_for(ctx, r, s).value);
  }
  SECTION("realized point") {
    TypePtr p = type_realized({Rational(1), Rational(1)});
    auto s = make_family(F("(or (= a u) (= b w))"), {"u", "w"}, {"a", "b"});
    DefinableFamily r = refine_within_type(ctx, p, s);
    CHECK(is_complete_for(ctx, r, s).value);
  }
}

TEST_CASE("extend_to_definable_type") {
  Ctx ctx = ctx_odag();
  SECTION("punctured lines extend to +inf") {
    auto s = make_family(F("(!= v t)"), {"t"}, {"v"});
    auto r = extend_to_definable_type(ctx, s);
    REQUIRE(r.type);
    CHECK((*r.type)->kind == DefinableType::PlusInf);
  }
  SECTION("upper rays are handled by the directed construction") {
    auto r = extend_to_definable_type(ctx, upper_rays());
    REQUIRE(r.type);
    CHECK((*r.type)->kind == DefinableType::PlusInf);
  }
  SECTION("crosses admit no definable type") {
    auto r = extend_to_definable_type(ctx, crosses());
    CHECK_FALSE(r.type);
    CHECK_FALSE(r.notes.empty());
  }
}

TEST_CASE("round-trip between extension and refinement") {
  Ctx ctx = ctx_odag();
  std::vector<DefinableFamily> fams{
      make_family(F("(!= v t)"), {"t"}, {"v"}),
      upper_rays(),
      right_intervals(),
      quadrant_tails(),
  };
  for (auto& s : fams) {
    auto found = extend_to_definable_type(ctx, s);
    REQUIRE(found.type);
    TypePtr p = *found.type;
    CHECK(family_in_type(ctx, p, s));
    DefinableFamily fine = refine_within_type(ctx, p, s);
    auto dd = is_downward_directed(ctx, fine);
    REQUIRE(dd.value);
    auto back = extend_dd_to_type(ctx, fine);
    CHECK(family_in_type(ctx, back.type, fine));
  }
}
