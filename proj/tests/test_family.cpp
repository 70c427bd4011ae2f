#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ominal/family.hpp"

using namespace omt;

namespace {

DefinableFamily upper_rays() {  // {(t, inf) : t in M}
  return make_family(F("(< t v)"), {"t"}, {"v"});
}

DefinableFamily punctured_lines() {  // {M \ {t} : t in M}
  return make_family(F("(!= v t)"), {"t"}, {"v"});
}

DefinableFamily crosses() {
  return make_family(F("(or (= a u) (= b w))"), {"u", "w"}, {"a", "b"});
}

DefinableFamily right_intervals() {  // {(0, t) : t > 0}
  return make_family(F("(and (< 0 v) (< v t))"), {"t"}, {"v"}, F("(< 0 t)"));
}

DefinableFamily symmetric_intervals() {  // {(-t, t) : t > 0}
  return make_family(F("(and (< (- 0 t) v) (< v t))"), {"t"}, {"v"}, F("(< 0 t)"));
}

}  // namespace

TEST_CASE("is_nonempty_all") {
  Ctx ctx = ctx_odag();
  CHECK(is_nonempty_all(ctx, upper_rays()));
  auto empty_bands = make_family(F("(and (< t v) (< v (- t 1)))"), {"t"}, {"v"});
  CHECK_FALSE(is_nonempty_all(ctx, empty_bands));
  CHECK(is_nonempty_all(ctx, crosses()));
  auto nothing = make_family(F("(< t v)"), {"t"}, {"v"}, F("(< t t)"));
  CHECK_THROWS_AS(is_nonempty_all(ctx, nothing), precondition_error);
}

TEST_CASE("is_downward_directed") {
  Ctx ctx = ctx_odag();
  CHECK(is_downward_directed(ctx, upper_rays()).value);
  SECTION("punctured lines are not directed") {
    auto r = is_downward_directed(ctx, punctured_lines());
    REQUIRE_FALSE(r.value);
    REQUIRE(r.witness.size() == 2);
    CHECK(r.witness[0] != r.witness[1]);
  }
  SECTION("crosses are not directed, with a concrete witness pair") {
    auto r = is_downward_directed(ctx, crosses());
    REQUIRE_FALSE(r.value);
    REQUIRE(r.witness.size() == 2);
  }
  CHECK(is_downward_directed(ctx, right_intervals()).value);
  CHECK(is_downward_directed(ctx, symmetric_intervals()).value);
}

TEST_CASE("is_finer") {
  Ctx ctx = ctx_odag();
  CHECK(is_finer(ctx, right_intervals(), punctured_lines()).value);
  CHECK(is_finer(ctx, upper_rays(), punctured_lines()).value);
  auto lower_rays = make_family(F("(< v t)"), {"t"}, {"v"});
  auto r = is_finer(ctx, upper_rays(), lower_rays);
  CHECK_FALSE(r.value);
  CHECK(r.witness.size() == 1);
}

TEST_CASE("is_complete_for") {
  Ctx ctx = ctx_odag();
  SECTION("right intervals vs lower rays") {
    auto lower_rays = make_family(F("(< v s)"), {"s"}, {"v"});
    CHECK(is_complete_for(ctx, right_intervals(), lower_rays).value);
  }
  SECTION("right intervals vs the origin") {
    CHECK(is_complete_for(ctx, right_intervals(), F("(= w 0)"), {"w"}));
  }
  SECTION("symmetric intervals straddle the positive ray") {
    CHECK_FALSE(is_complete_for(ctx, symmetric_intervals(), F("(< 0 w)"), {"w"}));
  }
  SECTION("precondition: directedness") {
    CHECK_THROWS_AS(is_complete_for(ctx, crosses(), F("(< 0 a)"), {"a", "b"}),
                    precondition_error);
  }
}

TEST_CASE("intersect_family") {
  Ctx ctx = ctx_odag();
  SECTION("rays meeting the unit interval") {
    auto clipped_rays = make_family(F("(< t v)"), {"t"}, {"v"}, F("(< t 1)"));
    auto g = intersect_family(ctx, clipped_rays, F("(and (< 0 w) (< w 1))"), {"w"});
    CHECK(is_downward_directed(ctx, g).value);
  }
  SECTION("rays meeting the empty set") {
    auto g = intersect_family(ctx, upper_rays(), Formula::f_false(), {"w"});
    CHECK_FALSE(is_nonempty_all(ctx, g));
  }
  SECTION("symmetric intervals meeting the closed right half line") {
    auto g = intersect_family(ctx, symmetric_intervals(), F("(>= w 0)"), {"w"});
    CHECK(is_downward_directed(ctx, g).value);
    CHECK(equivalent(ctx, g.fiber({Rational(2)}), F("(and (<= 0 v) (< v 2))")));
  }
}

TEST_CASE("directed families meet some element of any finite cover they touch") {
  Ctx ctx = ctx_odag();
  auto fam = right_intervals();
  // X = (-1, 1), covered by (-1, 0], (0, 1/2], (1/2, 1).
  std::vector<Formula> cover{F("(and (< (- 0 1) w) (<= w 0))"),
                             F("(and (< 0 w) (<= w 1/2))"),
                             F("(and (< 1/2 w) (< w 1))")};
  auto meets_all = [&](const Formula& y) {
    std::map<Var, Term> sub{{"w", Term::variable("v")}};
    Formula yv = y.substitute(sub);
    return holds(ctx, Formula::forall(
                          {"t"}, f_implies(fam.domain,
                                           Formula::exists({"v"},
                                                           Formula::land(
                                                               {fam.member, yv})))));
  };
  int met = 0;
  for (auto& y : cover) met += meets_all(y);
  CHECK(met >= 1);

  // Completeness for the cover: exactly one piece contains some member.
  int containing = 0;
  for (auto& y : cover) {
    std::map<Var, Term> sub{{"w", Term::variable("v")}};
    Formula yv = y.substitute(sub);
    Formula inside = Formula::forall({"v"}, f_implies(fam.member, yv));
    if (holds(ctx, Formula::exists({"t"}, Formula::land({fam.domain, inside}))))
      ++containing;
  }
  CHECK(containing == 1);
}
