#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ominal/family.hpp"

using namespace omt;

TEST_CASE("decompose the unit interval on the line") {
  Ctx ctx = ctx_odag();
  auto d = decompose(ctx, {F("(and (< 0 x) (< x 1))")}, {"x"});
  REQUIRE(d.cells.size() == 5);
  certify_decomposition(ctx, d);
  int inside = 0;
  for (auto& c : d.cells) inside += cell_in_target(c, d.targets[0]);
  CHECK(inside == 1);
}

TEST_CASE("decompose a diagonal in the plane") {
  Ctx ctx = ctx_odag();
  auto d = decompose(ctx, {F("(= y x)")}, {"x", "y"});
  REQUIRE(d.cells.size() == 3);
  certify_decomposition(ctx, d);
  for (auto& c : d.cells) {
    if (cell_in_target(c, d.targets[0])) {
      CHECK(c.layers[1].kind == CellLayer::Graph);
      CHECK(c.dim() == 1);
    }
  }
}

TEST_CASE("decompose a half-open wedge") {
  Ctx ctx = ctx_odag();
  Formula t = F("(and (< y x) (< 0 x) (< x 1))");
  auto d = decompose(ctx, {t}, {"x", "y"});
  certify_decomposition(ctx, d);
  int dim = -1;
  for (auto& c : d.cells)
    if (cell_in_target(c, t)) dim = std::max(dim, c.dim());
  CHECK(dim == 2);
}

TEST_CASE("dimension") {
  Ctx ctx = ctx_odag();
  CHECK(dimension(ctx, F("(and (< 0 x) (< x 1))"), {"x"}) == 1);
  CHECK(dimension(ctx, F("(= y x)"), {"x", "y"}) == 1);
  CHECK(dimension(ctx, F("(< x x)"), {"x"}) == -1);
  CHECK(dimension(ctx, F("(= x 2)"), {"x"}) == 0);
  CHECK(dimension(ctx, F("true"), {"x", "y", "z"}) == 3);
}

TEST_CASE("dimension is monotone under inclusion") {
  Ctx ctx = ctx_odag();
  Rng rng(1312);
  int hits = 0;
  for (int i = 0; i < 12; ++i) {
    Formula a = eliminate(ctx, random_formula(rng, {"x", "y"}, 2));
    Formula b = eliminate(ctx, random_formula(rng, {"x", "y"}, 2));
    if (entails(ctx, a, b)) {
      CHECK(dimension(ctx, a, {"x", "y"}) <= dimension(ctx, b, {"x", "y"}));
      ++hits;
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("project") {
  Ctx ctx = ctx_odag();
  CHECK(equivalent(ctx, project(ctx, F("(and (= y x) (< 0 x) (< x 1))"), 1, {"x", "y"}),
                   F("(and (< 0 x) (< x 1))")));
  CHECK(equivalent(ctx, project(ctx, F("(and (< x y) (< y 0))"), 1, {"x", "y"}),
                   F("(< x 0)")));
  Formula p = project(ctx, F("(and (< 0 x) (< x 1) (< 0 y) (< y x))"), 1, {"x", "y"});
  CHECK(equivalent(ctx, p, F("(and (< 0 x) (< x 1))")));
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Assignment a = random_point(rng, {"x"});
    CHECK(p.evaluate_qf(a) == (a["x"] > 0 && a["x"] < 1));
  }
}

TEST_CASE("cell_to_formula") {
  Ctx ctx = ctx_odag();
  SECTION("band over the empty base") {
    Cell c;
    c.vars = {"v1"};
    c.layers.push_back(CellLayer::band(ExtendedBound::of({t_const(0)}),
                                       ExtendedBound::of({t_const(1)})));
    CHECK(equivalent(ctx, c.formula(), F("(and (< 0 v1) (< v1 1))")));
  }
  SECTION("graph over the whole line") {
    Cell c;
    c.vars = {"v1", "v2"};
    c.layers.push_back(CellLayer::band(ExtendedBound::neg_inf(), ExtendedBound::pos_inf()));
    c.layers.push_back(CellLayer::graph({t_var("v1")}));
    CHECK(equivalent(ctx, c.formula(), F("(= v2 v1)")));
  }
  SECTION("upper band over a ray") {
    Cell c;
    c.vars = {"v1", "v2"};
    c.layers.push_back(CellLayer::band(ExtendedBound::of({t_const(0)}),
                                       ExtendedBound::pos_inf()));
    c.layers.push_back(CellLayer::band(ExtendedBound::of({t_var("v1")}),
                                       ExtendedBound::pos_inf()));
    CHECK(equivalent(ctx, c.formula(), F("(and (< 0 v1) (< v1 v2))")));
  }
}

TEST_CASE("uniform decomposition fibers") {
  Ctx ctx = ctx_odag();
  SECTION("half plane") {
    auto u = uniform_decompose(ctx, F("(< u v)"), {"u"}, {"v"});
    auto fibers = fiber_cells(u, {Rational(0)});
    std::vector<Formula> fs;
    for (auto& c : fibers) fs.push_back(c.formula());
    CHECK_FALSE(satisfiable(ctx, Formula::lnot(Formula::lor(fs))));
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = i + 1; j < fs.size(); ++j)
        CHECK_FALSE(satisfiable(ctx, Formula::land({fs[i], fs[j]})));
    Formula target = F("(< 0 v)");
    for (auto& c : fibers) {
      bool in = target.evaluate_qf(c.sample());
      CHECK(entails(ctx, c.formula(), in ? target : Formula::lnot(target)));
    }
  }
  SECTION("moving band") {
    auto u = uniform_decompose(ctx, F("(and (< u v) (< v (+ u 1)))"), {"u"}, {"v"});
    auto fibers = fiber_cells(u, {Rational(2)});
    bool found = false;
    for (auto& c : fibers)
      if (equivalent(ctx, c.formula(), F("(and (< 2 v) (< v 3))"))) found = true;
    CHECK(found);
  }
  SECTION("empty set") {
    auto u = uniform_decompose(ctx, Formula::f_false(), {"u"}, {"v"});
    auto fibers = fiber_cells(u, {Rational(7)});
    std::vector<Formula> fs;
    for (auto& c : fibers) fs.push_back(c.formula());
    CHECK_FALSE(satisfiable(ctx, Formula::lnot(Formula::lor(fs))));
  }
}

TEST_CASE("random decompositions certify") {
  Ctx ctx = ctx_odag();
  Rng rng(2024);
  std::vector<std::vector<Var>> frames{{"x"}, {"x", "y"}, {"x", "y", "z"}};
  for (int i = 0; i < 9; ++i) {
    const auto& vars = frames[i % frames.size()];
    Formula t = eliminate(ctx, random_formula(rng, vars, 2));
    auto d = decompose(ctx, {t}, vars);
    certify_decomposition(ctx, d);
  }
}

TEST_CASE("uniform fiber property at random points") {
  Ctx ctx = ctx_odag();
  Rng rng(77);
  for (int i = 0; i < 6; ++i) {
    Formula phi = eliminate(ctx, random_formula(rng, {"u", "v", "w"}, 2));
    auto u = uniform_decompose(ctx, phi, {"u"}, {"v", "w"});
    for (int p = 0; p < 3; ++p) {
      Rational up = random_rational(rng);
      auto fibers = fiber_cells(u, {up});
      std::vector<Formula> fs;
      for (auto& c : fibers) fs.push_back(c.formula());
      CHECK_FALSE(satisfiable(ctx, Formula::lnot(Formula::lor(fs))));
      Formula target = phi.substitute({{"u", Term::constant(up)}});
      for (auto& c : fibers) {
        bool in = target.evaluate_qf(c.sample());
        CHECK(entails(ctx, c.formula(), in ? target : Formula::lnot(target)));
      }
    }
  }
}
