#ifndef OMINAL_TESTS_HELPERS_HPP
#define OMINAL_TESTS_HELPERS_HPP

#include <random>

#include "ominal/parse.hpp"
#include "ominal/qe.hpp"

namespace omt {

using namespace ominal;

inline Ctx ctx_odag() { return Ctx{}; }
inline Ctx ctx_dlo() {
  Ctx c;
  c.mode = Mode::Dlo;
  return c;
}

inline Formula F(const std::string& s, Mode m = Mode::Odag) {
  return parse_formula_text(s, m);
}
inline Term T(const std::string& s) { return parse_term_text(s); }

inline Rational Q(const std::string& s) {
  auto r = parse_rational(s);
  if (!r) throw error("bad rational literal in test: " + s);
  return *r;
}

using Rng = std::mt19937_64;

inline Rational random_rational(Rng& rng, int num_span = 4, int den_max = 3) {
  std::uniform_int_distribution<int> num(-num_span, num_span);
  std::uniform_int_distribution<int> den(1, den_max);
  return Rational(num(rng), den(rng));
}

inline Term random_term(Rng& rng, const std::vector<Var>& vars, Mode mode) {
  if (mode == Mode::Dlo) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()));
    int k = pick(rng);
    if (k == static_cast<int>(vars.size())) return Term::constant(random_rational(rng));
    return Term::variable(vars[k]);
  }
  Term t = Term::constant(random_rational(rng));
  std::uniform_int_distribution<int> coin(0, 2);
  for (auto& v : vars)
    if (coin(rng) == 0) t += Term::variable(v) * random_rational(rng, 3, 2);
  return t;
}

inline Formula random_atom(Rng& rng, const std::vector<Var>& vars, Mode mode) {
  Term a = random_term(rng, vars, mode);
  Term b = random_term(rng, vars, mode);
  std::uniform_int_distribution<int> rel(0, 3);
  switch (rel(rng)) {
    case 0: return f_lt(a, b);
    case 1: return f_eq(a, b);
    case 2: return f_le(a, b);
    default: return f_gt(a, b);
  }
}

/// Random formula of bounded depth over the given free variables; bound
/// variables get fresh names so scoping stays simple.
inline Formula random_formula(Rng& rng, std::vector<Var> vars, int depth,
                              Mode mode = Mode::Odag, int* fresh_counter = nullptr) {
  int local_counter = 0;
  int* ctr = fresh_counter ? fresh_counter : &local_counter;
  if (depth <= 0 || vars.size() >= 6) return random_atom(rng, vars, mode);
  std::uniform_int_distribution<int> pick(0, 9);
  int k = pick(rng);
  if (k <= 2) return random_atom(rng, vars, mode);
  if (k <= 4) {
    return Formula::land({random_formula(rng, vars, depth - 1, mode, ctr),
                          random_formula(rng, vars, depth - 1, mode, ctr)});
  }
  if (k <= 6) {
    return Formula::lor({random_formula(rng, vars, depth - 1, mode, ctr),
                         random_formula(rng, vars, depth - 1, mode, ctr)});
  }
  if (k == 7) return Formula::lnot(random_formula(rng, vars, depth - 1, mode, ctr));
  Var q = "q" + std::to_string((*ctr)++);
  vars.push_back(q);
  Formula body = random_formula(rng, vars, depth - 1, mode, ctr);
  return k == 8 ? Formula::exists({q}, body) : Formula::forall({q}, body);
}

inline Assignment random_point(Rng& rng, const std::set<Var>& vars) {
  Assignment asg;
  for (auto& v : vars) asg[v] = random_rational(rng, 5, 3);
  return asg;
}

}  // namespace omt

#endif  // OMINAL_TESTS_HELPERS_HPP
