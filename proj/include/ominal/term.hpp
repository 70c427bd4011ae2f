#ifndef OMINAL_TERM_HPP
#define OMINAL_TERM_HPP

#include <map>
#include <string>
#include <vector>

#include "ominal/rational.hpp"

namespace ominal {

using Var = std::string;
using Assignment = std::map<Var, Rational>;

/// Linear combination of variables with rational coefficients plus a
/// rational constant.  Zero coefficients are never stored.
class Term {
public:
  Term() = default;
  explicit Term(Rational constant) : constant_(std::move(constant)) {}

  static Term variable(const Var& v) {
    Term t;
    t.coeffs_[v] = 1;
    return t;
  }
  static Term constant(Rational c) { return Term(std::move(c)); }

  const std::map<Var, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant_part() const { return constant_; }

  bool is_constant() const { return coeffs_.empty(); }

  Rational coeff(const Var& v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  bool mentions(const Var& v) const { return coeffs_.count(v) != 0; }

  std::vector<Var> vars() const {
    std::vector<Var> out;
    out.reserve(coeffs_.size());
    for (auto& [v, c] : coeffs_) out.push_back(v);
    return out;
  }

  Term& operator+=(const Term& o) {
    for (auto& [v, c] : o.coeffs_) add_coeff(v, c);
    constant_ += o.constant_;
    return *this;
  }
  Term& operator-=(const Term& o) {
    for (auto& [v, c] : o.coeffs_) add_coeff(v, -c);
    constant_ -= o.constant_;
    return *this;
  }
  friend Term operator+(Term a, const Term& b) { return a += b; }
  friend Term operator-(Term a, const Term& b) { return a -= b; }
  friend Term operator-(const Term& a) { return a * Rational(-1); }

  friend Term operator*(const Term& a, const Rational& k) {
    Term r;
    if (k == 0) return r;
    for (auto& [v, c] : a.coeffs_) r.coeffs_[v] = c * k;
    r.constant_ = a.constant_ * k;
    return r;
  }
  friend Term operator*(const Rational& k, const Term& a) { return a * k; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  /// Total order used for canonical formula layout and tie-breaking.
  friend bool operator<(const Term& a, const Term& b) {
    if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
    return a.constant_ < b.constant_;
  }

  Rational evaluate(const Assignment& asg) const {
    Rational acc = constant_;
    for (auto& [v, c] : coeffs_) {
      auto it = asg.find(v);
      if (it == asg.end()) throw error("unbound variable '" + v + "' in term evaluation");
      acc += c * it->second;
    }
    return acc;
  }

  /// Replaces `v` by the term `by`.
  Term substitute(const Var& v, const Term& by) const {
    auto it = coeffs_.find(v);
    if (it == coeffs_.end()) return *this;
    Rational c = it->second;
    Term r = *this;
    r.coeffs_.erase(v);
    r += by * c;
    return r;
  }

  Term rename(const std::map<Var, Var>& m) const {
    Term r;
    r.constant_ = constant_;
    for (auto& [v, c] : coeffs_) {
      auto it = m.find(v);
      r.add_coeff(it == m.end() ? v : it->second, c);
    }
    return r;
  }

  /// For a term t with nonzero coefficient c on v, returns the term e with
  /// t = c*(v - e), i.e. v = e exactly when t = 0.
  Term solved_for(const Var& v) const {
    Rational c = coeff(v);
    if (c == 0) throw error("solved_for: variable '" + v + "' absent");
    Term rest = *this;
    rest.coeffs_.erase(v);
    return rest * (Rational(-1) / c);
  }

  std::string str() const {
    std::string s;
    for (auto& [v, c] : coeffs_) {
      if (!s.empty()) s += " + ";
      if (c == 1)
        s += v;
      else
        s += rat_to_string(c) + "*" + v;
    }
    if (coeffs_.empty() || constant_ != 0) {
      if (!s.empty()) s += " + ";
      s += rat_to_string(constant_);
    }
    return s;
  }

  /// In DLO mode a term that may appear as one side of an atom is either a
  /// constant or a bare variable.
  bool dlo_side() const {
    if (coeffs_.empty()) return true;
    return coeffs_.size() == 1 && coeffs_.begin()->second == 1 && constant_ == 0;
  }

private:
  void add_coeff(const Var& v, const Rational& c) {
    auto [it, fresh] = coeffs_.emplace(v, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    } else if (c == 0) {
      coeffs_.erase(it);
    }
  }

  std::map<Var, Rational> coeffs_;
  Rational constant_{0};
};

}  // namespace ominal

#endif  // OMINAL_TERM_HPP
