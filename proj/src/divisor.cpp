#include "ribet/divisor.hpp"

#include "ribet/errors.hpp"

namespace ribet {

Divisor Divisor::point(const Curve& curve, const CurvePoint& P, std::int64_t c) {
  Divisor D(curve);
  D.add_point(P, c);
  return D;
}

std::int64_t Divisor::multiplicity(const CurvePoint& P) const {
  auto it = terms_.find(P);
  return it == terms_.end() ? 0 : it->second;
}

void Divisor::add_point(const CurvePoint& P, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(P, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::int64_t Divisor::degree() const {
  std::int64_t d = 0;
  for (const auto& [P, c] : terms_) d += c;
  return d;
}

CurvePoint Divisor::sum_point() const {
  CurvePoint acc;
  for (const auto& [P, c] : terms_) acc = curve_->add(acc, curve_->scalar_mul(c, P));
  return acc;
}

Divisor div_combine(std::int64_t c1, const Divisor& D1, std::int64_t c2, const Divisor& D2) {
  if (&D1.curve() != &D2.curve()) throw CurveMismatch("divisors on different curves");
  Divisor out(D1.curve());
  if (c1)
    for (const auto& [P, c] : D1.terms()) out.add_point(P, c1 * c);
  if (c2)
    for (const auto& [P, c] : D2.terms()) out.add_point(P, c2 * c);
  return out;
}

Divisor operator+(const Divisor& a, const Divisor& b) { return div_combine(1, a, 1, b); }
Divisor operator-(const Divisor& a, const Divisor& b) { return div_combine(1, a, -1, b); }
Divisor operator*(std::int64_t c, const Divisor& d) { return div_combine(c, d, 0, d); }

bool is_principal(const Divisor& D) { return D.degree() == 0 && D.sum_point().is_infinity(); }

bool supports_disjoint(const Divisor& D1, const Divisor& D2) {
  if (&D1.curve() != &D2.curve()) throw CurveMismatch("divisors on different curves");
  const auto& small = D1.support_size() <= D2.support_size() ? D1 : D2;
  const auto& large = D1.support_size() <= D2.support_size() ? D2 : D1;
  for (const auto& [P, c] : small.terms())
    if (large.terms().count(P)) return false;
  return true;
}

std::string Divisor::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [P, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += std::to_string(c) + "*" + P.to_string();
  }
  return s;
}

}  // namespace ribet
