#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ribet/elliptic_curve.hpp"

namespace ribet {

/// Finite formal Z-combination of rational points of one curve.
///
/// Stored sparsely in canonical point order with zero multiplicities pruned,
/// so iteration order (and everything evaluated from it) is reproducible.
/// Holds a non-owning pointer to the curve.
class Divisor {
 public:
  using Map = std::map<CurvePoint, std::int64_t>;

  explicit Divisor(const Curve& curve) : curve_(&curve) {}
  /// c (P)
  static Divisor point(const Curve& curve, const CurvePoint& P, std::int64_t c = 1);

  const Curve& curve() const { return *curve_; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }

  std::int64_t multiplicity(const CurvePoint& P) const;
  void add_point(const CurvePoint& P, std::int64_t c);

  std::int64_t degree() const;
  /// sum of mult * P in the group.
  CurvePoint sum_point() const;

  friend Divisor operator+(const Divisor& a, const Divisor& b);
  friend Divisor operator-(const Divisor& a, const Divisor& b);
  friend Divisor operator*(std::int64_t c, const Divisor& d);
  Divisor operator-() const { return -1 * *this; }
  friend bool operator==(const Divisor& a, const Divisor& b) {
    return a.curve_ == b.curve_ && a.terms_ == b.terms_;
  }

  /// "m1*(x1,y1) + m2*(x2,y2) + ..."; "0" for the empty divisor.
  std::string to_string() const;

 private:
  const Curve* curve_;
  Map terms_;
};

/// c1 D1 + c2 D2, zero entries pruned; throws CurveMismatch.
Divisor div_combine(std::int64_t c1, const Divisor& D1, std::int64_t c2, const Divisor& D2);

/// Degree zero with group sum O, i.e. the divisor of a function.
bool is_principal(const Divisor& D);

bool supports_disjoint(const Divisor& D1, const Divisor& D2);

}  // namespace ribet
