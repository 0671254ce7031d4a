#pragma once

#include <cstdint>
#include <string>

#include "ribet/divisor.hpp"
#include "ribet/finite_field.hpp"
#include "ribet/function_eval.hpp"

namespace ribet {

/// The fiber at q of the nodal curve obtained from E by gluing q to -q.
///
/// The curve itself is never built: its generalized Jacobian is described
/// entirely by degree-zero divisors on E supported away from {q, -q}, modulo
/// divisors of functions f with f(q) = f(-q).
class NodalFiber {
 public:
  /// Throws InvalidFiber unless q has order >= 3.
  NodalFiber(const Curve& curve, const CurvePoint& q);

  const Curve& curve() const { return *curve_; }
  const CurvePoint& q() const { return pair_.plus; }
  const EvalPair& gluing_pair() const { return pair_; }

 private:
  const Curve* curve_;
  EvalPair pair_;
};

/// A point of the generalized Jacobian, represented by a divisor.
///
/// Two representatives denote the same class iff their difference is
/// principal with kernel value 1.  Sums of admissible representatives are
/// admissible, so addition never needs to move support off the node.
class JacClass {
 public:
  /// Throws InvalidFiber when rep has nonzero degree or meets {q, -q}.
  JacClass(const NodalFiber& fiber, Divisor rep);

  const NodalFiber& fiber() const { return *fiber_; }
  const Divisor& rep() const { return rep_; }

  friend JacClass operator+(const JacClass& a, const JacClass& b);
  friend JacClass operator-(const JacClass& a, const JacClass& b);
  friend JacClass operator*(std::int64_t k, const JacClass& z);

  /// {fiber: (field, curve, q), rep: divisor string}
  std::string to_string() const;

 private:
  const NodalFiber* fiber_;
  Divisor rep_;
};

/// Projection to E: the group sum of the representative.
CurvePoint jac_project(const JacClass& z);

/// Coordinate in the multiplicative kernel: f(q)/f(-q) for div f = rep.
/// Throws NotInKernel when the projection is not O.
FieldElement jac_kernel_value(const JacClass& z);

/// Exact order: m = ord(projection), then the order d of the kernel value of
/// m z; the order is m d.
std::uint64_t jac_order(const JacClass& z);

/// Equality of classes.
bool same_class(const JacClass& a, const JacClass& b);

}  // namespace ribet
