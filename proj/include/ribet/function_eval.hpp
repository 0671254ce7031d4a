#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ribet/cm_endomorphism.hpp"
#include "ribet/divisor.hpp"

namespace ribet {

/// One line factor of a LineProgram.
///
///   chord(P, Q):  the line through P and Q (tangent when P = Q); divisor
///                 (P) + (Q) + (-(P+Q)) - 3(O).  Degenerates to the vertical
///                 line at P when Q = -P.
///   vertical(P):  x - x_P; divisor (P) + (-P) - 2(O).
///
/// Lines are normalized so that their leading coefficient at O with respect
/// to the uniformizer x/y is 1.
struct LineStep {
  enum class Kind { chord, vertical };

  Kind kind = Kind::vertical;
  CurvePoint p, q;
  std::int64_t exponent = 1;

  // Evaluation data fixed at construction: a vertical line x - x0, or
  // y - y0 - slope (x - x0).
  bool is_vertical = true;
  FieldElement x0, y0, slope;

  /// Pole order at O (2 for vertical lines, 3 otherwise).
  int pole_order() const { return is_vertical ? 2 : 3; }
};

/// A rational function written as a product of powers of lines.
///
/// Only ratios and degree-zero evaluations of a program are independent of
/// the construction; the program itself fixes one normalization (value 1 at O
/// whenever O is not in its divisor).
class LineProgram {
 public:
  explicit LineProgram(const Curve& curve) : curve_(&curve) {}

  const Curve& curve() const { return *curve_; }
  const std::vector<LineStep>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }

  /// Appends chord(P, Q)^e; a chord through O is folded into the equivalent
  /// vertical line and the constant chord(O, O) is dropped.
  void chord(const CurvePoint& P, const CurvePoint& Q, std::int64_t e);
  /// Appends vertical(P)^e; vertical(O) is the constant 1 and is dropped.
  void vertical(const CurvePoint& P, std::int64_t e);

  /// Sum of exponent-weighted line divisors.
  Divisor formal_divisor() const;
  /// Order of the program at O.
  std::int64_t order_at_infinity() const { return order_at_infinity_; }

  std::string to_string() const;

 private:
  const Curve* curve_;
  std::vector<LineStep> steps_;
  std::int64_t order_at_infinity_ = 0;
};

/// Number of re-randomized reductions tried after the first one.
inline constexpr unsigned kCollisionRetries = 8;

/// A program whose formal divisor is exactly D, by chord-tangent reduction.
/// `attempt` = 0 reduces D directly; later attempts translate every support
/// point through an auxiliary point drawn deterministically from the point
/// table and rotate the combination order.  Throws NotPrincipal.
LineProgram function_with_divisor(const Divisor& D, unsigned attempt = 0);

/// Product of the line values at P.  At O the value is 1 when the program
/// has neither zero nor pole there.  Throws SupportCollision when some line
/// vanishes at P (or when P = O is a zero or pole).
FieldElement eval_program(const LineProgram& f, const CurvePoint& P);

/// f(D) = prod f(P)^{D(P)}.
FieldElement eval_on_divisor(const LineProgram& f, const Divisor& D);

/// The gluing pair (q, -q) of the nodal curve.
struct EvalPair {
  CurvePoint plus, minus;

  /// Throws InvalidFiber when q is O or 2-torsion.
  static EvalPair of(const Curve& curve, const CurvePoint& q);
};

/// f(plus)/f(minus) for any f with div f = D.  Retries collisions up to
/// kCollisionRetries times.  Throws NotPrincipal, SupportsNotDisjoint,
/// SupportCollision.
FieldElement eval_ratio(const Divisor& D, const EvalPair& pair);

/// prod over a(T) = P of f(T).  Throws PreimageNotRational, SupportCollision.
FieldElement norm_along(const CMStructure& cm, const Endo& a, const LineProgram& f, const CurvePoint& P);

/// f(div g) == g(div f).  Throws SupportsNotDisjoint, SupportCollision.
bool weil_reciprocity_check(const LineProgram& f, const LineProgram& g);

/// e_n(P, Q) = f(D_Q)/g(D_P) with D_P = (P+R) - (R), D_Q = (Q+S) - (S),
/// div f = n D_P, div g = n D_Q.  Auxiliary R, S are scanned through the
/// point table until supports are disjoint and no line collides.
/// Throws NotTorsion, CharacteristicDividesN, SupportCollision.
FieldElement weil_pairing(std::uint64_t n, const CurvePoint& P, const CurvePoint& Q, const Curve& curve);

/// Same pairing with caller-chosen auxiliary points.
FieldElement weil_pairing_with(std::uint64_t n, const CurvePoint& P, const CurvePoint& Q, const CurvePoint& R,
                               const CurvePoint& S, const Curve& curve);

/// (P1, P2) with e_n(P1, P2) of multiplicative order n; (O, O) for n = 1.
/// Throws CharacteristicDividesN, FullTorsionNotRational.
std::pair<CurvePoint, CurvePoint> torsion_basis(const Curve& curve, std::uint64_t n);

}  // namespace ribet
