#include "ribet/function_eval.hpp"

#include <algorithm>
#include <numeric>

#include "ribet/errors.hpp"

namespace ribet {

void LineProgram::chord(const CurvePoint& P, const CurvePoint& Q, std::int64_t e) {
  if (e == 0) return;
  if (P.is_infinity() && Q.is_infinity()) return;
  if (P.is_infinity()) return vertical(Q, e);
  if (Q.is_infinity()) return vertical(P, e);
  if (curve_->neg(P) == Q) return vertical(P, e);

  LineStep s;
  s.kind = LineStep::Kind::chord;
  s.p = P;
  s.q = Q;
  s.exponent = e;
  s.is_vertical = false;
  s.x0 = P.x();
  s.y0 = P.y();
  if (P == Q) {
    auto x2 = P.x() * P.x();
    s.slope = (x2 + x2 + x2 + curve_->a4()) / (P.y() + P.y());
  } else {
    s.slope = (Q.y() - P.y()) / (Q.x() - P.x());
  }
  order_at_infinity_ -= e * s.pole_order();
  steps_.push_back(std::move(s));
}

void LineProgram::vertical(const CurvePoint& P, std::int64_t e) {
  if (e == 0 || P.is_infinity()) return;
  LineStep s;
  s.kind = LineStep::Kind::vertical;
  s.p = P;
  s.q = curve_->neg(P);
  s.exponent = e;
  s.is_vertical = true;
  s.x0 = P.x();
  order_at_infinity_ -= e * s.pole_order();
  steps_.push_back(std::move(s));
}

Divisor LineProgram::formal_divisor() const {
  Divisor D(*curve_);
  for (const auto& s : steps_) {
    if (s.is_vertical) {
      D.add_point(s.p, s.exponent);
      D.add_point(curve_->neg(s.p), s.exponent);
      D.add_point(CurvePoint{}, -2 * s.exponent);
    } else {
      D.add_point(s.p, s.exponent);
      D.add_point(s.q, s.exponent);
      D.add_point(curve_->neg(curve_->add(s.p, s.q)), s.exponent);
      D.add_point(CurvePoint{}, -3 * s.exponent);
    }
  }
  return D;
}

std::string LineProgram::to_string() const {
  if (steps_.empty()) return "1";
  std::string out;
  for (const auto& s : steps_) {
    if (!out.empty()) out += " * ";
    if (s.is_vertical)
      out += "vertical" + s.p.to_string();
    else
      out += "chord(" + s.p.to_string() + "," + s.q.to_string() + ")";
    out += "^" + std::to_string(s.exponent);
  }
  return out;
}

namespace {

struct Term {
  CurvePoint point;
  std::int64_t mult;  // > 0
};

// Adds the steps of Miller's function f with div f = k(P) - (kP) - (k-1)(O)
// and returns kP.  Exponents of earlier steps double at every doubling.
CurvePoint append_miller(LineProgram& prog, const Curve& E, const CurvePoint& P, std::int64_t k) {
  struct Local {
    bool is_chord;
    CurvePoint a, b;
    std::int64_t e;
  };
  std::vector<Local> local;
  CurvePoint R = P;
  int top = 63;
  while (top > 0 && !((k >> top) & 1)) --top;
  for (int bit = top - 1; bit >= 0; --bit) {
    for (auto& l : local) l.e *= 2;
    if (!R.is_infinity()) {
      auto R2 = E.add(R, R);
      local.push_back({true, R, R, 1});
      local.push_back({false, R2, {}, -1});
      R = R2;
    }
    if ((k >> bit) & 1) {
      if (!R.is_infinity()) {
        auto RP = E.add(R, P);
        local.push_back({true, R, P, 1});
        local.push_back({false, RP, {}, -1});
        R = RP;
      } else {
        R = P;
      }
    }
  }
  for (const auto& l : local) {
    if (l.is_chord)
      prog.chord(l.a, l.b, l.e);
    else
      prog.vertical(l.a, l.e);
  }
  return R;
}

CurvePoint auxiliary_point(const Curve& E, unsigned attempt) {
  const auto N = E.group_order();
  if (N < 2) return {};
  const std::uint64_t idx = 1 + (std::uint64_t{attempt} * 2654435761u + 97) % (N - 1);
  return E.point_at(idx);
}

}  // namespace

LineProgram function_with_divisor(const Divisor& D, unsigned attempt) {
  if (!is_principal(D)) throw NotPrincipal(D.to_string());
  const Curve& E = D.curve();
  LineProgram prog(E);

  // m(P) with m < 0 becomes |m|(-P) through the vertical line at P.
  std::vector<Term> terms;
  for (const auto& [P, m] : D.terms()) {
    if (P.is_infinity()) continue;
    if (m > 0) {
      terms.push_back({P, m});
    } else {
      prog.vertical(P, m);
      terms.push_back({E.neg(P), -m});
    }
  }

  if (attempt > 0 && !terms.empty()) {
    // (P) = (P+T) - (T) + (O) + div(chord(P,T) / vertical(P+T))
    const auto T = auxiliary_point(E, attempt);
    if (!T.is_infinity()) {
      std::vector<Term> moved;
      std::int64_t total = 0;
      for (const auto& t : terms) {
        auto PT = E.add(t.point, T);
        prog.chord(t.point, T, t.mult);
        prog.vertical(PT, -t.mult);
        if (!PT.is_infinity()) moved.push_back({PT, t.mult});
        total += t.mult;
      }
      prog.vertical(T, -total);
      moved.push_back({E.neg(T), total});
      terms = std::move(moved);
    }
    std::rotate(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(attempt % terms.size()), terms.end());
  }

  // k(P) = (kP) + (k-1)(O) + div(f_{k,P}); then fold the single points
  // pairwise: (S) + (Q) = (S+Q) + (O) + div(chord(S,Q) / vertical(S+Q)).
  CurvePoint S;
  for (const auto& t : terms) {
    auto Q = t.mult == 1 ? t.point : append_miller(prog, E, t.point, t.mult);
    if (Q.is_infinity()) continue;
    if (S.is_infinity()) {
      S = Q;
      continue;
    }
    auto SQ = E.add(S, Q);
    prog.chord(S, Q, 1);
    prog.vertical(SQ, -1);
    S = SQ;
  }
  if (!S.is_infinity()) throw NotPrincipal("reduction did not close: " + D.to_string());
  return prog;
}

namespace {

// Local data at an affine point P for the uniformizer t = x - x(P) when
// y(P) != 0 (y = c0 + c1 t + c2 t^2 + c3 t^3 + ...), or t = y when y(P) = 0
// (then x - x(P) = t^2 / r1 + ...).
struct LocalExpansion {
  bool two_torsion;
  FieldElement c1, c2, c3;
  FieldElement r1;
};

LocalExpansion expand_at(const Curve& E, const CurvePoint& P) {
  LocalExpansion L;
  const auto& x = P.x();
  L.r1 = x * x * E.field().from_int(3) + E.a4();
  L.two_torsion = P.y().is_zero();
  if (L.two_torsion) return L;
  // y^2 = r1 t + r2 t^2 + t^3 + y(P)^2 with r2 = 3 x(P).
  const auto two_c0 = P.y() + P.y();
  const auto r2 = x * E.field().from_int(3);
  L.c1 = L.r1 / two_c0;
  L.c2 = (r2 - L.c1 * L.c1) / two_c0;
  L.c3 = (E.field().one() - (L.c1 * L.c2 + L.c2 * L.c1)) / two_c0;
  return L;
}

struct LocalTerm {
  int order;
  FieldElement lead;
};

LocalTerm line_at(const LineStep& s, const CurvePoint& P, const LocalExpansion& L) {
  const auto dx = P.x() - s.x0;
  if (s.is_vertical) {
    if (!dx.is_zero()) return {0, dx};
    if (L.two_torsion) return {2, L.r1.inverse()};
    return {1, dx.field()->one()};
  }
  const auto v0 = P.y() - s.y0 - s.slope * dx;
  if (!v0.is_zero()) return {0, v0};
  if (L.two_torsion) return {1, v0.field()->one()};
  if (auto c = L.c1 - s.slope; !c.is_zero()) return {1, c};
  if (!L.c2.is_zero()) return {2, L.c2};
  return {3, L.c3};
}

}  // namespace

// The value of a function with no zero or pole at P is the product of the
// leading coefficients of its line factors in a uniformizer at P.
FieldElement eval_program(const LineProgram& f, const CurvePoint& P) {
  const auto& F = f.curve().field();
  if (P.is_infinity()) {
    if (f.order_at_infinity() != 0)
      throw SupportCollision("program has a zero or pole at O (order " + std::to_string(f.order_at_infinity()) + ")");
    return F.one();
  }
  const auto L = expand_at(f.curve(), P);
  FieldElement acc = F.one();
  std::int64_t order = 0;
  for (const auto& s : f.steps()) {
    const auto term = line_at(s, P, L);
    order += s.exponent * term.order;
    acc *= term.lead.pow(s.exponent);
  }
  if (order != 0)
    throw SupportCollision("program has a zero or pole at " + P.to_string() + " (order " + std::to_string(order) + ")");
  return acc;
}

FieldElement eval_on_divisor(const LineProgram& f, const Divisor& D) {
  FieldElement acc = f.curve().field().one();
  for (const auto& [P, c] : D.terms()) acc *= eval_program(f, P).pow(c);
  return acc;
}

EvalPair EvalPair::of(const Curve& curve, const CurvePoint& q) {
  if (q.is_infinity() || q.y().is_zero()) throw InvalidFiber("gluing point must have order > 2");
  return {q, curve.neg(q)};
}

FieldElement eval_ratio(const Divisor& D, const EvalPair& pair) {
  if (!is_principal(D)) throw NotPrincipal(D.to_string());
  if (D.multiplicity(pair.plus) != 0 || D.multiplicity(pair.minus) != 0)
    throw SupportsNotDisjoint("divisor meets the gluing pair");
  if (D.empty()) return D.curve().field().one();
  for (unsigned attempt = 0; attempt <= kCollisionRetries; ++attempt) {
    try {
      auto f = function_with_divisor(D, attempt);
      return eval_program(f, pair.plus) / eval_program(f, pair.minus);
    } catch (const SupportCollision&) {
    }
  }
  throw SupportCollision("eval_ratio: retry budget exhausted for " + D.to_string());
}

FieldElement norm_along(const CMStructure& cm, const Endo& a, const LineProgram& f, const CurvePoint& P) {
  auto pre = cm.preimages(a, P);
  if (pre.size() != static_cast<std::size_t>(a.degree()))
    throw PreimageNotRational(P.to_string() + " under " + a.to_string());
  FieldElement acc = f.curve().field().one();
  for (const auto& T : pre) acc *= eval_program(f, T);
  return acc;
}

bool weil_reciprocity_check(const LineProgram& f, const LineProgram& g) {
  auto Df = f.formal_divisor();
  auto Dg = g.formal_divisor();
  if (!supports_disjoint(Df, Dg)) throw SupportsNotDisjoint("div f and div g share a point");
  return eval_on_divisor(f, Dg) == eval_on_divisor(g, Df);
}

namespace {

void check_pairing_inputs(std::uint64_t n, const CurvePoint& P, const CurvePoint& Q, const Curve& E) {
  if (n == 0) throw NotTorsion("n must be positive");
  if (n % E.field().characteristic() == 0) throw CharacteristicDividesN(std::to_string(n));
  const auto k = static_cast<std::int64_t>(n);
  if (!E.scalar_mul(k, P).is_infinity()) throw NotTorsion(P.to_string() + " is not " + std::to_string(n) + "-torsion");
  if (!E.scalar_mul(k, Q).is_infinity()) throw NotTorsion(Q.to_string() + " is not " + std::to_string(n) + "-torsion");
}

// f(D) for some f with div f = target, trying each reduction in turn.
FieldElement eval_function_of(const Divisor& target, const Divisor& D) {
  for (unsigned attempt = 0; attempt <= kCollisionRetries; ++attempt) {
    try {
      return eval_on_divisor(function_with_divisor(target, attempt), D);
    } catch (const SupportCollision&) {
    }
  }
  throw SupportCollision("retry budget exhausted for " + target.to_string());
}

}  // namespace

FieldElement weil_pairing_with(std::uint64_t n, const CurvePoint& P, const CurvePoint& Q, const CurvePoint& R,
                               const CurvePoint& S, const Curve& E) {
  check_pairing_inputs(n, P, Q, E);
  auto DP = Divisor::point(E, E.add(P, R)) - Divisor::point(E, R);
  auto DQ = Divisor::point(E, E.add(Q, S)) - Divisor::point(E, S);
  if (!supports_disjoint(DP, DQ)) throw SupportsNotDisjoint("auxiliary divisors overlap");
  const auto k = static_cast<std::int64_t>(n);
  return eval_function_of(k * DP, DQ) / eval_function_of(k * DQ, DP);
}

FieldElement weil_pairing(std::uint64_t n, const CurvePoint& P, const CurvePoint& Q, const Curve& E) {
  check_pairing_inputs(n, P, Q, E);
  const auto N = E.group_order();
  if (N < 2) return E.field().one();
  for (std::uint64_t k = 0; k < 256; ++k) {
    auto R = E.point_at(1 + k % (N - 1));
    auto S = E.point_at(1 + (k * k + 3 * k + N / 2) % (N - 1));
    auto DP = Divisor::point(E, E.add(P, R)) - Divisor::point(E, R);
    auto DQ = Divisor::point(E, E.add(Q, S)) - Divisor::point(E, S);
    if (!supports_disjoint(DP, DQ)) continue;
    try {
      return weil_pairing_with(n, P, Q, R, S, E);
    } catch (const SupportCollision&) {
    }
  }
  throw SupportCollision("weil_pairing: no usable auxiliary points");
}

std::pair<CurvePoint, CurvePoint> torsion_basis(const Curve& E, std::uint64_t n) {
  if (n == 1) return {CurvePoint{}, CurvePoint{}};
  if (n % E.field().characteristic() == 0) throw CharacteristicDividesN(std::to_string(n));
  if (!E.has_full_torsion(n)) throw FullTorsionNotRational("E[" + std::to_string(n) + "] over " + E.describe());
  const auto pts = E.find_points_of_order(n);
  for (const auto& P1 : pts)
    for (const auto& P2 : pts)
      if (E.field().mult_order(weil_pairing(n, P1, P2, E)) == n) return {P1, P2};
  throw FullTorsionNotRational("no pair with a primitive pairing value");  // impossible for full E[n]
}

}  // namespace ribet
