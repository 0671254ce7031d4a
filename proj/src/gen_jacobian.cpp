#include "ribet/gen_jacobian.hpp"

#include "ribet/errors.hpp"

namespace ribet {

NodalFiber::NodalFiber(const Curve& curve, const CurvePoint& q) : curve_(&curve) {
  if (!curve.is_on_curve(q)) throw PointNotOnCurve(q.to_string());
  pair_ = EvalPair::of(curve, q);
}

JacClass::JacClass(const NodalFiber& fiber, Divisor rep) : fiber_(&fiber), rep_(std::move(rep)) {
  if (&rep_.curve() != &fiber.curve()) throw CurveMismatch("representative on another curve");
  if (rep_.degree() != 0) throw InvalidFiber("representative must have degree 0");
  const auto& pr = fiber.gluing_pair();
  if (rep_.multiplicity(pr.plus) != 0 || rep_.multiplicity(pr.minus) != 0)
    throw InvalidFiber("representative meets the node {q, -q}");
}

namespace {

void require_same_fiber(const JacClass& a, const JacClass& b) {
  if (&a.fiber() != &b.fiber()) throw CurveMismatch("classes on different fibers");
}

}  // namespace

JacClass operator+(const JacClass& a, const JacClass& b) {
  require_same_fiber(a, b);
  return {a.fiber(), a.rep() + b.rep()};
}

JacClass operator-(const JacClass& a, const JacClass& b) {
  require_same_fiber(a, b);
  return {a.fiber(), a.rep() - b.rep()};
}

JacClass operator*(std::int64_t k, const JacClass& z) { return {z.fiber(), k * z.rep()}; }

std::string JacClass::to_string() const {
  return "{fiber: (" + fiber_->curve().field().literal() + ", " + fiber_->curve().a4().to_string() + "," +
         fiber_->curve().a6().to_string() + ", " + fiber_->q().to_string() + "), rep: " + rep_.to_string() + "}";
}

CurvePoint jac_project(const JacClass& z) { return z.rep().sum_point(); }

FieldElement jac_kernel_value(const JacClass& z) {
  if (!jac_project(z).is_infinity()) throw NotInKernel("projection is " + jac_project(z).to_string());
  return eval_ratio(z.rep(), z.fiber().gluing_pair());
}

std::uint64_t jac_order(const JacClass& z) {
  const auto& E = z.fiber().curve();
  const auto m = E.point_order(jac_project(z));
  const auto lambda = jac_kernel_value(static_cast<std::int64_t>(m) * z);
  return m * E.field().mult_order(lambda);
}

bool same_class(const JacClass& a, const JacClass& b) {
  auto d = a - b;
  return jac_project(d).is_infinity() && jac_kernel_value(d).is_one();
}

}  // namespace ribet
