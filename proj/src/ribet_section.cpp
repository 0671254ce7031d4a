#include "ribet/ribet_section.hpp"

#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include "ribet/errors.hpp"
#include "ribet/function_eval.hpp"

namespace ribet {

RibetConfig RibetConfig::create(std::shared_ptr<const CMStructure> cm, const Endo& a) {
  if (a.kind != cm->kind()) throw InvalidEndomorphism(a.to_string() + " is not in the curve's CM order");
  if ((a * a * a - a).is_zero()) throw InvalidEndomorphism("a^3 - a = 0 for a = " + a.to_string());
  if (a.rosati_dual() == a) throw InvalidEndomorphism("a-bar = a for a = " + a.to_string());
  return {std::move(cm), a};
}

RibetConfig RibetConfig::unchecked(std::shared_ptr<const CMStructure> cm, const Endo& a) {
  if (a.kind != cm->kind()) throw InvalidEndomorphism(a.to_string() + " is not in the curve's CM order");
  return {std::move(cm), a};
}

Endo RibetConfig::projection_endo() const { return cm_->integer(2) * (a_bar() - a_); }

std::int64_t RibetConfig::degree_bound() const {
  const auto one = cm_->integer(1);
  return 2 * a_.degree() * (a_ - one).degree() * (a_ + one).degree();
}

Divisor beta_a_divisor(const RibetConfig& cfg, const CurvePoint& q) {
  const auto& E = cfg.curve();
  const auto& cm = cfg.cm();
  if (!E.is_on_curve(q)) throw PointNotOnCurve(q.to_string());
  if (q.is_infinity() || E.dbl(q).is_infinity()) throw QInBadLocus(q.to_string() + " has order <= 2");
  if (cm.apply(cfg.a() * cfg.a(), q) == q) throw QInBadLocus(q.to_string() + " lies in ker(a^2 - 1)");
  auto base = Divisor::point(E, q) - Divisor::point(E, E.neg(q));
  return cm.pullback(cfg.a(), base) - cm.pushforward(cfg.a(), base);
}

JacClass beta_J(const RibetConfig& cfg, const NodalFiber& fiber) {
  if (&fiber.curve() != &cfg.curve()) throw CurveMismatch("fiber on another curve");
  return {fiber, beta_a_divisor(cfg, fiber.q())};
}

bool degree_condition(const RibetConfig& cfg, std::uint64_t n) {
  if (n % cfg.curve().field().characteristic() == 0) return false;
  const auto bound = static_cast<std::uint64_t>(cfg.degree_bound());
  return std::gcd(n, bound) == 1;
}

namespace {

Divisor node_divisor(const Curve& E, const CurvePoint& q, std::int64_t n) {
  return n * (Divisor::point(E, q) - Divisor::point(E, E.neg(q)));
}

}  // namespace

LambdaPaths lambda_paths(const RibetConfig& cfg, const CurvePoint& q) {
  const auto& E = cfg.curve();
  const auto& cm = cfg.cm();
  const auto n = static_cast<std::int64_t>(E.point_order(q));
  const auto beta = beta_a_divisor(cfg, q);
  const auto pair = EvalPair::of(E, q);

  LambdaPaths out;
  out.divisor_ratio = eval_ratio(n * beta, pair);

  // g_a(q)/g_a(-q) = [f(aq) / Norm_a f(q)] / [f(-aq) / Norm_a f(-q)]; any
  // rescaling of f cancels.
  const auto target = node_divisor(E, q, n);
  const auto aq = cm.apply(cfg.a(), q);
  for (unsigned attempt = 0; attempt <= kCollisionRetries; ++attempt) {
    try {
      auto f = function_with_divisor(target, attempt);
      auto g_plus = eval_program(f, aq) / norm_along(cm, cfg.a(), f, pair.plus);
      auto g_minus = eval_program(f, E.neg(aq)) / norm_along(cm, cfg.a(), f, pair.minus);
      out.norm_ratio = g_plus / g_minus;
      return out;
    } catch (const SupportCollision&) {
    }
  }
  throw SupportCollision("norm route: retry budget exhausted at q = " + q.to_string());
}

FieldElement lambda_two_path(const RibetConfig& cfg, const CurvePoint& q) {
  auto paths = lambda_paths(cfg, q);
  if (paths.divisor_ratio != paths.norm_ratio)
    throw PathDisagreement("at q = " + q.to_string() + ": " + paths.divisor_ratio.to_string() + " vs " +
                           paths.norm_ratio.to_string());
  return paths.divisor_ratio;
}

std::string to_string(FiberReport::Status s) {
  switch (s) {
    case FiberReport::Status::passed: return "passed";
    case FiberReport::Status::skipped: return "skipped";
    case FiberReport::Status::failed: return "failed";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

void fail(FiberReport& r, const std::string& what) {
  r.status = FiberReport::Status::failed;
  if (!r.message.empty()) r.message += "; ";
  r.message += what;
}

// Fills projection, lambda and the orders; records the order checks.
void measure_fiber(const RibetConfig& cfg, const CurvePoint& q, FiberReport& r) {
  const auto& E = cfg.curve();
  const auto& F = E.field();
  NodalFiber fiber(E, q);
  auto z = beta_J(cfg, fiber);

  r.projection = jac_project(z);
  if (r.projection != cfg.cm().apply(cfg.projection_endo(), q)) fail(r, "projection != 2(abar-a)q");

  auto lambda = lambda_two_path(cfg, q);
  r.lambda = lambda;
  r.ord_lambda = F.mult_order(lambda);
  if (!lambda.pow(static_cast<std::int64_t>(r.n)).is_one()) fail(r, "lambda^n != 1");

  r.ord_beta_j = jac_order(z);
  if (r.ord_beta_j != r.n * r.ord_lambda) fail(r, "ord(beta_J) != n ord(lambda)");
  if (r.ord_beta_j % r.n != 0) fail(r, "n does not divide ord(beta_J)");
  if ((r.n * r.n) % r.ord_beta_j != 0) fail(r, "ord(beta_J) does not divide n^2");
}

}  // namespace

FiberReport verify_fiber(const RibetConfig& cfg, const CurvePoint& q) {
  const auto start = Clock::now();
  FiberReport r;
  r.field = cfg.curve().field().literal();
  r.q = q;
  r.n = cfg.curve().point_order(q);
  r.degree_condition = degree_condition(cfg, r.n);
  if (!r.degree_condition) {
    r.status = FiberReport::Status::skipped;
    r.message = "degree condition: gcd(n, p * " + std::to_string(cfg.degree_bound()) + ") > 1";
  } else {
    measure_fiber(cfg, q, r);
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return r;
}

int PairingSign::observe(const FieldElement& pairing, const FieldElement& lambda) {
  const bool plus = pairing == lambda.pow(2);
  const bool minus = pairing == lambda.pow(-2);
  if (!plus && !minus) return 0;
  if (plus && minus) return sigma_.value_or(1);
  const int s = plus ? 1 : -1;
  if (!sigma_) sigma_ = s;
  return *sigma_ == s ? s : 0;
}

PairingIdentity pairing_identity(const RibetConfig& cfg, const CurvePoint& q) {
  const auto& E = cfg.curve();
  const auto n = E.point_order(q);
  const auto beta = beta_a_divisor(cfg, q);

  PairingIdentity out;
  out.lambda = lambda_two_path(cfg, q);
  const auto target = node_divisor(E, q, static_cast<std::int64_t>(n));
  bool have_f = false;
  for (unsigned attempt = 0; attempt <= kCollisionRetries && !have_f; ++attempt) {
    try {
      out.f_of_beta = eval_on_divisor(function_with_divisor(target, attempt), beta);
      have_f = true;
    } catch (const SupportCollision&) {
    }
  }
  if (!have_f) throw SupportCollision("f(beta_a): retry budget exhausted at q = " + q.to_string());
  out.intermediate_holds = out.f_of_beta == out.lambda.inverse();
  out.pairing = weil_pairing(n, beta.sum_point(), E.dbl(q), E);
  return out;
}

FiberReport find_full_order_fiber(const RibetConfig& cfg, std::uint64_t n, PairingSign& sign) {
  const auto& E = cfg.curve();
  const auto& F = E.field();
  const auto one = cfg.cm().integer(1);
  const auto a = cfg.a();
  const auto admissible = ((a * a - one) * (cfg.a_bar() - a)).degree();
  if (n < 3 || n % 2 == 0 || std::gcd(n, static_cast<std::uint64_t>(admissible)) != 1 ||
      n % F.characteristic() == 0)
    throw InvalidEndomorphism("n = " + std::to_string(n) + " must be odd, > 1 and prime to p and " +
                              std::to_string(admissible));
  if (!E.has_full_torsion(n)) throw FullTorsionNotRational("E[" + std::to_string(n) + "] over " + E.describe());

  for (const auto& q : E.find_points_of_order(n)) {
    const auto start = Clock::now();
    auto id = pairing_identity(cfg, q);
    const int s = sign.observe(id.pairing, id.lambda);
    const bool witness = F.mult_order(id.pairing) == n;
    if (!witness && s != 0 && id.intermediate_holds) continue;

    FiberReport r;
    r.field = F.literal();
    r.q = q;
    r.n = n;
    r.degree_condition = degree_condition(cfg, n);
    r.pairing_value = id.pairing;
    if (s != 0) r.sigma = s;
    measure_fiber(cfg, q, r);
    if (!id.intermediate_holds) fail(r, "f(beta_a) != g_a(-q)/g_a(q)");
    if (s == 0) fail(r, "pairing identity fails for the frozen sign");
    if (witness && r.ord_beta_j != n * n) fail(r, "ord(beta_J) != n^2 at a witness fiber");
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
  }
  throw NoWitnessFound("no q of order " + std::to_string(n) + " with a primitive pairing value over " + E.describe());
}

std::vector<FiberReport> lifting_property_scan(const RibetConfig& cfg, std::uint64_t n_max, unsigned workers) {
  const auto& E = cfg.curve();
  std::vector<CurvePoint> fibers;
  for (std::uint64_t n = 3; n <= n_max; ++n)
    for (const auto& q : E.find_points_of_order(n)) fibers.push_back(q);

  std::vector<FiberReport> out(fibers.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < fibers.size(); i = next++) {
      try {
        out[i] = verify_fiber(cfg, fibers[i]);
      } catch (const Error& e) {
        FiberReport r;
        r.field = E.field().literal();
        r.q = fibers[i];
        r.n = E.point_order(fibers[i]);
        r.degree_condition = degree_condition(cfg, r.n);
        r.status = FiberReport::Status::failed;
        r.message = e.what();
        out[i] = std::move(r);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace ribet
