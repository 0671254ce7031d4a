#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ribet/cm_endomorphism.hpp"
#include "ribet/divisor.hpp"
#include "ribet/gen_jacobian.hpp"

namespace ribet {

/// The endomorphism a defining the section, with a^3 - a != 0 and
/// a-bar != a enforced by create().
///
/// The dual curve is identified with E through the principal polarization,
/// so the dual and the Rosati dual of a are both the ring conjugate a-bar.
class RibetConfig {
 public:
  /// Throws InvalidEndomorphism if a^3 = a or a-bar = a.
  static RibetConfig create(std::shared_ptr<const CMStructure> cm, const Endo& a);
  /// Skips the endomorphism checks (degenerate controls only).
  static RibetConfig unchecked(std::shared_ptr<const CMStructure> cm, const Endo& a);

  const CMStructure& cm() const { return *cm_; }
  const std::shared_ptr<const CMStructure>& cm_ptr() const { return cm_; }
  const Curve& curve() const { return cm_->curve(); }
  const Endo& a() const { return a_; }
  Endo a_bar() const { return a_.rosati_dual(); }
  /// 2(a-bar - a), the endomorphism carrying q to the projection of beta_J.
  Endo projection_endo() const;
  /// 2 deg(a) deg(a-1) deg(a+1) = 2 deg(a(a^2-1)).
  std::int64_t degree_bound() const;

 private:
  RibetConfig(std::shared_ptr<const CMStructure> cm, const Endo& a) : cm_(std::move(cm)), a_(a) {}

  std::shared_ptr<const CMStructure> cm_;
  Endo a_;
};

/// beta_a = a^*((q) - (-q)) - a_*((q) - (-q)).
/// Throws QInBadLocus (order <= 2 or a^2 q = q), PreimageNotRational.
Divisor beta_a_divisor(const RibetConfig& cfg, const CurvePoint& q);

/// The class of beta_a in the generalized Jacobian of the fiber at q.
JacClass beta_J(const RibetConfig& cfg, const NodalFiber& fiber);

/// gcd(n, 2 deg(a) deg(a-1) deg(a+1)) = 1 and p does not divide n.
bool degree_condition(const RibetConfig& cfg, std::uint64_t n);

struct LambdaPaths {
  /// eval_ratio(n beta_a, (q, -q)).
  FieldElement divisor_ratio;
  /// g_a(q)/g_a(-q) with g_a = (f o a)/Norm_a(f), div f = n(q) - n(-q).
  FieldElement norm_ratio;
};

/// Both routes to lambda, without comparing them.
LambdaPaths lambda_paths(const RibetConfig& cfg, const CurvePoint& q);

/// lambda; throws PathDisagreement when the two routes differ.
FieldElement lambda_two_path(const RibetConfig& cfg, const CurvePoint& q);

struct FiberReport {
  enum class Status { passed, skipped, failed };

  std::string field;
  CurvePoint q;
  std::uint64_t n = 0;
  bool degree_condition = false;
  Status status = Status::passed;
  std::string message;
  CurvePoint projection;
  std::optional<FieldElement> lambda;
  std::uint64_t ord_lambda = 0;
  std::uint64_t ord_beta_j = 0;
  std::optional<FieldElement> pairing_value;
  std::optional<int> sigma;
  double elapsed_ms = 0;
};

std::string to_string(FiberReport::Status s);

/// Checks on the fiber at q: projection = 2(a-bar - a) q, lambda^n = 1,
/// ord(beta_J) = n ord(lambda), n | ord(beta_J) | n^2.  Fibers failing the
/// degree condition are returned as skipped.  Violations are reported in
/// status/message; errors of the constituents propagate.
FiberReport verify_fiber(const RibetConfig& cfg, const CurvePoint& q);

/// The single sign sigma with e_n(2(a-bar - a) q, 2q) = lambda^(2 sigma),
/// frozen by the first fiber where the two choices differ.
class PairingSign {
 public:
  /// Returns the sign consistent with (e, lambda), or 0 when neither sign
  /// holds or the frozen sign is contradicted.
  int observe(const FieldElement& pairing, const FieldElement& lambda);
  std::optional<int> value() const { return sigma_; }

 private:
  std::optional<int> sigma_;
};

struct PairingIdentity {
  FieldElement pairing;    // e_n(2(a-bar - a) q, 2q)
  FieldElement lambda;     // g_a(q)/g_a(-q)
  FieldElement f_of_beta;  // f(beta_a) for div f = n(q) - n(-q)
  bool intermediate_holds = false;  // f(beta_a) = g_a(-q)/g_a(q)
};

PairingIdentity pairing_identity(const RibetConfig& cfg, const CurvePoint& q);

/// Scans q of order n (canonical order) for one whose pairing value has
/// order n, checking the pairing identity against `sign` on every scanned
/// fiber.  The returned report carries pairing_value and sigma, and is
/// marked failed unless ord(beta_J) = n^2.
/// Throws FullTorsionNotRational, InvalidEndomorphism (n not admissible),
/// NoWitnessFound.
FiberReport find_full_order_fiber(const RibetConfig& cfg, std::uint64_t n, PairingSign& sign);

/// verify_fiber over every q with 3 <= ord(q) <= n_max, ordered by n and
/// then by point.  Per-fiber errors become failed reports.  `workers` > 1
/// fans out over threads; the result does not depend on it.
std::vector<FiberReport> lifting_property_scan(const RibetConfig& cfg, std::uint64_t n_max, unsigned workers = 1);

}  // namespace ribet
