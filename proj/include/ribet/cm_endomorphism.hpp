#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ribet/elliptic_curve.hpp"

namespace ribet {

class Divisor;

enum class CMKind {
  gaussian,    // iota^2 = -1 on y^2 = x^3 + a4 x
  eisenstein,  // iota^2 + iota + 1 = 0 on y^2 = x^3 + a6
};

/// The endomorphism m + n*iota of the CM order Z[iota].
struct Endo {
  CMKind kind = CMKind::gaussian;
  std::int64_t m = 0;
  std::int64_t n = 0;

  static Endo integer(CMKind kind, std::int64_t m) { return {kind, m, 0}; }
  static Endo iota(CMKind kind) { return {kind, 0, 1}; }

  /// Parses "m+n*i", "m-n*zeta", "i", "2", "-1+i", ...  A literal without
  /// iota symbol takes `fallback` as its kind.
  static Endo parse(std::string_view literal, CMKind fallback = CMKind::gaussian);

  bool is_zero() const { return m == 0 && n == 0; }

  /// Norm form: m^2 + n^2 (gaussian) or m^2 - mn + n^2 (eisenstein).
  std::int64_t degree() const;
  /// Ring conjugate u-bar, the Rosati dual: u * u-bar = deg(u), u + u-bar in Z.
  Endo rosati_dual() const;
  /// The integer u + u-bar.
  std::int64_t trace() const;

  friend Endo operator+(const Endo& a, const Endo& b);
  friend Endo operator-(const Endo& a, const Endo& b);
  friend Endo operator*(const Endo& a, const Endo& b);
  friend Endo operator-(const Endo& a) { return {a.kind, -a.m, -a.n}; }
  friend bool operator==(const Endo&, const Endo&) = default;

  std::string to_string() const;
};

/// The curve together with a rational model of iota.
///
/// gaussian:   iota(x, y) = (-x, i y)   with i^2 = -1
/// eisenstein: iota(x, y) = (zeta x, y) with zeta^2 + zeta + 1 = 0
///
/// The root is the smallest (packed order) root in the field.  Preimage
/// tables for non-unit endomorphisms are built on demand and cached.
class CMStructure {
 public:
  static std::shared_ptr<const CMStructure> create(std::shared_ptr<const Curve> curve, CMKind kind);

  const Curve& curve() const { return *curve_; }
  const std::shared_ptr<const Curve>& curve_ptr() const { return curve_; }
  CMKind kind() const { return kind_; }
  const FieldElement& root() const { return root_; }

  Endo iota_endo() const { return Endo::iota(kind_); }
  Endo integer(std::int64_t m) const { return Endo::integer(kind_, m); }

  CurvePoint iota(const CurvePoint& P) const;
  /// m P + n iota(P).
  CurvePoint apply(const Endo& u, const CurvePoint& P) const;

  /// Rational points of ker(u), canonical order.
  std::vector<CurvePoint> kernel(const Endo& u) const;
  /// Rational T with u(T) = S, canonical order (may be fewer than deg u).
  std::vector<CurvePoint> preimages(const Endo& u, const CurvePoint& S) const;

  /// u^* D: each point replaced by all of its deg(u) preimages.
  Divisor pullback(const Endo& u, const Divisor& D) const;
  /// u_* D: each point replaced by its image.
  Divisor pushforward(const Endo& u, const Divisor& D) const;

  CMStructure(const CMStructure&) = delete;
  CMStructure& operator=(const CMStructure&) = delete;

 private:
  CMStructure() = default;
  void check_kind(const Endo& u) const;

  using PreimageTable = std::vector<std::pair<std::uint64_t, std::uint32_t>>;  // (image key, index)
  const PreimageTable& preimage_table(const Endo& u) const;

  std::shared_ptr<const Curve> curve_;
  CMKind kind_ = CMKind::gaussian;
  FieldElement root_;

  mutable std::mutex tables_mutex_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<PreimageTable>> tables_;
};

}  // namespace ribet
