#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ribet/finite_field.hpp"

namespace ribet {

/// Affine point on a short Weierstrass curve, or the point at infinity O.
///
/// Points are plain values; the group law lives on Curve.  Ordering puts O
/// first, then compares x and then y by packed field value.
class CurvePoint {
 public:
  CurvePoint() = default;  // O
  static CurvePoint infinity() { return {}; }

  bool is_infinity() const { return infinity_; }
  const FieldElement& x() const { return x_; }
  const FieldElement& y() const { return y_; }

  /// Dense key with the same ordering as the point ordering.
  std::uint64_t key() const {
    return infinity_ ? 0 : (std::uint64_t{1} << 63) | (std::uint64_t{x_.packed()} << 32) | y_.packed();
  }

  friend bool operator==(const CurvePoint& a, const CurvePoint& b) { return a.key() == b.key(); }
  friend std::strong_ordering operator<=>(const CurvePoint& a, const CurvePoint& b) {
    return a.key() <=> b.key();
  }

  /// "O" or "(x,y)".
  std::string to_string() const;

 private:
  friend class Curve;
  CurvePoint(FieldElement x, FieldElement y) : x_(x), y_(y), infinity_(false) {}

  FieldElement x_, y_;
  bool infinity_ = true;
};

/// y^2 = x^3 + a4 x + a6 over a finite field of characteristic > 3.
///
/// The rational points are enumerated lazily on first use and cached; the
/// cache, the group order and the Sylow subgroups are computed once and are
/// safe to read from several threads.
class Curve : public std::enable_shared_from_this<Curve> {
 public:
  static std::shared_ptr<const Curve> create(std::shared_ptr<const FieldSpec> field, FieldElement a4,
                                             FieldElement a6);
  static std::shared_ptr<const Curve> create(std::shared_ptr<const FieldSpec> field, std::int64_t a4,
                                             std::int64_t a6);

  const FieldSpec& field() const { return *field_; }
  const std::shared_ptr<const FieldSpec>& field_ptr() const { return field_; }
  const FieldElement& a4() const { return a4_; }
  const FieldElement& a6() const { return a6_; }

  /// "a4,a6" over the field literal, e.g. "13^1:1,0 | 1,0".
  std::string describe() const;

  bool is_on_curve(const FieldElement& x, const FieldElement& y) const;
  bool is_on_curve(const CurvePoint& P) const;

  /// Validated affine point; throws PointNotOnCurve.
  CurvePoint point(const FieldElement& x, const FieldElement& y) const;

  CurvePoint neg(const CurvePoint& P) const;
  CurvePoint add(const CurvePoint& P, const CurvePoint& Q) const;
  CurvePoint sub(const CurvePoint& P, const CurvePoint& Q) const { return add(P, neg(Q)); }
  CurvePoint dbl(const CurvePoint& P) const { return add(P, P); }
  CurvePoint scalar_mul(std::int64_t k, const CurvePoint& P) const;

  // --- point table -------------------------------------------------------

  /// Number of rational points including O (enumerates on first call).
  std::uint64_t group_order() const;
  const Factorization& group_order_factorization() const;

  /// All rational points in canonical order, O first.  Materializes a copy;
  /// prefer point_at() for large fields.
  std::vector<CurvePoint> enumerate_points() const;
  CurvePoint point_at(std::size_t index) const;
  /// Index of P in the canonical order; P must be on the curve.
  std::size_t index_of(const CurvePoint& P) const;

  std::uint64_t point_order(const CurvePoint& P) const;

  /// Every P with n P = O, in canonical order.
  std::vector<CurvePoint> torsion_points(std::uint64_t n) const;
  /// Every P of exact order n, in canonical order (possibly empty).
  std::vector<CurvePoint> find_points_of_order(std::uint64_t n) const;
  /// True when E[n] has n^2 rational points.
  bool has_full_torsion(std::uint64_t n) const;

  Curve(const Curve&) = delete;
  Curve& operator=(const Curve&) = delete;

 private:
  Curve() = default;
  struct Table;
  const Table& table() const;
  const std::vector<CurvePoint>& sylow_subgroup(std::uint64_t l) const;
  CurvePoint from_key(std::uint64_t key) const;

  std::shared_ptr<const FieldSpec> field_;
  FieldElement a4_, a6_;

  mutable std::once_flag table_once_;
  mutable std::unique_ptr<Table> table_;
  mutable std::mutex sylow_mutex_;
  mutable std::map<std::uint64_t, std::vector<CurvePoint>> sylow_;
};

}  // namespace ribet
