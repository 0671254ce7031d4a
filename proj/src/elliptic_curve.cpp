#include "ribet/elliptic_curve.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "ribet/errors.hpp"

namespace ribet {

struct Curve::Table {
  std::vector<std::uint64_t> keys;  // sorted, keys[0] = 0 is O
  Factorization order_factors;
};

std::string CurvePoint::to_string() const {
  if (infinity_) return "O";
  return "(" + x_.to_string() + "," + y_.to_string() + ")";
}

std::shared_ptr<const Curve> Curve::create(std::shared_ptr<const FieldSpec> field, FieldElement a4,
                                           FieldElement a6) {
  if (!field) throw InvalidCurve("null field");
  if (field->characteristic() <= 3) throw InvalidCurve("characteristic must exceed 3");
  if (a4.field() != field.get() || a6.field() != field.get())
    throw FieldMismatch("curve coefficients not in the curve's field");
  const auto& F = *field;
  auto disc = F.from_int(4) * a4 * a4 * a4 + F.from_int(27) * a6 * a6;
  if (disc.is_zero()) throw InvalidCurve("singular curve (4 a4^3 + 27 a6^2 = 0)");
  std::shared_ptr<Curve> c(new Curve());
  c->field_ = std::move(field);
  c->a4_ = a4;
  c->a6_ = a6;
  return c;
}

std::shared_ptr<const Curve> Curve::create(std::shared_ptr<const FieldSpec> field, std::int64_t a4,
                                           std::int64_t a6) {
  auto A = field->from_int(a4), B = field->from_int(a6);
  return create(std::move(field), A, B);
}

std::string Curve::describe() const {
  return field_->literal() + " | " + a4_.to_string() + "," + a6_.to_string();
}

bool Curve::is_on_curve(const FieldElement& x, const FieldElement& y) const {
  if (x.field() != field_.get() || y.field() != field_.get()) return false;
  return y * y == (x * x + a4_) * x + a6_;
}

bool Curve::is_on_curve(const CurvePoint& P) const { return P.is_infinity() || is_on_curve(P.x_, P.y_); }

CurvePoint Curve::point(const FieldElement& x, const FieldElement& y) const {
  if (!is_on_curve(x, y)) throw PointNotOnCurve("(" + x.to_string() + "," + y.to_string() + ")");
  return {x, y};
}

CurvePoint Curve::neg(const CurvePoint& P) const {
  if (P.infinity_) return P;
  return {P.x_, -P.y_};
}

CurvePoint Curve::add(const CurvePoint& P, const CurvePoint& Q) const {
  if (P.infinity_) return Q;
  if (Q.infinity_) return P;
  FieldElement slope;
  if (P.x_ == Q.x_) {
    if (P.y_ != Q.y_ || P.y_.is_zero()) return {};
    auto x2 = P.x_ * P.x_;
    slope = (x2 + x2 + x2 + a4_) / (P.y_ + P.y_);
  } else {
    slope = (Q.y_ - P.y_) / (Q.x_ - P.x_);
  }
  auto x3 = slope * slope - P.x_ - Q.x_;
  auto y3 = slope * (P.x_ - x3) - P.y_;
  return {x3, y3};
}

CurvePoint Curve::scalar_mul(std::int64_t k, const CurvePoint& P) const {
  CurvePoint base = k < 0 ? neg(P) : P;
  // |INT64_MIN| does not fit; the top bit is handled through unsigned arithmetic.
  std::uint64_t e = k < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(k) : static_cast<std::uint64_t>(k);
  CurvePoint acc;
  while (e) {
    if (e & 1) acc = add(acc, base);
    e >>= 1;
    if (e) base = add(base, base);
  }
  return acc;
}

const Curve::Table& Curve::table() const {
  std::call_once(table_once_, [this] {
    auto t = std::make_unique<Table>();
    const auto& F = *field_;
    const auto q = F.size();
    t->keys.reserve(q + 2);
    t->keys.push_back(0);
    for (std::uint64_t v = 0; v < q; ++v) {
      auto x = F.from_packed(v);
      auto rhs = (x * x + a4_) * x + a6_;
      auto root = F.sqrt(rhs);
      if (!root) continue;
      CurvePoint P{x, *root};
      t->keys.push_back(P.key());
      if (!root->is_zero()) t->keys.push_back(CurvePoint{x, -*root}.key());
    }
    std::sort(t->keys.begin(), t->keys.end());
    t->order_factors = factorize(t->keys.size());
    table_ = std::move(t);
  });
  return *table_;
}

CurvePoint Curve::from_key(std::uint64_t key) const {
  if (key == 0) return {};
  return {field_->from_packed((key >> 32) & 0x7fffffffu), field_->from_packed(key & 0xffffffffu)};
}

std::uint64_t Curve::group_order() const { return table().keys.size(); }

const Factorization& Curve::group_order_factorization() const { return table().order_factors; }

std::vector<CurvePoint> Curve::enumerate_points() const {
  const auto& keys = table().keys;
  std::vector<CurvePoint> out;
  out.reserve(keys.size());
  for (auto k : keys) out.push_back(from_key(k));
  return out;
}

CurvePoint Curve::point_at(std::size_t index) const { return from_key(table().keys.at(index)); }

std::size_t Curve::index_of(const CurvePoint& P) const {
  const auto& keys = table().keys;
  auto it = std::lower_bound(keys.begin(), keys.end(), P.key());
  if (it == keys.end() || *it != P.key()) throw PointNotOnCurve(P.to_string());
  return static_cast<std::size_t>(it - keys.begin());
}

std::uint64_t Curve::point_order(const CurvePoint& P) const {
  if (!is_on_curve(P)) throw PointNotOnCurve(P.to_string());
  std::uint64_t ord = group_order();
  for (auto [l, e] : group_order_factorization()) {
    for (unsigned i = 0; i < e; ++i) {
      if (!scalar_mul(static_cast<std::int64_t>(ord / l), P).is_infinity()) break;
      ord /= l;
    }
  }
  return ord;
}

// The l-primary part S of E(F), generated by images of points under the
// cofactor map.  Points are drawn with a fixed stride through the table so
// the generators are spread out but the result is reproducible.
const std::vector<CurvePoint>& Curve::sylow_subgroup(std::uint64_t l) const {
  std::lock_guard lock(sylow_mutex_);
  if (auto it = sylow_.find(l); it != sylow_.end()) return it->second;

  const auto N = group_order();
  std::uint64_t target = 1;
  for (auto [r, e] : group_order_factorization())
    if (r == l) target = ipow(r, e);
  const auto cofactor = static_cast<std::int64_t>(N / target);

  std::vector<CurvePoint> H{CurvePoint{}};
  std::unordered_set<std::uint64_t> seen{0};
  std::uint64_t stride = 7919;
  while (std::gcd(stride, N) != 1) stride += 2;
  for (std::uint64_t k = 1; H.size() < target && k <= N; ++k) {
    auto R = scalar_mul(cofactor, point_at((k * stride) % N));
    if (seen.count(R.key())) continue;
    // Cosets H + jR until jR falls back into H.
    std::vector<CurvePoint> grown = H;
    CurvePoint shift = R;
    while (!seen.count(shift.key())) {
      for (const auto& h : H) grown.push_back(add(h, shift));
      shift = add(shift, R);
      for (std::size_t i = grown.size() - H.size(); i < grown.size(); ++i) seen.insert(grown[i].key());
    }
    H = std::move(grown);
  }
  std::sort(H.begin(), H.end());
  return sylow_.emplace(l, std::move(H)).first->second;
}

std::vector<CurvePoint> Curve::torsion_points(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("torsion_points: n must be positive");
  std::vector<CurvePoint> acc{CurvePoint{}};
  const auto N = group_order();
  for (auto [l, e] : factorize(n)) {
    if (N % l != 0) continue;
    const auto le = static_cast<std::int64_t>(ipow(l, e));
    std::vector<CurvePoint> part;
    for (const auto& P : sylow_subgroup(l))
      if (scalar_mul(le, P).is_infinity()) part.push_back(P);
    std::vector<CurvePoint> next;
    next.reserve(acc.size() * part.size());
    for (const auto& A : acc)
      for (const auto& B : part) next.push_back(add(A, B));
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

std::vector<CurvePoint> Curve::find_points_of_order(std::uint64_t n) const {
  std::vector<CurvePoint> out;
  if (n == 0 || group_order() % n != 0) return out;
  const auto primes = prime_divisors(n);
  for (const auto& P : torsion_points(n)) {
    bool exact = true;
    for (auto l : primes)
      if (scalar_mul(static_cast<std::int64_t>(n / l), P).is_infinity()) {
        exact = false;
        break;
      }
    if (exact) out.push_back(P);
  }
  return out;
}

bool Curve::has_full_torsion(std::uint64_t n) const {
  if (group_order() % (n * n) != 0) return false;
  return torsion_points(n).size() == n * n;
}

}  // namespace ribet
