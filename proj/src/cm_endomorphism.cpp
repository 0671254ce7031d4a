#include "ribet/cm_endomorphism.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "ribet/divisor.hpp"
#include "ribet/errors.hpp"

namespace ribet {

namespace {

void require_same_kind(const Endo& a, const Endo& b) {
  if (a.kind != b.kind) throw InvalidEndomorphism("endomorphisms of different CM orders");
}

}  // namespace

Endo Endo::parse(std::string_view literal, CMKind fallback) {
  std::string s;
  for (char c : literal)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigError("empty endomorphism literal");

  std::optional<CMKind> kind;
  std::int64_t m = 0, n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw ConfigError("bad endomorphism literal '" + s + "'");
    }
    std::int64_t coeff = 1;
    bool has_number = false;
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), coeff);
      if (ec != std::errc()) throw ConfigError("bad integer in '" + s + "'");
      pos = static_cast<std::size_t>(ptr - s.data());
      has_number = true;
    }
    bool has_iota = false;
    if (pos < s.size() && s[pos] == '*') {
      if (!has_number) throw ConfigError("bad endomorphism literal '" + s + "'");
      ++pos;
    } else if (has_number) {
      m += sign * coeff;
      continue;
    }
    for (auto [word, k] : {std::pair{std::string_view("zeta"), CMKind::eisenstein},
                           std::pair{std::string_view("i"), CMKind::gaussian}}) {
      if (s.compare(pos, word.size(), word) == 0) {
        if (kind && *kind != k) throw ConfigError("mixed iota symbols in '" + s + "'");
        kind = k;
        pos += word.size();
        has_iota = true;
        break;
      }
    }
    if (!has_iota) throw ConfigError("bad endomorphism literal '" + s + "'");
    n += sign * coeff;
  }
  return {kind.value_or(fallback), m, n};
}

std::int64_t Endo::degree() const {
  return kind == CMKind::gaussian ? m * m + n * n : m * m - m * n + n * n;
}

Endo Endo::rosati_dual() const {
  return kind == CMKind::gaussian ? Endo{kind, m, -n} : Endo{kind, m - n, -n};
}

std::int64_t Endo::trace() const { return kind == CMKind::gaussian ? 2 * m : 2 * m - n; }

Endo operator+(const Endo& a, const Endo& b) {
  require_same_kind(a, b);
  return {a.kind, a.m + b.m, a.n + b.n};
}

Endo operator-(const Endo& a, const Endo& b) {
  require_same_kind(a, b);
  return {a.kind, a.m - b.m, a.n - b.n};
}

Endo operator*(const Endo& a, const Endo& b) {
  require_same_kind(a, b);
  if (a.kind == CMKind::gaussian) return {a.kind, a.m * b.m - a.n * b.n, a.m * b.n + a.n * b.m};
  // iota^2 = -1 - iota
  return {a.kind, a.m * b.m - a.n * b.n, a.m * b.n + a.n * b.m - a.n * b.n};
}

std::string Endo::to_string() const {
  const char* sym = kind == CMKind::gaussian ? "i" : "zeta";
  std::string s = std::to_string(m);
  s += n < 0 ? "-" : "+";
  s += std::to_string(n < 0 ? -n : n) + "*" + sym;
  return s;
}

std::shared_ptr<const CMStructure> CMStructure::create(std::shared_ptr<const Curve> curve, CMKind kind) {
  const auto& F = curve->field();
  std::shared_ptr<CMStructure> cm(new CMStructure());
  cm->kind_ = kind;
  if (kind == CMKind::gaussian) {
    if (!curve->a6().is_zero()) throw InvalidCM("gaussian CM needs a curve y^2 = x^3 + a4 x");
    auto i = F.sqrt(-F.one());
    if (!i) throw InvalidCM("the field has no square root of -1");
    cm->root_ = *i;  // the smaller of the two roots
  } else {
    if (!curve->a4().is_zero()) throw InvalidCM("eisenstein CM needs a curve y^2 = x^3 + a6");
    auto roots = F.primitive_roots_of_unity(3);
    if (roots.empty()) throw InvalidCM("the field has no primitive cube root of unity");
    cm->root_ = roots.front();
  }
  cm->curve_ = std::move(curve);

  // iota must map the curve to itself; Curve::point re-validates each image.
  const auto N = cm->curve_->group_order();
  const std::uint64_t samples = std::min<std::uint64_t>(N, 100);
  for (std::uint64_t k = 0; k < samples; ++k) {
    auto P = cm->curve_->point_at((k * 104729) % N);
    try {
      (void)cm->iota(P);
    } catch (const PointNotOnCurve&) {
      throw InvalidCM("iota does not preserve the curve");
    }
  }
  return cm;
}

void CMStructure::check_kind(const Endo& u) const {
  if (u.kind != kind_) throw InvalidEndomorphism(u.to_string() + " is not in this CM order");
}

CurvePoint CMStructure::iota(const CurvePoint& P) const {
  if (P.is_infinity()) return P;
  if (kind_ == CMKind::gaussian) return curve_->point(-P.x(), root_ * P.y());
  return curve_->point(root_ * P.x(), P.y());
}

CurvePoint CMStructure::apply(const Endo& u, const CurvePoint& P) const {
  check_kind(u);
  if (!curve_->is_on_curve(P)) throw PointNotOnCurve(P.to_string());
  auto a = curve_->scalar_mul(u.m, P);
  if (u.n == 0) return a;
  return curve_->add(a, curve_->scalar_mul(u.n, iota(P)));
}

std::vector<CurvePoint> CMStructure::kernel(const Endo& u) const {
  check_kind(u);
  if (u.is_zero()) throw ZeroEndomorphism("kernel of 0");
  // u-bar u = deg u, so ker(u) lies in E[deg u].
  std::vector<CurvePoint> out;
  for (const auto& P : curve_->torsion_points(static_cast<std::uint64_t>(u.degree())))
    if (apply(u, P).is_infinity()) out.push_back(P);
  return out;
}

const CMStructure::PreimageTable& CMStructure::preimage_table(const Endo& u) const {
  std::lock_guard lock(tables_mutex_);
  auto& slot = tables_[{u.m, u.n}];
  if (!slot) {
    auto t = std::make_unique<PreimageTable>();
    const auto N = curve_->group_order();
    t->reserve(N);
    for (std::uint64_t i = 0; i < N; ++i)
      t->emplace_back(apply(u, curve_->point_at(i)).key(), static_cast<std::uint32_t>(i));
    std::sort(t->begin(), t->end());
    slot = std::move(t);
  }
  return *slot;
}

std::vector<CurvePoint> CMStructure::preimages(const Endo& u, const CurvePoint& S) const {
  check_kind(u);
  if (u.is_zero()) throw ZeroEndomorphism("preimages under 0");
  if (!curve_->is_on_curve(S)) throw PointNotOnCurve(S.to_string());
  // Units invert through their conjugate.
  if (u.degree() == 1) return {apply(u.rosati_dual(), S)};
  if (S.is_infinity()) return kernel(u);
  const auto& t = preimage_table(u);
  auto lo = std::lower_bound(t.begin(), t.end(), std::pair{S.key(), std::uint32_t{0}});
  std::vector<CurvePoint> out;
  for (auto it = lo; it != t.end() && it->first == S.key(); ++it) out.push_back(curve_->point_at(it->second));
  return out;
}

Divisor CMStructure::pullback(const Endo& u, const Divisor& D) const {
  check_kind(u);
  if (u.is_zero()) throw ZeroEndomorphism("pullback along 0");
  const auto deg = static_cast<std::size_t>(u.degree());
  Divisor out(*curve_);
  for (const auto& [S, c] : D.terms()) {
    auto pre = preimages(u, S);
    if (pre.size() != deg)
      throw PreimageNotRational(S.to_string() + " has " + std::to_string(pre.size()) + " rational preimages under " +
                                u.to_string() + ", expected " + std::to_string(deg));
    for (const auto& T : pre) out.add_point(T, c);
  }
  return out;
}

Divisor CMStructure::pushforward(const Endo& u, const Divisor& D) const {
  check_kind(u);
  if (u.is_zero()) throw ZeroEndomorphism("pushforward along 0");
  Divisor out(*curve_);
  for (const auto& [S, c] : D.terms()) out.add_point(apply(u, S), c);
  return out;
}

}  // namespace ribet
