#include "ribet/finite_field.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "ribet/errors.hpp"

namespace ribet {

namespace {

using Digits = std::vector<std::uint32_t>;

Digits unpack(std::uint64_t v, std::uint64_t p, unsigned m) {
  Digits d(m);
  for (unsigned i = 0; i < m; ++i) {
    d[i] = static_cast<std::uint32_t>(v % p);
    v /= p;
  }
  return d;
}

std::uint64_t pack(const Digits& d, std::uint64_t p) {
  std::uint64_t v = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) v = v * p + *it;
  return v;
}

// Product of two residues modulo a monic modulus of degree m, schoolbook.
Digits poly_mulmod(const Digits& a, const Digits& b, const Digits& monic, std::uint64_t p) {
  const auto m = static_cast<unsigned>(monic.size() - 1);
  std::vector<std::uint64_t> prod(2 * m - 1, 0);
  for (unsigned i = 0; i < m; ++i) {
    if (!a[i]) continue;
    for (unsigned j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{a[i]} * b[j]) % p;
  }
  for (unsigned k = 2 * m - 1; k-- > m;) {
    auto c = prod[k];
    if (!c) continue;
    for (unsigned j = 0; j < m; ++j) prod[k - m + j] = (prod[k - m + j] + (p - c) * monic[j]) % p;
    prod[k] = 0;
  }
  Digits out(m);
  for (unsigned i = 0; i < m; ++i) out[i] = static_cast<std::uint32_t>(prod[i]);
  return out;
}

Digits poly_powmod(Digits base, std::uint64_t e, const Digits& monic, std::uint64_t p) {
  Digits r(monic.size() - 1, 0);
  r[0] = 1;
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, monic, p);
    base = poly_mulmod(base, base, monic, p);
    e >>= 1;
  }
  return r;
}

// True when `divisor` (monic) divides `poly` over F_p.
bool poly_divides(const Digits& divisor, Digits poly, std::uint64_t p) {
  const auto d = divisor.size() - 1;
  for (std::size_t k = poly.size(); k-- > d;) {
    std::uint64_t c = poly[k];
    if (!c) continue;
    for (std::size_t j = 0; j <= d; ++j)
      poly[k - d + j] = static_cast<std::uint32_t>((poly[k - d + j] + (p - c) * divisor[j]) % p);
  }
  for (std::size_t j = 0; j < d; ++j)
    if (poly[j]) return false;
  return true;
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InvalidField("not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

bool FieldSpec::is_irreducible(std::uint64_t p, std::span<const std::uint32_t> monic) {
  const auto m = monic.size() - 1;
  if (m <= 1) return m == 1;
  Digits poly(monic.begin(), monic.end());
  // Any factorization has a monic factor of degree <= m/2.
  for (std::size_t d = 1; d <= m / 2; ++d) {
    const auto count = ipow(p, static_cast<unsigned>(d));
    for (std::uint64_t low = 0; low < count; ++low) {
      auto f = unpack(low, p, static_cast<unsigned>(d));
      f.push_back(1);
      if (poly_divides(f, poly, p)) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> FieldSpec::find_irreducible(std::uint64_t p, unsigned m) {
  const auto count = ipow(p, m);
  for (std::uint64_t low = 0; low < count; ++low) {
    auto f = unpack(low, p, m);
    f.push_back(1);
    if (is_irreducible(p, f)) return f;
  }
  throw InvalidField("no irreducible polynomial found");  // unreachable for prime p
}

std::shared_ptr<const FieldSpec> FieldSpec::create(std::uint64_t p, unsigned m,
                                                   std::vector<std::uint32_t> modulus,
                                                   std::uint64_t max_size) {
  if (!is_prime(p)) throw InvalidField(std::to_string(p) + " is not prime");
  if (p == 2) throw InvalidField("characteristic 2 is not supported");
  if (m == 0) throw InvalidField("extension degree must be >= 1");
  long double approx = 1;
  for (unsigned i = 0; i < m; ++i) approx *= static_cast<long double>(p);
  if (approx > static_cast<long double>(max_size))
    throw FieldTooLarge(std::to_string(p) + "^" + std::to_string(m) + " exceeds bound " +
                        std::to_string(max_size));

  std::shared_ptr<FieldSpec> f(new FieldSpec());
  f->p_ = p;
  f->m_ = m;
  f->q_ = ipow(p, m);
  f->order_ = static_cast<std::uint32_t>(f->q_ - 1);

  if (m == 1) {
    if (!modulus.empty() && !(modulus.size() == 2 && modulus[1] == 1 && modulus[0] == 0))
      throw InvalidField("prime fields take no modulus other than t");
    f->modulus_ = {0, 1};
  } else if (modulus.empty()) {
    f->modulus_ = find_irreducible(p, m);
  } else {
    if (modulus.size() != m + 1 || modulus.back() != 1)
      throw InvalidField("modulus must be monic of degree " + std::to_string(m));
    for (auto c : modulus)
      if (c >= p) throw InvalidField("modulus coefficient out of range");
    if (!is_irreducible(p, modulus)) throw InvalidField("modulus is reducible");
    f->modulus_ = std::move(modulus);
  }

  f->unit_factors_ = factorize(f->q_ - 1);

  // Smallest packed value that generates the unit group.  For m = 1 the
  // residues multiply through the same routine with a degree-1 "modulus".
  const Digits monic = m == 1 ? Digits{0, 1} : f->modulus_;
  auto is_generator = [&](std::uint64_t packed) {
    auto g = unpack(packed, p, m);
    for (auto [l, e] : f->unit_factors_) {
      if (pack(poly_powmod(g, (f->q_ - 1) / l, monic, p), p) == 1) return false;
    }
    return true;
  };
  std::uint64_t gen = 1;
  while (f->q_ > 2 && !is_generator(gen)) ++gen;

  f->exp_.assign(f->order_, 0);
  f->log_.assign(f->q_, kNone);
  auto g = unpack(gen, p, m);
  Digits cur(m, 0);
  cur[0] = 1;
  for (std::uint32_t k = 0; k < f->order_; ++k) {
    auto v = static_cast<std::uint32_t>(pack(cur, p));
    if (f->log_[v] != kNone) throw InvalidField("modulus does not define a field");
    f->exp_[k] = v;
    f->log_[v] = k;
    cur = poly_mulmod(cur, g, monic, p);
  }

  f->zech_.assign(f->order_, kNone);
  for (std::uint32_t k = 0; k < f->order_; ++k) {
    std::uint32_t v = f->exp_[k];
    auto c0 = static_cast<std::uint32_t>(v % p);
    std::uint32_t w = v - c0 + static_cast<std::uint32_t>((c0 + 1) % p);
    f->zech_[k] = w == 0 ? kNone : f->log_[w];
  }
  return f;
}

std::shared_ptr<const FieldSpec> FieldSpec::parse(std::string_view literal, std::uint64_t max_size) {
  auto colon = literal.find(':');
  auto head = literal.substr(0, colon);
  auto caret = head.find('^');
  std::uint64_t p = parse_uint(head.substr(0, caret));
  std::uint64_t m = caret == std::string_view::npos ? 1 : parse_uint(head.substr(caret + 1));
  if (m == 0 || m > 64) throw InvalidField("bad extension degree in '" + std::string(literal) + "'");
  std::vector<std::uint32_t> modulus;
  if (colon != std::string_view::npos) {
    auto rest = literal.substr(colon + 1);
    std::vector<std::uint32_t> leading_first;
    while (true) {
      auto comma = rest.find(',');
      auto v = parse_uint(rest.substr(0, comma));
      if (v >= p) throw InvalidField("modulus coefficient out of range");
      leading_first.push_back(static_cast<std::uint32_t>(v));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    modulus.assign(leading_first.rbegin(), leading_first.rend());
  }
  return create(p, static_cast<unsigned>(m), std::move(modulus), max_size);
}

std::string FieldSpec::literal() const {
  std::ostringstream os;
  os << p_ << '^' << m_ << ':';
  for (std::size_t i = modulus_.size(); i-- > 0;) os << modulus_[i] << (i ? "," : "");
  return os.str();
}

FieldElement FieldSpec::from_int(std::int64_t v) const {
  return {this, static_cast<std::uint32_t>(mod_floor(v, p_))};
}

FieldElement FieldSpec::from_coeffs(std::span<const std::int64_t> coeffs) const {
  if (coeffs.size() > m_) throw InvalidField("too many coefficients for degree " + std::to_string(m_));
  Digits d(m_, 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) d[i] = static_cast<std::uint32_t>(mod_floor(coeffs[i], p_));
  return {this, static_cast<std::uint32_t>(pack(d, p_))};
}

FieldElement FieldSpec::from_packed(std::uint64_t packed) const {
  if (packed >= q_) throw InvalidField("packed value out of range");
  return {this, static_cast<std::uint32_t>(packed)};
}

void FieldSpec::check_same(const FieldElement& a, const FieldElement& b) const {
  if (a.field_ != b.field_ || a.field_ == nullptr) throw FieldMismatch("operands from different fields");
}

std::uint32_t FieldSpec::add(std::uint32_t a, std::uint32_t b) const {
  if (a == 0) return b;
  if (b == 0) return a;
  std::uint32_t i = log_[a], j = log_[b];
  std::uint32_t d = j >= i ? j - i : j + order_ - i;
  std::uint32_t z = zech_[d];
  if (z == kNone) return 0;
  std::uint32_t k = i + z;
  if (k >= order_) k -= order_;
  return exp_[k];
}

std::uint32_t FieldSpec::neg(std::uint32_t a) const {
  if (a == 0) return 0;
  std::uint32_t k = log_[a] + order_ / 2;  // log(-1) = (q-1)/2 for odd q
  if (k >= order_) k -= order_;
  return exp_[k];
}

std::uint32_t FieldSpec::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  std::uint32_t k = log_[a] + log_[b];
  if (k >= order_) k -= order_;
  return exp_[k];
}

std::uint32_t FieldSpec::inv(std::uint32_t a) const {
  if (a == 0) throw DivisionByZero("inverse of zero");
  std::uint32_t l = log_[a];
  return exp_[l == 0 ? 0 : order_ - l];
}

std::uint32_t FieldSpec::pow(std::uint32_t a, std::int64_t k) const {
  if (a == 0) {
    if (k < 0) throw DivisionByZero("negative power of zero");
    return k == 0 ? 1 : 0;
  }
  auto e = mod_floor(k, order_);
  return exp_[(std::uint64_t{log_[a]} * e) % order_];
}

std::uint64_t FieldSpec::mult_order(const FieldElement& x) const {
  if (x.field_ != this) throw FieldMismatch("element from another field");
  if (x.is_zero()) throw ZeroElement("multiplicative order of zero");
  std::uint64_t ord = q_ - 1;
  for (auto [l, e] : unit_factors_) {
    for (unsigned i = 0; i < e; ++i) {
      if (pow(x.value_, static_cast<std::int64_t>(ord / l)) != 1) break;
      ord /= l;
    }
  }
  return ord;
}

bool FieldSpec::is_square(const FieldElement& x) const {
  if (x.field_ != this) throw FieldMismatch("element from another field");
  return x.is_zero() || log_[x.value_] % 2 == 0;
}

std::optional<FieldElement> FieldSpec::sqrt(const FieldElement& x) const {
  if (!is_square(x)) return std::nullopt;
  if (x.is_zero()) return zero();
  FieldElement r{this, exp_[log_[x.value_] / 2]};
  FieldElement s = -r;
  return s < r ? s : r;
}

std::vector<FieldElement> FieldSpec::primitive_roots_of_unity(std::uint64_t d) const {
  std::vector<FieldElement> out;
  if (d == 0 || (q_ - 1) % d != 0) return out;
  const std::uint64_t step = (q_ - 1) / d;
  for (std::uint64_t k = 0; k < d; ++k)
    if (std::gcd(k, d) == 1) out.push_back({this, exp_[k * step]});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> FieldElement::coeffs() const {
  if (!field_) return {};
  return unpack(value_, field_->p_, field_->m_);
}

FieldElement FieldElement::operator-() const { return {field_, field_->neg(value_)}; }

FieldElement FieldElement::inverse() const { return {field_, field_->inv(value_)}; }

FieldElement FieldElement::pow(std::int64_t k) const { return {field_, field_->pow(value_, k)}; }

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  a.field_->check_same(a, b);
  return {a.field_, a.field_->add(a.value_, b.value_)};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  a.field_->check_same(a, b);
  return {a.field_, a.field_->add(a.value_, a.field_->neg(b.value_))};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  a.field_->check_same(a, b);
  return {a.field_, a.field_->mul(a.value_, b.value_)};
}

FieldElement operator/(const FieldElement& a, const FieldElement& b) {
  a.field_->check_same(a, b);
  if (b.is_zero()) throw DivisionByZero("division by zero");
  return {a.field_, a.field_->mul(a.value_, a.field_->inv(b.value_))};
}

std::string FieldElement::to_string() const {
  if (!field_) return "<unbound>";
  if (field_->m_ == 1) return std::to_string(value_);
  std::string s = "[";
  auto c = coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s + "]";
}

}  // namespace ribet
