#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ribet/numtheory.hpp"

namespace ribet {

class FieldSpec;

/// Element of F_{p^m} in the polynomial basis.
///
/// The value is stored packed as sum(c_i * p^i) where c_i is the coefficient
/// of t^i modulo the field's modulus.  Elements keep a non-owning pointer to
/// their field, so the FieldSpec must outlive them.  Ordering compares packed
/// values, i.e. coefficient vectors read from the top degree down.
class FieldElement {
 public:
  FieldElement() = default;

  const FieldSpec* field() const { return field_; }
  std::uint32_t packed() const { return value_; }

  bool is_zero() const { return value_ == 0; }
  bool is_one() const { return value_ == 1; }

  /// Coefficients c_0 .. c_{m-1}.
  std::vector<std::uint32_t> coeffs() const;

  FieldElement operator-() const;
  FieldElement inverse() const;
  FieldElement pow(std::int64_t k) const;
  FieldElement square() const { return *this * *this; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b);

  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
  FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.value_ == b.value_ && a.field_ == b.field_;
  }
  friend std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b) {
    return a.value_ <=> b.value_;
  }

  /// "c" for prime fields, "[c0,c1,...]" otherwise.
  std::string to_string() const;

 private:
  friend class FieldSpec;
  FieldElement(const FieldSpec* f, std::uint32_t v) : field_(f), value_(v) {}

  const FieldSpec* field_ = nullptr;
  std::uint32_t value_ = 0;
};

/// The finite field F_{p^m}.
///
/// Construction builds Zech-logarithm tables over a fixed primitive element,
/// so multiplication, inversion, powering and addition are table lookups.
/// Immutable after construction and safe to share across threads.
class FieldSpec {
 public:
  static constexpr std::uint64_t kDefaultMaxSize = std::uint64_t{1} << 21;

  /// `modulus` lists the monic modulus coefficients low to high (length m+1).
  /// When empty and m > 1 the first irreducible monic polynomial in packed
  /// order of its lower coefficients is chosen.
  static std::shared_ptr<const FieldSpec> create(std::uint64_t p, unsigned m,
                                                 std::vector<std::uint32_t> modulus = {},
                                                 std::uint64_t max_size = kDefaultMaxSize);

  /// Parses "p", "p^m" or "p^m:c_m,...,c_0" (coefficients leading first).
  static std::shared_ptr<const FieldSpec> parse(std::string_view literal,
                                                std::uint64_t max_size = kDefaultMaxSize);

  static bool is_irreducible(std::uint64_t p, std::span<const std::uint32_t> monic);
  static std::vector<std::uint32_t> find_irreducible(std::uint64_t p, unsigned m);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return m_; }
  std::uint64_t size() const { return q_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  /// Canonical literal "p^m:c_m,...,c_0"; m = 1 renders as "p^1:1,0".
  std::string literal() const;

  FieldElement zero() const { return {this, 0}; }
  FieldElement one() const { return {this, 1}; }
  FieldElement from_int(std::int64_t v) const;
  FieldElement from_coeffs(std::span<const std::int64_t> coeffs) const;
  FieldElement from_packed(std::uint64_t packed) const;
  FieldElement generator() const { return {this, exp_[1 % (q_ - 1)]}; }

  /// Factorization of p^m - 1, cached.
  const Factorization& unit_group_factorization() const { return unit_factors_; }

  /// Least d >= 1 with x^d = 1, by descending through the prime factors of p^m - 1.
  std::uint64_t mult_order(const FieldElement& x) const;

  bool is_square(const FieldElement& x) const;
  std::optional<FieldElement> sqrt(const FieldElement& x) const;

  /// All d-th roots of unity of exact order d, ascending; empty if d does not divide p^m - 1.
  std::vector<FieldElement> primitive_roots_of_unity(std::uint64_t d) const;

  FieldSpec(const FieldSpec&) = delete;
  FieldSpec& operator=(const FieldSpec&) = delete;

 private:
  friend class FieldElement;
  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
  FieldSpec() = default;

  void check_same(const FieldElement& a, const FieldElement& b) const;
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const;
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t pow(std::uint32_t a, std::int64_t k) const;

  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::uint64_t p_ = 0;
  unsigned m_ = 0;
  std::uint64_t q_ = 0;
  std::uint32_t order_ = 0;  // q - 1
  std::vector<std::uint32_t> modulus_;
  Factorization unit_factors_;
  std::vector<std::uint32_t> exp_;   // exp_[k] = g^k, k in [0, q-1)
  std::vector<std::uint32_t> log_;   // log_[x] for x != 0
  std::vector<std::uint32_t> zech_;  // zech_[k] = log(1 + g^k) or kNone
};

}  // namespace ribet
