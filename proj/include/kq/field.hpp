#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace kq {

// Every scalar is carried as a GMP rational. Over a prime field the value is
// an integer residue in [0, q) with denominator 1.
using Scalar = mpq_class;

bool is_prime(std::uint64_t n);

class Field {
public:
  enum class Kind { Rationals, Prime };

  static Field rationals() { return Field(); }
  // Throws Validation if q is not prime.
  static Field prime(std::uint64_t q);

  Field() = default;

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rationals; }
  bool is_prime_field() const { return kind_ == Kind::Prime; }
  std::uint64_t characteristic() const { return q_; }
  // Number of elements; 0 for the rationals.
  std::uint64_t order() const { return q_; }

  Scalar zero() const { return Scalar(0); }
  Scalar one() const { return Scalar(1); }

  // Canonical representative of an arbitrary rational (Prime: the denominator
  // must be invertible mod q).
  Scalar reduce(const Scalar &x) const;
  Scalar from_int(long v) const { return reduce(Scalar(v)); }

  Scalar add(const Scalar &a, const Scalar &b) const;
  Scalar sub(const Scalar &a, const Scalar &b) const;
  Scalar mul(const Scalar &a, const Scalar &b) const;
  Scalar neg(const Scalar &a) const;
  Scalar inv(const Scalar &a) const;
  Scalar div(const Scalar &a, const Scalar &b) const { return mul(a, inv(b)); }

  bool contains(const Scalar &x) const;

  // "rational" or the decimal modulus, as used in the text formats.
  std::string tag() const;
  static Field from_tag(std::string_view tag);

  // Element enumeration for finite fields: index in [0, q) -> residue.
  Scalar element(std::uint64_t index) const { return Scalar(static_cast<unsigned long>(index)); }

  friend bool operator==(const Field &a, const Field &b) {
    return a.kind_ == b.kind_ && a.q_ == b.q_;
  }

private:
  Kind kind_ = Kind::Rationals;
  std::uint64_t q_ = 0;
};

// Parses "p/q" or an integer, exactly. Rejects decimal points and exponents.
Scalar parse_rational(std::string_view text);
std::string format_scalar(const Scalar &x);

} // namespace kq
