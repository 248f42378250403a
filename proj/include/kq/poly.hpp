#pragma once

#include "kq/field.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kq {

// Univariate polynomial over a Field; coefficients low degree first, trimmed.
class Poly {
public:
  Poly() = default;
  explicit Poly(Field field) : field_(field) {}
  Poly(Field field, std::vector<Scalar> coeffs);

  static Poly constant(Field field, const Scalar &c);
  static Poly x(Field field);
  // x - c
  static Poly linear(Field field, const Scalar &root);
  static Poly monomial(Field field, std::size_t degree);

  const Field &field() const { return field_; }
  bool is_zero() const { return coeffs_.empty(); }
  // -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<Scalar> &coeffs() const { return coeffs_; }
  Scalar coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Scalar(0); }
  Scalar lead() const { return coeffs_.empty() ? Scalar(0) : coeffs_.back(); }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }
  bool is_one() const { return coeffs_.size() == 1 && coeffs_[0] == 1; }

  Poly monic() const;
  Poly derivative() const;
  Poly pow(std::size_t e) const;
  Scalar eval(const Scalar &x) const;

  Poly operator+(const Poly &o) const;
  Poly operator-(const Poly &o) const;
  Poly operator*(const Poly &o) const;
  Poly scaled(const Scalar &c) const;
  // Quotient and remainder; divisor must be nonzero.
  std::pair<Poly, Poly> divmod(const Poly &divisor) const;
  Poly operator/(const Poly &o) const { return divmod(o).first; }
  Poly operator%(const Poly &o) const { return divmod(o).second; }

  friend bool operator==(const Poly &a, const Poly &b) {
    return a.field_ == b.field_ && a.coeffs_ == b.coeffs_;
  }
  // Total order for multiset comparison: degree, then coefficients high to low.
  friend bool operator<(const Poly &a, const Poly &b);

  std::string to_string() const;

private:
  void trim();
  Field field_;
  std::vector<Scalar> coeffs_;
};

Poly gcd(Poly a, Poly b);

// Monic irreducible factors with multiplicities, sorted by operator<.
// Over the rationals irreducible factors of degree > 4 are rejected with a
// Validation error (rational roots, quadratics, cubics, and quartics only).
std::vector<std::pair<Poly, std::size_t>> factor(const Poly &f);
bool is_irreducible(const Poly &f);

// Parses expressions such as "x^2+x+1", "(x-1)^3", "(x^2+1)*(x-2)".
Poly parse_poly(const Field &field, std::string_view text);

} // namespace kq
