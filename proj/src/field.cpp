#include "kq/field.hpp"
#include "kq/error.hpp"

#include <cctype>

namespace kq {

bool is_prime(std::uint64_t n) {
  if (n < 2)
    return false;
  for (std::uint64_t f : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    if (n % f == 0)
      return n == f;
  }
  for (std::uint64_t f = 17; f * f <= n; f += 2) {
    if (n % f == 0)
      return false;
  }
  return true;
}

Field Field::prime(std::uint64_t q) {
  require(is_prime(q), ErrorKind::Validation, std::to_string(q) + " is not prime");
  Field f;
  f.kind_ = Kind::Prime;
  f.q_ = q;
  return f;
}

namespace {

mpz_class modulus(std::uint64_t q) { return mpz_class(static_cast<unsigned long>(q)); }

mpz_class mod_nonneg(const mpz_class &a, const mpz_class &m) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

} // namespace

Scalar Field::reduce(const Scalar &x) const {
  if (kind_ == Kind::Rationals)
    return x;
  const mpz_class m = modulus(q_);
  mpz_class num = mod_nonneg(x.get_num(), m);
  mpz_class den = mod_nonneg(x.get_den(), m);
  require(den != 0, ErrorKind::Domain,
          "denominator not invertible modulo " + std::to_string(q_));
  mpz_class den_inv;
  mpz_invert(den_inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
  return Scalar(mod_nonneg(num * den_inv, m));
}

Scalar Field::add(const Scalar &a, const Scalar &b) const {
  if (kind_ == Kind::Rationals)
    return a + b;
  mpz_class s = a.get_num() + b.get_num();
  if (s >= static_cast<unsigned long>(q_))
    s -= static_cast<unsigned long>(q_);
  return Scalar(s);
}

Scalar Field::sub(const Scalar &a, const Scalar &b) const {
  if (kind_ == Kind::Rationals)
    return a - b;
  mpz_class s = a.get_num() - b.get_num();
  if (s < 0)
    s += static_cast<unsigned long>(q_);
  return Scalar(s);
}

Scalar Field::mul(const Scalar &a, const Scalar &b) const {
  if (kind_ == Kind::Rationals)
    return a * b;
  return Scalar(mod_nonneg(a.get_num() * b.get_num(), modulus(q_)));
}

Scalar Field::neg(const Scalar &a) const {
  if (kind_ == Kind::Rationals)
    return -a;
  if (a == 0)
    return a;
  return Scalar(modulus(q_) - a.get_num());
}

Scalar Field::inv(const Scalar &a) const {
  require(a != 0, ErrorKind::Domain, "division by zero");
  if (kind_ == Kind::Rationals)
    return 1 / a;
  mpz_class r;
  mpz_class num = a.get_num();
  mpz_invert(r.get_mpz_t(), num.get_mpz_t(), modulus(q_).get_mpz_t());
  return Scalar(r);
}

bool Field::contains(const Scalar &x) const {
  if (kind_ == Kind::Rationals)
    return true;
  return x.get_den() == 1 && x.get_num() >= 0 &&
         x.get_num() < static_cast<unsigned long>(q_);
}

std::string Field::tag() const {
  return kind_ == Kind::Rationals ? std::string("rational") : std::to_string(q_);
}

Field Field::from_tag(std::string_view tag) {
  if (tag == "rational" || tag == "Q" || tag == "q")
    return rationals();
  require(!tag.empty(), ErrorKind::Parse, "empty field tag");
  std::uint64_t q = 0;
  for (char c : tag) {
    require(std::isdigit(static_cast<unsigned char>(c)) != 0, ErrorKind::Parse,
            "bad field tag '" + std::string(tag) + "'");
    q = q * 10 + static_cast<std::uint64_t>(c - '0');
    require(q < (1ull << 40), ErrorKind::Parse, "field modulus too large");
  }
  return prime(q);
}

Scalar parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s) {
    if (s.empty())
      return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size())
      return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        return false;
    return true;
  };
  auto to_mpz = [](std::string_view s) {
    if (!s.empty() && s[0] == '+')
      s.remove_prefix(1);
    return mpz_class(std::string(s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    require(valid_int(text), ErrorKind::Parse, "not an exact rational: '" + std::string(text) + "'");
    return Scalar(to_mpz(text));
  }
  const auto num = text.substr(0, slash);
  const auto den = text.substr(slash + 1);
  require(valid_int(num) && valid_int(den) && den[0] != '-' && den[0] != '+',
          ErrorKind::Parse, "not an exact rational: '" + std::string(text) + "'");
  const mpz_class d = to_mpz(den);
  require(d != 0, ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
  Scalar r(to_mpz(num), d);
  r.canonicalize();
  return r;
}

std::string format_scalar(const Scalar &x) { return x.get_str(); }

} // namespace kq
