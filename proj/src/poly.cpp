#include "kq/poly.hpp"
#include "kq/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>

namespace kq {

Poly::Poly(Field field, std::vector<Scalar> coeffs) : field_(field), coeffs_(std::move(coeffs)) {
  for (auto &c : coeffs_)
    c = field_.reduce(c);
  trim();
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0)
    coeffs_.pop_back();
}

Poly Poly::constant(Field field, const Scalar &c) { return Poly(field, {c}); }
Poly Poly::x(Field field) { return monomial(field, 1); }
Poly Poly::linear(Field field, const Scalar &root) {
  return Poly(field, {field.neg(field.reduce(root)), Scalar(1)});
}
Poly Poly::monomial(Field field, std::size_t degree) {
  std::vector<Scalar> c(degree + 1, Scalar(0));
  c[degree] = 1;
  return Poly(field, std::move(c));
}

Poly Poly::monic() const {
  require(!is_zero(), ErrorKind::Domain, "monic of zero polynomial");
  return scaled(field_.inv(lead()));
}

Poly Poly::derivative() const {
  Poly r(field_);
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    r.coeffs_.push_back(field_.mul(field_.from_int(static_cast<long>(i)), coeffs_[i]));
  r.trim();
  return r;
}

Poly Poly::pow(std::size_t e) const {
  Poly result = constant(field_, 1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1u)
      result = result * base;
    e >>= 1u;
    if (e > 0)
      base = base * base;
  }
  return result;
}

Scalar Poly::eval(const Scalar &x) const {
  Scalar acc = 0;
  const Scalar xr = field_.reduce(x);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = field_.add(field_.mul(acc, xr), *it);
  return acc;
}

Poly Poly::operator+(const Poly &o) const {
  Poly r(field_);
  r.coeffs_.resize(std::max(coeffs_.size(), o.coeffs_.size()), Scalar(0));
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
    r.coeffs_[i] = field_.add(coeff(i), o.coeff(i));
  r.trim();
  return r;
}

Poly Poly::operator-(const Poly &o) const {
  Poly r(field_);
  r.coeffs_.resize(std::max(coeffs_.size(), o.coeffs_.size()), Scalar(0));
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
    r.coeffs_[i] = field_.sub(coeff(i), o.coeff(i));
  r.trim();
  return r;
}

Poly Poly::operator*(const Poly &o) const {
  Poly r(field_);
  if (is_zero() || o.is_zero())
    return r;
  r.coeffs_.assign(coeffs_.size() + o.coeffs_.size() - 1, Scalar(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0)
      continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
      r.coeffs_[i + j] = field_.add(r.coeffs_[i + j], field_.mul(coeffs_[i], o.coeffs_[j]));
  }
  r.trim();
  return r;
}

Poly Poly::scaled(const Scalar &c) const {
  Poly r(field_);
  const Scalar cr = field_.reduce(c);
  for (const auto &a : coeffs_)
    r.coeffs_.push_back(field_.mul(a, cr));
  r.trim();
  return r;
}

std::pair<Poly, Poly> Poly::divmod(const Poly &divisor) const {
  require(!divisor.is_zero(), ErrorKind::Domain, "polynomial division by zero");
  Poly rem = *this;
  Poly quo(field_);
  if (degree() < divisor.degree())
    return {quo, rem};
  const std::size_t dd = static_cast<std::size_t>(divisor.degree());
  quo.coeffs_.assign(coeffs_.size() - dd, Scalar(0));
  const Scalar lead_inv = field_.inv(divisor.lead());
  while (!rem.is_zero() && rem.degree() >= divisor.degree()) {
    const std::size_t shift = static_cast<std::size_t>(rem.degree()) - dd;
    const Scalar c = field_.mul(rem.lead(), lead_inv);
    quo.coeffs_[shift] = c;
    for (std::size_t j = 0; j <= dd; ++j)
      rem.coeffs_[shift + j] = field_.sub(rem.coeffs_[shift + j], field_.mul(c, divisor.coeffs_[j]));
    rem.coeffs_.back() = 0;
    rem.trim();
  }
  quo.trim();
  return {quo, rem};
}

bool operator<(const Poly &a, const Poly &b) {
  if (a.degree() != b.degree())
    return a.degree() < b.degree();
  for (std::size_t i = a.coeffs_.size(); i-- > 0;) {
    if (a.coeffs_[i] != b.coeffs_[i])
      return a.coeffs_[i] < b.coeffs_[i];
  }
  return false;
}

std::string Poly::to_string() const {
  if (is_zero())
    return "0";
  std::string out;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    Scalar c = coeffs_[i];
    if (c == 0)
      continue;
    bool negative = false;
    if (field_.is_rational() && c < 0) {
      negative = true;
      c = -c;
    }
    if (out.empty())
      out += negative ? "-" : "";
    else
      out += negative ? "-" : "+";
    if (i == 0 || c != 1)
      out += c.get_str();
    if (i > 0) {
      if (c != 1)
        out += "*";
      out += "x";
      if (i > 1)
        out += "^" + std::to_string(i);
    }
  }
  return out;
}

Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero())
    return a;
  return a.monic();
}

namespace {

using Factors = std::map<Poly, std::size_t>;

void add_factor(Factors &out, const Poly &p, std::size_t mult) {
  if (mult == 0 || p.degree() < 1)
    return;
  out[p.monic()] += mult;
}

// ---- finite fields ----

Poly powmod(Poly base, mpz_class e, const Poly &mod) {
  Poly result = Poly::constant(mod.field(), 1) % mod;
  base = base % mod;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t()))
      result = (result * base) % mod;
    e >>= 1;
    if (e > 0)
      base = (base * base) % mod;
  }
  return result;
}

// p-th root of a polynomial whose derivative vanishes (coefficients are fixed
// by Frobenius in a prime field).
Poly pth_root(const Poly &f) {
  const std::size_t p = f.field().characteristic();
  std::vector<Scalar> c;
  for (std::size_t i = 0; i < f.coeffs().size(); i += p)
    c.push_back(f.coeffs()[i]);
  return Poly(f.field(), std::move(c));
}

// Squarefree decomposition: returns (squarefree factor, multiplicity) pairs.
std::vector<std::pair<Poly, std::size_t>> squarefree_fq(const Poly &f0) {
  std::vector<std::pair<Poly, std::size_t>> out;
  const std::size_t p = f0.field().characteristic();
  Poly f = f0.monic();
  if (f.degree() < 1)
    return out;
  Poly fd = f.derivative();
  if (fd.is_zero()) {
    for (auto &[g, m] : squarefree_fq(pth_root(f)))
      out.emplace_back(g, m * p);
    return out;
  }
  Poly c = gcd(f, fd);
  Poly w = f / c;
  std::size_t i = 1;
  while (!w.is_one()) {
    Poly y = gcd(w, c);
    Poly z = w / y;
    if (z.degree() > 0)
      out.emplace_back(z.monic(), i);
    w = y;
    c = c / y;
    ++i;
  }
  if (!c.is_one() && c.degree() > 0) {
    for (auto &[g, m] : squarefree_fq(pth_root(c)))
      out.emplace_back(g, m * p);
  }
  return out;
}

// Equal-degree splitting of a squarefree product of irreducibles of degree d.
void equal_degree(const Poly &f, std::size_t d, std::mt19937_64 &rng, std::vector<Poly> &out) {
  if (f.degree() <= 0)
    return;
  if (static_cast<std::size_t>(f.degree()) == d) {
    out.push_back(f.monic());
    return;
  }
  const Field &F = f.field();
  const std::uint64_t q = F.order();
  std::uniform_int_distribution<std::uint64_t> coeff(0, q - 1);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Scalar> c(static_cast<std::size_t>(f.degree()));
    for (auto &x : c)
      x = F.element(coeff(rng));
    Poly a(F, c);
    if (a.degree() < 1)
      continue;
    Poly g = gcd(f, a);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree(g, d, rng, out);
      equal_degree(f / g, d, rng, out);
      return;
    }
    Poly b;
    if (q == 2) {
      // trace map a + a^2 + ... + a^(2^(d-1))
      Poly t = a % f;
      Poly acc = t;
      for (std::size_t k = 1; k < d; ++k) {
        t = (t * t) % f;
        acc = acc + t;
      }
      b = acc;
    } else {
      mpz_class e;
      mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(q), d);
      e = (e - 1) / 2;
      b = powmod(a, e, f) - Poly::constant(F, 1);
    }
    g = gcd(f, b);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree(g, d, rng, out);
      equal_degree(f / g, d, rng, out);
      return;
    }
  }
  fail(ErrorKind::Internal, "equal-degree splitting did not converge");
}

void factor_squarefree_fq(const Poly &f, std::size_t mult, Factors &out) {
  const Field &F = f.field();
  Poly rest = f.monic();
  Poly xp = Poly::x(F);
  Poly h = xp % rest;
  std::mt19937_64 rng(0x6b71u);
  for (std::size_t d = 1; rest.degree() >= 2 * static_cast<long>(d); ++d) {
    h = powmod(h, mpz_class(static_cast<unsigned long>(F.order())), rest);
    Poly g = gcd(rest, h - xp % rest);
    if (g.degree() > 0) {
      std::vector<Poly> parts;
      equal_degree(g, d, rng, parts);
      for (const auto &p : parts)
        add_factor(out, p, mult);
      rest = rest / g;
      h = h % rest;
    }
  }
  if (rest.degree() > 0)
    add_factor(out, rest, mult);
}

// ---- rationals ----

// Scale to a primitive integer polynomial with positive leading coefficient.
std::vector<mpz_class> primitive_integer(const Poly &f) {
  mpz_class l = 1;
  for (const auto &c : f.coeffs())
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  std::vector<mpz_class> z;
  mpz_class g = 0;
  for (const auto &c : f.coeffs()) {
    mpz_class v = c.get_num() * (l / c.get_den());
    z.push_back(v);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (z.back() < 0)
    g = -g;
  for (auto &v : z)
    v /= g;
  return z;
}

std::vector<mpz_class> positive_divisors(mpz_class n) {
  n = abs(n);
  require(n != 0, ErrorKind::Internal, "divisors of zero");
  std::vector<std::pair<mpz_class, unsigned>> primes;
  for (unsigned long p = 2; p <= 1000000 && mpz_class(p) * p <= n; ++p) {
    if (n % p != 0)
      continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    primes.emplace_back(mpz_class(p), e);
  }
  if (n > 1) {
    require(mpz_probab_prime_p(n.get_mpz_t(), 30) != 0, ErrorKind::Validation,
            "coefficient too large to factor for rational root search");
    primes.emplace_back(n, 1);
  }
  std::vector<mpz_class> divs{1};
  for (const auto &[p, e] : primes) {
    const std::size_t base = divs.size();
    mpz_class pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i)
        divs.push_back(divs[i] * pk);
    }
  }
  return divs;
}

bool is_square(const mpz_class &n, mpz_class &root) {
  if (n < 0)
    return false;
  return mpz_perfect_square_p(n.get_mpz_t()) != 0 && (mpz_sqrt(root.get_mpz_t(), n.get_mpz_t()), true);
}

// Split a monic integer quartic without rational roots into two monic integer
// quadratics, if possible.
bool split_quartic(const std::vector<mpz_class> &g, std::pair<std::vector<mpz_class>, std::vector<mpz_class>> &out) {
  const mpz_class &g0 = g[0], &g1 = g[1], &g2 = g[2], &g3 = g[3];
  for (const auto &pd : positive_divisors(g0)) {
    for (int sign : {1, -1}) {
      const mpz_class c = pd * sign;
      const mpz_class e = g0 / c;
      auto accept = [&](const mpz_class &b, const mpz_class &dd) {
        if (b + dd == g3 && b * dd + c + e == g2 && b * e + c * dd == g1) {
          out = {{c, b, 1}, {e, dd, 1}};
          return true;
        }
        return false;
      };
      if (e != c) {
        const mpz_class num = g1 - c * g3;
        const mpz_class den = e - c;
        if (num % den == 0) {
          const mpz_class b = num / den;
          if (accept(b, g3 - b))
            return true;
        }
      } else {
        mpz_class disc = g3 * g3 - 4 * (g2 - 2 * c), r;
        if (is_square(disc, r) && (g3 + r) % 2 == 0) {
          const mpz_class b = (g3 + r) / 2;
          if (accept(b, g3 - b))
            return true;
        }
      }
    }
  }
  return false;
}

void factor_squarefree_q(const Poly &f0, std::size_t mult, Factors &out) {
  const Field Q = Field::rationals();
  Poly f = f0.monic();
  while (f.degree() >= 1 && f.coeff(0) == 0) {
    add_factor(out, Poly::x(Q), mult);
    f = f / Poly::x(Q);
  }
  if (f.degree() < 1)
    return;
  if (f.degree() > 1) {
    auto z = primitive_integer(f);
    const auto num = positive_divisors(z.front());
    const auto den = positive_divisors(z.back());
    for (const auto &r : num) {
      for (const auto &s : den) {
        for (int sign : {1, -1}) {
          Scalar root(r * sign, s);
          root.canonicalize();
          while (f.degree() >= 1 && f.eval(root) == 0) {
            add_factor(out, Poly::linear(Q, root), mult);
            f = f / Poly::linear(Q, root);
          }
        }
      }
    }
  }
  if (f.degree() < 1)
    return;
  if (f.degree() <= 3) {
    add_factor(out, f, mult);
    return;
  }
  require(f.degree() == 4, ErrorKind::Validation,
          "cannot factor rational polynomial with irreducible part of degree " +
              std::to_string(f.degree()) + " (" + f.to_string() + ")");
  // monic integer substitute g(y) = L^3 f(y / L)
  auto z = primitive_integer(f);
  const mpz_class L = z[4];
  std::vector<mpz_class> g(5);
  mpz_class pw = 1;
  for (int i = 3; i >= 0; --i) {
    g[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] * pw;
    pw *= L;
  }
  g[4] = 1;
  std::pair<std::vector<mpz_class>, std::vector<mpz_class>> split;
  if (!split_quartic(g, split)) {
    add_factor(out, f, mult);
    return;
  }
  // undo the substitution: quadratic y^2+by+c in y = L x
  for (const auto *h : {&split.first, &split.second}) {
    Poly q(Q, {Scalar((*h)[0]), Scalar((*h)[1] * L), Scalar(L * L)});
    add_factor(out, q, mult);
  }
}

std::vector<std::pair<Poly, std::size_t>> squarefree_q(const Poly &f0) {
  // Yun's algorithm
  std::vector<std::pair<Poly, std::size_t>> out;
  Poly f = f0.monic();
  if (f.degree() < 1)
    return out;
  Poly a = gcd(f, f.derivative());
  Poly b = f / a;
  Poly c = f.derivative().scaled(Scalar(1) / f.lead()) / a;
  Poly d = c - b.derivative();
  std::size_t i = 1;
  while (b.degree() > 0) {
    a = gcd(b, d);
    if (a.degree() > 0)
      out.emplace_back(a, i);
    b = b / a;
    c = d / a;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

} // namespace

std::vector<std::pair<Poly, std::size_t>> factor(const Poly &f) {
  require(!f.is_zero(), ErrorKind::Domain, "factor of zero polynomial");
  Factors out;
  if (f.field().is_rational()) {
    for (const auto &[g, m] : squarefree_q(f))
      factor_squarefree_q(g, m, out);
  } else {
    for (const auto &[g, m] : squarefree_fq(f))
      factor_squarefree_fq(g, m, out);
  }
  return {out.begin(), out.end()};
}

bool is_irreducible(const Poly &f) {
  if (f.degree() < 1)
    return false;
  auto fs = factor(f);
  return fs.size() == 1 && fs[0].second == 1;
}

namespace {

class PolyParser {
public:
  PolyParser(const Field &field, std::string_view text) : field_(field) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c)))
        s_.push_back(c);
  }

  Poly parse() {
    Poly p = expr();
    require(pos_ == s_.size(), ErrorKind::Parse, "unexpected '" + s_.substr(pos_) + "' in polynomial");
    return p;
  }

private:
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  Poly expr() {
    Poly acc(field_);
    bool first = true;
    while (first || peek('+') || peek('-')) {
      bool negative = false;
      if (peek('+') || peek('-')) {
        negative = s_[pos_] == '-';
        ++pos_;
      }
      Poly t = term();
      acc = negative ? acc - t : acc + t;
      first = false;
    }
    return acc;
  }

  Poly term() {
    Poly acc = power();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc = acc * power();
      } else if (peek('(') || peek('x')) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  Poly power() {
    Poly base = atom();
    if (peek('^')) {
      ++pos_;
      base = base.pow(static_cast<std::size_t>(number().get_ui()));
    }
    return base;
  }

  mpz_class number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    require(pos_ > start, ErrorKind::Parse, "expected a number in polynomial");
    return mpz_class(s_.substr(start, pos_ - start));
  }

  Poly atom() {
    if (peek('(')) {
      ++pos_;
      Poly p = expr();
      require(peek(')'), ErrorKind::Parse, "missing ')' in polynomial");
      ++pos_;
      return p;
    }
    if (peek('x')) {
      ++pos_;
      return Poly::x(field_);
    }
    Scalar c(number());
    if (peek('/')) {
      ++pos_;
      c /= Scalar(number());
    }
    return Poly::constant(field_, c);
  }

  Field field_;
  std::string s_;
  std::size_t pos_ = 0;
};

} // namespace

Poly parse_poly(const Field &field, std::string_view text) {
  return PolyParser(field, text).parse();
}

} // namespace kq
