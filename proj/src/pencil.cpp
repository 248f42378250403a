#include "kq/pencil.hpp"
#include "kq/error.hpp"

#include <map>
#include <random>

namespace kq {

namespace {

using PolyMatrix = std::vector<std::vector<Poly>>;

// a*x + b as a polynomial matrix (x is the indeterminate).
PolyMatrix linear_pencil(const Matrix &a, const Matrix &b) {
  const Field &F = a.field();
  PolyMatrix out(a.rows(), std::vector<Poly>(a.cols(), Poly(F)));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out[i][j] = Poly(F, {b.at(i, j), a.at(i, j)});
  return out;
}

// Dimension of the space of polynomial solutions of degree <= k of
// (a + s b) x(s) = 0.
std::size_t chain_kernel_dim(const Matrix &a, const Matrix &b, std::size_t k) {
  const Field &F = a.field();
  const std::size_t r = a.rows(), c = a.cols();
  Matrix T(F, (k + 2) * r, (k + 1) * c);
  // block row i: a x_i + b x_{i-1}
  for (std::size_t i = 0; i <= k + 1; ++i) {
    for (std::size_t row = 0; row < r; ++row) {
      SparseVec v;
      if (i >= 1)
        for (const auto &[j, x] : b.row(row))
          v.emplace_back((i - 1) * c + j, x);
      if (i <= k)
        for (const auto &[j, x] : a.row(row))
          v.emplace_back(i * c + j, x);
      T.set_row(i * r + row, std::move(v));
    }
  }
  return T.cols() - rank(T);
}

// Minimal indices of the column kernel: counts[n] = number of blocks with index n.
std::vector<std::size_t> minimal_indices(const Matrix &a, const Matrix &b, std::size_t total) {
  std::vector<std::size_t> counts;
  std::size_t found = 0, prev_z = 0, prev_C = 0;
  for (std::size_t k = 0; found < total; ++k) {
    require(k <= a.cols(), ErrorKind::Internal, "minimal index search did not terminate");
    const std::size_t z = chain_kernel_dim(a, b, k);
    const std::size_t C = z - prev_z;
    counts.push_back(C - prev_C);
    found += C - prev_C;
    prev_z = z;
    prev_C = C;
  }
  return counts;
}

} // namespace

std::vector<Poly> invariant_factors(PolyMatrix A) {
  const std::size_t rows = A.size();
  const std::size_t cols = rows ? A[0].size() : 0;
  std::vector<Poly> out;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      // pivot of least degree
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (!A[i][j].is_zero() && (pi == rows || A[i][j].degree() < A[pi][pj].degree())) {
            pi = i;
            pj = j;
          }
      if (pi == rows)
        return out;
      std::swap(A[t], A[pi]);
      for (auto &row : A)
        std::swap(row[t], row[pj]);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (A[i][t].is_zero())
          continue;
        const Poly q = A[i][t] / A[t][t];
        for (std::size_t j = t; j < cols; ++j)
          A[i][j] = A[i][j] - q * A[t][j];
        clean = clean && A[i][t].is_zero();
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (A[t][j].is_zero())
          continue;
        const Poly q = A[t][j] / A[t][t];
        for (std::size_t i = t; i < rows; ++i)
          A[i][j] = A[i][j] - q * A[i][t];
        clean = clean && A[t][j].is_zero();
      }
      if (!clean)
        continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols && divides; ++j)
          if (!(A[i][j] % A[t][t]).is_zero()) {
            for (std::size_t jj = t; jj < cols; ++jj)
              A[t][jj] = A[t][jj] + A[i][jj];
            divides = false;
          }
      if (divides)
        break;
    }
    out.push_back(A[t][t].monic());
  }
  return out;
}

namespace {

// dim ker of Z -> a Z C^T - b Z, Z of size cols(a) x k.
std::size_t twisted_kernel_dim(const Matrix &a, const Matrix &b, const Matrix &C) {
  const Field &F = a.field();
  const std::size_t r = a.cols(), k = C.rows();
  Matrix sys(F, a.rows() * k, r * k);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) {
      std::map<std::size_t, Scalar> row;
      for (const auto &[s, av] : a.row(i))
        for (const auto &[l, c] : C.row(j)) // Ct(l, j) = C(j, l)
          row[s * k + l] = F.add(row[s * k + l], F.mul(av, c));
      for (const auto &[s, bv] : b.row(i))
        row[s * k + j] = F.sub(row[s * k + j], bv);
      SparseVec v;
      for (auto &[idx, val] : row)
        if (val != 0)
          v.emplace_back(idx, val);
      sys.set_row(i * k + j, std::move(v));
    }
  return sys.cols() - rank(sys);
}

// Block sizes m of the blocks attached to the irreducible p: with
// s_j = sum over those blocks of min(j, m), the twisted kernel for p^j has
// dimension deg(p) * (j * q_count + s_j).
void blocks_at(const Matrix &a, const Matrix &b, const Poly &p, std::size_t q_count, std::size_t max_power,
               std::vector<std::size_t> &sizes) {
  const std::size_t deg = static_cast<std::size_t>(p.degree());
  std::vector<std::size_t> s{0};
  for (std::size_t j = 1; j <= max_power + 1; ++j) {
    const std::size_t K = twisted_kernel_dim(a, b, companion(p.pow(j)));
    require(K % deg == 0 && K / deg >= j * q_count, ErrorKind::Internal, "twisted kernel dimension inconsistent");
    s.push_back(K / deg - j * q_count);
    if (s[j] == s[j - 1])
      break;
    // sizes already use up the whole multiplicity
    if (s[j] == max_power) {
      s.push_back(s[j]);
      break;
    }
  }
  // at_least[j] = s_j - s_{j-1}
  for (std::size_t j = 1; j < s.size(); ++j) {
    const std::size_t here = s[j] - s[j - 1];
    const std::size_t next = j + 1 < s.size() ? s[j + 1] - s[j] : 0;
    for (std::size_t c = next; c < here; ++c)
      sizes.push_back(j);
  }
}

// Bareiss elimination on integers after clearing row denominators.
Scalar determinant(const Matrix &m) {
  const std::size_t n = m.rows();
  if (n == 0)
    return 1;
  std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n));
  mpz_class scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (const auto &[j, v] : m.row(i))
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    for (const auto &[j, v] : m.row(i))
      a[i][j] = v.get_num() * (l / v.get_den());
    scale *= l;
  }
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0)
      ++piv;
    if (piv == n)
      return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      for (std::size_t j = c + 1; j < n; ++j) {
        a[i][j] = a[i][j] * a[c][c] - a[i][c] * a[c][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[c][c];
  }
  Scalar det(sign * a[n - 1][n - 1], scale);
  det.canonicalize();
  return det;
}

// Over the rationals: normal rank and a polynomial divisible by every finite
// elementary divisor (gcd of a few random compressions det(R (x a - b) S)).
std::pair<std::size_t, Poly> rational_spectrum(const Matrix &a, const Matrix &b) {
  const Field &F = a.field();
  std::size_t r = 0;
  for (long x = 0; x <= static_cast<long>(a.rows() + a.cols()) && r < std::min(a.rows(), a.cols()); ++x)
    r = std::max(r, rank(a.scaled(x) - b));
  Poly g(F);
  if (r == 0)
    return {0, Poly::constant(F, 1)};
  std::mt19937_64 rng(0x70656e63u);
  std::uniform_int_distribution<long> entry(-3, 3);
  for (int draw = 0; draw < 3;) {
    Matrix R(F, r, a.rows()), S(F, a.cols(), r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < a.rows(); ++j)
        R.set(i, j, entry(rng));
    for (std::size_t i = 0; i < a.cols(); ++i)
      for (std::size_t j = 0; j < r; ++j)
        S.set(i, j, entry(rng));
    const Matrix Ra = R * a * S, Rb = R * b * S;
    // interpolate det(x Ra - Rb) from the points 0..r (Newton form)
    std::vector<Scalar> c(r + 1);
    for (std::size_t i = 0; i <= r; ++i)
      c[i] = determinant(Ra.scaled(Scalar(static_cast<long>(i))) - Rb);
    for (std::size_t k = 1; k <= r; ++k)
      for (std::size_t i = r; i >= k; --i) {
        c[i] = (c[i] - c[i - 1]) / static_cast<long>(k);
        c[i].canonicalize();
      }
    Poly f = Poly::constant(F, c[r]);
    for (std::size_t k = r; k-- > 0;)
      f = f * Poly::linear(F, Scalar(static_cast<long>(k))) + Poly::constant(F, c[k]);
    if (f.is_zero())
      continue;
    g = g.is_zero() ? f.monic() : gcd(g, f);
    ++draw;
  }
  return {r, g};
}

std::vector<PencilBlock> finite_blocks_rational(const Matrix &a, const Matrix &b, const Poly &spectrum,
                                                std::size_t q_count, bool only_zero) {
  std::vector<PencilBlock> out;
  if (spectrum.degree() < 1)
    return out;
  for (const auto &[p, mult] : factor(spectrum)) {
    if (only_zero && !(p == Poly::x(p.field())))
      continue;
    std::vector<std::size_t> sizes;
    blocks_at(a, b, p, q_count, mult, sizes);
    for (auto m : sizes)
      out.push_back(PencilBlock::regular_poly(p, m));
  }
  return out;
}

} // namespace

std::vector<PencilBlock> decompose_pencil(const KroneckerModule &m) {
  require(m.d == 2, ErrorKind::Validation, "decompose_pencil needs d = 2");
  const Matrix &a = m.maps[0], &b = m.maps[1];
  std::vector<PencilBlock> blocks;
  std::size_t normal_rank = 0;

  if (m.field.is_prime_field()) {
    // finite spectrum: x*a - b
    const auto finite = invariant_factors(linear_pencil(a, b.scaled(-1)));
    normal_rank = finite.size();
    for (const auto &f : finite)
      if (f.degree() >= 1)
        for (const auto &[p, mult] : factor(f))
          blocks.push_back(PencilBlock::regular_poly(p, mult));
    // infinite spectrum: powers of x dividing the invariant factors of a - x*b
    for (const auto &f : invariant_factors(linear_pencil(b.scaled(-1), a))) {
      std::size_t e = 0;
      while (e < f.coeffs().size() && f.coeffs()[e] == 0)
        ++e;
      if (e > 0)
        blocks.push_back(PencilBlock::regular_monomial(e));
    }
  } else {
    auto [r, spectrum] = rational_spectrum(a, b);
    normal_rank = r;
    const std::size_t q_count = m.dim1 - r;
    for (auto &blk : finite_blocks_rational(a, b, spectrum, q_count, false))
      blocks.push_back(blk);
    // infinite part: the eigenvalue 0 of the swapped pencil
    auto [r2, reversed] = rational_spectrum(b, a);
    (void)r2;
    for (auto &blk : finite_blocks_rational(b, a, reversed, q_count, true))
      blocks.push_back(PencilBlock::regular_monomial(blk.power));
  }

  const auto q_counts = minimal_indices(a, b, m.dim1 - normal_rank);
  for (std::size_t n = 0; n < q_counts.size(); ++n)
    if (q_counts[n] > 0)
      blocks.push_back(PencilBlock::postinjective(n, q_counts[n]));
  const auto p_counts = minimal_indices(a.transpose(), b.transpose(), m.dim2 - normal_rank);
  for (std::size_t n = 0; n < p_counts.size(); ++n)
    if (p_counts[n] > 0)
      blocks.push_back(PencilBlock::preprojective(n, p_counts[n]));

  blocks = canonical_blocks(std::move(blocks));
  std::size_t d1 = 0, d2 = 0;
  for (const auto &blk : blocks) {
    d1 += blk.dims().d1 * blk.multiplicity;
    d2 += blk.dims().d2 * blk.multiplicity;
  }
  require(d1 == m.dim1 && d2 == m.dim2, ErrorKind::Internal, "pencil blocks do not account for the dimensions");
  return blocks;
}

RankProfile rank_profile(const KroneckerModule &m, std::size_t count) {
  require(m.d == 2, ErrorKind::Validation, "rank_profile needs d = 2");
  const Field &F = m.field;
  RankProfile out;
  out.points.emplace_back(Scalar(0), Scalar(1));
  for (std::size_t k = 0; out.points.size() < count; ++k) {
    if (F.is_prime_field() && k >= F.order())
      break;
    out.points.emplace_back(Scalar(1), F.from_int(static_cast<long>(k)));
  }
  for (const auto &[l, mu] : out.points)
    out.ranks.push_back(rank(m.maps[0].scaled(l) + m.maps[1].scaled(mu)));
  return out;
}

bool certify_decomposition(const KroneckerModule &m, const std::vector<PencilBlock> &blocks) {
  std::vector<KroneckerModule> parts;
  for (const auto &blk : blocks)
    for (std::size_t i = 0; i < blk.multiplicity; ++i)
      parts.push_back(build_block(blk, m.field));
  const auto sum = direct_sum(parts, 2, m.field);
  if (sum.dim1 != m.dim1 || sum.dim2 != m.dim2)
    return false;
  const std::size_t count = 2 * (m.dim() + 1);
  return rank_profile(sum, count).ranks == rank_profile(m, count).ranks;
}

} // namespace kq
