#include "kq/sl2p.hpp"

#include "kq/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

namespace kq {

namespace {

using u64 = std::uint64_t;

void check_p(u64 p) {
  require(p < (u64(1) << 31), ErrorKind::Validation, "p must be below 2^31");
  require(is_prime(p), ErrorKind::Validation, std::to_string(p) + " is not prime");
}

u64 mulmod(u64 a, u64 b, u64 p) { return a * b % p; }

u64 modinv(u64 a, u64 p) {
  // extended Euclid on signed values
  long long t = 0, nt = 1, r = static_cast<long long>(p), nr = static_cast<long long>(a % p);
  while (nr != 0) {
    const long long q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  require(r == 1, ErrorKind::Internal, "residue is not invertible");
  return static_cast<u64>(t < 0 ? t + static_cast<long long>(p) : t);
}

u64 residue(long v, u64 p) {
  const long m = static_cast<long>(p);
  return static_cast<u64>(((v % m) + m) % m);
}

ProjPoint point_at(u64 p, std::size_t index) {
  return index == p ? ProjPoint::infinity(p) : ProjPoint::finite(p, index);
}

Eigen::MatrixXd to_eigen(const FloatMatrix &m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = m(i, j);
  return out;
}

FloatMatrix from_eigen(const Eigen::MatrixXd &m) {
  FloatMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) = m(i, j);
  return out;
}

// Modified Gram-Schmidt on the columns; all columns must be independent.
Eigen::MatrixXd orthonormalize(Eigen::MatrixXd m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index k = 0; k < j; ++k)
      m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
    const double n = m.col(j).norm();
    require(n > 1e-12, ErrorKind::Internal, "dependent vectors in Gram-Schmidt");
    m.col(j) /= n;
  }
  return m;
}

std::vector<Eigen::MatrixXd> checked_generators(const std::vector<FloatMatrix> &gens) {
  require(!gens.empty(), ErrorKind::Validation, "need at least one generator");
  std::vector<Eigen::MatrixXd> out;
  const std::size_t n = gens.front().rows();
  for (const auto &g : gens) {
    require(g.rows() == n && g.cols() == n, ErrorKind::Shape, "generators must be square of equal size");
    Eigen::MatrixXd a = to_eigen(g);
    const double dev = (a.transpose() * a - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    require(n == 0 || dev <= kOrthogonalTol, ErrorKind::Validation, "generator is not orthogonal");
    out.push_back(std::move(a));
  }
  return out;
}

// Positive semidefinite forms (A - I)^T (A - I).
std::vector<Eigen::MatrixXd> defect_forms(const std::vector<Eigen::MatrixXd> &gens) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto &a : gens) {
    const Eigen::MatrixXd d = a - Eigen::MatrixXd::Identity(a.rows(), a.cols());
    out.push_back(d.transpose() * d);
  }
  return out;
}

// Coordinate descent on the unit sphere for max_s v^T G_s v; returns the
// square root of the value reached.
double descend(const std::vector<Eigen::MatrixXd> &forms, Eigen::VectorXd v) {
  const Eigen::Index n = v.size();
  const std::size_t k = forms.size();
  v.normalize();
  std::vector<Eigen::VectorXd> gv(k);
  std::vector<double> q(k);
  for (std::size_t s = 0; s < k; ++s) {
    gv[s] = forms[s] * v;
    q[s] = v.dot(gv[s]);
  }
  auto worst = [&] { return *std::max_element(q.begin(), q.end()); };
  double val = worst();
  double h = 0.5;
  std::size_t sweeps = 0;
  while (h > 1e-7 && sweeps < 20000) {
    ++sweeps;
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (double step : {h, -h}) {
        // v + step e_i, renormalized
        const double norm2 = 1.0 + 2.0 * step * v(i) + step * step;
        double cand = 0.0;
        for (std::size_t s = 0; s < k; ++s)
          cand = std::max(cand, (q[s] + 2.0 * step * gv[s](i) + step * step * forms[s](i, i)) / norm2);
        if (cand < val - 1e-15) {
          for (std::size_t s = 0; s < k; ++s) {
            q[s] = (q[s] + 2.0 * step * gv[s](i) + step * step * forms[s](i, i)) / norm2;
            gv[s] = (gv[s] + step * forms[s].col(i)) / std::sqrt(norm2);
          }
          v(i) += step;
          v /= std::sqrt(norm2);
          val = cand;
          moved = true;
        }
      }
    }
    if (!moved)
      h /= 2;
  }
  // recompute from scratch to shed drift
  double exact = 0.0;
  for (const auto &g : forms)
    exact = std::max(exact, v.dot(g * v) / v.squaredNorm());
  return std::sqrt(std::max(0.0, exact));
}

} // namespace

ProjPoint ProjPoint::finite(u64 p, u64 v) {
  require(v < p, ErrorKind::Validation, "projective point out of range");
  return {p, false, v};
}

SL2pElement SL2pElement::make(u64 p, long a, long b, long c, long d) {
  check_p(p);
  SL2pElement g{p, residue(a, p), residue(b, p), residue(c, p), residue(d, p)};
  const u64 det = (mulmod(g.a, g.d, p) + p - mulmod(g.b, g.c, p)) % p;
  require(det == 1 % p, ErrorKind::Validation, "determinant is not 1 mod p");
  return g;
}

SL2pElement SL2pElement::random(u64 p, std::mt19937_64 &rng) {
  check_p(p);
  std::uniform_int_distribution<u64> pick(0, p - 1);
  for (;;) {
    const u64 a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == 0)
      continue;
    const u64 d = mulmod((1 + mulmod(b, c, p)) % p, modinv(a, p), p);
    return {p, a, b, c, d};
  }
}

SL2pElement SL2pElement::operator*(const SL2pElement &o) const {
  require(p == o.p, ErrorKind::Validation, "elements of different groups");
  return {p, (mulmod(a, o.a, p) + mulmod(b, o.c, p)) % p, (mulmod(a, o.b, p) + mulmod(b, o.d, p)) % p,
          (mulmod(c, o.a, p) + mulmod(d, o.c, p)) % p, (mulmod(c, o.b, p) + mulmod(d, o.d, p)) % p};
}

ProjPoint mobius(const SL2pElement &g, const ProjPoint &z) {
  require(g.p == z.p, ErrorKind::Validation, "point and element over different primes");
  const u64 p = g.p;
  if (z.infinite)
    return g.c == 0 ? ProjPoint::infinity(p) : ProjPoint::finite(p, mulmod(g.a, modinv(g.c, p), p));
  const u64 num = (mulmod(g.a, z.value, p) + g.b) % p;
  const u64 den = (mulmod(g.c, z.value, p) + g.d) % p;
  if (den == 0)
    return ProjPoint::infinity(p);
  return ProjPoint::finite(p, mulmod(num, modinv(den, p), p));
}

Matrix permutation_rep(const SL2pElement &g) {
  const std::size_t n = g.p + 1;
  Matrix out(Field::rationals(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    out.set(mobius(g, point_at(g.p, i)).index(), i, 1);
  return out;
}

Matrix restricted_rep(const SL2pElement &g) {
  const std::size_t p = g.p;
  Matrix out(Field::rationals(), p, p);
  for (std::size_t j = 0; j < p; ++j) {
    // image of e_{j+1} - e_j, then c_k = -(v_0 + ... + v_k)
    std::vector<long> v(p + 1, 0);
    v[mobius(g, point_at(g.p, j + 1)).index()] += 1;
    v[mobius(g, point_at(g.p, j)).index()] -= 1;
    long run = 0;
    for (std::size_t k = 0; k < p; ++k) {
      run += v[k];
      if (run != 0)
        out.set(k, j, Scalar(-run));
    }
  }
  return out;
}

IrreducibleRep irreducible_rep(u64 p) {
  return {p, restricted_rep(SL2pElement::shift(p)), restricted_rep(SL2pElement::flip(p))};
}

std::string rep_dump(u64 p) {
  const IrreducibleRep r = irreducible_rep(p);
  return to_text(r.mat_s) + to_text(r.mat_t);
}

std::size_t commutant_dim(const std::vector<Matrix> &gens) {
  require(!gens.empty(), ErrorKind::Validation, "need at least one generator");
  const std::size_t n = gens.front().rows();
  const Field F = gens.front().field();
  for (const auto &a : gens)
    require(a.rows() == n && a.cols() == n && a.field() == F, ErrorKind::Shape,
            "generators must be square of equal size");
  // unknown X_ij is variable i*n + j; rows are (XA - AX)_ij for each generator
  Matrix system(F, gens.size() * n * n, n * n);
  std::size_t row = 0;
  for (const auto &a : gens) {
    const Matrix at = a.transpose();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j, ++row) {
        std::vector<Scalar> coeff(n * n, Scalar(0));
        for (const auto &[k, v] : at.row(j)) // A_kj
          coeff[i * n + k] = F.add(coeff[i * n + k], v);
        for (const auto &[k, v] : a.row(i)) // A_ik
          coeff[k * n + j] = F.sub(coeff[k * n + j], v);
        SparseVec eq;
        for (std::size_t idx = 0; idx < n * n; ++idx)
          if (coeff[idx] != 0)
            eq.emplace_back(idx, coeff[idx]);
        system.set_row(row, std::move(eq));
      }
  }
  return n * n - rank(system);
}

bool is_irreducible(const std::vector<Matrix> &gens) { return commutant_dim(gens) == 1; }

FloatMatrix sum_zero_basis(u64 p) {
  check_p(p);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p + 1, p);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) {
    w(j + 1, j) = 1.0;
    w(j, j) = -1.0;
  }
  return from_eigen(orthonormalize(w));
}

FloatMatrix orthogonal_rep(const SL2pElement &g) {
  const Eigen::MatrixXd u = to_eigen(sum_zero_basis(g.p));
  const Eigen::MatrixXd pi = to_eigen(to_float(permutation_rep(g)));
  return from_eigen(u.transpose() * pi * u);
}

FloatMatrix trace_zero_basis(std::size_t n) {
  require(n >= 1, ErrorKind::Validation, "trace-zero basis needs n >= 1");
  const std::size_t nn = n * n;
  Eigen::MatrixXd b(nn, nn - 1);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && i + 1 == n)
        continue;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(nn);
      if (i != j) {
        v(i * n + j) = 1.0;
      } else {
        v(i * n + i) = 1.0 / std::sqrt(2.0);
        v((i + 1) * n + i + 1) = -1.0 / std::sqrt(2.0);
      }
      b.col(col++) = v;
    }
  return from_eigen(orthonormalize(b));
}

FloatMatrix adjoint_rep(const FloatMatrix &r) {
  require(r.rows() == r.cols() && r.rows() >= 1, ErrorKind::Shape, "adjoint needs a square matrix");
  const Eigen::Index n = r.rows();
  const Eigen::MatrixXd a = to_eigen(r);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  require(lu.isInvertible(), ErrorKind::Validation, "matrix is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::MatrixXd basis = to_eigen(trace_zero_basis(n));
  Eigen::MatrixXd out(basis.cols(), basis.cols());
  for (Eigen::Index l = 0; l < basis.cols(); ++l) {
    // row-major reshape of column l
    Eigen::MatrixXd t(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        t(i, j) = basis(i * n + j, l);
    const Eigen::MatrixXd c = a * t * inv;
    Eigen::VectorXd flat(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        flat(i * n + j) = c(i, j);
    out.col(l) = basis.transpose() * flat;
  }
  return from_eigen(out);
}

double kazhdan_lower_bound(const std::vector<FloatMatrix> &gens) {
  const auto forms = defect_forms(checked_generators(gens));
  if (forms.front().rows() == 0)
    return 0.0;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(forms.front().rows(), forms.front().cols());
  for (const auto &f : forms)
    mean += f;
  mean /= static_cast<double>(forms.size());
  const double lambda = min_eigenvalue_symmetric(from_eigen(mean), 1e-9);
  return std::sqrt(std::max(0.0, lambda));
}

double kazhdan_upper_bound(const std::vector<FloatMatrix> &gens, std::size_t trials, std::uint64_t seed) {
  const auto forms = defect_forms(checked_generators(gens));
  const Eigen::Index n = forms.front().rows();
  if (n == 0)
    return 0.0;
  // the eigenvector of the mean form is a good first start
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto &f : forms)
    mean += f;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mean);
  double best = descend(forms, es.eigenvectors().col(0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = gauss(rng);
    if (v.norm() < 1e-12)
      continue;
    best = std::min(best, descend(forms, v));
  }
  return best;
}

KazhdanEstimate kazhdan_estimate(const std::vector<FloatMatrix> &gens, const std::string &description,
                                 std::size_t trials, std::uint64_t seed) {
  KazhdanEstimate e;
  e.lower_bound = kazhdan_lower_bound(gens);
  e.upper_bound = kazhdan_upper_bound(gens, trials, seed);
  e.alpha = e.lower_bound * e.lower_bound / 12.0;
  e.dimension = gens.front().rows();
  e.generators = description;
  return e;
}

KazhdanEstimate adjoint_kazhdan(u64 p, std::size_t trials, std::uint64_t seed) {
  const std::vector<FloatMatrix> gens{adjoint_rep(orthogonal_rep(SL2pElement::shift(p))),
                                      adjoint_rep(orthogonal_rep(SL2pElement::flip(p)))};
  return kazhdan_estimate(gens, "adjoint of rho_" + std::to_string(p) + " on {s, t}", trials, seed);
}

KroneckerModule theta3_counterexample_module(u64 p, const Field &field) {
  const IrreducibleRep r = irreducible_rep(p);
  auto reduce = [&](const Matrix &m) {
    Matrix out(field, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (const auto &[j, v] : m.row(i))
        out.set(i, j, field.reduce(v));
    return out;
  };
  return make_module(field, p, p, {Matrix::identity(field, p), reduce(r.mat_s), reduce(r.mat_t)});
}

} // namespace kq
