#include <doctest.h>

#include "kq/error.hpp"
#include "kq/sl2p.hpp"

#include <fstream>
#include <sstream>

using namespace kq;

namespace {
std::string slurp(const std::string &path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix ints(const std::vector<std::vector<long>> &rows) { return Matrix::from_rows(Field::rationals(), rows); }

Matrix power(const Matrix &m, std::size_t e) {
  Matrix out = Matrix::identity(m.field(), m.rows());
  for (std::size_t i = 0; i < e; ++i)
    out = out * m;
  return out;
}

double max_dev_from_identity(const FloatMatrix &a) {
  return (a.transpose() * a).max_abs_diff(FloatMatrix::identity(a.rows()));
}
} // namespace

TEST_CASE("moebius action") {
  const auto t = SL2pElement::flip(3);
  CHECK(mobius(t, ProjPoint::finite(3, 0)) == ProjPoint::infinity(3));
  CHECK(mobius(SL2pElement::shift(5), ProjPoint::finite(5, 1)) == ProjPoint::finite(5, 2));
  for (std::uint64_t z = 0; z < 7; ++z)
    CHECK(mobius(SL2pElement::identity(7), ProjPoint::finite(7, z)) == ProjPoint::finite(7, z));
  CHECK(mobius(SL2pElement::identity(7), ProjPoint::infinity(7)) == ProjPoint::infinity(7));
  CHECK_THROWS_AS(SL2pElement::make(5, 1, 1, 1, 1), Error);
  CHECK_THROWS_AS(SL2pElement::make(6, 1, 0, 0, 1), Error);
}

TEST_CASE("permutation representation") {
  CHECK(permutation_rep(SL2pElement::identity(5)) == Matrix::identity(Field::rationals(), 6));
  // t swaps 0 with infinity and 1 with 2
  CHECK(permutation_rep(SL2pElement::flip(3)) ==
        ints({{0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13}[i % 6];
    const auto g = SL2pElement::random(p, rng), h = SL2pElement::random(p, rng);
    CHECK(permutation_rep(g * h) == permutation_rep(g) * permutation_rep(h));
  }
}

TEST_CASE("restricted representation") {
  const IrreducibleRep r3 = irreducible_rep(3);
  CHECK(r3.mat_s == ints({{0, -1, 1}, {1, -1, 1}, {0, 0, 1}}));
  CHECK(r3.mat_t == ints({{0, 0, -1}, {0, -1, 0}, {-1, 0, 0}}));
  for (std::uint64_t p : {3, 5, 7, 11})
    CHECK(rep_dump(p) == slurp(std::string(KQ_FIXTURE_DIR) + "/rho_" + std::to_string(p) + ".txt"));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13}[i % 6];
    const auto g = SL2pElement::random(p, rng), h = SL2pElement::random(p, rng);
    CHECK(restricted_rep(g * h) == restricted_rep(g) * restricted_rep(h));
  }
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const IrreducibleRep r = irreducible_rep(p);
    const Matrix I = Matrix::identity(Field::rationals(), p);
    CHECK(r.mat_t * r.mat_t == I);
    CHECK(power(r.mat_s, p) == I);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        CHECK(r.mat_t.at(i, j) == r.mat_t.at(p - 1 - i, p - 1 - j));
  }
}

TEST_CASE("irreducibility by commutant") {
  CHECK(is_irreducible({ints({{5}})}));
  CHECK(!is_irreducible({permutation_rep(SL2pElement::shift(3)), permutation_rep(SL2pElement::flip(3))}));
  CHECK(commutant_dim({permutation_rep(SL2pElement::shift(3)), permutation_rep(SL2pElement::flip(3))}) >= 2);
  for (std::uint64_t p : {3, 5, 7, 11, 13}) {
    const IrreducibleRep r = irreducible_rep(p);
    CHECK(is_irreducible({r.mat_s, r.mat_t}));
  }
}

TEST_CASE("adjoint representation") {
  const FloatMatrix id = adjoint_rep(FloatMatrix::identity(3));
  CHECK(id.max_abs_diff(FloatMatrix::identity(8)) < 1e-12);
  CHECK_THROWS_AS(adjoint_rep(FloatMatrix(2, 2, 1.0)), Error);

  const FloatMatrix s = orthogonal_rep(SL2pElement::shift(3)), t = orthogonal_rep(SL2pElement::flip(3));
  CHECK(max_dev_from_identity(s) < 1e-12);
  const FloatMatrix as = adjoint_rep(s), at = adjoint_rep(t);
  CHECK(max_dev_from_identity(as) < 1e-10);
  CHECK(max_dev_from_identity(at) < 1e-10);
  CHECK(adjoint_rep(s * t).max_abs_diff(as * at) < 1e-9);

  // conjugation keeps trace zero
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  const FloatMatrix r = to_float(irreducible_rep(3).mat_s);
  for (int k = 0; k < 50; ++k) {
    FloatMatrix tm(3, 3);
    double tr = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        tm(i, j) = gauss(rng);
    for (std::size_t i = 0; i < 3; ++i)
      tr += tm(i, i);
    tm(2, 2) -= tr;
    const FloatMatrix rinv = to_float(inverse(irreducible_rep(3).mat_s));
    const FloatMatrix c = r * tm * rinv;
    CHECK(std::abs(c(0, 0) + c(1, 1) + c(2, 2)) < 1e-9);
  }

  // no common fixed vector for p = 3
  std::size_t fixed_rank = 0;
  {
    FloatMatrix stacked(16, 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        stacked(i, j) = as(i, j) - (i == j ? 1.0 : 0.0);
        stacked(8 + i, j) = at(i, j) - (i == j ? 1.0 : 0.0);
      }
    const auto eig = eigen_symmetric(stacked.transpose() * stacked, 1e-9);
    for (double v : eig.values)
      if (v > 1e-9)
        ++fixed_rank;
  }
  CHECK(fixed_rank == 8);
}

TEST_CASE("kazhdan bounds") {
  const std::vector<FloatMatrix> ids{FloatMatrix::identity(4), FloatMatrix::identity(4)};
  CHECK(kazhdan_lower_bound(ids) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(kazhdan_upper_bound(ids, 10, 1) == doctest::Approx(0.0));

  const std::vector<FloatMatrix> neg{FloatMatrix(1, 1, -1.0)};
  CHECK(kazhdan_lower_bound(neg) == doctest::Approx(2.0));
  CHECK(kazhdan_upper_bound(neg, 10, 1) == doctest::Approx(2.0));

  CHECK_THROWS_AS(kazhdan_lower_bound({FloatMatrix(2, 2, 1.0)}), Error);

  const KazhdanEstimate e = adjoint_kazhdan(3, 200, 5);
  CHECK(e.dimension == 8);
  CHECK(e.lower_bound > 1e-3);
  CHECK(e.lower_bound <= e.upper_bound + 1e-8);
  CHECK(e.upper_bound <= 2.0 + 1e-12);
  CHECK(e.alpha == e.lower_bound * e.lower_bound / 12.0);

  // the permutation representation fixes the all-ones vector
  const std::vector<FloatMatrix> perm{to_float(permutation_rep(SL2pElement::shift(5))),
                                      to_float(permutation_rep(SL2pElement::flip(5)))};
  CHECK(kazhdan_lower_bound(perm) < 1e-8);
  CHECK(kazhdan_lower_bound(perm) <= kazhdan_upper_bound(perm, 20, 2) + 1e-8);

  for (std::uint64_t p : {2, 5, 7}) {
    const KazhdanEstimate ep = adjoint_kazhdan(p, 20, 9);
    CHECK(ep.lower_bound > 0.0);
    CHECK(ep.lower_bound <= ep.upper_bound + 1e-8);
  }
}

TEST_CASE("theta(3) family") {
  const Field Q = Field::rationals();
  const KroneckerModule m = theta3_counterexample_module(3, Q);
  CHECK(m.d == 3);
  CHECK(m.dim1 == 3);
  CHECK(m.dim2 == 3);
  CHECK(m.maps[1] == irreducible_rep(3).mat_s);
  CHECK(m.maps[2] == irreducible_rep(3).mat_t);
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
    const KroneckerModule mp = theta3_counterexample_module(p, Q);
    for (const auto &a : mp.maps)
      CHECK(rank(a) == p);
    const Matrix all = hconcat(Q, p, mp.maps);
    CHECK(rank(all) == p);
  }
  const KroneckerModule m7 = theta3_counterexample_module(5, Field::prime(7));
  CHECK(rank(m7.maps[2]) == 5);
}
