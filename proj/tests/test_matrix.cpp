#include <doctest.h>

#include "kq/error.hpp"
#include "kq/matrix.hpp"

#include <random>
#include <sstream>

using namespace kq;

TEST_CASE("identity over F5 has full rank") {
  const auto F = Field::prime(5);
  CHECK(rank(Matrix::identity(F, 3)) == 3);
}

TEST_CASE("kernel of the all-ones 2x2 over F2") {
  const auto F = Field::prime(2);
  const auto m = Matrix::from_rows(F, {{1, 1}, {1, 1}});
  auto ker = kernel_basis(m);
  REQUIRE(ker.size() == 1);
  CHECK(ker[0][0] == 1);
  CHECK(ker[0][1] == 1);
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS(Field::prime(6), Error);
  CHECK_THROWS_AS(parse_rational("0.5"), Error);
  CHECK(parse_rational("-3/6") == Scalar(-1, 2));
  CHECK(Field::prime(7).reduce(Scalar(1, 2)) == 4);
}

TEST_CASE("rank and kernel agree, rank is transpose invariant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> entry(-3, 3), dim(1, 7), which(0, 2);
  const Field fields[] = {Field::rationals(), Field::prime(2), Field::prime(5)};
  for (int trial = 0; trial < 200; ++trial) {
    const Field F = fields[which(rng)];
    const std::size_t r = static_cast<std::size_t>(dim(rng)), c = static_cast<std::size_t>(dim(rng));
    std::vector<long> e(r * c);
    for (auto &x : e)
      x = entry(rng) * (entry(rng) > 0 ? 0 : 1);
    const auto m = Matrix::from_ints(F, r, c, e);
    const auto k = rank(m);
    CHECK(k == rank(m.transpose()));
    const auto ker = kernel_matrix(m);
    CHECK(ker.cols() + k == c);
    CHECK((m * ker).is_zero());
    CHECK(rank(ker) == ker.cols());
  }
}

TEST_CASE("inverse and coordinates") {
  const auto Q = Field::rationals();
  const auto m = Matrix::from_rows(Q, {{2, 1}, {1, 1}});
  CHECK(m * inverse(m) == Matrix::identity(Q, 2));
  const auto v = Matrix::from_rows(Q, {{3}, {2}});
  const auto x = coordinates_in(m, v);
  CHECK(m * x == v);
  CHECK_THROWS_AS(coordinates_in(Matrix::from_rows(Q, {{1}, {0}}), v), Error);
  CHECK_THROWS_AS(inverse(Matrix::from_rows(Q, {{1, 1}, {1, 1}})), Error);
}

TEST_CASE("text round trip") {
  const auto Q = Field::rationals();
  const auto m = Matrix::from_rows(Q, {{1, -2, 0}, {0, 0, 5}});
  const auto text = to_text(m);
  CHECK(text == "field rational\n2 3\n1 -2 0\n0 0 5\n");
  CHECK(parse_matrix(text) == m);
  CHECK_THROWS_AS(parse_matrix("field 5\n1 1\n7\n"), Error);
}

TEST_CASE("symmetric eigenvalues") {
  FloatMatrix m(2, 2);
  m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 2;
  CHECK(std::abs(min_eigenvalue_symmetric(m) - 1.0) < 1e-10);
  m(0, 1) = 1.5;
  CHECK_THROWS_AS(eigen_symmetric(m), Error);
}
