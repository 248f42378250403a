#include <doctest.h>

#include "kq/pencil.hpp"

#include <map>
#include <random>

using namespace kq;

namespace {

Matrix random_invertible(const Field &F, std::size_t n, std::mt19937_64 &rng) {
  std::uniform_int_distribution<long> e(-2, 2);
  while (true) {
    Matrix m(F, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m.set(i, j, F.from_int(e(rng)));
    if (rank(m) == n)
      return m;
  }
}

// Independent count of the blocks attached to an irreducible p: the solution
// space of a Z C^T - b Z = 0, C the companion of p^j, has dimension
// deg p * (j * #Q + sum over p-blocks of min(j, m)).
std::size_t twisted_kernel_dim(const KroneckerModule &m, const Matrix &C) {
  const Field &F = m.field;
  const std::size_t r = m.dim1, k = C.rows();
  // unknown Z is r x k, vectorized row-major
  Matrix sys(F, m.dim2 * k, r * k);
  const Matrix Ct = C.transpose();
  const Matrix &a = m.maps[0], &b = m.maps[1];
  for (std::size_t i = 0; i < m.dim2; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      std::map<std::size_t, Scalar> row;
      for (const auto &[s, av] : a.row(i))
        for (std::size_t l = 0; l < k; ++l) {
          const Scalar c = Ct.at(l, j);
          if (c != 0)
            row[s * k + l] = F.add(row[s * k + l], F.mul(av, c));
        }
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

} // namespace

TEST_CASE("canonical examples") {
  const auto Q = Field::rationals();
  auto b = decompose_pencil(build_P(2, Q));
  REQUIRE(b.size() == 1);
  CHECK(b[0] == PencilBlock::preprojective(2));
  auto id = make_module(Q, 2, 2, {Matrix::identity(Q, 2), Matrix::identity(Q, 2)});
  auto bi = decompose_pencil(id);
  REQUIRE(bi.size() == 1);
  CHECK(bi[0] == PencilBlock::regular_poly(parse_poly(Q, "x-1"), 1, 2));
  const auto F5 = Field::prime(5);
  std::mt19937_64 rng(5);
  auto m = direct_sum({build_P(1, F5), build_Q(1, F5)});
  auto scrambled = change_basis(m, random_invertible(F5, 3, rng), random_invertible(F5, 3, rng));
  auto bs = decompose_pencil(scrambled);
  REQUIRE(bs.size() == 2);
  CHECK(bs[0] == PencilBlock::preprojective(1));
  CHECK(bs[1] == PencilBlock::postinjective(1));
}

TEST_CASE("random block lists are recovered after base change") {
  std::mt19937_64 rng(2024);
  const Field fields[] = {Field::rationals(), Field::prime(2), Field::prime(3), Field::prime(5)};
  std::uniform_int_distribution<int> pick_field(0, 3), nblocks(1, 4), kind(0, 3), small(0, 3), power(1, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const Field F = fields[pick_field(rng)];
    std::vector<Poly> irreducibles;
    if (F.is_rational())
      irreducibles = {parse_poly(F, "x"), parse_poly(F, "x-1"), parse_poly(F, "x+2"), parse_poly(F, "x^2+1"),
                      parse_poly(F, "x^2-2")};
    else
      irreducibles = {parse_poly(F, "x"), parse_poly(F, "x+1"), parse_poly(F, "x^2+x+1") /* may be reducible */};
    std::vector<PencilBlock> blocks;
    const int nb = nblocks(rng);
    for (int i = 0; i < nb; ++i) {
      switch (kind(rng)) {
      case 0:
        blocks.push_back(PencilBlock::preprojective(static_cast<std::size_t>(small(rng))));
        break;
      case 1:
        blocks.push_back(PencilBlock::postinjective(static_cast<std::size_t>(small(rng))));
        break;
      case 2: {
        const auto &p = irreducibles[static_cast<std::size_t>(rng() % irreducibles.size())];
        if (!is_irreducible(p))
          continue;
        blocks.push_back(PencilBlock::regular_poly(p, static_cast<std::size_t>(power(rng))));
        break;
      }
      default:
        blocks.push_back(PencilBlock::regular_monomial(1 + static_cast<std::size_t>(small(rng))));
      }
    }
    if (blocks.empty())
      continue;
    std::vector<KroneckerModule> mods;
    for (const auto &b : blocks)
      mods.push_back(build_block(b, F));
    auto m = direct_sum(mods);
    auto scrambled = change_basis(m, random_invertible(F, m.dim1, rng), random_invertible(F, m.dim2, rng));
    auto got = decompose_pencil(scrambled);
    CHECK(got == canonical_blocks(blocks));
    CHECK(certify_decomposition(scrambled, got));
  }
}

TEST_CASE("decomposition agrees with the twisted kernel oracle") {
  const auto Q = Field::rationals();
  std::mt19937_64 rng(7);
  const auto p = parse_poly(Q, "x^2+1");
  auto m = direct_sum({build_R(PencilBlock::regular_poly(p, 2), Q), build_R(PencilBlock::regular_poly(p, 1), Q),
                       build_Q(1, Q), build_P(2, Q), build_R(PencilBlock::regular_monomial(2), Q)});
  auto s = change_basis(m, random_invertible(Q, m.dim1, rng), random_invertible(Q, m.dim2, rng));
  auto blocks = decompose_pencil(s);
  for (std::size_t j = 1; j <= 3; ++j) {
    std::size_t expect = 0;
    for (const auto &b : blocks) {
      if (b.kind == PencilBlock::Kind::Postinjective)
        expect += 2 * j * b.multiplicity;
      if (b.kind == PencilBlock::Kind::RegularPoly && b.base == p)
        expect += 2 * std::min(j, b.power) * b.multiplicity;
    }
    CHECK(twisted_kernel_dim(s, companion(p.pow(j))) == expect);
    CHECK(expect == 2 * (j * 1 + std::min<std::size_t>(j, 2) + 1));
  }
}
