#include <doctest.h>

#include "kq/error.hpp"
#include "kq/expander.hpp"
#include "kq/sl2p.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <random>
#include <set>

using namespace kq;

namespace {
const Field F2 = Field::prime(2);

Matrix m2(const Field &f, const std::vector<std::vector<long>> &rows) { return Matrix::from_rows(f, rows); }

ExpanderCandidate cand(const Field &f, std::vector<Matrix> maps, Scalar eta, Scalar alpha) {
  const std::size_t n = maps.front().rows();
  return {f, n, std::move(maps), eta, alpha};
}

ExpanderCandidate random_candidate(std::mt19937_64 &rng, const Field &f, std::size_t n, std::size_t d) {
  std::uniform_int_distribution<long> pick(0, static_cast<long>(f.order()) - 1);
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < d; ++i) {
    Matrix t(f, n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        t.set(r, c, f.from_int(pick(rng)));
    maps.push_back(t);
  }
  return cand(f, maps, Scalar(1, 2), Scalar(1, 2));
}

// (I, I, A) over F_2 with A the golden-ratio companion.
KroneckerModule golden_module() {
  const Matrix I = Matrix::identity(F2, 2);
  return make_module(F2, 2, 2, {I, I, m2(F2, {{0, 1}, {1, 1}})});
}

Witness single_part_witness(const KroneckerModule &m, const Matrix &b1, const Matrix &b2, const Scalar &eps) {
  Witness w;
  w.epsilon = eps;
  w.l_eps = Scalar(4);
  w.d = m.d;
  w.field = m.field;
  w.m_dims = dim_vector(m);
  w.sub = {m, Matrix::identity(m.field, m.dim1), Matrix::identity(m.field, m.dim2)};
  w.parts.push_back({m, b1.transpose(), b2.transpose()});
  return w;
}

// Reference count of subspaces by brute force over all spanning sets (tiny n).
std::size_t brute_subspaces(std::uint64_t q, std::size_t n, std::size_t k) {
  std::set<std::vector<std::vector<Scalar>>> seen;
  const Field f = Field::prime(q);
  std::uint64_t vectors = 1;
  for (std::size_t i = 0; i < n; ++i)
    vectors *= q;
  std::vector<std::uint64_t> idx(k, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == k) {
      Matrix w(f, k, n);
      for (std::size_t r = 0; r < k; ++r) {
        std::uint64_t x = idx[r];
        for (std::size_t c = 0; c < n; ++c) {
          w.set(r, c, Scalar(static_cast<unsigned long>(x % q)));
          x /= q;
        }
      }
      if (rank(w) != k)
        return;
      const Matrix basis = column_space_basis(w.transpose());
      // canonical form: reduced echelon of the span
      const RowEchelon e = row_echelon(basis.transpose());
      std::vector<std::vector<Scalar>> key;
      for (const auto &row : e.rows) {
        std::vector<Scalar> dense(n, Scalar(0));
        for (const auto &[j, v] : row)
          dense[j] = v;
        key.push_back(dense);
      }
      seen.insert(key);
      return;
    }
    for (std::uint64_t v = 1; v < vectors; ++v) {
      idx[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  return seen.size();
}
} // namespace

TEST_CASE("exhaustive check on two dimensional examples") {
  const Matrix I = Matrix::identity(F2, 2);
  const auto ident = check_exhaustive(cand(F2, {I, I}, Scalar(1, 2), Scalar(1, 3)));
  CHECK(ident.verdict == ExpansionReport::Verdict::Refuted);
  REQUIRE(ident.witness);
  CHECK(ident.witness->rows() == 1);
  CHECK(*ident.worst_ratio == 1);

  const auto swap = check_exhaustive(cand(F2, {I, m2(F2, {{0, 1}, {1, 0}})}, Scalar(1, 2), Scalar(1)));
  CHECK(swap.verdict == ExpansionReport::Verdict::Refuted);
  REQUIRE(swap.witness);
  CHECK(*swap.witness == m2(F2, {{1, 1}}));
  CHECK(swap.subspaces_checked == 2); // (1,0) then (1,1)

  const auto gold = check_exhaustive(cand(F2, {I, m2(F2, {{0, 1}, {1, 1}})}, Scalar(1, 2), Scalar(1)));
  CHECK(gold.verdict == ExpansionReport::Verdict::Proved);
  CHECK(gold.subspaces_checked == 3);
  CHECK(*gold.worst_ratio == 2);

  const auto big = cand(Field::prime(3), {Matrix::identity(Field::prime(3), 20)}, Scalar(1, 2), Scalar(1));
  CHECK_THROWS_AS(check_exhaustive(big), Error);
  CHECK_THROWS_AS(check_exhaustive(cand(Field::rationals(), {Matrix::identity(Field::rationals(), 2)},
                                        Scalar(1, 2), Scalar(1))),
                  Error);
  CHECK_THROWS_AS(check_exhaustive(cand(F2, {I}, Scalar(0), Scalar(1))), Error);
}

TEST_CASE("subspace counts match gaussian binomials") {
  CHECK(subspace_count(2, 2, 1) == 3);
  CHECK(subspace_count(2, 4, 2) == 15 + 35);
  CHECK(subspace_count(3, 3, 3) == 13 + 13 + 1);
  for (std::uint64_t q : {2, 3})
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t total = 0;
      for (std::size_t k = 1; k <= n && k <= 2; ++k)
        total += brute_subspaces(q, n, k);
      CHECK(subspace_count(q, n, 2) == static_cast<unsigned long>(total));
    }
}

TEST_CASE("sampled check over the rationals") {
  const Field Q = Field::rationals();
  const auto one = check_sampled_rational(cand(Q, {Matrix::identity(Q, 4)}, Scalar(1, 2), Scalar(1, 10)), 50, 3, 1);
  CHECK(one.verdict == ExpansionReport::Verdict::Refuted);
  CHECK(one.subspaces_checked == 1);
  CHECK(*one.worst_ratio == 1);

  const KroneckerModule th = theta3_counterexample_module(5, Q);
  const auto s = check_sampled_rational(candidate_from_module(th, Scalar(1, 2), Scalar(1, 100)), 2000, 5, 7);
  CHECK(s.verdict == ExpansionReport::Verdict::SampledPass);
  CHECK(s.subspaces_checked == 2000);
  CHECK(*s.worst_ratio >= Scalar(101, 100));

  // nilpotent pair: T1 = T2 = E_{13}, all products zero
  Matrix t(Q, 3, 3);
  t.set(0, 2, 1);
  const auto nil = check_sampled_rational(cand(Q, {t, t}, Scalar(1, 2), Scalar(1, 2)), 100, 3, 2);
  CHECK(nil.verdict == ExpansionReport::Verdict::Refuted);
  // a line inside im T1 dies under both maps
  Matrix line(Q, 1, 3);
  line.set(0, 0, 1);
  CHECK(image_dim({t, t}, line) == 0);

  CHECK_THROWS_AS(check_sampled_rational(cand(Q, {t}, Scalar(1, 2), Scalar(1)), 0, 3, 1), Error);
}

TEST_CASE("hyperfiniteness bounds") {
  CHECK(nonhf_epsilon_bound(Scalar(1)) == Scalar(1, 4));
  CHECK(nonhf_epsilon_bound(Scalar(1, 12)) == Scalar(1, 26));
  CHECK(weak_nonhf_epsilon_bound(Scalar(1)) == Scalar(1, 10));
  CHECK(weak_nonhf_epsilon_bound(Scalar(3)) == Scalar(1, 6));
  Scalar prev = 0;
  for (long k = 1; k <= 40; ++k) {
    const Scalar a(k, 7);
    CHECK(weak_nonhf_epsilon_bound(a) < nonhf_epsilon_bound(a));
    CHECK(weak_nonhf_epsilon_bound(a) > 0);
    CHECK(nonhf_epsilon_bound(a) > prev);
    prev = nonhf_epsilon_bound(a);
  }
  CHECK(nonhf_epsilon_bound(Scalar(1, 1000000)) < Scalar(1, 1000000));
  CHECK_THROWS_AS(nonhf_epsilon_bound(Scalar(0)), Error);
  CHECK_THROWS_AS(weak_nonhf_epsilon_bound(Scalar(-1)), Error);
}

TEST_CASE("refuting witnesses on expander modules") {
  const KroneckerModule g = golden_module();
  const Matrix I = Matrix::identity(F2, 2);

  const auto whole = refute_witness(g, whole_module_witness(g, Scalar(1, 8), Scalar(4), "whole"), Scalar(1, 2),
                                    Scalar(1));
  CHECK(whole.status == RefutationReport::Status::Inconclusive);

  // every line generated part: U = span(u), P(2) = all of V
  for (const auto &u : {m2(F2, {{1}, {0}}), m2(F2, {{0}, {1}}), m2(F2, {{1}, {1}})}) {
    const auto r = refute_witness(g, single_part_witness(g, u, I, Scalar(1, 8)), Scalar(1, 2), Scalar(1));
    CHECK(r.status == RefutationReport::Status::Contradiction);
    CHECK(r.source_total == 1);
    CHECK(r.sink_total == 2);
  }
  // the monomial choice with sinks only
  const auto sinks_only =
      refute_witness(g, single_part_witness(g, Matrix(F2, 2, 0), I, Scalar(1, 8)), Scalar(1, 2), Scalar(1));
  CHECK(sinks_only.status == RefutationReport::Status::Contradiction);

  const auto open = refute_witness(g, single_part_witness(g, m2(F2, {{1}, {0}}), m2(F2, {{1}, {0}}), Scalar(1, 8)),
                                   Scalar(1, 2), Scalar(1));
  CHECK(open.status == RefutationReport::Status::NotSubmodule);

  // claim not below the bound
  const auto weak = refute_witness(g, single_part_witness(g, m2(F2, {{1}, {0}}), I, Scalar(1, 4)), Scalar(1, 2),
                                   Scalar(1));
  CHECK(weak.status == RefutationReport::Status::Inconclusive);

  // a non-expanding part is handed back as a counterexample
  const KroneckerModule flat = make_module(F2, 2, 2, {I, I});
  const auto ce = refute_witness(flat, single_part_witness(flat, m2(F2, {{1}, {0}}), m2(F2, {{1}, {0}}), Scalar(1, 8)),
                                 Scalar(1, 2), Scalar(1));
  CHECK(ce.status == RefutationReport::Status::ExpanderCounterexample);
  REQUIRE(ce.counterexample);
  CHECK(image_dim(flat.maps, ce.counterexample->transpose()) == 1);

  const auto j = refutation_to_json(whole);
  CHECK(j["status"] == "inconclusive");
}

TEST_CASE("best epsilon search") {
  const Field Q = Field::rationals();
  const auto p7 = empirical_best_epsilon(build_P(7, F2), 7, 1000000);
  CHECK(p7.epsilon <= Scalar(2, 15));
  CHECK(!p7.partial);
  CHECK(p7.method == "monomial");
  const auto p7q = empirical_best_epsilon(build_P(7, Q), 7, 1000000);
  CHECK(p7q.epsilon == p7.epsilon);

  CHECK(empirical_best_epsilon(zero_module(Q, 2), 3, 10).epsilon == 0);

  // theta(3) family at p = 3 reduced mod 2; experimental
  const KroneckerModule th = theta3_counterexample_module(3, F2);
  const auto best = empirical_best_epsilon(th, 4, 10000000);
  CHECK(best.method == "subspace");
  CHECK(!best.partial);
  Scalar alpha = 0;
  for (long k = 8; k >= 1; --k) {
    const auto rep = check_exhaustive(candidate_from_module(th, Scalar(1, 2), Scalar(k, 8)));
    if (rep.verdict == ExpansionReport::Verdict::Proved) {
      alpha = Scalar(k, 8);
      break;
    }
  }
  MESSAGE("theta3(3) mod 2: best eps " << best.epsilon.get_str() << ", certified alpha " << alpha.get_str());
  if (alpha > 0)
    CHECK(best.epsilon >= weak_nonhf_epsilon_bound(alpha));
  CHECK(best.epsilon <= Scalar(1, 2));

  // exact subspace search never does worse than the monomial one
  const auto tiny = empirical_best_epsilon(golden_module(), 2, 100000);
  CHECK(tiny.epsilon == Scalar(1, 2));
  const auto starved = empirical_best_epsilon(build_P(7, F2), 7, 3);
  CHECK(starved.partial);
  CHECK_THROWS_AS(empirical_best_epsilon(build_P(2, F2), 0, 10), Error);
}

TEST_CASE("expander invariants") {
  std::mt19937_64 rng(2024);
  const Field F3 = Field::prime(3);
  int proved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Field &f = trial % 2 ? F3 : F2;
    ExpanderCandidate c = random_candidate(rng, f, trial % 2 ? 3 : 4, 2 + trial % 2);
    c.eta = Scalar(1, 2);
    c.alpha = Scalar(1, 2);
    const auto fwd = check_exhaustive(c);
    const auto back = check_exhaustive(c, {kSubspaceGuard, true});
    CHECK(fwd.verdict == back.verdict);
    if (fwd.verdict == ExpansionReport::Verdict::Proved)
      CHECK(fwd.subspaces_checked == subspace_count(f.order(), c.n, c.n / 2).get_ui());
    if (fwd.verdict == ExpansionReport::Verdict::Refuted) {
      const std::size_t k = fwd.witness->rows();
      Scalar r(static_cast<unsigned long>(image_dim(c.maps, *fwd.witness)), static_cast<unsigned long>(k));
      r.canonicalize();
      CHECK(r == *fwd.worst_ratio);
      CHECK(*fwd.worst_ratio < 1 + c.alpha);
      continue;
    }
    ++proved;
    for (const auto &[eta, alpha] : {std::pair{Scalar(1, 4), Scalar(1, 2)}, std::pair{Scalar(1, 2), Scalar(1, 4)},
                                     std::pair{Scalar(1, 4), Scalar(1, 8)}}) {
      ExpanderCandidate weaker = c;
      weaker.eta = eta;
      weaker.alpha = alpha;
      CHECK(check_exhaustive(weaker).verdict == ExpansionReport::Verdict::Proved);
    }
    // minimal closed parts P(2) = sum T_i P(1) of the induced module expand
    const KroneckerModule m = induced_module(c);
    for (std::size_t i = 0; i < m.dim1; ++i) {
      Matrix u(f, 1, m.dim1);
      u.set(0, i, 1);
      CHECK(image_dim(m.maps, u) >= 2);
    }
  }
  MESSAGE("random candidates proved: " << proved);

  const auto j = expansion_to_json(check_exhaustive(cand(F2, {Matrix::identity(F2, 2)}, Scalar(1, 2), Scalar(1))));
  CHECK(j["verdict"] == "refuted");
  CHECK(j["witness"].is_string());
  CHECK(j.contains("runtime_ms"));
}
