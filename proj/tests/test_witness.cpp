#include <doctest.h>

#include "kq/error.hpp"
#include "kq/pencil.hpp"
#include "kq/quiver.hpp"
#include "kq/witness.hpp"

#include <nlohmann/json.hpp>

#include <random>

using namespace kq;

namespace {
const Field Q = Field::rationals();

std::vector<std::pair<std::size_t, std::size_t>> part_dims(const Witness &w) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto &p : w.parts)
    out.emplace_back(p.module.dim1, p.module.dim2);
  return out;
}

bool throws_kind(ErrorKind kind, auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind() == kind;
  }
  return false;
}
} // namespace

TEST_CASE("dropping pattern on P_7") {
  const Scalar eps(1, 4);
  CHECK(preprojective_step(eps) == 3);
  CHECK(preprojective_bound(eps) == 7);
  const Witness w = witness_preprojective_2k(7, eps, Q);
  CHECK(w.sub.module.dim() == 13);
  CHECK(w.kept_sources == std::vector<std::size_t>{0, 1, 3, 4, 6});
  using D = std::pair<std::size_t, std::size_t>;
  CHECK(part_dims(w) == std::vector<D>{{2, 3}, {2, 3}, {1, 2}});
  for (const auto &p : w.parts)
    CHECK(decompose_pencil(p.module).front().kind == PencilBlock::Kind::Preprojective);
  const auto r = verify_witness(build_P(7, Q), w);
  CHECK(r.pass);
  CHECK(r.removed_fraction == Scalar(2, 15));
  // dim U = dim M - j with j the number of dropped sources
  CHECK(w.stats.splits == 2);
}

TEST_CASE("small and coarse preprojective cases") {
  const Witness one = witness_preprojective_2k(1, Scalar(1, 4), Q);
  CHECK(one.sub.module.dim() == 3);
  CHECK(one.parts.size() == 1);
  CHECK(verify_witness(build_P(1, Q), one).pass);

  const Witness nine = witness_preprojective_2k(9, Scalar(1, 2), Q);
  CHECK(preprojective_step(Scalar(1, 2)) == 2);
  for (const auto &p : nine.parts)
    CHECK(p.module.dim() == 3);
  CHECK(nine.parts.size() == 5);
  CHECK(verify_witness(build_P(9, Q), nine).pass);

  CHECK(throws_kind(ErrorKind::Domain, [] { witness_preprojective_2k(3, Scalar(1), Q); }));
  CHECK(throws_kind(ErrorKind::Domain, [] { witness_preprojective_2k(3, Scalar(0), Q); }));
}

TEST_CASE("regular blocks") {
  const Field F = Q;
  const KroneckerModule r1 = build_R(PencilBlock::regular_poly(parse_poly(F, "x-1"), 1), F);
  const Witness w1 = witness_regular_2k(r1, Scalar(1, 4));
  CHECK(w1.sub.module.dim() == 2);
  CHECK(verify_witness(r1, w1).pass);

  const KroneckerModule r20 = build_R(PencilBlock::regular_poly(parse_poly(F, "x-1"), 20), F);
  CHECK(regular_string_submodule(r20).module.dim() == r20.dim() - 1);
  const Witness w = witness_regular_2k(r20, Scalar(1, 4));
  CHECK(w.sub.module.dim() >= 30);
  CHECK(w.l_eps == 11);
  const auto rep = verify_witness(r20, w);
  CHECK(rep.pass);
  CHECK(rep.max_part <= 11);

  const KroneckerModule inf = build_R(PencilBlock::regular_monomial(30), F);
  CHECK(verify_witness(inf, witness_regular_2k(inf, Scalar(1, 10))).pass);

  CHECK(throws_kind(ErrorKind::Validation, [&] { witness_regular_2k(build_P(4, F), Scalar(1, 4)); }));
}

TEST_CASE("postinjective kernel and witness") {
  const Witness w0 = witness_postinjective_2k(0, Scalar(1, 4), Q);
  CHECK(w0.sub.module.dim() == 1);

  const PostinjectiveKernel k = postinjective_kernel(5, Q);
  CHECK(k.decomposed);
  CHECK(k.kernel.module.dim() == 10);
  for (const auto &b : k.blocks)
    CHECK(b.dims().defect() <= 0);
  CHECK(k.kernel.module == build_R(PencilBlock::regular_monomial(5), Q));
  // the chosen map is a member of the computed hom space
  CHECK(!hom_space(build_Q(5, Q), build_Q(0, Q)).empty());

  const Witness w5 = witness_postinjective_2k(5, Scalar(1, 4), Q);
  CHECK(verify_witness(build_Q(5, Q), w5).pass);
  const Witness w20 = witness_postinjective_2k(20, Scalar(1, 10), Q);
  CHECK(verify_witness(build_Q(20, Q), w20).pass);
  const Witness w40 = witness_postinjective_2k(40, Scalar(1, 4), Field::prime(3));
  CHECK(w40.sub.module.dim() < 81);
  CHECK(verify_witness(build_Q(40, Field::prime(3)), w40).pass);
}

TEST_CASE("tree fragmentation") {
  const KroneckerModule m = build_preprojective_theta(3, 6, Q);
  const Scalar eps(1, 5);
  CHECK(tree_bound(3, eps) == 40);
  const Witness w = fragment_tree_module(m, eps);
  const auto r = verify_witness(m, w);
  CHECK(r.pass);
  CHECK(r.removed_fraction <= eps);
  CHECK(r.max_part <= 40);
  // each level at least halves the largest component until it stops
  for (std::size_t i = 1; i + 1 < w.stats.level_max.size(); ++i)
    CHECK(2 * w.stats.level_max[i] <= w.stats.level_max[i - 1] + 1);
  // a sink centroid costs at most itself and d sources
  CHECK(w.stats.removed <= 4 * w.stats.splits);

  const KroneckerModule small = build_preprojective_theta(3, 2, Q);
  const Witness ws = fragment_tree_module(small, eps);
  CHECK(ws.sub.module.dim() == small.dim());
  CHECK(ws.stats.removed == 0);

  CHECK(throws_kind(ErrorKind::Precondition, [] {
    fragment_tree_module(build_R(PencilBlock::regular_poly(parse_poly(Q, "x-1"), 2), Q), Scalar(1, 4));
  }));
}

TEST_CASE("staged postinjective fragmentation") {
  CHECK(staged_bound(3, Scalar(1, 4), Scalar(1, 8)) > 30000);
  const Witness t1 = fragment_postinjective_theta(3, 1, Scalar(1, 4), Q);
  CHECK(t1.sub.module.dim() == 4);

  const KroneckerModule m6 = build_postinjective_theta(3, 6, Q);
  const Witness w6 = fragment_postinjective_theta(3, 6, Scalar(1, 4), Q);
  CHECK(w6.stats.below_threshold);
  const auto r6 = verify_witness(m6, w6);
  CHECK(r6.pass);
  CHECK(r6.removed_fraction <= Scalar(1, 4));

  // forcing a small part bound exercises the stages themselves
  StagedOptions opts;
  opts.l_override = 60;
  const Witness ws = fragment_postinjective_theta(3, 6, Scalar(1, 4), Q, opts);
  CHECK(!ws.stats.below_threshold);
  CHECK(!ws.stats.stage_dims.empty());
  CHECK(stage_components_postinjective(3, ws.stats));
  const auto rs = verify_witness(m6, ws);
  CHECK(rs.clause != 1);
  CHECK(rs.clause != 2);
  CHECK(rs.max_part <= 60);

  opts.l_override = 200;
  const KroneckerModule m8 = build_postinjective_theta(3, 8, Q);
  const Witness w8 = fragment_postinjective_theta(3, 8, Scalar(1, 4), Q, opts);
  CHECK(stage_components_postinjective(3, w8.stats));
  CHECK(verify_witness(m8, w8).pass);
}

TEST_CASE("combinators") {
  const Scalar eps(1, 4);
  const Witness p7 = witness_preprojective_2k(7, eps, Q);
  CHECK(combinator_direct_sum({p7}).sub.module.dim() == 13);
  const Witness two = combinator_direct_sum({p7, p7});
  CHECK(two.sub.module.dim() == 26);
  CHECK(two.parts.size() == 6);
  const KroneckerModule m2 = direct_sum({build_P(7, Q), build_P(7, Q)});
  CHECK(verify_witness(m2, two).pass);

  const Witness none = combinator_direct_sum({}, 2, Q, eps);
  CHECK(none.sub.module.dim() == 0);
  CHECK(verify_witness(zero_module(Q, 2), none).pass);

  CHECK(throws_kind(ErrorKind::Validation,
                    [&] { combinator_direct_sum({p7, witness_preprojective_2k(7, Scalar(1, 2), Q)}); }));

  const CodimGuard g = bounded_codim_guard(40, 1, Scalar(1, 8), eps);
  CHECK(g.ok);
  CHECK(g.lower == Scalar(273, 8));
  CHECK(g.required == 30);
  const CodimGuard bad = bounded_codim_guard(50, 3, Scalar(1, 20), Scalar(1, 10));
  CHECK(!bad.ok);
  CHECK(!bounded_codim_guard(40, 1, Scalar(1, 4), eps).ok);

  // codimension zero transports the witness unchanged
  const KroneckerModule p = build_P(20, Q);
  const Submodule whole{p, Matrix::identity(Q, p.dim1), Matrix::identity(Q, p.dim2)};
  const Witness inner = witness_preprojective_2k(20, Scalar(1, 8), Q);
  const Witness moved = combinator_bounded_codim(p, whole, 0, inner, eps);
  CHECK(moved.sub.module == inner.sub.module);
  CHECK(verify_witness(p, moved).pass);

  const KroneckerModule q = build_Q(24, Q);
  const PostinjectiveKernel k = postinjective_kernel(24, Q);
  const Witness wk = witness_regular_2k(k.kernel.module, Scalar(1, 20));
  CHECK(throws_kind(ErrorKind::Guard, [&] { combinator_bounded_codim(q, k.kernel, 3, wk, Scalar(1, 10)); }));
}

TEST_CASE("weakening") {
  const KroneckerModule p1 = build_P(1, Q);
  const WeakWitness whole = weaken(witness_preprojective_2k(1, Scalar(1, 4), Q));
  CHECK(whole.ker_dim == 0);
  CHECK(whole.coker_dim == 0);
  CHECK(verify_weak_witness(p1, whole).pass);

  const WeakWitness w = weaken(witness_preprojective_2k(7, Scalar(1, 4), Q));
  CHECK(w.ker_dim == 0);
  CHECK(w.coker_dim == 2);
  CHECK(verify_weak_witness(build_P(7, Q), w).pass);
}

TEST_CASE("verifier catches injected violations") {
  const KroneckerModule m = build_P(7, Q);
  Witness big = witness_preprojective_2k(7, Scalar(1, 4), Q);
  big.l_eps = 4; // the P_2 parts have dim 5
  auto r = verify_witness(m, big);
  CHECK(!r.pass);
  CHECK(r.clause == 2);

  // drop the closure vector f_3 from the generated submodule
  const std::vector<std::size_t> sources{0, 1, 3, 4, 6};
  const std::vector<std::size_t> sinks{0, 1, 3, 4, 5, 6, 7};
  Witness open = witness_preprojective_2k(7, Scalar(1, 4), Q);
  const Submodule cut = restrict_to(m, sources, sinks);
  open.sub = cut;
  r = verify_witness(m, open);
  CHECK(!r.pass);
  CHECK(r.clause == 1);

  Witness greedy = witness_preprojective_2k(7, Scalar(1, 4), Q);
  greedy.epsilon = Scalar(1, 10);
  r = verify_witness(m, greedy);
  CHECK(r.clause == 3);
}

TEST_CASE("witness json") {
  const Witness w = witness_preprojective_2k(7, Scalar(1, 4), Q);
  const auto j = witness_to_json(w, verify_witness(build_P(7, Q), w));
  CHECK(j["epsilon"] == "1/4");
  CHECK(j["l_eps"] == "7");
  CHECK(j["kept_sources"] == nlohmann::json({1, 2, 4, 5, 7}));
  CHECK(j["parts"].size() == 3);
  CHECK(j["verdict"]["pass"] == true);
}

TEST_CASE("producers pass the verifier across sizes") {
  std::mt19937 rng(2024);
  const std::vector<Scalar> eps{Scalar(1, 2), Scalar(1, 4), Scalar(1, 10)};
  std::vector<std::size_t> sizes{0, 1, 2, 3, 5, 8, 13, 50, 199, 2000};
  for (int i = 0; i < 4; ++i)
    sizes.push_back(std::uniform_int_distribution<std::size_t>(4, 2000)(rng));
  for (std::size_t n : sizes) {
    for (const auto &e : eps) {
      CAPTURE(n);
      CHECK(verify_witness(build_P(n, Q), witness_preprojective_2k(n, e, Q)).pass);
      CHECK(verify_witness(build_Q(n, Q), witness_postinjective_2k(n, e, Q)).pass);
      if (n > 0) {
        const KroneckerModule r = build_R(PencilBlock::regular_monomial(n), Q);
        CHECK(verify_witness(r, witness_regular_2k(r, e)).pass);
      }
    }
  }
  for (std::size_t t = 1; t <= 7; ++t) {
    const KroneckerModule pre = build_preprojective_theta(3, t, Field::prime(2));
    for (const auto &e : eps) {
      CAPTURE(t);
      const auto r = verify_witness(pre, fragment_tree_module(pre, e));
      CHECK(r.clause != 1);
      CHECK(r.clause != 2);
    }
  }
}

TEST_CASE("drop grid shifts when the last source would be lost") {
  // P_12 at 1/10: dropping sources 6 and 12 would cost 3 > 2.5
  const Witness w = witness_preprojective_2k(12, Scalar(1, 10), Q);
  const auto r = verify_witness(build_P(12, Q), w);
  CHECK(r.pass);
  CHECK(r.dim_n == 23);
  for (std::size_t n = 1; n <= 80; ++n)
    for (const Scalar eps : {Scalar(1, 2), Scalar(1, 3), Scalar(1, 4), Scalar(1, 7), Scalar(1, 10)})
      CHECK(verify_witness(build_P(n, Q), witness_preprojective_2k(n, eps, Q)).pass);
}

TEST_CASE("witness dispatch by module shape") {
  const Scalar eps(1, 4);
  CHECK(witness_for_module(build_P(9, Q), eps).producer == "preprojective");
  CHECK(witness_for_module(build_Q(9, Q), eps).producer == "postinjective");
  CHECK(witness_for_module(build_R(PencilBlock::regular_monomial(12), Q), eps).producer == "regular");
  const KroneckerModule post = build_postinjective_theta(3, 4, Q);
  CHECK(verify_witness(post, witness_for_module(post, eps)).pass);
  const KroneckerModule pre = build_preprojective_theta(3, 5, Q);
  CHECK(verify_witness(pre, witness_for_module(pre, eps)).pass);
  const Matrix I = Matrix::identity(Q, 2);
  CHECK_THROWS_AS(witness_for_module(make_module(Q, 2, 2, {I, I, Matrix::from_rows(Q, {{0, 1}, {1, 1}})}), eps),
                  Error);
}
