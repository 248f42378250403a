#include <doctest.h>

#include "kq/error.hpp"
#include "kq/quiver.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace kq;

namespace {
const Field Q = Field::rationals();

// largest piece left after deleting v, by brute force
std::size_t piece_after(const std::vector<std::vector<std::size_t>> &adj, std::size_t v) {
  std::vector<bool> alive(adj.size(), true);
  alive[v] = false;
  std::size_t best = 0;
  for (const auto &c : components(adj, alive))
    best = std::max(best, c.size());
  return best;
}
} // namespace

TEST_CASE("zigzag of P_3") {
  auto g = build_gamma(build_P(3, Q));
  CHECK(g.vertex_count() == 7);
  CHECK(g.edges.size() == 6);
  CHECK(is_tree(g));
  // walk the path f1 e1 f2 e2 f3 e3 f4: labels alternate
  auto adj = g.adjacency();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::count(adj[i].begin(), adj[i].end(), 3 + i) == 1);
    CHECK(std::count(adj[i].begin(), adj[i].end(), 3 + i + 1) == 1);
  }
  for (const auto &e : g.edges)
    CHECK(e.arrow == (e.target - 3 == e.source ? 0u : 1u));
  CHECK(degree_stats(g) == std::pair<std::size_t, std::size_t>(2, 2));
  CHECK(centroid(g) == 1); // e2, fourth along the path
  CHECK(piece_after(adj, 1) == 3);
  CHECK(gamma_to_text(g).substr(0, 24) == "1.1 2.1 arrow=1 coeff=1\n");
}

TEST_CASE("small quivers") {
  auto z = build_gamma(zero_module(Q, 2));
  CHECK(z.vertex_count() == 0);
  CHECK(!is_tree(z));
  CHECK(degree_stats(z) == std::pair<std::size_t, std::size_t>(0, 0));
  auto single = build_gamma(build_P(0, Q));
  CHECK(is_tree(single));
  CHECK(gamma_to_text(single) == "2.1\n");
  const auto F2 = Field::prime(2);
  auto r = build_R(PencilBlock::regular_poly(parse_poly(F2, "x^2+x+1"), 1), F2);
  auto gr = build_gamma(r);
  CHECK(gr.edges.size() >= gr.vertex_count());
  CHECK(!is_tree(gr));
  // back edges from the last source of an R_n
  auto r4 = build_R(PencilBlock::regular_poly(parse_poly(Q, "x^4+x+1"), 1), Q);
  std::size_t from_last = 0;
  for (const auto &e : build_gamma(r4).edges)
    if (e.source == 3 && e.arrow == 1)
      ++from_last;
  CHECK(from_last == 2);
  CHECK_THROWS_AS(centroid(gr), Error);
}

TEST_CASE("centroid on paths, stars and random trees") {
  // path 0-1-2-3-4 as a module: P_2 has 5 vertices e1 e2 f1 f2 f3
  auto g = build_gamma(build_P(2, Q));
  CHECK(centroid(g) == 3); // f2 sits in the middle
  auto star = build_gamma(build_preprojective_theta(4, 1, Q));
  CHECK(centroid(star) == 0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t v = 1; v < n; ++v) {
      const std::size_t u = rng() % v;
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t c = centroid_in(adj, alive, all);
    CHECK(piece_after(adj, c) <= n / 2);
    for (std::size_t v = 0; v < c; ++v)
      CHECK(piece_after(adj, v) > piece_after(adj, c));
  }
}

TEST_CASE("monomial submodules") {
  auto p7 = build_P(7, Q);
  auto all = submodule_from_generators(p7, {0, 1, 2, 3, 4, 5, 6});
  CHECK(all.module == p7);
  auto u = submodule_from_generators(p7, {0, 1, 3, 4, 6});
  CHECK(u.module.dim1 == 5);
  CHECK(u.module.dim2 == 8);
  for (std::size_t a = 0; a < 2; ++a)
    CHECK(p7.maps[a] * u.emb1 == u.emb2 * u.module.maps[a]);
  auto parts = split_components(u.module);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].module == build_P(2, Q));
  CHECK(parts[1].module == build_P(2, Q));
  CHECK(parts[2].module == build_P(1, Q));
  CHECK(submodule_from_generators(p7, {}).module.dim() == 0);
}

TEST_CASE("split components") {
  auto two = direct_sum({build_P(1, Q), build_P(1, Q)});
  auto parts = split_components(two);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].module == build_P(1, Q));
  CHECK(split_components(build_P(4, Q)).size() == 1);
  auto m = direct_sum({build_Q(2, Q), build_P(3, Q), build_P(0, Q)});
  std::size_t d1 = 0, d2 = 0;
  for (const auto &c : split_components(m)) {
    d1 += c.module.dim1;
    d2 += c.module.dim2;
    auto back = restrict_to(m, c.sources, c.sinks);
    CHECK(back.module == c.module);
  }
  CHECK(d1 == m.dim1);
  CHECK(d2 == m.dim2);
}

TEST_CASE("theta modules are tree modules with the degree bounds") {
  for (std::size_t d : {3u, 4u}) {
    for (std::size_t t = 1; t <= 8; ++t) {
      auto post = build_postinjective_theta(d, t, Q);
      auto g = build_gamma(post);
      CHECK(is_tree(g));
      auto [in, out] = degree_stats(g);
      CHECK(out <= 2);
      CHECK(in <= (t - 1) * (d - 2) + d);
      auto pre = build_gamma(build_preprojective_theta(d, t, Q));
      CHECK(is_tree(pre));
      CHECK(degree_stats(pre).first <= d);
    }
  }
  auto g = build_gamma(build_postinjective_theta(3, 3, Q));
  CHECK(degree_stats(g).first <= 5);
}
