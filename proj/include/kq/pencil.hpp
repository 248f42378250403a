#pragma once

#include "kq/kronecker.hpp"

#include <utility>
#include <vector>

namespace kq {

// Kronecker canonical form of a 2-arrow module as a block multiset
// (canonical order, equal blocks merged into multiplicities).
std::vector<PencilBlock> decompose_pencil(const KroneckerModule &m);

// Invariant factors of a polynomial matrix (Smith form diagonal), monic,
// nonzero ones only.
std::vector<Poly> invariant_factors(std::vector<std::vector<Poly>> a);

struct RankProfile {
  std::vector<std::pair<Scalar, Scalar>> points;
  std::vector<std::size_t> ranks;
};
// rank(l*a + m*b) at deterministic sample points (l, m).
RankProfile rank_profile(const KroneckerModule &m, std::size_t count);
// Dims plus rank profile at 2*(dim+1) points.
bool certify_decomposition(const KroneckerModule &m, const std::vector<PencilBlock> &blocks);

} // namespace kq
