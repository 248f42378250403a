#pragma once

#include "kq/kronecker.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace kq {

// Columns of basis1 / basis2 are the chosen basis vectors at each vertex.
struct BasisChoice {
  Matrix basis1;
  Matrix basis2;
  bool standard = false;
};
BasisChoice standard_basis(const KroneckerModule &m);

// Vertex ids: sources 0..n1-1, then sinks n1..n1+n2-1.
struct QuiverEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  std::size_t arrow = 0; // 0-based
  Scalar coeff;
};

struct CoefficientQuiver {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<QuiverEdge> edges;

  std::size_t vertex_count() const { return n1 + n2; }
  bool is_source(std::size_t v) const { return v < n1; }
  // Undirected neighbour lists (parallel edges repeated).
  std::vector<std::vector<std::size_t>> adjacency() const;
};

CoefficientQuiver build_gamma(const KroneckerModule &m, const BasisChoice &basis);
CoefficientQuiver build_gamma(const KroneckerModule &m);

bool is_tree(const CoefficientQuiver &g);
// (max indegree, max outdegree)
std::pair<std::size_t, std::size_t> degree_stats(const CoefficientQuiver &g);
std::vector<std::size_t> in_degrees(const CoefficientQuiver &g);
std::vector<std::size_t> out_degrees(const CoefficientQuiver &g);
std::size_t centroid(const CoefficientQuiver &g);

// Connected components of the subgraph induced on `alive` vertices, each
// sorted, listed by smallest vertex.
std::vector<std::vector<std::size_t>> components(const std::vector<std::vector<std::size_t>> &adj,
                                                 const std::vector<bool> &alive);
// Centroid of the tree spanned by `comp` inside the alive subgraph: the vertex
// minimizing the largest remaining piece, smallest id on ties.
std::size_t centroid_in(const std::vector<std::vector<std::size_t>> &adj, const std::vector<bool> &alive,
                        const std::vector<std::size_t> &comp);
// Largest piece left after deleting comp[i], for every i.
std::vector<std::size_t> largest_pieces(const std::vector<std::vector<std::size_t>> &adj,
                                        const std::vector<bool> &alive, const std::vector<std::size_t> &comp);

// Restriction to coordinate subsets (standard basis); the caller guarantees
// the subsets are arrow closed.
Submodule restrict_to(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                      const std::vector<std::size_t> &sinks);
// Same module without the embeddings.
KroneckerModule restricted_module(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                                  const std::vector<std::size_t> &sinks);
// `generators` are vertex ids as in CoefficientQuiver.
Submodule submodule_from_generators(const KroneckerModule &m, const std::vector<std::size_t> &generators);

struct Component {
  KroneckerModule module;
  std::vector<std::size_t> sources; // indices into the basis at vertex 1
  std::vector<std::size_t> sinks;
};
std::vector<Component> split_components(const KroneckerModule &m, const BasisChoice &basis);
std::vector<Component> split_components(const KroneckerModule &m);

// "u v arrow=<k> coeff=<c>" per edge, vertex names "1.<i>" / "2.<j>" (1-based),
// then one line per isolated vertex.
std::string gamma_to_text(const CoefficientQuiver &g);

} // namespace kq
