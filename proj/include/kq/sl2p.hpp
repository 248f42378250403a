#pragma once

#include "kq/kronecker.hpp"
#include "kq/matrix.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace kq {

// Point of the projective line over F_p: a residue, or infinity.
struct ProjPoint {
  std::uint64_t p = 2;
  bool infinite = false;
  std::uint64_t value = 0;

  static ProjPoint finite(std::uint64_t p, std::uint64_t v);
  static ProjPoint infinity(std::uint64_t p) { return {p, true, 0}; }
  // Position in the fixed ordering 0, 1, ..., p-1, infinity.
  std::size_t index() const { return infinite ? static_cast<std::size_t>(p) : static_cast<std::size_t>(value); }
  friend bool operator==(const ProjPoint &, const ProjPoint &) = default;
};

struct SL2pElement {
  std::uint64_t p = 2;
  std::uint64_t a = 1, b = 0, c = 0, d = 1;

  // Reduces the entries mod p; throws Validation unless ad - bc = 1.
  static SL2pElement make(std::uint64_t p, long a, long b, long c, long d);
  static SL2pElement identity(std::uint64_t p) { return make(p, 1, 0, 0, 1); }
  // [[1,1],[0,1]]
  static SL2pElement shift(std::uint64_t p) { return make(p, 1, 1, 0, 1); }
  // [[0,1],[-1,0]]
  static SL2pElement flip(std::uint64_t p) { return make(p, 0, 1, -1, 0); }
  static SL2pElement random(std::uint64_t p, std::mt19937_64 &rng);

  SL2pElement operator*(const SL2pElement &o) const;
  friend bool operator==(const SL2pElement &, const SL2pElement &) = default;
};

// z -> (az + b)/(cz + d), with x/0 = infinity and infinity -> a/c.
ProjPoint mobius(const SL2pElement &g, const ProjPoint &z);

// (p+1)x(p+1) permutation matrix over Q: column i has its 1 in row index(g z_i).
Matrix permutation_rep(const SL2pElement &g);
// Action on the sum-zero subspace in the basis e_{i+1} - e_i, i = 1..p.
Matrix restricted_rep(const SL2pElement &g);

struct IrreducibleRep {
  std::uint64_t p = 0;
  Matrix mat_s;
  Matrix mat_t;
};
IrreducibleRep irreducible_rep(std::uint64_t p);
// Both generator matrices in the matrix text format, s first.
std::string rep_dump(std::uint64_t p);

// Dimension of the space of matrices commuting with every generator.
std::size_t commutant_dim(const std::vector<Matrix> &gens);
// Over Q: absolutely irreducible iff the commutant is the scalars.
bool is_irreducible(const std::vector<Matrix> &gens);

// Orthonormal basis (columns) of the sum-zero subspace of R^{p+1}, by
// Gram-Schmidt on the difference basis.
FloatMatrix sum_zero_basis(std::uint64_t p);
// The restricted representation in that orthonormal basis; orthogonal.
FloatMatrix orthogonal_rep(const SL2pElement &g);

// Conjugation T -> R T R^{-1} on trace-zero n x n matrices, in an orthonormal
// basis for the Frobenius inner product. Throws Validation if R is singular.
FloatMatrix adjoint_rep(const FloatMatrix &r);
// Columns: orthonormal basis of the trace-zero matrices, each flattened row-major.
FloatMatrix trace_zero_basis(std::size_t n);

constexpr double kOrthogonalTol = 1e-8;

// sqrt of the least eigenvalue of the mean of (I - A)^T (I - A).
double kazhdan_lower_bound(const std::vector<FloatMatrix> &gens);
// Least max_s |A_s v - v| found over random unit starts refined by coordinate descent.
double kazhdan_upper_bound(const std::vector<FloatMatrix> &gens, std::size_t trials, std::uint64_t seed);

struct KazhdanEstimate {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double alpha = 0.0; // lower_bound^2 / 12
  std::size_t dimension = 0;
  std::string generators;
  std::string normalization = "inf over unit v of max over S of |rho(s)v - v| / |v|";
};
KazhdanEstimate kazhdan_estimate(const std::vector<FloatMatrix> &gens, const std::string &description,
                                 std::size_t trials = 200, std::uint64_t seed = 1);
// Adjoint action of s and t on trace-zero p x p matrices.
KazhdanEstimate adjoint_kazhdan(std::uint64_t p, std::size_t trials = 200, std::uint64_t seed = 1);

// d = 3, dims (p, p), maps (I, rho_p(s), rho_p(t)) reduced into `field`.
KroneckerModule theta3_counterexample_module(std::uint64_t p, const Field &field);

} // namespace kq
