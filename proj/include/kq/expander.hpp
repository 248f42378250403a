#pragma once

#include "kq/kronecker.hpp"
#include "kq/witness.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kq {

struct ExpanderCandidate {
  Field field;
  std::size_t n = 0;
  std::vector<Matrix> maps; // n x n each
  Scalar eta = Scalar(1, 2);
  Scalar alpha = Scalar(1);

  void validate() const;
};
// Candidate from a module with equal vertex dimensions.
ExpanderCandidate candidate_from_module(const KroneckerModule &m, const Scalar &eta, const Scalar &alpha);
// The module V => V with the candidate's maps.
KroneckerModule induced_module(const ExpanderCandidate &c);

struct ExpansionReport {
  enum class Verdict { Proved, Refuted, SampledPass };
  Verdict verdict = Verdict::Proved;
  Scalar eta;
  Scalar alpha;
  std::optional<Scalar> worst_ratio; // min dim(sum T_i W) / dim W seen
  std::optional<Matrix> witness;     // rows span the failing W
  std::uint64_t subspaces_checked = 0;
  std::string method;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
};
std::string verdict_name(ExpansionReport::Verdict v);

constexpr std::uint64_t kSubspaceGuard = 10000000;

// Number of subspaces of F_q^n of dimension 1..k_max (Gaussian binomials).
mpz_class subspace_count(std::uint64_t q, std::size_t n, std::size_t k_max);
// dim sum_i T_i(W) for W spanned by the rows of w.
std::size_t image_dim(const std::vector<Matrix> &maps, const Matrix &w);

struct ExhaustiveOptions {
  std::uint64_t guard = kSubspaceGuard;
  bool reverse = false; // walk the canonical order backwards
};
// Every subspace of dimension 1..floor(eta n), in the order (dim, pivot
// columns, entries). Throws Guard when the count exceeds the guard.
ExpansionReport check_exhaustive(const ExpanderCandidate &c, const ExhaustiveOptions &opts = {});

ExpansionReport check_sampled_rational(const ExpanderCandidate &c, std::size_t trials, long max_entry,
                                       std::uint64_t seed);

// alpha / (2(1 + alpha)) and alpha / (6 + 4 alpha)
Scalar nonhf_epsilon_bound(const Scalar &alpha);
Scalar weak_nonhf_epsilon_bound(const Scalar &alpha);

struct RefutationReport {
  enum class Status { Inconclusive, NotSubmodule, ExpanderCounterexample, Contradiction };
  Status status = Status::Inconclusive;
  std::string detail;
  std::optional<std::size_t> part; // offending part, 0-based
  std::optional<Matrix> counterexample; // columns span the non-expanding W
  std::size_t source_total = 0;  // sum of dim P_j(1)
  std::size_t sink_total = 0;    // sum of dim P_j(2)
  Scalar claimed_epsilon;
  Scalar bound;
};
std::string status_name(RefutationReport::Status s);
RefutationReport refute_witness(const KroneckerModule &m, const Witness &w, const Scalar &eta, const Scalar &alpha);

struct BestEpsilon {
  Scalar epsilon;
  bool partial = false;
  std::string method;
  std::uint64_t nodes = 0;
};
// Largest subspace search is used at dim M <= kBestEpsilonExactDim over a prime field.
constexpr std::size_t kBestEpsilonExactDim = 12;
BestEpsilon empirical_best_epsilon(const KroneckerModule &m, std::size_t l_eps, std::uint64_t budget);

nlohmann::json expansion_to_json(const ExpansionReport &r);
nlohmann::json refutation_to_json(const RefutationReport &r);

} // namespace kq
