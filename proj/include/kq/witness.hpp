#pragma once

#include "kq/kronecker.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace kq {

// A summand of N. Row k of basis1 (basis2) is the image in N of the k-th
// basis vector of the part at vertex 1 (2), so the embedding is its transpose.
struct WitnessPart {
  KroneckerModule module;
  Matrix basis1;
  Matrix basis2;
};

struct FragmentStats {
  std::size_t removed = 0;
  std::size_t splits = 0;
  // Largest component after each recursion level (tree splitting) or stage.
  std::vector<std::size_t> level_max;
  // Component dimension vectors of the sink-deleted quotient after each stage.
  std::vector<std::vector<DimVector>> stage_dims;
  // Set when the module was returned whole because it is below the size
  // where the removal budget is guaranteed.
  bool below_threshold = false;
  Scalar threshold;
};

struct Witness {
  Scalar epsilon;
  Scalar l_eps;
  std::size_t d = 0;
  Field field;
  DimVector m_dims;
  Submodule sub; // N with its embedding into M
  std::vector<WitnessPart> parts;
  // When N is spanned by standard basis vectors of M: their indices.
  bool coordinate = false;
  std::vector<std::size_t> kept_sources;
  std::vector<std::size_t> kept_sinks;
  std::string producer;
  FragmentStats stats;
};

struct WeakWitness {
  Scalar epsilon;
  Scalar l_eps;
  DimVector m_dims;
  KroneckerModule source; // N
  Homomorphism theta;     // N -> M
  std::vector<WitnessPart> parts;
  std::size_t ker_dim = 0;
  std::size_t coker_dim = 0;
};

struct WitnessReport {
  bool pass = false;
  // 0 when passing, otherwise the first violated clause: 1 embedding and
  // decomposition, 2 part size, 3 dimension inequality.
  int clause = 0;
  std::string detail;
  std::size_t dim_m = 0;
  std::size_t dim_n = 0;
  std::size_t max_part = 0;
  Scalar removed_fraction;
};

// K = ceil(1/(2 eps)) + 1 and L = 1/eps + 3.
std::size_t preprojective_step(const Scalar &eps);
Scalar preprojective_bound(const Scalar &eps);
// ceil(2(d+1)/eps)
Scalar tree_bound(std::size_t d, const Scalar &eps);

Witness whole_module_witness(const KroneckerModule &m, const Scalar &eps, const Scalar &l_eps,
                             const std::string &producer);
// N spanned by the given standard basis vectors (must be arrow closed); parts
// are the connected pieces of its coefficient quiver.
Witness coordinate_witness(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                           const std::vector<std::size_t> &sinks, const Scalar &eps, const Scalar &l_eps,
                           const std::string &producer);

Witness witness_preprojective_2k(std::size_t n, const Scalar &eps, const Field &field);
// Same dropping pattern applied to any module whose sources generate a string.
Witness witness_drop_pattern(const KroneckerModule &m, const Scalar &eps, const std::string &producer);

// The codimension one submodule generated by all but the last source of a
// regular block in companion shape.
Submodule regular_string_submodule(const KroneckerModule &r);
Witness witness_regular_2k(const KroneckerModule &r, const Scalar &eps);

struct PostinjectiveKernel {
  Homomorphism theta;
  std::size_t target_index = 0; // 0 or 1: theta lands in Q_0 or Q_1
  Submodule kernel;
  std::vector<PencilBlock> blocks; // empty when not decomposed
  bool decomposed = false;
};
// Largest dimension at which the kernel is decomposed explicitly.
constexpr std::size_t kKernelDecomposeLimit = 40;
PostinjectiveKernel postinjective_kernel(std::size_t n, const Field &field);
Witness witness_postinjective_2k(std::size_t n, const Scalar &eps, const Field &field);

Witness fragment_tree_module(const KroneckerModule &m, const Scalar &eps);

struct StagedOptions {
  Scalar delta = Scalar(1, 8);
  std::optional<std::size_t> l_override;
};
// Bound on part size from the geometric series estimate, rounded up.
std::size_t staged_bound(std::size_t d, const Scalar &eps, const Scalar &delta);
Witness fragment_postinjective_theta(std::size_t d, std::size_t t, const Scalar &eps, const Field &field,
                                     const StagedOptions &opts = {});
// Whether every stage component has the dimension vector of some Q[s].
bool stage_components_postinjective(std::size_t d, const FragmentStats &stats);

Witness combinator_direct_sum(const std::vector<Witness> &ws, std::size_t d, const Field &field,
                              const Scalar &eps);
Witness combinator_direct_sum(const std::vector<Witness> &ws);

struct CodimGuard {
  bool ok = false;
  Scalar lower;    // (1 - eps') (dim M - L)
  Scalar required; // (1 - eps) dim M
  std::string detail;
};
CodimGuard bounded_codim_guard(std::size_t dim_m, std::size_t codim_bound, const Scalar &eps_prime,
                               const Scalar &eps);
// `w` is a witness for p.module; throws Guard when the preconditions fail.
Witness combinator_bounded_codim(const KroneckerModule &m, const Submodule &p, std::size_t codim_bound,
                                 const Witness &w, const Scalar &eps);

// Producer chosen by the shape of m: P_n, Q_n, a regular block in companion
// shape, or a tree coefficient quiver. Precondition error otherwise.
Witness witness_for_module(const KroneckerModule &m, const Scalar &eps);

WeakWitness weaken(const Witness &w);

WitnessReport verify_witness(const KroneckerModule &m, const Witness &w);
WitnessReport verify_weak_witness(const KroneckerModule &m, const WeakWitness &w);

nlohmann::json witness_to_json(const Witness &w, const WitnessReport &report);
nlohmann::json report_to_json(const WitnessReport &report);

} // namespace kq
