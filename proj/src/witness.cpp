#include "kq/witness.hpp"

#include "kq/error.hpp"
#include "kq/pencil.hpp"
#include "kq/quiver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kq {

namespace {

void check_eps(const Scalar &eps) {
  require(eps > 0 && eps < 1, ErrorKind::Domain, "epsilon must lie strictly between 0 and 1");
}

mpz_class ceil_q(const Scalar &x) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

Scalar dim_q(std::size_t n) { return Scalar(static_cast<unsigned long>(n)); }

std::size_t dim_of(const DimVector &v) { return v.d1 + v.d2; }

// Row of the single 1 in every column, if the matrix is a coordinate embedding.
std::optional<std::vector<std::size_t>> coordinate_rows(const Matrix &e) {
  if (!e.is_coordinate_embedding())
    return std::nullopt;
  std::vector<std::size_t> out(e.cols());
  for (std::size_t i = 0; i < e.rows(); ++i)
    if (!e.row(i).empty())
      out[e.row(i)[0].first] = i;
  return out;
}

void fill_coordinates(Witness &w) {
  auto s = coordinate_rows(w.sub.emb1), t = coordinate_rows(w.sub.emb2);
  w.coordinate = s && t;
  w.kept_sources = w.coordinate ? *s : std::vector<std::size_t>{};
  w.kept_sinks = w.coordinate ? *t : std::vector<std::size_t>{};
}

Matrix shift_cols(const Matrix &b, std::size_t total, std::size_t offset) {
  Matrix out(b.field(), b.rows(), total);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    SparseVec row = b.row(i);
    for (auto &[j, v] : row)
      j += offset;
    out.set_row(i, std::move(row));
  }
  return out;
}

Witness base_witness(const KroneckerModule &m, const Scalar &eps, const Scalar &l_eps, const std::string &producer) {
  Witness w;
  w.epsilon = eps;
  w.l_eps = l_eps;
  w.d = m.d;
  w.field = m.field;
  w.m_dims = dim_vector(m);
  w.producer = producer;
  return w;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Witness from the standard basis vectors left alive in Gamma(m).
Witness from_alive(const KroneckerModule &m, const std::vector<bool> &alive, const Scalar &eps,
                   const Scalar &l_eps, const std::string &producer) {
  std::vector<std::size_t> sources, sinks;
  for (std::size_t v = 0; v < m.dim(); ++v) {
    if (!alive[v])
      continue;
    if (v < m.dim1)
      sources.push_back(v);
    else
      sinks.push_back(v - m.dim1);
  }
  return coordinate_witness(m, sources, sinks, eps, l_eps, producer);
}

bool is_identity(const Matrix &a) { return a == Matrix::identity(a.field(), a.rows()); }

bool companion_shape(const Matrix &a) {
  const std::size_t n = a.rows();
  if (a.cols() != n)
    return false;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto &[j, v] : a.row(i))
      if (j + 1 != n && !(i == j + 1 && v == 1))
        return false;
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (a.at(j + 1, j) != 1)
      return false;
  return true;
}

} // namespace

std::size_t preprojective_step(const Scalar &eps) {
  check_eps(eps);
  return ceil_q(Scalar(1) / (2 * eps)).get_ui() + 1;
}

Scalar preprojective_bound(const Scalar &eps) {
  check_eps(eps);
  return Scalar(1) / eps + 3;
}

Scalar tree_bound(std::size_t d, const Scalar &eps) {
  check_eps(eps);
  return Scalar(ceil_q(Scalar(2 * static_cast<long>(d + 1)) / eps));
}

Witness whole_module_witness(const KroneckerModule &m, const Scalar &eps, const Scalar &l_eps,
                             const std::string &producer) {
  return coordinate_witness(m, all_indices(m.dim1), all_indices(m.dim2), eps, l_eps, producer);
}

Witness coordinate_witness(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                           const std::vector<std::size_t> &sinks, const Scalar &eps, const Scalar &l_eps,
                           const std::string &producer) {
  Witness w = base_witness(m, eps, l_eps, producer);
  w.sub = restrict_to(m, sources, sinks);
  // the whole module counts as one part even when Gamma is disconnected
  if (sources.size() == m.dim1 && sinks.size() == m.dim2 && Scalar(dim_q(m.dim())) <= l_eps) {
    w.parts.push_back({w.sub.module, Matrix::identity(m.field, m.dim1), Matrix::identity(m.field, m.dim2)});
  } else {
    for (auto &c : split_components(w.sub.module)) {
      Matrix e1(m.field, c.sources.size(), w.sub.module.dim1), e2(m.field, c.sinks.size(), w.sub.module.dim2);
      for (std::size_t j = 0; j < c.sources.size(); ++j)
        e1.set(j, c.sources[j], 1);
      for (std::size_t j = 0; j < c.sinks.size(); ++j)
        e2.set(j, c.sinks[j], 1);
      w.parts.push_back({std::move(c.module), std::move(e1), std::move(e2)});
    }
  }
  w.coordinate = true;
  w.kept_sources = sources;
  w.kept_sinks = sinks;
  w.stats.removed = m.dim() - sources.size() - sinks.size();
  return w;
}

Witness witness_drop_pattern(const KroneckerModule &m, const Scalar &eps, const std::string &producer) {
  const std::size_t step = preprojective_step(eps);
  const Scalar bound = preprojective_bound(eps);
  if (dim_q(m.dim()) <= bound)
    return whole_module_witness(m, eps, bound, producer);
  // dropping the last source also loses the last sink; shift the grid until the budget holds
  const Scalar budget = eps * dim_q(m.dim());
  for (std::size_t offset = 0; offset < step; ++offset) {
    std::vector<std::size_t> gens;
    for (std::size_t i = 0; i < m.dim1; ++i)
      if ((i + 1 + offset) % step != 0)
        gens.push_back(i);
    const Submodule u = submodule_from_generators(m, gens);
    auto sources = coordinate_rows(u.emb1), sinks = coordinate_rows(u.emb2);
    if (!(dim_q(m.dim() - sources->size() - sinks->size()) <= budget))
      continue;
    Witness w = coordinate_witness(m, *sources, *sinks, eps, bound, producer);
    w.stats.splits = m.dim1 - gens.size();
    return w;
  }
  fail(ErrorKind::Internal, "no drop pattern meets the removal budget");
}

Witness witness_preprojective_2k(std::size_t n, const Scalar &eps, const Field &field) {
  check_eps(eps);
  return witness_drop_pattern(build_P(n, field), eps, "preprojective");
}

Submodule regular_string_submodule(const KroneckerModule &r) {
  require(r.d == 2 && r.dim1 == r.dim2 && r.dim1 > 0, ErrorKind::Validation,
          "regular witness needs a square pencil on two arrows");
  const bool shape = (is_identity(r.maps[0]) && companion_shape(r.maps[1])) ||
                     (is_identity(r.maps[1]) && companion_shape(r.maps[0]));
  require(shape, ErrorKind::Validation, "module is not a regular block in companion shape");
  const std::size_t n = r.dim1;
  std::vector<std::size_t> sources(n - 1);
  std::iota(sources.begin(), sources.end(), 0);
  return restrict_to(r, sources, all_indices(n));
}

Witness witness_regular_2k(const KroneckerModule &r, const Scalar &eps) {
  check_eps(eps);
  const Submodule y = regular_string_submodule(r);
  const Scalar bound = 2 / eps + 3;
  if (dim_q(r.dim()) <= bound)
    return whole_module_witness(r, eps, bound, "regular");
  const Scalar half = eps / 2;
  Witness wy = witness_drop_pattern(y.module, half, "regular");
  Witness w = combinator_bounded_codim(r, y, 1, wy, eps);
  w.producer = "regular";
  return w;
}

PostinjectiveKernel postinjective_kernel(std::size_t n, const Field &field) {
  const KroneckerModule qn = build_Q(n, field);
  PostinjectiveKernel out;
  // projection onto the first source coordinate, a map to Q_0
  const KroneckerModule target = build_Q(0, field);
  out.theta = {Matrix(field, 1, qn.dim1), Matrix(field, 0, qn.dim2)};
  out.theta.f.set(0, 0, 1);
  require(is_homomorphism(out.theta, qn, target), ErrorKind::Internal, "no nonzero map to an injective found");
  out.target_index = 0;
  out.kernel = kernel_module(out.theta, qn);
  if (qn.dim() <= kKernelDecomposeLimit) {
    require(!hom_space(qn, target).empty(), ErrorKind::Internal, "no nonzero map to an injective found");
    out.blocks = decompose_pencil(out.kernel.module);
    out.decomposed = true;
    for (const auto &b : out.blocks)
      require(b.kind != PencilBlock::Kind::Postinjective, ErrorKind::Internal,
              "kernel has a postinjective summand");
  }
  return out;
}

Witness witness_postinjective_2k(std::size_t n, const Scalar &eps, const Field &field) {
  check_eps(eps);
  const KroneckerModule qn = build_Q(n, field);
  const Scalar bound = std::max<Scalar>(Scalar(4) / eps + 3, Scalar(6) / eps);
  if (dim_q(qn.dim()) <= bound)
    return whole_module_witness(qn, eps, bound, "postinjective");
  const PostinjectiveKernel k = postinjective_kernel(n, field);
  Witness wy = witness_regular_2k(k.kernel.module, eps / 2);
  Witness w = combinator_bounded_codim(qn, k.kernel, 3, wy, eps);
  w.producer = "postinjective";
  w.l_eps = bound;
  return w;
}

Witness fragment_tree_module(const KroneckerModule &m, const Scalar &eps) {
  check_eps(eps);
  const CoefficientQuiver g = build_gamma(m);
  require(m.dim() == 0 || is_tree(g), ErrorKind::Precondition, "coefficient quiver is not a tree");
  require(degree_stats(g).first <= m.d, ErrorKind::Precondition, "indegree exceeds the number of arrows");
  const Scalar bound = tree_bound(m.d, eps);
  if (dim_q(m.dim()) <= bound)
    return whole_module_witness(m, eps, bound, "tree");
  const auto adj = g.adjacency();
  std::vector<bool> alive(g.vertex_count(), true);
  std::size_t splits = 0;
  std::vector<std::size_t> level_max;
  for (;;) {
    bool split = false;
    std::size_t largest = 0;
    for (const auto &comp : components(adj, alive)) {
      largest = std::max(largest, comp.size());
      if (dim_q(comp.size()) <= bound)
        continue;
      const std::size_t c = centroid_in(adj, alive, comp);
      alive[c] = false;
      if (!g.is_source(c))
        for (std::size_t u : adj[c])
          alive[u] = false;
      ++splits;
      split = true;
    }
    level_max.push_back(largest);
    if (!split)
      break;
  }
  Witness w = from_alive(m, alive, eps, bound, "tree");
  w.stats.splits = splits;
  w.stats.level_max = std::move(level_max);
  return w;
}

std::size_t staged_bound(std::size_t d, const Scalar &eps, const Scalar &delta) {
  check_eps(eps);
  require(delta > 0 && delta < Scalar(1, 4), ErrorKind::Domain, "delta must lie strictly between 0 and 1/4");
  const double alpha = 0.5 + delta.get_d();
  const double beta = std::sqrt(alpha);
  const double a = 2.0 + t_bound_constant(d) * static_cast<double>(d - 2);
  const double root = a / (alpha * eps.get_d() * (1.0 - beta));
  return static_cast<std::size_t>(std::ceil(root * root));
}

Witness fragment_postinjective_theta(std::size_t d, std::size_t t, const Scalar &eps, const Field &field,
                                     const StagedOptions &opts) {
  check_eps(eps);
  require(d >= 3, ErrorKind::Domain, "staged fragmentation needs d >= 3");
  require(t >= 1, ErrorKind::Domain, "staged fragmentation needs t >= 1");
  require(opts.delta > 0 && opts.delta < Scalar(1, 4), ErrorKind::Domain,
          "delta must lie strictly between 0 and 1/4");
  const std::size_t bound = opts.l_override ? *opts.l_override : staged_bound(d, eps, opts.delta);
  require(bound >= 3, ErrorKind::Domain, "part bound must be at least 3");
  const KroneckerModule m = build_postinjective_theta(d, t, field);
  const Scalar alpha = Scalar(1, 2) + opts.delta;
  const Scalar n = dim_q(m.dim());
  const Scalar l = dim_q(bound);
  std::size_t stages = 0;
  for (Scalar s = n; s > l; s *= alpha)
    ++stages;
  // stopping rule: alpha^k n <= L, and the last stage must still see modules of dim > 2
  Scalar last = n;
  for (std::size_t i = 1; i < stages; ++i)
    last *= alpha;
  if (stages == 0 || !(last > 2)) {
    Witness w = whole_module_witness(m, eps, l, "postinjective-theta");
    w.stats.below_threshold = true;
    w.stats.threshold = l;
    return w;
  }
  const CoefficientQuiver g = build_gamma(m);
  const auto adj = g.adjacency();
  const auto indeg = in_degrees(g);
  std::vector<bool> alive(g.vertex_count(), true), removed_sink(g.vertex_count(), false);
  Witness w;
  Scalar limit = n;
  for (std::size_t i = 1; i <= stages; ++i) {
    limit *= alpha;
    for (;;) {
      bool cut = false;
      for (const auto &comp : components(adj, alive)) {
        if (dim_q(comp.size()) <= limit)
          continue;
        // sink leaving the smallest largest piece; ties to larger indegree
        const auto pieces = largest_pieces(adj, alive, comp);
        std::size_t best = comp.size();
        for (std::size_t j = 0; j < comp.size(); ++j) {
          if (g.is_source(comp[j]))
            continue;
          if (best == comp.size() || pieces[j] < pieces[best] ||
              (pieces[j] == pieces[best] && indeg[comp[j]] > indeg[comp[best]]))
            best = j;
        }
        if (best == comp.size())
          continue;
        alive[comp[best]] = false;
        removed_sink[comp[best]] = true;
        ++w.stats.splits;
        cut = true;
      }
      if (!cut)
        break;
    }
    std::vector<DimVector> dims;
    std::size_t largest = 0;
    for (const auto &comp : components(adj, alive)) {
      DimVector dv;
      for (std::size_t v : comp)
        (g.is_source(v) ? dv.d1 : dv.d2)++;
      dims.push_back(dv);
      largest = std::max(largest, comp.size());
    }
    w.stats.stage_dims.push_back(std::move(dims));
    w.stats.level_max.push_back(largest);
  }
  // downstream pass: a source next to a deleted sink cannot stay in a submodule
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (removed_sink[v])
      for (std::size_t u : adj[v])
        alive[u] = false;
  Witness out = from_alive(m, alive, eps, l, "postinjective-theta");
  out.stats.splits = w.stats.splits;
  out.stats.stage_dims = std::move(w.stats.stage_dims);
  out.stats.level_max = std::move(w.stats.level_max);
  out.stats.threshold = l;
  return out;
}

bool stage_components_postinjective(std::size_t d, const FragmentStats &stats) {
  std::size_t top = 0;
  for (const auto &stage : stats.stage_dims)
    for (const auto &dv : stage)
      top = std::max(top, dv.d1 + dv.d2);
  // Q[s] has dimension vector (a_{s+1}, a_s)
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  const SequenceA seq = a_sequence(d, 64);
  for (std::size_t s = 0; s + 1 < seq.values.size(); ++s) {
    if (seq.values[s] > mpz_class(static_cast<unsigned long>(top)))
      break;
    dims.emplace_back(seq.values[s + 1].get_ui(), seq.values[s].get_ui());
  }
  for (const auto &stage : stats.stage_dims)
    for (const auto &dv : stage)
      if (std::find(dims.begin(), dims.end(), std::make_pair(dv.d1, dv.d2)) == dims.end())
        return false;
  return true;
}

Witness combinator_direct_sum(const std::vector<Witness> &ws) {
  require(!ws.empty(), ErrorKind::Validation, "direct sum of no witnesses needs d, field and epsilon");
  return combinator_direct_sum(ws, ws.front().d, ws.front().field, ws.front().epsilon);
}

Witness combinator_direct_sum(const std::vector<Witness> &ws, std::size_t d, const Field &field,
                              const Scalar &eps) {
  check_eps(eps);
  Witness out;
  out.epsilon = eps;
  out.l_eps = ws.empty() ? Scalar(1) : Scalar(0);
  out.d = d;
  out.field = field;
  out.producer = "direct-sum";
  std::vector<KroneckerModule> ns;
  std::vector<Matrix> e1s, e2s;
  for (const auto &w : ws) {
    require(w.epsilon == eps, ErrorKind::Validation, "direct sum of witnesses with different epsilon");
    require(w.d == d && w.field == field, ErrorKind::Validation, "direct sum of witnesses over different quivers");
    out.l_eps = std::max(out.l_eps, w.l_eps);
    out.m_dims.d1 += w.m_dims.d1;
    out.m_dims.d2 += w.m_dims.d2;
    ns.push_back(w.sub.module);
    e1s.push_back(w.sub.emb1);
    e2s.push_back(w.sub.emb2);
    out.stats.removed += w.stats.removed;
    out.stats.splits += w.stats.splits;
  }
  out.sub.module = direct_sum(ns, d, field);
  out.sub.emb1 = block_diagonal(field, e1s);
  out.sub.emb2 = block_diagonal(field, e2s);
  if (ws.empty()) {
    out.sub.emb1 = Matrix(field, 0, 0);
    out.sub.emb2 = Matrix(field, 0, 0);
  }
  std::size_t o1 = 0, o2 = 0;
  for (const auto &w : ws) {
    for (const auto &p : w.parts)
      out.parts.push_back({p.module, shift_cols(p.basis1, out.sub.module.dim1, o1),
                           shift_cols(p.basis2, out.sub.module.dim2, o2)});
    o1 += w.sub.module.dim1;
    o2 += w.sub.module.dim2;
  }
  fill_coordinates(out);
  return out;
}

CodimGuard bounded_codim_guard(std::size_t dim_m, std::size_t codim_bound, const Scalar &eps_prime,
                               const Scalar &eps) {
  CodimGuard g;
  const Scalar m = dim_q(dim_m), l = dim_q(codim_bound);
  g.lower = dim_m >= codim_bound ? (1 - eps_prime) * (m - l) : Scalar(0);
  g.required = (1 - eps) * m;
  if (!(m >= 2 * l / eps)) {
    g.detail = "dim M = " + m.get_str() + " is below 2L/eps = " + Scalar(2 * l / eps).get_str();
  } else if (!(eps_prime <= eps / 2)) {
    g.detail = "inner epsilon " + eps_prime.get_str() + " exceeds eps/2 = " + Scalar(eps / 2).get_str();
  } else if (!(g.lower >= g.required)) {
    g.detail = "bound " + g.lower.get_str() + " is below " + g.required.get_str();
  } else {
    g.ok = true;
  }
  return g;
}

Witness combinator_bounded_codim(const KroneckerModule &m, const Submodule &p, std::size_t codim_bound,
                                 const Witness &w, const Scalar &eps) {
  check_eps(eps);
  require(p.emb1.rows() == m.dim1 && p.emb2.rows() == m.dim2 && p.emb1.cols() == p.module.dim1 &&
              p.emb2.cols() == p.module.dim2,
          ErrorKind::Shape, "submodule embedding does not fit the module");
  require(w.m_dims.d1 == p.module.dim1 && w.m_dims.d2 == p.module.dim2, ErrorKind::Shape,
          "witness is not for the given submodule");
  const std::size_t codim = m.dim() - p.module.dim();
  if (codim > codim_bound)
    fail(ErrorKind::Guard, "codimension " + std::to_string(codim) + " exceeds the bound " +
                               std::to_string(codim_bound));
  const CodimGuard g = bounded_codim_guard(m.dim(), codim_bound, w.epsilon, eps);
  if (!g.ok)
    fail(ErrorKind::Guard, "bounded codimension refused: " + g.detail);
  Witness out = w;
  out.epsilon = eps;
  out.m_dims = dim_vector(m);
  out.sub.emb1 = p.emb1 * w.sub.emb1;
  out.sub.emb2 = p.emb2 * w.sub.emb2;
  out.stats.removed = w.stats.removed + codim;
  if (!(dim_q(out.sub.module.dim()) >= (1 - eps) * dim_q(m.dim())))
    fail(ErrorKind::Guard, "bounded codimension refused: submodule too small");
  fill_coordinates(out);
  return out;
}

Witness witness_for_module(const KroneckerModule &m, const Scalar &eps) {
  check_eps(eps);
  if (m.d == 2) {
    if (m.dim2 == m.dim1 + 1 && m.maps == build_P(m.dim1, m.field).maps)
      return witness_preprojective_2k(m.dim1, eps, m.field);
    if (m.dim1 == m.dim2 + 1 && m.maps == build_Q(m.dim2, m.field).maps)
      return witness_postinjective_2k(m.dim2, eps, m.field);
    if (m.dim1 == m.dim2 && m.dim1 > 0) {
      bool companion = true;
      try {
        regular_string_submodule(m);
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::Validation)
          throw;
        companion = false;
      }
      if (companion)
        return witness_regular_2k(m, eps);
    }
  }
  if (m.d >= 3 && m.dim1 > m.dim2) {
    // the postinjective tree module, recognized by its dimension vector
    const SequenceA a = a_sequence(m.d, 64);
    for (std::size_t t = 1; t + 1 < a.values.size() && a.values[t] <= m.dim2; ++t)
      if (a.values[t] == m.dim2 && a.values[t + 1] == m.dim1 &&
          build_postinjective_theta(m.d, t, m.field).maps == m.maps)
        return fragment_postinjective_theta(m.d, t, eps, m.field);
  }
  if (is_tree(build_gamma(m)))
    return fragment_tree_module(m, eps);
  fail(ErrorKind::Precondition, "no witness producer for this module shape");
}

WeakWitness weaken(const Witness &w) {
  WeakWitness out;
  out.epsilon = w.epsilon;
  out.l_eps = w.l_eps;
  out.m_dims = w.m_dims;
  out.source = w.sub.module;
  out.theta = {w.sub.emb1, w.sub.emb2};
  out.parts = w.parts;
  out.ker_dim = 0;
  out.coker_dim = dim_of(w.m_dims) - w.sub.module.dim();
  return out;
}

namespace {

WitnessReport failed(WitnessReport r, int clause, std::string detail) {
  r.pass = false;
  r.clause = clause;
  r.detail = std::move(detail);
  return r;
}

// Clause (i) for the parts: each is a submodule of n and together they span it.
std::string check_parts(const KroneckerModule &n, const std::vector<WitnessPart> &parts) {
  std::size_t s1 = 0, s2 = 0;
  // N.maps[a] * basis1^T == basis2^T * part.maps[a], checked transposed
  std::vector<Matrix> maps_t;
  for (const auto &a : n.maps)
    maps_t.push_back(a.transpose());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto &p = parts[k];
    const std::string tag = "part " + std::to_string(k + 1);
    if (p.module.d != n.d || !(p.module.field == n.field))
      return tag + " lives over a different quiver";
    if (p.basis1.cols() != n.dim1 || p.basis2.cols() != n.dim2 || p.basis1.rows() != p.module.dim1 ||
        p.basis2.rows() != p.module.dim2)
      return tag + " embedding has the wrong shape";
    for (std::size_t a = 0; a < n.d; ++a)
      if (!(p.basis1 * maps_t[a] == p.module.maps[a].transpose() * p.basis2))
        return tag + " embedding does not intertwine arrow " + std::to_string(a + 1);
    s1 += p.module.dim1;
    s2 += p.module.dim2;
  }
  if (s1 != n.dim1 || s2 != n.dim2)
    return "part dimensions do not add up to the submodule";
  // coordinate parts span iff they hit every basis vector of N once
  auto covers = [&](auto basis, std::size_t dim) {
    std::vector<char> hit(dim, 0);
    for (const auto &p : parts) {
      const Matrix &b = basis(p);
      for (std::size_t i = 0; i < b.rows(); ++i) {
        const auto &row = b.row(i);
        if (row.size() != 1 || row[0].second != 1 || hit[row[0].first])
          return false;
        hit[row[0].first] = 1;
      }
    }
    return true;
  };
  if (covers([](const WitnessPart &p) -> const Matrix & { return p.basis1; }, n.dim1) &&
      covers([](const WitnessPart &p) -> const Matrix & { return p.basis2; }, n.dim2))
    return {};
  std::vector<Matrix> b1s, b2s;
  for (const auto &p : parts) {
    b1s.push_back(p.basis1);
    b2s.push_back(p.basis2);
  }
  if (rank(vconcat(n.field, n.dim1, b1s)) != n.dim1 || rank(vconcat(n.field, n.dim2, b2s)) != n.dim2)
    return "parts do not span the submodule";
  return {};
}

} // namespace

WitnessReport verify_witness(const KroneckerModule &m, const Witness &w) {
  WitnessReport r;
  const KroneckerModule &n = w.sub.module;
  r.dim_m = m.dim();
  r.dim_n = n.dim();
  for (const auto &p : w.parts)
    r.max_part = std::max(r.max_part, p.module.dim());
  r.removed_fraction = m.dim() == 0 ? Scalar(0) : Scalar(dim_q(m.dim() - std::min(m.dim(), n.dim())) / dim_q(m.dim()));

  if (n.d != m.d || !(n.field == m.field))
    return failed(r, 1, "submodule lives over a different quiver");
  if (w.sub.emb1.rows() != m.dim1 || w.sub.emb2.rows() != m.dim2 || w.sub.emb1.cols() != n.dim1 ||
      w.sub.emb2.cols() != n.dim2)
    return failed(r, 1, "embedding has the wrong shape");
  if (!has_full_column_rank(w.sub.emb1) || !has_full_column_rank(w.sub.emb2))
    return failed(r, 1, "embedding is not injective");
  for (std::size_t a = 0; a < m.d; ++a)
    if (!(m.maps[a] * w.sub.emb1 == w.sub.emb2 * n.maps[a]))
      return failed(r, 1, "embedding does not intertwine arrow " + std::to_string(a + 1));
  if (auto why = check_parts(n, w.parts); !why.empty())
    return failed(r, 1, why);

  for (std::size_t k = 0; k < w.parts.size(); ++k)
    if (!(dim_q(w.parts[k].module.dim()) <= w.l_eps))
      return failed(r, 2, "part " + std::to_string(k + 1) + " has dimension " +
                              std::to_string(w.parts[k].module.dim()) + " > " + w.l_eps.get_str());

  if (!(w.epsilon > 0 && w.epsilon < 1))
    return failed(r, 3, "epsilon out of range");
  if (!(dim_q(n.dim()) >= (1 - w.epsilon) * dim_q(m.dim())))
    return failed(r, 3, "dim N = " + std::to_string(n.dim()) + " < " +
                            Scalar((1 - w.epsilon) * dim_q(m.dim())).get_str());
  r.pass = true;
  return r;
}

WitnessReport verify_weak_witness(const KroneckerModule &m, const WeakWitness &w) {
  WitnessReport r;
  const KroneckerModule &n = w.source;
  r.dim_m = m.dim();
  r.dim_n = n.dim();
  for (const auto &p : w.parts)
    r.max_part = std::max(r.max_part, p.module.dim());
  if (n.d != m.d || !(n.field == m.field))
    return failed(r, 1, "source lives over a different quiver");
  if (w.theta.f.rows() != m.dim1 || w.theta.g.rows() != m.dim2 || w.theta.f.cols() != n.dim1 ||
      w.theta.g.cols() != n.dim2)
    return failed(r, 1, "theta has the wrong shape");
  if (!is_homomorphism(w.theta, n, m))
    return failed(r, 1, "theta is not a homomorphism");
  if (auto why = check_parts(n, w.parts); !why.empty())
    return failed(r, 1, why);
  for (std::size_t k = 0; k < w.parts.size(); ++k)
    if (!(dim_q(w.parts[k].module.dim()) <= w.l_eps))
      return failed(r, 2, "part " + std::to_string(k + 1) + " exceeds the bound");
  const std::size_t rf = rank(w.theta.f), rg = rank(w.theta.g);
  const std::size_t ker = n.dim() - rf - rg, coker = m.dim() - rf - rg;
  r.removed_fraction = m.dim() == 0 ? Scalar(0) : Scalar(dim_q(coker) / dim_q(m.dim()));
  if (ker != w.ker_dim || coker != w.coker_dim)
    return failed(r, 3, "recorded kernel or cokernel dimension is wrong");
  const Scalar budget = w.epsilon * dim_q(m.dim());
  if (!(w.epsilon > 0 && w.epsilon < 1))
    return failed(r, 3, "epsilon out of range");
  if (!(dim_q(ker) <= budget) || !(dim_q(coker) <= budget))
    return failed(r, 3, "kernel or cokernel exceeds eps dim M");
  r.pass = true;
  return r;
}

nlohmann::json report_to_json(const WitnessReport &report) {
  return {{"pass", report.pass},
          {"clause", report.clause},
          {"detail", report.detail},
          {"dim_m", report.dim_m},
          {"dim_n", report.dim_n},
          {"max_part", report.max_part},
          {"removed_fraction", report.removed_fraction.get_str()}};
}

nlohmann::json witness_to_json(const Witness &w, const WitnessReport &report) {
  nlohmann::json j;
  j["producer"] = w.producer;
  j["epsilon"] = w.epsilon.get_str();
  j["l_eps"] = w.l_eps.get_str();
  j["module"] = {{"d", w.d}, {"field", w.field.tag()}, {"dims", {w.m_dims.d1, w.m_dims.d2}}};
  j["submodule_dims"] = {w.sub.module.dim1, w.sub.module.dim2};
  j["coordinate"] = w.coordinate;
  // 1-based basis indices of M spanning N
  auto one_based = [](const std::vector<std::size_t> &v) {
    std::vector<std::size_t> out;
    for (std::size_t x : v)
      out.push_back(x + 1);
    return out;
  };
  j["kept_sources"] = one_based(w.kept_sources);
  j["kept_sinks"] = one_based(w.kept_sinks);
  auto parts = nlohmann::json::array();
  for (const auto &p : w.parts)
    parts.push_back({p.module.dim1, p.module.dim2});
  j["parts"] = parts;
  nlohmann::json stats = {{"removed", w.stats.removed},
                          {"splits", w.stats.splits},
                          {"level_max", w.stats.level_max},
                          {"below_threshold", w.stats.below_threshold}};
  if (w.stats.threshold != 0)
    stats["threshold"] = w.stats.threshold.get_str();
  if (!w.stats.stage_dims.empty()) {
    auto stages = nlohmann::json::array();
    for (const auto &stage : w.stats.stage_dims) {
      auto s = nlohmann::json::array();
      for (const auto &dv : stage)
        s.push_back({dv.d1, dv.d2});
      stages.push_back(s);
    }
    stats["stage_dims"] = stages;
  }
  j["stats"] = stats;
  j["verdict"] = report_to_json(report);
  return j;
}

} // namespace kq
