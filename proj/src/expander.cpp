#include "kq/expander.hpp"

#include "kq/error.hpp"
#include "kq/quiver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

namespace kq {

namespace {

using u64 = std::uint64_t;
using Row = std::vector<u64>;

// Dense arithmetic mod a prime, for the enumeration loops.
u64 inv_mod(u64 a, u64 q) {
  u64 result = 1, base = a % q, e = q - 2;
  while (e) {
    if (e & 1)
      result = result * base % q;
    base = base * base % q;
    e >>= 1;
  }
  return result;
}

std::size_t rank_mod(std::vector<Row> rows, u64 q) {
  if (rows.empty())
    return 0;
  const std::size_t cols = rows.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0)
      ++piv;
    if (piv == rows.size())
      continue;
    std::swap(rows[r], rows[piv]);
    const u64 inv = inv_mod(rows[r][c], q);
    for (auto &x : rows[r])
      x = x * inv % q;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0)
        continue;
      const u64 f = rows[i][c];
      for (std::size_t k = c; k < cols; ++k)
        rows[i][k] = (rows[i][k] + (q - f) * rows[r][k]) % q;
    }
    ++r;
  }
  return r;
}

struct DenseMap {
  std::size_t rows = 0, cols = 0;
  std::vector<Row> data;
  Row apply(const Row &v, u64 q) const {
    Row out(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) {
      u64 s = 0;
      for (std::size_t j = 0; j < cols; ++j)
        s = (s + data[i][j] * v[j]) % q;
      out[i] = s;
    }
    return out;
  }
};

DenseMap dense(const Matrix &m) {
  DenseMap out{m.rows(), m.cols(), std::vector<Row>(m.rows(), Row(m.cols(), 0))};
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto &[j, v] : m.row(i))
      out.data[i][j] = v.get_num().get_ui();
  return out;
}

std::vector<Row> images(const std::vector<DenseMap> &maps, const std::vector<Row> &basis, u64 q) {
  std::vector<Row> out;
  for (const auto &t : maps)
    for (const auto &w : basis)
      out.push_back(t.apply(w, q));
  return out;
}

Matrix rows_to_matrix(const Field &f, std::size_t n, const std::vector<Row> &rows) {
  Matrix m(f, rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rows[i][j])
        m.set(i, j, Scalar(static_cast<unsigned long>(rows[i][j])));
  return m;
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> c(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      out.push_back(c);
      return;
    }
    for (std::size_t v = start; v + (k - pos) <= n; ++v) {
      c[pos] = v;
      rec(pos + 1, v + 1);
    }
  };
  rec(0, 0);
  return out;
}

// Calls fn(basis rows) for every subspace of F_q^n of dimension k in
// [k_lo, k_hi], in RREF order; stops when fn returns false.
bool for_each_subspace(std::size_t n, u64 q, std::size_t k_lo, std::size_t k_hi, bool reverse,
                       const std::function<bool(const std::vector<Row> &)> &fn) {
  std::vector<std::size_t> ks;
  for (std::size_t k = k_lo; k <= k_hi && k <= n; ++k)
    ks.push_back(k);
  if (reverse)
    std::reverse(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    auto combos = combinations(n, k);
    if (reverse)
      std::reverse(combos.begin(), combos.end());
    for (const auto &piv : combos) {
      std::vector<bool> is_piv(n, false);
      for (std::size_t p : piv)
        is_piv[p] = true;
      std::vector<std::pair<std::size_t, std::size_t>> free;
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = piv[r] + 1; c < n; ++c)
          if (!is_piv[c])
            free.emplace_back(r, c);
      u64 total = 1;
      for (std::size_t i = 0; i < free.size(); ++i)
        total *= q;
      for (u64 step = 0; step < total; ++step) {
        u64 x = reverse ? total - 1 - step : step;
        std::vector<Row> rows(k, Row(n, 0));
        for (std::size_t r = 0; r < k; ++r)
          rows[r][piv[r]] = 1;
        // first free position is the most significant digit
        for (std::size_t i = free.size(); i-- > 0;) {
          rows[free[i].first][free[i].second] = x % q;
          x /= q;
        }
        if (!fn(rows))
          return false;
      }
    }
  }
  return true;
}

std::size_t floor_eta(const Scalar &eta, std::size_t n) {
  const Scalar v = eta * Scalar(static_cast<unsigned long>(n));
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return out.get_ui();
}

Scalar ratio(std::size_t num, std::size_t den) {
  Scalar r(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
  r.canonicalize();
  return r;
}

bool expands(std::size_t img, std::size_t dim, const Scalar &alpha) {
  return Scalar(static_cast<unsigned long>(img)) >= (1 + alpha) * Scalar(static_cast<unsigned long>(dim));
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

void ExpanderCandidate::validate() const {
  for (const auto &t : maps)
    require(t.rows() == n && t.cols() == n && t.field() == field, ErrorKind::Shape,
            "expander maps must be n x n over the candidate field");
  require(eta > 0 && eta <= 1, ErrorKind::Domain, "eta must lie in (0, 1]");
  require(alpha > 0, ErrorKind::Domain, "alpha must be positive");
}

ExpanderCandidate candidate_from_module(const KroneckerModule &m, const Scalar &eta, const Scalar &alpha) {
  require(m.dim1 == m.dim2, ErrorKind::Shape, "expander module needs equal vertex dimensions");
  ExpanderCandidate c{m.field, m.dim1, m.maps, eta, alpha};
  c.validate();
  return c;
}

KroneckerModule induced_module(const ExpanderCandidate &c) {
  c.validate();
  return make_module(c.field, c.n, c.n, c.maps);
}

std::string verdict_name(ExpansionReport::Verdict v) {
  switch (v) {
  case ExpansionReport::Verdict::Proved:
    return "proved";
  case ExpansionReport::Verdict::Refuted:
    return "refuted";
  case ExpansionReport::Verdict::SampledPass:
    return "sampled-pass";
  }
  return "?";
}

mpz_class subspace_count(u64 q, std::size_t n, std::size_t k_max) {
  mpz_class total = 0;
  const mpz_class Q = static_cast<unsigned long>(q);
  for (std::size_t k = 1; k <= k_max && k <= n; ++k) {
    // [n k]_q = prod (q^{n-i} - 1) / (q^{i+1} - 1)
    mpz_class num = 1, den = 1;
    for (std::size_t i = 0; i < k; ++i) {
      mpz_class a, b;
      mpz_pow_ui(a.get_mpz_t(), Q.get_mpz_t(), n - i);
      mpz_pow_ui(b.get_mpz_t(), Q.get_mpz_t(), i + 1);
      num *= a - 1;
      den *= b - 1;
    }
    total += num / den;
  }
  return total;
}

std::size_t image_dim(const std::vector<Matrix> &maps, const Matrix &w) {
  require(!maps.empty(), ErrorKind::Validation, "need at least one map");
  const Matrix cols = w.transpose();
  std::vector<Matrix> imgs;
  for (const auto &t : maps)
    imgs.push_back(t * cols);
  return rank(hconcat(maps.front().field(), maps.front().rows(), imgs));
}

ExpansionReport check_exhaustive(const ExpanderCandidate &c, const ExhaustiveOptions &opts) {
  c.validate();
  require(c.field.is_prime_field(), ErrorKind::Validation, "exhaustive check needs a prime field");
  const auto start = std::chrono::steady_clock::now();
  const u64 q = c.field.order();
  const std::size_t k_max = floor_eta(c.eta, c.n);
  const mpz_class count = subspace_count(q, c.n, k_max);
  if (count > mpz_class(static_cast<unsigned long>(opts.guard)))
    fail(ErrorKind::Guard, "exhaustive check would enumerate " + count.get_str() + " subspaces (guard " +
                               std::to_string(opts.guard) + ")");
  std::vector<DenseMap> maps;
  for (const auto &t : c.maps)
    maps.push_back(dense(t));
  ExpansionReport rep;
  rep.eta = c.eta;
  rep.alpha = c.alpha;
  rep.method = "exhaustive";
  rep.verdict = ExpansionReport::Verdict::Proved;
  if (k_max > 0 && !maps.empty()) {
    for_each_subspace(c.n, q, 1, k_max, opts.reverse, [&](const std::vector<Row> &basis) {
      ++rep.subspaces_checked;
      const std::size_t img = rank_mod(images(maps, basis, q), q);
      const Scalar r = ratio(img, basis.size());
      if (!rep.worst_ratio || r < *rep.worst_ratio)
        rep.worst_ratio = r;
      if (!expands(img, basis.size(), c.alpha)) {
        rep.verdict = ExpansionReport::Verdict::Refuted;
        rep.witness = rows_to_matrix(c.field, c.n, basis);
        rep.worst_ratio = r;
        return false;
      }
      return true;
    });
  } else if (k_max > 0) {
    // no maps: every nonzero W has zero image; the first line fails
    rep.verdict = ExpansionReport::Verdict::Refuted;
    Matrix w(c.field, 1, c.n);
    w.set(0, opts.reverse ? c.n - 1 : 0, 1);
    rep.witness = w;
    rep.worst_ratio = Scalar(0);
    rep.subspaces_checked = 1;
  }
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

ExpansionReport check_sampled_rational(const ExpanderCandidate &c, std::size_t trials, long max_entry,
                                       u64 seed) {
  c.validate();
  require(trials >= 1, ErrorKind::Validation, "need at least one trial");
  require(max_entry >= 1, ErrorKind::Validation, "max_entry must be positive");
  const auto start = std::chrono::steady_clock::now();
  ExpansionReport rep;
  rep.eta = c.eta;
  rep.alpha = c.alpha;
  rep.method = "sampled";
  rep.seed = seed;
  rep.verdict = ExpansionReport::Verdict::SampledPass;
  const std::size_t k_max = floor_eta(c.eta, c.n);
  if (k_max == 0) {
    rep.verdict = ExpansionReport::Verdict::Proved; // nothing to check
    rep.runtime_ms = elapsed_ms(start);
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(-max_entry, max_entry);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t k = 1 + trial % k_max;
    Matrix w(c.field, k, c.n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < c.n; ++j)
        w.set(i, j, c.field.from_int(pick(rng)));
    ++rep.subspaces_checked;
    const std::size_t dim = rank(w);
    if (dim == 0)
      continue;
    const std::size_t img = c.maps.empty() ? 0 : image_dim(c.maps, w);
    const Scalar r = ratio(img, dim);
    if (!rep.worst_ratio || r < *rep.worst_ratio)
      rep.worst_ratio = r;
    if (!expands(img, dim, c.alpha)) {
      rep.verdict = ExpansionReport::Verdict::Refuted;
      rep.witness = w;
      rep.worst_ratio = r;
      break;
    }
  }
  rep.runtime_ms = elapsed_ms(start);
  return rep;
}

Scalar nonhf_epsilon_bound(const Scalar &alpha) {
  require(alpha > 0, ErrorKind::Domain, "alpha must be positive");
  return alpha / (2 * (1 + alpha));
}

Scalar weak_nonhf_epsilon_bound(const Scalar &alpha) {
  require(alpha > 0, ErrorKind::Domain, "alpha must be positive");
  return alpha / (6 + 4 * alpha);
}

std::string status_name(RefutationReport::Status s) {
  switch (s) {
  case RefutationReport::Status::Inconclusive:
    return "inconclusive";
  case RefutationReport::Status::NotSubmodule:
    return "not_submodule";
  case RefutationReport::Status::ExpanderCounterexample:
    return "expander_counterexample";
  case RefutationReport::Status::Contradiction:
    return "contradiction";
  }
  return "?";
}

RefutationReport refute_witness(const KroneckerModule &m, const Witness &w, const Scalar &eta,
                                const Scalar &alpha) {
  require(m.dim1 == m.dim2, ErrorKind::Shape, "expander module needs equal vertex dimensions");
  require(eta > 0 && eta <= 1, ErrorKind::Domain, "eta must lie in (0, 1]");
  RefutationReport rep;
  rep.claimed_epsilon = w.epsilon;
  rep.bound = nonhf_epsilon_bound(alpha);
  const std::size_t n = m.dim1;
  const Field &F = m.field;
  require(w.sub.emb1.rows() == m.dim1 && w.sub.emb2.rows() == m.dim2, ErrorKind::Shape,
          "witness does not embed into this module");

  std::vector<Matrix> p1s, p2s;
  for (std::size_t j = 0; j < w.parts.size(); ++j) {
    const auto &part = w.parts[j];
    const Matrix p1 = w.sub.emb1 * part.basis1.transpose(), p2 = w.sub.emb2 * part.basis2.transpose();
    // closure: every T_i(P_j(1)) inside P_j(2)
    std::vector<Matrix> blocks{p2};
    for (const auto &t : m.maps)
      blocks.push_back(t * p1);
    if (rank(hconcat(F, n, blocks)) != rank(p2)) {
      rep.status = RefutationReport::Status::NotSubmodule;
      rep.part = j;
      rep.detail = "part " + std::to_string(j + 1) + " is not closed under the arrows";
      return rep;
    }
    p1s.push_back(p1);
    p2s.push_back(p2);
  }
  const std::size_t s1 = p1s.empty() ? 0 : rank(hconcat(F, n, p1s));
  const std::size_t s2 = p2s.empty() ? 0 : rank(hconcat(F, n, p2s));
  for (const auto &p : p1s)
    rep.source_total += p.cols();
  for (const auto &p : p2s)
    rep.sink_total += p.cols();
  if (s1 != rep.source_total || s2 != rep.sink_total) {
    rep.status = RefutationReport::Status::NotSubmodule;
    rep.detail = "parts are not independent";
    return rep;
  }
  if (!(w.epsilon < rep.bound)) {
    rep.detail = "claimed epsilon " + w.epsilon.get_str() + " is not below " + rep.bound.get_str();
    return rep;
  }
  const Scalar cap = eta * Scalar(static_cast<unsigned long>(n));
  for (std::size_t j = 0; j < p1s.size(); ++j)
    if (!(Scalar(static_cast<unsigned long>(p1s[j].cols())) <= cap)) {
      rep.part = j;
      rep.detail = "part " + std::to_string(j + 1) + " has a source space above eta dim V";
      return rep;
    }
  for (std::size_t j = 0; j < p1s.size(); ++j) {
    const std::size_t k = p1s[j].cols();
    if (k == 0)
      continue;
    const std::size_t img = image_dim(m.maps, p1s[j].transpose());
    if (!expands(img, k, alpha)) {
      rep.status = RefutationReport::Status::ExpanderCounterexample;
      rep.part = j;
      rep.counterexample = p1s[j];
      rep.detail = "part " + std::to_string(j + 1) + " source space of dim " + std::to_string(k) +
                   " maps onto dim " + std::to_string(img);
      return rep;
    }
  }
  // every part expands, so s1 + s2 <= n + n/(1+alpha) < 2(1-eps) n
  const Scalar have = Scalar(static_cast<unsigned long>(s1 + s2));
  const Scalar need = 2 * (1 - w.epsilon) * Scalar(static_cast<unsigned long>(n));
  require(have < need, ErrorKind::Internal, "expanding parts meet the claimed bound");
  rep.status = RefutationReport::Status::Contradiction;
  rep.detail = "parts cover " + have.get_str() + " < " + need.get_str() + " = 2(1-eps) dim V";
  return rep;
}

namespace {

struct Search {
  std::uint64_t budget = 0;
  std::uint64_t nodes = 0;
  bool partial = false;
  bool tick() {
    if (++nodes > budget) {
      partial = true;
      return false;
    }
    return true;
  }
};

// Most sources keepable with every sink kept and Gamma components <= l.
std::size_t monomial_best(const KroneckerModule &m, std::size_t l, Search &s) {
  const CoefficientQuiver g = build_gamma(m);
  const auto adj = g.adjacency();
  std::vector<bool> alive(g.vertex_count(), false);
  for (std::size_t v = m.dim1; v < g.vertex_count(); ++v)
    alive[v] = true;
  auto feasible = [&] {
    for (const auto &c : components(adj, alive))
      if (c.size() > l)
        return false;
    return true;
  };
  std::size_t best = 0;
  // greedy start
  for (std::size_t i = 0; i < m.dim1; ++i) {
    alive[i] = true;
    if (feasible())
      ++best;
    else
      alive[i] = false;
  }
  std::fill(alive.begin(), alive.begin() + static_cast<long>(m.dim1), false);
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t i, std::size_t kept) {
    if (s.partial || !s.tick())
      return;
    if (kept + (m.dim1 - i) <= best)
      return;
    if (i == m.dim1) {
      best = kept;
      return;
    }
    alive[i] = true;
    if (feasible())
      dfs(i + 1, kept + 1);
    alive[i] = false;
    dfs(i + 1, kept);
  };
  dfs(0, 0);
  return best;
}

struct SmallPart {
  std::vector<Row> sources;
  std::vector<Row> sinks;
};

// Largest total source dimension of independent parts (U, sum T_i U) with
// independent sink spaces and dim U + dim sum T_i U <= l.
std::size_t packing_best(const KroneckerModule &m, std::size_t l, std::size_t start, Search &s) {
  const u64 q = m.field.order();
  std::vector<DenseMap> maps;
  for (const auto &t : m.maps)
    maps.push_back(dense(t));
  std::vector<SmallPart> parts;
  for_each_subspace(m.dim1, q, 1, std::min(l, m.dim1), false, [&](const std::vector<Row> &u) {
    if (!s.tick())
      return false;
    std::vector<Row> img = images(maps, u, q);
    std::vector<Row> basis;
    for (const auto &v : img) {
      basis.push_back(v);
      if (rank_mod(basis, q) < basis.size())
        basis.pop_back();
    }
    if (u.size() + basis.size() <= l)
      parts.push_back({u, basis});
    return true;
  });
  if (s.partial)
    return start;
  std::stable_sort(parts.begin(), parts.end(),
                   [](const SmallPart &a, const SmallPart &b) { return a.sources.size() > b.sources.size(); });
  std::size_t best = start;
  std::vector<Row> src, snk;
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t from, std::size_t total) {
    if (s.partial || !s.tick())
      return;
    best = std::max(best, total);
    if (best == m.dim1)
      return;
    for (std::size_t j = from; j < parts.size(); ++j) {
      const auto &p = parts[j];
      if (total + p.sources.size() > m.dim1)
        continue;
      const std::size_t rs = src.size(), rk = snk.size();
      src.insert(src.end(), p.sources.begin(), p.sources.end());
      snk.insert(snk.end(), p.sinks.begin(), p.sinks.end());
      if (rank_mod(src, q) == src.size() && rank_mod(snk, q) == snk.size())
        dfs(j + 1, total + p.sources.size());
      src.resize(rs);
      snk.resize(rk);
      if (s.partial || best == m.dim1)
        return;
    }
  };
  dfs(0, 0);
  return best;
}

} // namespace

BestEpsilon empirical_best_epsilon(const KroneckerModule &m, std::size_t l_eps, u64 budget) {
  require(l_eps >= 1, ErrorKind::Domain, "part bound must be positive");
  BestEpsilon out;
  if (m.dim() == 0) {
    out.epsilon = 0;
    out.method = "trivial";
    return out;
  }
  Search s{budget};
  std::size_t best = monomial_best(m, l_eps, s);
  out.method = "monomial";
  if (m.field.is_prime_field() && m.dim() <= kBestEpsilonExactDim && !s.partial) {
    best = std::max(best, packing_best(m, l_eps, best, s));
    out.method = "subspace";
  }
  out.partial = s.partial;
  out.nodes = s.nodes;
  out.epsilon = ratio(m.dim1 - best, m.dim());
  return out;
}

nlohmann::json expansion_to_json(const ExpansionReport &r) {
  nlohmann::json j;
  j["verdict"] = verdict_name(r.verdict);
  j["eta"] = r.eta.get_str();
  j["alpha"] = r.alpha.get_str();
  j["worst_ratio"] = r.worst_ratio ? nlohmann::json(r.worst_ratio->get_str()) : nlohmann::json(nullptr);
  j["witness"] = r.witness ? nlohmann::json(to_text(*r.witness)) : nlohmann::json(nullptr);
  j["subspaces_checked"] = r.subspaces_checked;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

nlohmann::json refutation_to_json(const RefutationReport &r) {
  nlohmann::json j;
  j["status"] = status_name(r.status);
  j["detail"] = r.detail;
  j["part"] = r.part ? nlohmann::json(*r.part + 1) : nlohmann::json(nullptr);
  j["counterexample"] = r.counterexample ? nlohmann::json(to_text(*r.counterexample)) : nlohmann::json(nullptr);
  j["source_total"] = r.source_total;
  j["sink_total"] = r.sink_total;
  j["claimed_epsilon"] = r.claimed_epsilon.get_str();
  j["bound"] = r.bound.get_str();
  return j;
}

} // namespace kq
