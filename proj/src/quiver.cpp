#include "kq/quiver.hpp"
#include "kq/error.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

namespace kq {

BasisChoice standard_basis(const KroneckerModule &m) {
  return {Matrix::identity(m.field, m.dim1), Matrix::identity(m.field, m.dim2), true};
}

std::vector<std::vector<std::size_t>> CoefficientQuiver::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(vertex_count());
  for (const auto &e : edges) {
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  return adj;
}

namespace {

KroneckerModule in_basis(const KroneckerModule &m, const BasisChoice &b) {
  if (b.standard)
    return m;
  require(b.basis1.rows() == m.dim1 && b.basis1.cols() == m.dim1 && b.basis2.rows() == m.dim2 &&
              b.basis2.cols() == m.dim2,
          ErrorKind::Validation, "basis has the wrong shape");
  require(rank(b.basis1) == m.dim1 && rank(b.basis2) == m.dim2, ErrorKind::Validation,
          "basis vectors are not independent");
  // matrix of M(a) in the new bases: B2^{-1} M(a) B1
  return change_basis(m, inverse(b.basis1), inverse(b.basis2));
}

} // namespace

CoefficientQuiver build_gamma(const KroneckerModule &m, const BasisChoice &basis) {
  const KroneckerModule mb = in_basis(m, basis);
  CoefficientQuiver g;
  g.n1 = mb.dim1;
  g.n2 = mb.dim2;
  for (std::size_t a = 0; a < mb.d; ++a)
    for (std::size_t w = 0; w < mb.dim2; ++w)
      for (const auto &[k, v] : mb.maps[a].row(w))
        g.edges.push_back({k, g.n1 + w, a, v});
  std::sort(g.edges.begin(), g.edges.end(), [](const QuiverEdge &x, const QuiverEdge &y) {
    return std::tie(x.source, x.target, x.arrow) < std::tie(y.source, y.target, y.arrow);
  });
  return g;
}

CoefficientQuiver build_gamma(const KroneckerModule &m) { return build_gamma(m, standard_basis(m)); }

bool is_tree(const CoefficientQuiver &g) {
  const std::size_t n = g.vertex_count();
  if (n == 0 || g.edges.size() != n - 1)
    return false;
  std::vector<bool> alive(n, true);
  return components(g.adjacency(), alive).size() == 1;
}

std::vector<std::size_t> in_degrees(const CoefficientQuiver &g) {
  std::vector<std::size_t> deg(g.vertex_count(), 0);
  for (const auto &e : g.edges)
    ++deg[e.target];
  return deg;
}

std::vector<std::size_t> out_degrees(const CoefficientQuiver &g) {
  std::vector<std::size_t> deg(g.vertex_count(), 0);
  for (const auto &e : g.edges)
    ++deg[e.source];
  return deg;
}

std::pair<std::size_t, std::size_t> degree_stats(const CoefficientQuiver &g) {
  const auto in = in_degrees(g), out = out_degrees(g);
  const std::size_t mi = in.empty() ? 0 : *std::max_element(in.begin(), in.end());
  const std::size_t mo = out.empty() ? 0 : *std::max_element(out.begin(), out.end());
  return {mi, mo};
}

std::vector<std::vector<std::size_t>> components(const std::vector<std::vector<std::size_t>> &adj,
                                                 const std::vector<bool> &alive) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (!alive[s] || seen[s])
      continue;
    std::vector<std::size_t> comp;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (std::size_t u : adj[v])
        if (alive[u] && !seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::size_t> largest_pieces(const std::vector<std::vector<std::size_t>> &adj,
                                        const std::vector<bool> &alive, const std::vector<std::size_t> &comp) {
  require(!comp.empty(), ErrorKind::Precondition, "centroid of an empty graph");
  // iterative DFS from the smallest vertex; subtree sizes give every piece size
  const std::size_t root = comp.front();
  std::vector<std::size_t> parent(adj.size(), static_cast<std::size_t>(-1)), order;
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  std::size_t edge_ends = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (std::size_t u : adj[v]) {
      if (!alive[u])
        continue;
      ++edge_ends;
      if (!seen[u]) {
        seen[u] = true;
        parent[u] = v;
        stack.push_back(u);
      }
    }
  }
  require(order.size() == comp.size() && edge_ends == 2 * (comp.size() - 1), ErrorKind::Precondition,
          "centroid needs a tree");
  std::vector<std::size_t> size(adj.size(), 1), largest(adj.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    if (v != root) {
      size[parent[v]] += size[v];
      largest[parent[v]] = std::max(largest[parent[v]], size[v]);
    }
  }
  std::vector<std::size_t> out;
  out.reserve(comp.size());
  for (std::size_t v : comp)
    out.push_back(std::max(largest[v], comp.size() - size[v]));
  return out;
}

std::size_t centroid_in(const std::vector<std::vector<std::size_t>> &adj, const std::vector<bool> &alive,
                        const std::vector<std::size_t> &comp) {
  const auto pieces = largest_pieces(adj, alive, comp);
  std::size_t best = 0;
  for (std::size_t i = 1; i < comp.size(); ++i)
    if (pieces[i] < pieces[best])
      best = i;
  return comp[best];
}

std::size_t centroid(const CoefficientQuiver &g) {
  require(is_tree(g), ErrorKind::Precondition, "centroid needs a tree");
  std::vector<bool> alive(g.vertex_count(), true);
  std::vector<std::size_t> all(g.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  return centroid_in(g.adjacency(), alive, all);
}

KroneckerModule restricted_module(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                                  const std::vector<std::size_t> &sinks) {
  std::vector<Matrix> maps;
  for (const auto &a : m.maps)
    maps.push_back(a.select(sinks, sources));
  return make_module(m.field, sources.size(), sinks.size(), std::move(maps));
}

Submodule restrict_to(const KroneckerModule &m, const std::vector<std::size_t> &sources,
                      const std::vector<std::size_t> &sinks) {
  Matrix e1(m.field, m.dim1, sources.size()), e2(m.field, m.dim2, sinks.size());
  for (std::size_t j = 0; j < sources.size(); ++j)
    e1.set(sources[j], j, 1);
  for (std::size_t j = 0; j < sinks.size(); ++j)
    e2.set(sinks[j], j, 1);
  return {restricted_module(m, sources, sinks), e1, e2};
}

Submodule submodule_from_generators(const KroneckerModule &m, const std::vector<std::size_t> &generators) {
  std::vector<bool> src(m.dim1, false), snk(m.dim2, false);
  for (std::size_t v : generators) {
    require(v < m.dim(), ErrorKind::Validation, "generator index out of range");
    if (v < m.dim1)
      src[v] = true;
    else
      snk[v - m.dim1] = true;
  }
  for (const auto &a : m.maps)
    for (std::size_t w = 0; w < m.dim2; ++w)
      for (const auto &[k, v] : a.row(w))
        if (src[k])
          snk[w] = true;
  std::vector<std::size_t> sources, sinks;
  for (std::size_t i = 0; i < m.dim1; ++i)
    if (src[i])
      sources.push_back(i);
  for (std::size_t j = 0; j < m.dim2; ++j)
    if (snk[j])
      sinks.push_back(j);
  return restrict_to(m, sources, sinks);
}

std::vector<Component> split_components(const KroneckerModule &m, const BasisChoice &basis) {
  const KroneckerModule mb = in_basis(m, basis);
  const CoefficientQuiver g = build_gamma(mb);
  std::vector<bool> alive(g.vertex_count(), true);
  std::vector<Component> out;
  for (const auto &comp : components(g.adjacency(), alive)) {
    Component c;
    for (std::size_t v : comp) {
      if (g.is_source(v))
        c.sources.push_back(v);
      else
        c.sinks.push_back(v - g.n1);
    }
    c.module = restricted_module(mb, c.sources, c.sinks);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Component> split_components(const KroneckerModule &m) { return split_components(m, standard_basis(m)); }

std::string gamma_to_text(const CoefficientQuiver &g) {
  auto name = [&](std::size_t v) {
    return v < g.n1 ? "1." + std::to_string(v + 1) : "2." + std::to_string(v - g.n1 + 1);
  };
  std::ostringstream os;
  std::vector<bool> touched(g.vertex_count(), false);
  for (const auto &e : g.edges) {
    os << name(e.source) << " " << name(e.target) << " arrow=" << e.arrow + 1 << " coeff=" << e.coeff.get_str()
       << "\n";
    touched[e.source] = touched[e.target] = true;
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (!touched[v])
      os << name(v) << "\n";
  return os.str();
}

} // namespace kq
