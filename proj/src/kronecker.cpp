#include "kq/kronecker.hpp"
#include "kq/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace kq {

void KroneckerModule::validate() const {
  require(d >= 1, ErrorKind::Validation, "module needs at least one arrow");
  require(maps.size() == d, ErrorKind::Validation,
          "module has " + std::to_string(maps.size()) + " maps, expected " + std::to_string(d));
  for (const auto &m : maps) {
    require(m.field() == field, ErrorKind::Validation, "map over a different field");
    require(m.rows() == dim2 && m.cols() == dim1, ErrorKind::Shape,
            "map shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                " does not match dims " + std::to_string(dim1) + "," + std::to_string(dim2));
  }
}

KroneckerModule make_module(Field field, std::size_t dim1, std::size_t dim2, std::vector<Matrix> maps) {
  KroneckerModule m;
  m.d = maps.size();
  m.field = field;
  m.dim1 = dim1;
  m.dim2 = dim2;
  m.maps = std::move(maps);
  m.validate();
  return m;
}

KroneckerModule zero_module(Field field, std::size_t d) {
  return make_module(field, 0, 0, std::vector<Matrix>(d, Matrix(field, 0, 0)));
}

// ---- pencil blocks ----

PencilBlock PencilBlock::preprojective(std::size_t n, std::size_t mult) {
  PencilBlock b;
  b.kind = Kind::Preprojective;
  b.n = n;
  b.multiplicity = mult;
  return b;
}

PencilBlock PencilBlock::postinjective(std::size_t n, std::size_t mult) {
  PencilBlock b = preprojective(n, mult);
  b.kind = Kind::Postinjective;
  return b;
}

PencilBlock PencilBlock::regular_poly(const Poly &base, std::size_t power, std::size_t mult) {
  require(power >= 1, ErrorKind::Validation, "regular block needs a positive power");
  require(base.is_monic() && is_irreducible(base), ErrorKind::Validation,
          "regular block base " + base.to_string() + " is not monic irreducible");
  PencilBlock b;
  b.kind = Kind::RegularPoly;
  b.base = base;
  b.power = power;
  b.n = static_cast<std::size_t>(base.degree()) * power;
  b.multiplicity = mult;
  return b;
}

PencilBlock PencilBlock::regular_monomial(std::size_t n, std::size_t mult) {
  require(n >= 1, ErrorKind::Validation, "monomial block needs degree >= 1");
  PencilBlock b = preprojective(n, mult);
  b.kind = Kind::RegularMonomial;
  return b;
}

DimVector PencilBlock::dims() const {
  switch (kind) {
  case Kind::Preprojective:
    return {n, n + 1};
  case Kind::Postinjective:
    return {n + 1, n};
  default:
    return {n, n};
  }
}

std::string PencilBlock::to_string() const {
  std::string s;
  switch (kind) {
  case Kind::Preprojective:
    s = "P(" + std::to_string(n) + ")";
    break;
  case Kind::Postinjective:
    s = "Q(" + std::to_string(n) + ")";
    break;
  case Kind::RegularPoly:
    s = "R[(" + base.to_string() + ")^" + std::to_string(power) + "]";
    break;
  case Kind::RegularMonomial:
    s = "Rinf(" + std::to_string(n) + ")";
    break;
  }
  if (multiplicity != 1)
    s += " x" + std::to_string(multiplicity);
  return s;
}

bool operator<(const PencilBlock &a, const PencilBlock &b) {
  if (a.kind != b.kind)
    return a.kind < b.kind;
  if (a.n != b.n)
    return a.n < b.n;
  if (a.kind == PencilBlock::Kind::RegularPoly) {
    if (a.base < b.base)
      return true;
    if (b.base < a.base)
      return false;
    return a.power < b.power;
  }
  return false;
}

bool operator==(const PencilBlock &a, const PencilBlock &b) {
  return !(a < b) && !(b < a) && a.multiplicity == b.multiplicity;
}

std::vector<PencilBlock> canonical_blocks(std::vector<PencilBlock> blocks) {
  std::sort(blocks.begin(), blocks.end());
  std::vector<PencilBlock> out;
  for (auto &b : blocks) {
    if (b.multiplicity == 0)
      continue;
    if (!out.empty() && !(out.back() < b) && !(b < out.back()))
      out.back().multiplicity += b.multiplicity;
    else
      out.push_back(b);
  }
  return out;
}

// ---- constructors ----

KroneckerModule build_P(std::size_t n, const Field &field) {
  Matrix a(field, n + 1, n), b(field, n + 1, n);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, 1);
    b.set(i + 1, i, 1);
  }
  return make_module(field, n, n + 1, {a, b});
}

KroneckerModule build_Q(std::size_t n, const Field &field) {
  Matrix a(field, n, n + 1), b(field, n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, 1);
    b.set(i, i + 1, 1);
  }
  return make_module(field, n + 1, n, {a, b});
}

Matrix companion(const Poly &f) {
  require(f.is_monic() && f.degree() >= 1, ErrorKind::Validation, "companion needs a monic polynomial of degree >= 1");
  const std::size_t n = static_cast<std::size_t>(f.degree());
  const Field &F = f.field();
  Matrix c(F, n, n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    c.set(i + 1, i, 1);
  for (std::size_t i = 0; i < n; ++i)
    c.set(i, n - 1, F.neg(f.coeff(i)));
  return c;
}

KroneckerModule build_R(const PencilBlock &block, const Field &field) {
  require(block.is_regular(), ErrorKind::Validation, "build_R needs a regular block");
  if (block.kind == PencilBlock::Kind::RegularPoly) {
    require(block.base.field() == field, ErrorKind::Validation, "polynomial over a different field");
    require(block.power >= 1 && block.base.is_monic() && is_irreducible(block.base), ErrorKind::Validation,
            "regular block polynomial is not a power of a monic irreducible");
    const Poly f = block.base.pow(block.power);
    const auto n = static_cast<std::size_t>(f.degree());
    return make_module(field, n, n, {Matrix::identity(field, n), companion(f)});
  }
  require(block.n >= 1, ErrorKind::Validation, "monomial block needs degree >= 1");
  return make_module(field, block.n, block.n,
                     {companion(Poly::monomial(field, block.n)), Matrix::identity(field, block.n)});
}

KroneckerModule build_block(const PencilBlock &block, const Field &field) {
  switch (block.kind) {
  case PencilBlock::Kind::Preprojective:
    return build_P(block.n, field);
  case PencilBlock::Kind::Postinjective:
    return build_Q(block.n, field);
  default:
    return build_R(block, field);
  }
}

// ---- the dimension sequence ----

SequenceA a_sequence(std::size_t d, std::size_t T) {
  require(d >= 3, ErrorKind::Domain, "a_sequence needs d >= 3");
  require(T >= 1, ErrorKind::Validation, "a_sequence needs T >= 1");
  SequenceA s;
  s.d = d;
  s.values = {mpz_class(0), mpz_class(1)};
  for (std::size_t t = 1; t < T; ++t)
    s.values.push_back(mpz_class(static_cast<unsigned long>(d)) * s.values[t] - s.values[t - 1]);
  const double D = static_cast<double>(d);
  const double root = std::sqrt(D * D - 4.0);
  s.phi = (D + root) / 2.0;
  s.psi = (D - root) / 2.0;
  return s;
}

double closed_form_a(std::size_t d, std::size_t t) {
  require(d >= 3, ErrorKind::Domain, "closed form needs d >= 3");
  const long double D = static_cast<long double>(d);
  const long double root = std::sqrt(D * D - 4.0L);
  const long double phi = (D + root) / 2.0L, psi = (D - root) / 2.0L;
  const long double T = static_cast<long double>(t);
  return static_cast<double>((std::pow(phi, T) - std::pow(psi, T)) / root);
}

double t_bound_constant(std::size_t d) {
  require(d >= 3, ErrorKind::Domain, "t bound needs d >= 3");
  const double D = static_cast<double>(d);
  return 4.0 / std::log((D + std::sqrt(D * D - 4.0)) / 2.0);
}

TBound t_bound_check(std::size_t d, std::size_t t) {
  const auto seq = a_sequence(d, t + 1);
  TBound out;
  out.dim = seq.values[t + 1] + seq.values[t];
  require(out.dim >= 3, ErrorKind::Precondition, "t bound needs dim >= 3");
  out.bound = t_bound_constant(d) * std::sqrt(out.dim.get_d());
  // round the bound down before comparing
  out.holds = static_cast<double>(t) <= out.bound * (1.0 - 1e-12);
  return out;
}

// ---- tree modules ----

namespace {

// One reflection step: (V1 => V2) becomes (V2 => W) with W the cokernel of
// V1 -> V2^d, v -> (a_1 v, ..., a_d v). The cokernel basis is the set of
// coordinates (arrow, sink) that are not pivots; each source picks as pivot
// the last coordinate whose arrow hits it only once, which keeps the
// coefficient quiver a tree.
KroneckerModule reflect(const KroneckerModule &m) {
  const Field &F = m.field;
  const std::size_t d = m.d;
  struct Coord {
    std::size_t arrow, sink;
    Scalar value;
  };
  std::vector<std::vector<Coord>> image(m.dim1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t w = 0; w < m.dim2; ++w)
      for (const auto &[k, v] : m.maps[i].row(w))
        image[k].push_back({i, w, v});

  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pivot_owner(d * m.dim2, none);
  std::vector<std::size_t> pivot_of(m.dim1);
  for (std::size_t k = 0; k < m.dim1; ++k) {
    require(!image[k].empty(), ErrorKind::Internal, "reflection of a module with a simple source summand");
    std::vector<std::size_t> per_arrow(d, 0);
    for (const auto &c : image[k])
      ++per_arrow[c.arrow];
    std::size_t best = none;
    for (std::size_t j = 0; j < image[k].size(); ++j) {
      const auto &c = image[k][j];
      if (per_arrow[c.arrow] != 1)
        continue;
      if (best == none || std::pair(c.arrow, c.sink) > std::pair(image[k][best].arrow, image[k][best].sink))
        best = j;
    }
    require(best != none, ErrorKind::Internal, "reflection found no monomial pivot");
    const std::size_t flat = image[k][best].arrow * m.dim2 + image[k][best].sink;
    require(pivot_owner[flat] == none, ErrorKind::Internal, "reflection pivot shared");
    pivot_owner[flat] = k;
    pivot_of[k] = best;
  }

  std::vector<std::size_t> new_index(d * m.dim2, none);
  std::size_t n2 = 0;
  for (std::size_t flat = 0; flat < d * m.dim2; ++flat)
    if (pivot_owner[flat] == none)
      new_index[flat] = n2++;

  std::vector<Matrix> maps(d, Matrix(F, n2, m.dim2));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t w = 0; w < m.dim2; ++w) {
      const std::size_t flat = i * m.dim2 + w;
      if (pivot_owner[flat] == none) {
        maps[i].set(new_index[flat], w, 1);
        continue;
      }
      const auto &img = image[pivot_owner[flat]];
      const Coord &p = img[pivot_of[pivot_owner[flat]]];
      const Scalar scale = F.neg(F.inv(p.value));
      for (const auto &c : img) {
        if (c.arrow == p.arrow && c.sink == p.sink)
          continue;
        const std::size_t target = new_index[c.arrow * m.dim2 + c.sink];
        maps[i].set(target, w, F.add(maps[i].at(target, w), F.mul(scale, c.value)));
      }
    }
  }
  return make_module(F, m.dim2, n2, std::move(maps));
}

} // namespace

KroneckerModule build_preprojective_theta(std::size_t d, std::size_t t, const Field &field) {
  require(d >= 3, ErrorKind::Domain, "needs d >= 3");
  require(t >= 1, ErrorKind::Validation, "needs t >= 1");
  // start from the simple projective at the sink vertex
  KroneckerModule m = make_module(field, 0, 1, std::vector<Matrix>(d, Matrix(field, 1, 0)));
  for (std::size_t s = 0; s < t; ++s)
    m = reflect(m);
  return m;
}

KroneckerModule build_postinjective_theta(std::size_t d, std::size_t t, const Field &field) {
  return dual(build_preprojective_theta(d, t, field));
}

// ---- homomorphisms and submodules ----

bool is_homomorphism(const Homomorphism &h, const KroneckerModule &X, const KroneckerModule &Y) {
  if (X.d != Y.d || !(X.field == Y.field))
    return false;
  if (h.f.rows() != Y.dim1 || h.f.cols() != X.dim1 || h.g.rows() != Y.dim2 || h.g.cols() != X.dim2)
    return false;
  for (std::size_t i = 0; i < X.d; ++i)
    if (!(h.g * X.maps[i] == Y.maps[i] * h.f))
      return false;
  return true;
}

std::vector<Homomorphism> hom_space(const KroneckerModule &X, const KroneckerModule &Y) {
  require(X.d == Y.d && X.field == Y.field, ErrorKind::Validation, "hom_space: modules differ in d or field");
  const Field &F = X.field;
  const std::size_t nf = Y.dim1 * X.dim1;
  const std::size_t nvars = nf + Y.dim2 * X.dim2;
  Matrix system(F, X.d * Y.dim2 * X.dim1, nvars);
  std::size_t row = 0;
  for (std::size_t a = 0; a < X.d; ++a) {
    const Matrix Xt = X.maps[a].transpose();
    for (std::size_t i = 0; i < Y.dim2; ++i) {
      for (std::size_t j = 0; j < X.dim1; ++j, ++row) {
        // (g X)_{ij} - (Y f)_{ij}
        SparseVec eq;
        for (const auto &[k, y] : Y.maps[a].row(i))
          eq.emplace_back(k * X.dim1 + j, F.neg(y));
        for (const auto &[k, x] : Xt.row(j))
          eq.emplace_back(nf + i * X.dim2 + k, x);
        system.set_row(row, std::move(eq));
      }
    }
  }
  std::vector<Homomorphism> out;
  for (const auto &v : kernel_basis(system)) {
    Homomorphism h{Matrix(F, Y.dim1, X.dim1), Matrix(F, Y.dim2, X.dim2)};
    for (std::size_t idx = 0; idx < nvars; ++idx) {
      if (v[idx] == 0)
        continue;
      if (idx < nf)
        h.f.set(idx / X.dim1, idx % X.dim1, v[idx]);
      else
        h.g.set((idx - nf) / X.dim2, (idx - nf) % X.dim2, v[idx]);
    }
    out.push_back(std::move(h));
  }
  return out;
}

Submodule submodule_from_bases(const KroneckerModule &X, const Matrix &basis1, const Matrix &basis2) {
  require(basis1.rows() == X.dim1 && basis2.rows() == X.dim2, ErrorKind::Shape, "submodule basis shape mismatch");
  require(has_full_column_rank(basis1) && has_full_column_rank(basis2), ErrorKind::Validation,
          "submodule basis is not independent");
  std::vector<Matrix> maps;
  for (const auto &a : X.maps) {
    try {
      maps.push_back(coordinates_in(basis2, a * basis1));
    } catch (const Error &) {
      fail(ErrorKind::Validation, "subspaces are not closed under the arrows");
    }
  }
  return {make_module(X.field, basis1.cols(), basis2.cols(), std::move(maps)), basis1, basis2};
}

Submodule kernel_module(const Homomorphism &theta, const KroneckerModule &X) {
  require(theta.f.cols() == X.dim1 && theta.g.cols() == X.dim2, ErrorKind::Shape, "homomorphism shape mismatch");
  const Matrix K1 = kernel_matrix(theta.f), K2 = kernel_matrix(theta.g);
  for (const auto &a : X.maps) {
    require((theta.g * (a * K1)).is_zero(), ErrorKind::Validation, "theta is not a homomorphism");
  }
  return submodule_from_bases(X, K1, K2);
}

KroneckerModule direct_sum(const std::vector<KroneckerModule> &modules) {
  require(!modules.empty(), ErrorKind::Validation, "direct_sum of an empty list needs d and field");
  return direct_sum(modules, modules.front().d, modules.front().field);
}

KroneckerModule direct_sum(const std::vector<KroneckerModule> &modules, std::size_t d, const Field &F) {
  std::size_t n1 = 0, n2 = 0;
  for (const auto &m : modules) {
    require(m.d == d && m.field == F, ErrorKind::Validation, "direct_sum: mixed d or field");
    n1 += m.dim1;
    n2 += m.dim2;
  }
  std::vector<Matrix> maps;
  for (std::size_t a = 0; a < d; ++a) {
    Matrix out(F, n2, n1);
    std::size_t r0 = 0, c0 = 0;
    for (const auto &m : modules) {
      for (std::size_t i = 0; i < m.dim2; ++i) {
        SparseVec row;
        for (const auto &[j, v] : m.maps[a].row(i))
          row.emplace_back(j + c0, v);
        out.set_row(r0 + i, std::move(row));
      }
      r0 += m.dim2;
      c0 += m.dim1;
    }
    maps.push_back(std::move(out));
  }
  return make_module(F, n1, n2, std::move(maps));
}

KroneckerModule dual(const KroneckerModule &m) {
  std::vector<Matrix> maps;
  for (const auto &a : m.maps)
    maps.push_back(a.transpose());
  return make_module(m.field, m.dim2, m.dim1, std::move(maps));
}

KroneckerModule change_basis(const KroneckerModule &m, const Matrix &S1, const Matrix &S2) {
  const Matrix S1inv = inverse(S1);
  inverse(S2); // invertibility check
  std::vector<Matrix> maps;
  for (const auto &a : m.maps)
    maps.push_back(S2 * a * S1inv);
  return make_module(m.field, m.dim1, m.dim2, std::move(maps));
}

// ---- text format ----

std::string module_to_text(const KroneckerModule &m) {
  std::ostringstream os;
  write_module(os, m);
  return os.str();
}

void write_module(std::ostream &os, const KroneckerModule &m) {
  os << "kronecker d=" << m.d << " field=" << m.field.tag() << " dims=" << m.dim1 << "x" << m.dim2 << "\n";
  for (const auto &a : m.maps)
    write_matrix(os, a);
}

KroneckerModule read_module(std::istream &is) {
  std::string header;
  while (header.empty() && std::getline(is, header)) {
  }
  std::istringstream hs(header);
  std::string word, dpart, fpart, dims;
  hs >> word >> dpart >> fpart >> dims;
  require(word == "kronecker" && dpart.rfind("d=", 0) == 0 && fpart.rfind("field=", 0) == 0 &&
              dims.rfind("dims=", 0) == 0,
          ErrorKind::Parse, "bad module header '" + header + "'");
  std::size_t d = 0, d1 = 0, d2 = 0;
  try {
    d = std::stoul(dpart.substr(2));
    const auto x = dims.find('x', 5);
    require(x != std::string::npos, ErrorKind::Parse, "bad dims in module header");
    d1 = std::stoul(dims.substr(5, x - 5));
    d2 = std::stoul(dims.substr(x + 1));
  } catch (const std::logic_error &) {
    fail(ErrorKind::Parse, "bad number in module header '" + header + "'");
  }
  const Field F = Field::from_tag(fpart.substr(6));
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < d; ++i) {
    Matrix a = read_matrix(is);
    require(a.field() == F, ErrorKind::Parse, "map field does not match module header");
    maps.push_back(std::move(a));
  }
  return make_module(F, d1, d2, std::move(maps));
}

KroneckerModule parse_module(const std::string &text) {
  std::istringstream is(text);
  return read_module(is);
}

} // namespace kq
