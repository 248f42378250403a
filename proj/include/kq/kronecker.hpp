#pragma once

#include "kq/matrix.hpp"
#include "kq/poly.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace kq {

// Representation V1 => V2 of the d-arrow Kronecker quiver. Each map is
// dim2 x dim1; vertex 1 is the source.
struct KroneckerModule {
  std::size_t d = 0;
  Field field;
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;
  std::vector<Matrix> maps;

  std::size_t dim() const { return dim1 + dim2; }
  long defect() const { return static_cast<long>(dim1) - static_cast<long>(dim2); }
  void validate() const;

  friend bool operator==(const KroneckerModule &, const KroneckerModule &) = default;
};

KroneckerModule make_module(Field field, std::size_t dim1, std::size_t dim2, std::vector<Matrix> maps);
KroneckerModule zero_module(Field field, std::size_t d);

struct DimVector {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  long defect() const { return static_cast<long>(d1) - static_cast<long>(d2); }
};
inline DimVector dim_vector(const KroneckerModule &m) { return {m.dim1, m.dim2}; }

struct PencilBlock {
  enum class Kind { Preprojective, Postinjective, RegularPoly, RegularMonomial };
  Kind kind = Kind::Preprojective;
  // Preprojective/Postinjective: index n. RegularMonomial: degree n.
  std::size_t n = 0;
  // RegularPoly: base^power with base monic irreducible.
  Poly base;
  std::size_t power = 0;
  std::size_t multiplicity = 1;

  static PencilBlock preprojective(std::size_t n, std::size_t mult = 1);
  static PencilBlock postinjective(std::size_t n, std::size_t mult = 1);
  static PencilBlock regular_poly(const Poly &base, std::size_t power, std::size_t mult = 1);
  static PencilBlock regular_monomial(std::size_t n, std::size_t mult = 1);

  bool is_regular() const { return kind == Kind::RegularPoly || kind == Kind::RegularMonomial; }
  DimVector dims() const;
  std::string to_string() const;
  // Ordering ignores multiplicity; used to canonicalize multisets.
  friend bool operator<(const PencilBlock &a, const PencilBlock &b);
  friend bool operator==(const PencilBlock &a, const PencilBlock &b);
};

// Merge equal blocks and sort.
std::vector<PencilBlock> canonical_blocks(std::vector<PencilBlock> blocks);

KroneckerModule build_P(std::size_t n, const Field &field);
KroneckerModule build_Q(std::size_t n, const Field &field);
// RegularPoly: (I, companion of base^power). RegularMonomial: (companion of x^n, I).
KroneckerModule build_R(const PencilBlock &block, const Field &field);
KroneckerModule build_block(const PencilBlock &block, const Field &field);
Matrix companion(const Poly &monic);

struct SequenceA {
  std::size_t d = 0;
  std::vector<mpz_class> values;
  double phi = 0.0;
  double psi = 0.0;
};
SequenceA a_sequence(std::size_t d, std::size_t T);
double closed_form_a(std::size_t d, std::size_t t);

struct TBound {
  mpz_class dim;
  double bound = 0.0;
  bool holds = false;
};
TBound t_bound_check(std::size_t d, std::size_t t);
// 4 / ln(phi) for the given d.
double t_bound_constant(std::size_t d);

KroneckerModule build_postinjective_theta(std::size_t d, std::size_t t, const Field &field);
KroneckerModule build_preprojective_theta(std::size_t d, std::size_t t, const Field &field);

struct Homomorphism {
  Matrix f; // Y.dim1 x X.dim1
  Matrix g; // Y.dim2 x X.dim2
};
bool is_homomorphism(const Homomorphism &h, const KroneckerModule &X, const KroneckerModule &Y);
std::vector<Homomorphism> hom_space(const KroneckerModule &X, const KroneckerModule &Y);

// A submodule with its coordinate embedding: X.maps[i] * emb1 == emb2 * sub.maps[i].
struct Submodule {
  KroneckerModule module;
  Matrix emb1;
  Matrix emb2;
};
Submodule kernel_module(const Homomorphism &theta, const KroneckerModule &X);
// Submodule spanned by the given subspaces, which must be arrow closed.
Submodule submodule_from_bases(const KroneckerModule &X, const Matrix &basis1, const Matrix &basis2);

KroneckerModule direct_sum(const std::vector<KroneckerModule> &modules);
// Also defined for an empty list (the zero module).
KroneckerModule direct_sum(const std::vector<KroneckerModule> &modules, std::size_t d, const Field &field);
// Swap the vertices and transpose every map.
KroneckerModule dual(const KroneckerModule &m);
// Maps become S2 * M(a) * S1^{-1}.
KroneckerModule change_basis(const KroneckerModule &m, const Matrix &S1, const Matrix &S2);

// Text format: header "kronecker d=<d> field=<tag> dims=<d1>x<d2>", then d
// matrices in the matrix text format.
std::string module_to_text(const KroneckerModule &m);
void write_module(std::ostream &os, const KroneckerModule &m);
KroneckerModule read_module(std::istream &is);
KroneckerModule parse_module(const std::string &text);

} // namespace kq
