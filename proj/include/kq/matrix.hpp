#pragma once

#include "kq/field.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kq {

// Sparse vector: strictly increasing indices, no stored zeros.
using SparseVec = std::vector<std::pair<std::size_t, Scalar>>;

// Dense-semantics matrix over an exact field. Storage is one sparse row per
// matrix row, so the structured modules of large dimension (P_n with n in
// the tens of thousands) stay linear in size.
class Matrix {
public:
  Matrix() = default;
  Matrix(Field field, std::size_t rows, std::size_t cols);

  static Matrix identity(Field field, std::size_t n);
  // Row-major integer literal, reduced into the field.
  static Matrix from_ints(Field field, std::size_t rows, std::size_t cols,
                          std::span<const long> entries);
  static Matrix from_rows(Field field, const std::vector<std::vector<long>> &rows);
  static Matrix from_scalars(Field field, std::size_t rows, std::size_t cols,
                             std::span<const Scalar> entries);
  // Columns given as dense vectors of equal length `rows`.
  static Matrix from_columns(Field field, std::size_t rows,
                             const std::vector<std::vector<Scalar>> &columns);

  const Field &field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Scalar at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Scalar &value);
  const SparseVec &row(std::size_t i) const { return data_[i]; }
  void set_row(std::size_t i, SparseVec row);
  std::size_t nnz() const;
  bool is_zero() const { return nnz() == 0; }

  std::vector<Scalar> column(std::size_t j) const;
  std::vector<std::vector<Scalar>> columns() const;

  Matrix transpose() const;
  Matrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;
  Matrix select_columns(std::span<const std::size_t> col_idx) const;

  Matrix operator*(const Matrix &rhs) const;
  Matrix operator+(const Matrix &rhs) const;
  Matrix operator-(const Matrix &rhs) const;
  Matrix scaled(const Scalar &c) const;

  // For every column exactly one nonzero entry equal to 1, in distinct rows.
  bool is_coordinate_embedding() const;

  friend bool operator==(const Matrix &a, const Matrix &b);

private:
  Field field_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<SparseVec> data_;
};

Matrix hconcat(const Field &field, std::size_t rows, std::span<const Matrix> blocks);
Matrix vconcat(const Field &field, std::size_t cols, std::span<const Matrix> blocks);
Matrix block_diagonal(const Field &field, std::span<const Matrix> blocks);

// Reduced row echelon form of the row space. `pivots[k]` is the leading
// column of `rows[k]`; pivots are increasing and each pivot row is 1 there.
struct RowEchelon {
  std::vector<std::size_t> pivots;
  std::vector<SparseVec> rows;
};
RowEchelon row_echelon(const Matrix &m);

std::size_t rank(const Matrix &m);
// Right null space basis; each vector has length m.cols().
std::vector<std::vector<Scalar>> kernel_basis(const Matrix &m);
// Same basis packed as the columns of a cols x nullity matrix.
Matrix kernel_matrix(const Matrix &m);
// Dimension of the sum of the column spaces. All blocks share the row count.
std::size_t column_space_dim_of_stack(std::span<const Matrix> ms);
// Independent columns spanning the column space (pivot columns of m).
Matrix column_space_basis(const Matrix &m);
// Coordinates X with basis * X == vectors; basis must have full column rank.
// Throws Validation if some column of `vectors` is outside the span.
Matrix coordinates_in(const Matrix &basis, const Matrix &vectors);
Matrix inverse(const Matrix &m);
bool has_full_column_rank(const Matrix &m);

// Text format: "field <tag>", "<rows> <cols>", then one matrix row per line.
std::string to_text(const Matrix &m);
void write_matrix(std::ostream &os, const Matrix &m);
Matrix read_matrix(std::istream &is);
Matrix parse_matrix(const std::string &text);

// Dense real matrix for the spectral code.
class FloatMatrix {
public:
  FloatMatrix() = default;
  FloatMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static FloatMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

  FloatMatrix transpose() const;
  FloatMatrix operator*(const FloatMatrix &rhs) const;
  FloatMatrix operator+(const FloatMatrix &rhs) const;
  FloatMatrix operator-(const FloatMatrix &rhs) const;
  FloatMatrix scaled(double c) const;
  std::vector<double> apply(std::span<const double> v) const;
  double max_abs_diff(const FloatMatrix &rhs) const;
  bool all_finite() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

FloatMatrix to_float(const Matrix &m);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  FloatMatrix vectors;         // column k belongs to values[k]
};

constexpr double kDefaultTol = 1e-10;

// Symmetric input is checked entrywise against tol, then symmetrized.
SymmetricEigen eigen_symmetric(const FloatMatrix &m, double tol = kDefaultTol);
double min_eigenvalue_symmetric(const FloatMatrix &m, double tol = kDefaultTol);

} // namespace kq
