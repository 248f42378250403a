#include "kq/matrix.hpp"
#include "kq/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace kq {

namespace {

// a - s * b over the field, merging sparse supports.
SparseVec axpy_sub(const Field &f, const SparseVec &a, const Scalar &s, const SparseVec &b) {
  SparseVec out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      Scalar v = f.neg(f.mul(s, b[j].second));
      out.emplace_back(b[j].first, std::move(v));
      ++j;
    } else {
      Scalar v = f.sub(a[i].second, f.mul(s, b[j].second));
      if (v != 0)
        out.emplace_back(a[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

SparseVec scale(const Field &f, const SparseVec &a, const Scalar &s) {
  SparseVec out;
  out.reserve(a.size());
  for (const auto &[k, v] : a)
    out.emplace_back(k, f.mul(v, s));
  return out;
}

const Scalar *find_entry(const SparseVec &v, std::size_t idx) {
  auto it = std::lower_bound(v.begin(), v.end(), idx,
                             [](const auto &e, std::size_t k) { return e.first < k; });
  if (it != v.end() && it->first == idx)
    return &it->second;
  return nullptr;
}

void check_same_field(const Matrix &a, const Matrix &b) {
  require(a.field() == b.field(), ErrorKind::Validation, "matrices over different fields");
}

} // namespace

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows) {}

Matrix Matrix::identity(Field field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i)
    m.data_[i].emplace_back(i, Scalar(1));
  return m;
}

Matrix Matrix::from_ints(Field field, std::size_t rows, std::size_t cols,
                         std::span<const long> entries) {
  require(entries.size() == rows * cols, ErrorKind::Shape, "entry count != rows*cols");
  Matrix m(field, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      Scalar v = field.from_int(entries[i * cols + j]);
      if (v != 0)
        m.data_[i].emplace_back(j, std::move(v));
    }
  return m;
}

Matrix Matrix::from_rows(Field field, const std::vector<std::vector<long>> &rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.front().size() : 0;
  std::vector<long> flat;
  flat.reserve(r * c);
  for (const auto &row : rows) {
    require(row.size() == c, ErrorKind::Shape, "ragged row list");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_ints(field, r, c, flat);
}

Matrix Matrix::from_scalars(Field field, std::size_t rows, std::size_t cols,
                            std::span<const Scalar> entries) {
  require(entries.size() == rows * cols, ErrorKind::Shape, "entry count != rows*cols");
  Matrix m(field, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      Scalar v = field.reduce(entries[i * cols + j]);
      if (v != 0)
        m.data_[i].emplace_back(j, std::move(v));
    }
  return m;
}

Matrix Matrix::from_columns(Field field, std::size_t rows,
                            const std::vector<std::vector<Scalar>> &columns) {
  Matrix m(field, rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j].size() == rows, ErrorKind::Shape, "column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) {
      Scalar v = field.reduce(columns[j][i]);
      if (v != 0)
        m.data_[i].emplace_back(j, std::move(v));
    }
  }
  return m;
}

Scalar Matrix::at(std::size_t i, std::size_t j) const {
  require(i < rows_ && j < cols_, ErrorKind::Shape, "matrix index out of range");
  const Scalar *p = find_entry(data_[i], j);
  return p ? *p : Scalar(0);
}

void Matrix::set(std::size_t i, std::size_t j, const Scalar &value) {
  require(i < rows_ && j < cols_, ErrorKind::Shape, "matrix index out of range");
  Scalar v = field_.reduce(value);
  auto &row = data_[i];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const auto &e, std::size_t k) { return e.first < k; });
  if (it != row.end() && it->first == j) {
    if (v == 0)
      row.erase(it);
    else
      it->second = std::move(v);
  } else if (v != 0) {
    row.insert(it, {j, std::move(v)});
  }
}

void Matrix::set_row(std::size_t i, SparseVec row) {
  require(i < rows_, ErrorKind::Shape, "row index out of range");
  data_[i] = std::move(row);
}

std::size_t Matrix::nnz() const {
  std::size_t n = 0;
  for (const auto &r : data_)
    n += r.size();
  return n;
}

std::vector<Scalar> Matrix::column(std::size_t j) const {
  std::vector<Scalar> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    if (const Scalar *p = find_entry(data_[i], j))
      out[i] = *p;
  return out;
}

std::vector<std::vector<Scalar>> Matrix::columns() const {
  std::vector<std::vector<Scalar>> out(cols_, std::vector<Scalar>(rows_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto &[j, v] : data_[i])
      out[j][i] = v;
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto &[j, v] : data_[i])
      t.data_[j].emplace_back(i, v);
  return t;
}

Matrix Matrix::select(std::span<const std::size_t> row_idx,
                      std::span<const std::size_t> col_idx) const {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  // small selections use a sorted lookup so the cost does not scale with cols_
  std::vector<std::pair<std::size_t, std::size_t>> sorted;
  std::vector<std::size_t> remap;
  const bool sparse = col_idx.size() * 8 < cols_;
  if (sparse)
    sorted.reserve(col_idx.size());
  else
    remap.assign(cols_, none);
  for (std::size_t k = 0; k < col_idx.size(); ++k) {
    require(col_idx[k] < cols_, ErrorKind::Shape, "column index out of range");
    if (sparse)
      sorted.emplace_back(col_idx[k], k);
    else
      remap[col_idx[k]] = k;
  }
  std::sort(sorted.begin(), sorted.end());
  auto lookup = [&](std::size_t j) {
    if (!sparse)
      return remap[j];
    auto it = std::lower_bound(sorted.begin(), sorted.end(), std::pair{j, std::size_t(0)});
    return it != sorted.end() && it->first == j ? it->second : none;
  };
  Matrix out(field_, row_idx.size(), col_idx.size());
  for (std::size_t r = 0; r < row_idx.size(); ++r) {
    require(row_idx[r] < rows_, ErrorKind::Shape, "row index out of range");
    SparseVec row;
    for (const auto &[j, v] : data_[row_idx[r]])
      if (const std::size_t k = lookup(j); k != none)
        row.emplace_back(k, v);
    std::sort(row.begin(), row.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    out.data_[r] = std::move(row);
  }
  return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> col_idx) const {
  std::vector<std::size_t> all(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    all[i] = i;
  return select(all, col_idx);
}

Matrix Matrix::operator*(const Matrix &rhs) const {
  check_same_field(*this, rhs);
  require(cols_ == rhs.rows_, ErrorKind::Shape, "matrix product shape mismatch");
  Matrix out(field_, rows_, rhs.cols_);
  std::map<std::size_t, Scalar> acc;
  for (std::size_t i = 0; i < rows_; ++i) {
    acc.clear();
    for (const auto &[k, a] : data_[i])
      for (const auto &[j, b] : rhs.data_[k]) {
        auto [it, fresh] = acc.try_emplace(j, field_.mul(a, b));
        if (!fresh)
          it->second = field_.add(it->second, field_.mul(a, b));
      }
    SparseVec row;
    for (auto &[j, v] : acc)
      if (v != 0)
        row.emplace_back(j, std::move(v));
    out.data_[i] = std::move(row);
  }
  return out;
}

Matrix Matrix::operator+(const Matrix &rhs) const {
  check_same_field(*this, rhs);
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorKind::Shape, "matrix sum shape mismatch");
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    out.data_[i] = axpy_sub(field_, data_[i], field_.neg(Scalar(1)), rhs.data_[i]);
  return out;
}

Matrix Matrix::operator-(const Matrix &rhs) const {
  check_same_field(*this, rhs);
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorKind::Shape, "matrix difference shape mismatch");
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    out.data_[i] = axpy_sub(field_, data_[i], Scalar(1), rhs.data_[i]);
  return out;
}

Matrix Matrix::scaled(const Scalar &c) const {
  Scalar s = field_.reduce(c);
  Matrix out(field_, rows_, cols_);
  if (s == 0)
    return out;
  for (std::size_t i = 0; i < rows_; ++i)
    out.data_[i] = scale(field_, data_[i], s);
  return out;
}

bool Matrix::is_coordinate_embedding() const {
  std::vector<char> col_seen(cols_, 0);
  for (const auto &row : data_) {
    if (row.size() > 1)
      return false;
    if (row.size() == 1) {
      if (row[0].second != 1 || col_seen[row[0].first])
        return false;
      col_seen[row[0].first] = 1;
    }
  }
  return std::all_of(col_seen.begin(), col_seen.end(), [](char c) { return c != 0; });
}

bool operator==(const Matrix &a, const Matrix &b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Matrix hconcat(const Field &field, std::size_t rows, std::span<const Matrix> blocks) {
  std::size_t cols = 0;
  for (const auto &b : blocks) {
    require(b.rows() == rows, ErrorKind::Shape, "hconcat: row count mismatch");
    require(b.field() == field, ErrorKind::Validation, "hconcat: field mismatch");
    cols += b.cols();
  }
  Matrix out(field, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    SparseVec row;
    std::size_t offset = 0;
    for (const auto &b : blocks) {
      for (const auto &[j, v] : b.row(i))
        row.emplace_back(offset + j, v);
      offset += b.cols();
    }
    out.set_row(i, std::move(row));
  }
  return out;
}

Matrix vconcat(const Field &field, std::size_t cols, std::span<const Matrix> blocks) {
  std::size_t rows = 0;
  for (const auto &b : blocks) {
    require(b.cols() == cols, ErrorKind::Shape, "vconcat: column count mismatch");
    require(b.field() == field, ErrorKind::Validation, "vconcat: field mismatch");
    rows += b.rows();
  }
  Matrix out(field, rows, cols);
  std::size_t r = 0;
  for (const auto &b : blocks)
    for (std::size_t i = 0; i < b.rows(); ++i)
      out.set_row(r++, b.row(i));
  return out;
}

Matrix block_diagonal(const Field &field, std::span<const Matrix> blocks) {
  std::size_t rows = 0, cols = 0;
  for (const auto &b : blocks) {
    require(b.field() == field, ErrorKind::Validation, "block_diagonal: field mismatch");
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out(field, rows, cols);
  std::size_t r0 = 0, c0 = 0;
  for (const auto &b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i) {
      SparseVec row;
      row.reserve(b.row(i).size());
      for (const auto &[j, v] : b.row(i))
        row.emplace_back(c0 + j, v);
      out.set_row(r0 + i, std::move(row));
    }
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

RowEchelon row_echelon(const Matrix &m) {
  const Field &f = m.field();
  std::map<std::size_t, SparseVec> pivots;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    SparseVec r = m.row(i);
    while (!r.empty()) {
      const std::size_t c = r.front().first;
      auto it = pivots.find(c);
      if (it == pivots.end()) {
        Scalar s = f.inv(r.front().second);
        pivots.emplace(c, scale(f, r, s));
        break;
      }
      Scalar s = r.front().second;
      r = axpy_sub(f, r, s, it->second);
    }
  }
  // Back-substitution, largest pivot first.
  for (auto hi = pivots.rbegin(); hi != pivots.rend(); ++hi) {
    const std::size_t c = hi->first;
    for (auto lo = pivots.begin(); lo != pivots.end() && lo->first < c; ++lo) {
      if (const Scalar *p = find_entry(lo->second, c)) {
        Scalar s = *p;
        lo->second = axpy_sub(f, lo->second, s, hi->second);
      }
    }
  }
  RowEchelon out;
  for (auto &[c, r] : pivots) {
    out.pivots.push_back(c);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::size_t rank(const Matrix &m) {
  // Shorter side first keeps the elimination small.
  if (m.rows() > m.cols())
    return row_echelon(m.transpose()).pivots.size();
  return row_echelon(m).pivots.size();
}

std::vector<std::vector<Scalar>> kernel_basis(const Matrix &m) {
  const Field &f = m.field();
  RowEchelon e = row_echelon(m);
  std::vector<char> is_pivot(m.cols(), 0);
  for (std::size_t c : e.pivots)
    is_pivot[c] = 1;
  std::vector<std::vector<Scalar>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free])
      continue;
    std::vector<Scalar> v(m.cols());
    v[free] = 1;
    for (std::size_t k = 0; k < e.rows.size(); ++k)
      if (const Scalar *p = find_entry(e.rows[k], free))
        v[e.pivots[k]] = f.neg(*p);
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix kernel_matrix(const Matrix &m) {
  const Field &f = m.field();
  RowEchelon e = row_echelon(m);
  std::vector<char> is_pivot(m.cols(), 0);
  for (std::size_t c : e.pivots)
    is_pivot[c] = 1;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c])
      free_cols.push_back(c);
  std::vector<std::size_t> free_index(m.cols(), 0);
  for (std::size_t k = 0; k < free_cols.size(); ++k)
    free_index[free_cols[k]] = k;
  std::vector<SparseVec> rows(m.cols());
  for (std::size_t k = 0; k < free_cols.size(); ++k)
    rows[free_cols[k]].emplace_back(k, Scalar(1));
  for (std::size_t k = 0; k < e.rows.size(); ++k) {
    SparseVec r;
    for (const auto &[c, v] : e.rows[k])
      if (!is_pivot[c])
        r.emplace_back(free_index[c], f.neg(v));
    rows[e.pivots[k]] = std::move(r);
  }
  Matrix out(f, m.cols(), free_cols.size());
  for (std::size_t i = 0; i < m.cols(); ++i)
    out.set_row(i, std::move(rows[i]));
  return out;
}

std::size_t column_space_dim_of_stack(std::span<const Matrix> ms) {
  if (ms.empty())
    return 0;
  return rank(hconcat(ms.front().field(), ms.front().rows(), ms));
}

Matrix column_space_basis(const Matrix &m) {
  RowEchelon e = row_echelon(m);
  return m.select_columns(e.pivots);
}

bool has_full_column_rank(const Matrix &m) {
  if (m.is_coordinate_embedding())
    return true;
  return rank(m) == m.cols();
}

Matrix coordinates_in(const Matrix &basis, const Matrix &vectors) {
  require(basis.rows() == vectors.rows(), ErrorKind::Shape, "coordinates_in: row mismatch");
  const Field &f = basis.field();
  if (basis.is_coordinate_embedding()) {
    std::vector<std::size_t> row_to_col(basis.rows(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < basis.rows(); ++i)
      if (!basis.row(i).empty())
        row_to_col[i] = basis.row(i)[0].first;
    Matrix out(f, basis.cols(), vectors.cols());
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
      if (vectors.row(i).empty())
        continue;
      require(row_to_col[i] != static_cast<std::size_t>(-1), ErrorKind::Validation,
              "vector outside the spanned subspace");
      out.set_row(row_to_col[i], vectors.row(i));
    }
    return out;
  }
  const Matrix blocks[] = {basis, vectors};
  RowEchelon e = row_echelon(hconcat(f, basis.rows(), blocks));
  const std::size_t k = basis.cols();
  require(e.pivots.size() >= k && (k == 0 || e.pivots[k - 1] == k - 1), ErrorKind::Validation,
          "coordinates_in: basis is not of full column rank");
  require(e.pivots.size() == k, ErrorKind::Validation, "vector outside the spanned subspace");
  Matrix out(f, k, vectors.cols());
  for (std::size_t r = 0; r < k; ++r) {
    SparseVec row;
    for (const auto &[c, v] : e.rows[r])
      if (c >= k)
        row.emplace_back(c - k, v);
    out.set_row(r, std::move(row));
  }
  return out;
}

Matrix inverse(const Matrix &m) {
  require(m.rows() == m.cols(), ErrorKind::Shape, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  const Matrix blocks[] = {m, Matrix::identity(m.field(), n)};
  RowEchelon e = row_echelon(hconcat(m.field(), n, blocks));
  require(e.pivots.size() == n && (n == 0 || e.pivots[n - 1] == n - 1), ErrorKind::Validation,
          "matrix is singular");
  Matrix out(m.field(), n, n);
  for (std::size_t r = 0; r < n; ++r) {
    SparseVec row;
    for (const auto &[c, v] : e.rows[r])
      if (c >= n)
        row.emplace_back(c - n, v);
    out.set_row(r, std::move(row));
  }
  return out;
}

void write_matrix(std::ostream &os, const Matrix &m) {
  os << "field " << m.field().tag() << '\n' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t next = 0;
    const auto &row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j)
        os << ' ';
      if (next < row.size() && row[next].first == j)
        os << format_scalar(row[next++].second);
      else
        os << '0';
    }
    os << '\n';
  }
}

std::string to_text(const Matrix &m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

Matrix read_matrix(std::istream &is) {
  std::string word, tag;
  require(static_cast<bool>(is >> word >> tag) && word == "field", ErrorKind::Parse,
          "matrix: expected 'field <tag>'");
  Field f = Field::from_tag(tag);
  std::string rs, cs;
  require(static_cast<bool>(is >> rs >> cs), ErrorKind::Parse, "matrix: expected '<rows> <cols>'");
  const Scalar r = parse_rational(rs), c = parse_rational(cs);
  require(r.get_den() == 1 && c.get_den() == 1 && r >= 0 && c >= 0 && r < 1000000 && c < 1000000,
          ErrorKind::Parse, "matrix: bad dimensions");
  const std::size_t rows = r.get_num().get_ui(), cols = c.get_num().get_ui();
  Matrix m(f, rows, cols);
  std::string tok;
  for (std::size_t i = 0; i < rows; ++i) {
    SparseVec row;
    for (std::size_t j = 0; j < cols; ++j) {
      require(static_cast<bool>(is >> tok), ErrorKind::Parse, "matrix: too few entries");
      if (tok == "0")
        continue;
      Scalar v = parse_rational(tok);
      if (f.is_prime_field())
        require(f.contains(v), ErrorKind::Parse,
                "matrix: prime-field entry '" + tok + "' not in [0, q)");
      if (v != 0)
        row.emplace_back(j, std::move(v));
    }
    m.set_row(i, std::move(row));
  }
  return m;
}

Matrix parse_matrix(const std::string &text) {
  std::istringstream is(text);
  return read_matrix(is);
}

// ---------------------------------------------------------------------------

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

FloatMatrix FloatMatrix::identity(std::size_t n) {
  FloatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

FloatMatrix FloatMatrix::transpose() const {
  FloatMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      t(j, i) = (*this)(i, j);
  return t;
}

FloatMatrix FloatMatrix::operator*(const FloatMatrix &rhs) const {
  require(cols_ == rhs.rows_, ErrorKind::Shape, "float product shape mismatch");
  FloatMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0)
        continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j)
        out(i, j) += a * rhs(k, j);
    }
  return out;
}

FloatMatrix FloatMatrix::operator+(const FloatMatrix &rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorKind::Shape, "float sum shape mismatch");
  FloatMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k)
    out.data_[k] += rhs.data_[k];
  return out;
}

FloatMatrix FloatMatrix::operator-(const FloatMatrix &rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorKind::Shape, "float difference shape mismatch");
  FloatMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k)
    out.data_[k] -= rhs.data_[k];
  return out;
}

FloatMatrix FloatMatrix::scaled(double c) const {
  FloatMatrix out = *this;
  for (auto &x : out.data_)
    x *= c;
  return out;
}

std::vector<double> FloatMatrix::apply(std::span<const double> v) const {
  require(v.size() == cols_, ErrorKind::Shape, "float apply shape mismatch");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out[i] += (*this)(i, j) * v[j];
  return out;
}

double FloatMatrix::max_abs_diff(const FloatMatrix &rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorKind::Shape, "float compare shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < data_.size(); ++k)
    m = std::max(m, std::abs(data_[k] - rhs.data_[k]));
  return m;
}

bool FloatMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

FloatMatrix to_float(const Matrix &m) {
  require(m.field().is_rational(), ErrorKind::Validation, "to_float needs a rational matrix");
  FloatMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto &[j, v] : m.row(i))
      out(i, j) = v.get_d();
  return out;
}

SymmetricEigen eigen_symmetric(const FloatMatrix &input, double tol) {
  require(input.rows() == input.cols(), ErrorKind::Validation, "eigen_symmetric: matrix not square");
  require(input.all_finite(), ErrorKind::Validation, "eigen_symmetric: non-finite entry");
  const std::size_t n = input.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(input(i, j) - input(j, i)) <= tol, ErrorKind::Validation,
              "eigen_symmetric: matrix not symmetric within tolerance");

  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  require(solver.info() == Eigen::Success, ErrorKind::Internal, "eigen_symmetric: solver failed");
  SymmetricEigen out;
  out.vectors = FloatMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(solver.eigenvalues()(k));
    for (std::size_t i = 0; i < n; ++i)
      out.vectors(i, k) = solver.eigenvectors()(i, k);
  }
  return out;
}

double min_eigenvalue_symmetric(const FloatMatrix &m, double tol) {
  if (m.rows() == 0)
    return 0.0;
  return eigen_symmetric(m, tol).values.front();
}

} // namespace kq
