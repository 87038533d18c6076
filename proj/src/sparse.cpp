#include "twophase/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "twophase/errors.hpp"

namespace twophase {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw ValidationError("negative matrix dimension");
  if (static_cast<int>(row_ptr_.size()) != rows + 1 || row_ptr_.front() != 0)
    throw ValidationError("row offsets must have rows+1 entries starting at 0");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<int>(col_idx_.size()))
    throw ValidationError("column index and value arrays disagree with row offsets");
  for (int i = 0; i < rows; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) throw ValidationError("row offsets not monotone");
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols)
        throw ValidationError("column index out of range in row " + std::to_string(i));
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw ValidationError("columns not strictly increasing in row " + std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> entries) {
  std::vector<int> count(rows + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ValidationError("triplet index out of range");
    ++count[t.row + 1];
  }
  for (int i = 0; i < rows; ++i) count[i + 1] += count[i];
  std::vector<std::pair<int, double>> slots(entries.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const auto& t : entries) slots[fill[t.row]++] = {t.col, t.value};

  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (int i = 0; i < rows; ++i) {
    auto first = slots.begin() + count[i];
    auto last = slots.begin() + count[i + 1];
    std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!col_idx.empty() && static_cast<int>(col_idx.size()) > row_ptr[i] &&
          col_idx.back() == it->first) {
        values.back() += it->second;
      } else {
        col_idx.push_back(it->first);
        values.push_back(it->second);
      }
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> row_ptr(n + 1);
  std::vector<int> col_idx(n);
  for (int i = 0; i <= n; ++i) row_ptr[i] = i;
  for (int i = 0; i < n; ++i) col_idx[i] = i;
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), {d.begin(), d.end()});
}

int SparseMatrix::find(int i, int j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return -1;
  return row_ptr_[i] + static_cast<int>(it - cols.begin());
}

double SparseMatrix::coeff(int i, int j) const {
  const int p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

std::vector<double> SparseMatrix::diagonal_values() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw DimensionError("spmv: dimension mismatch");
  for (int i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p] * x[col_idx_[p]];
    y[i] = sum;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  a.multiply(x, y);
  return y;
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<int> row_ptr(a.cols() + 1, 0);
  for (int c : a.col_idx()) ++row_ptr[c + 1];
  for (int j = 0; j < a.cols(); ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<int> col_idx(a.nnz());
  std::vector<double> values(a.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int dst = next[cols[k]]++;
      col_idx[dst] = i;
      values[dst] = vals[k];
    }
  }
  return SparseMatrix(a.cols(), a.rows(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("sparse product: inner dimensions differ");
  std::vector<int> row_ptr(a.rows() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  std::vector<int> marker(b.cols(), -1);
  std::vector<double> accum(b.cols(), 0.0);
  std::vector<int> touched;
  for (int i = 0; i < a.rows(); ++i) {
    touched.clear();
    auto acols = a.row_cols(i);
    auto avals = a.row_values(i);
    for (std::size_t ka = 0; ka < acols.size(); ++ka) {
      const int k = acols[ka];
      auto bcols = b.row_cols(k);
      auto bvals = b.row_values(k);
      for (std::size_t kb = 0; kb < bcols.size(); ++kb) {
        const int j = bcols[kb];
        if (marker[j] != i) {
          marker[j] = i;
          accum[j] = 0.0;
          touched.push_back(j);
        }
        accum[j] += avals[ka] * bvals[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int j : touched) {
      col_idx.push_back(j);
      values.push_back(accum[j]);
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("sparse add: shapes differ");
  std::vector<int> row_ptr(a.rows() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    auto bc = b.row_cols(i);
    auto bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        col_idx.push_back(ac[p]);
        values.push_back(alpha * av[p++]);
      } else if (p == ac.size() || bc[q] < ac[p]) {
        col_idx.push_back(bc[q]);
        values.push_back(beta * bv[q++]);
      } else {
        col_idx.push_back(ac[p]);
        values.push_back(alpha * av[p++] + beta * bv[q++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix scale_columns(const SparseMatrix& a, std::span<const double> d) {
  if (static_cast<int>(d.size()) != a.cols()) throw DimensionError("scale_columns: size mismatch");
  SparseMatrix out = a;
  auto vals = out.values_mut();
  auto cols = a.col_idx();
  for (std::size_t p = 0; p < vals.size(); ++p) vals[p] *= d[cols[p]];
  return out;
}

SparseMatrix permute_symmetric(const SparseMatrix& a, std::span<const int> perm) {
  if (a.rows() != a.cols() || static_cast<int>(perm.size()) != a.rows())
    throw DimensionError("permute_symmetric: permutation size mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.push_back({perm[i], perm[cols[k]], vals[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrix submatrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols) {
  std::vector<int> col_map(a.cols(), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<int>(j);
  std::vector<int> row_ptr(rows.size() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  std::vector<std::pair<int, double>> row;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    row.clear();
    auto rc = a.row_cols(rows[i]);
    auto rv = a.row_values(rows[i]);
    for (std::size_t k = 0; k < rc.size(); ++k)
      if (col_map[rc[k]] >= 0) row.emplace_back(col_map[rc[k]], rv[k]);
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [c, v] : row) {
      col_idx.push_back(c);
      values.push_back(v);
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(row_ptr),
                      std::move(col_idx), std::move(values));
}

SparseMatrix drop_small(const SparseMatrix& a, double tol) {
  std::vector<int> row_ptr(a.rows() + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == i || std::abs(vals[k]) > tol) {
        col_idx.push_back(cols[k]);
        values.push_back(vals[k]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

double norm_inf(const SparseMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row_values(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

double norm_frobenius(const SparseMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
  }
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
    throw ParseError("expected MatrixMarket coordinate real general header", 1);
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream header(line);
  int rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw ParseError("bad size line", line_no);
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (int k = 0; k < nnz; ++k) {
    int i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw ParseError("truncated entry list", line_no + k + 1);
    t.push_back({i - 1, j - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, t);
}

}  // namespace twophase
