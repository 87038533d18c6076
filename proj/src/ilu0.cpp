#include "twophase/ilu0.hpp"

#include <cmath>

namespace twophase {

Ilu0::Ilu0(const SparseMatrix& a) : factors_(a), diag_pos_(a.rows(), -1) {
  if (a.rows() != a.cols()) throw DimensionError("ILU(0) needs a square matrix");
  const int n = a.rows();
  for (int i = 0; i < n; ++i) {
    diag_pos_[i] = a.find(i, i);
    if (diag_pos_[i] < 0) throw ZeroPivotError(i);
  }

  auto ptr = a.row_ptr();
  auto col = a.col_idx();
  auto val = factors_.values_mut();
  std::vector<int> pos(n, -1);

  // IKJ variant restricted to the pattern.
  for (int i = 0; i < n; ++i) {
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) pos[col[p]] = p;
    for (int p = ptr[i]; p < ptr[i + 1] && col[p] < i; ++p) {
      const int k = col[p];
      const double pivot = val[diag_pos_[k]];
      val[p] /= pivot;
      const double lik = val[p];
      for (int q = diag_pos_[k] + 1; q < ptr[k + 1]; ++q) {
        const int target = pos[col[q]];
        if (target >= 0) val[target] -= lik * val[q];
      }
    }
    if (std::abs(val[diag_pos_[i]]) < 1e-300) throw ZeroPivotError(i);
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) pos[col[p]] = -1;
  }
}

void Ilu0::apply(std::span<const double> x, std::span<double> y) const {
  const int n = size();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw DimensionError("ILU(0) apply: size mismatch");
  auto ptr = factors_.row_ptr();
  auto col = factors_.col_idx();
  auto val = factors_.values();
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int p = ptr[i]; p < diag_pos_[i]; ++p) s -= val[p] * y[col[p]];
    y[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int p = diag_pos_[i] + 1; p < ptr[i + 1]; ++p) s -= val[p] * y[col[p]];
    y[i] = s / val[diag_pos_[i]];
  }
}

SparseMatrix Ilu0::lower() const {
  std::vector<Triplet> t;
  for (int i = 0; i < size(); ++i) {
    auto cols = factors_.row_cols(i);
    auto vals = factors_.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] < i) t.push_back({i, cols[k], vals[k]});
    t.push_back({i, i, 1.0});
  }
  return SparseMatrix::from_triplets(size(), size(), t);
}

SparseMatrix Ilu0::upper() const {
  std::vector<Triplet> t;
  for (int i = 0; i < size(); ++i) {
    auto cols = factors_.row_cols(i);
    auto vals = factors_.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] >= i) t.push_back({i, cols[k], vals[k]});
  }
  return SparseMatrix::from_triplets(size(), size(), t);
}

}  // namespace twophase
