#include "twophase/amg.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <set>

#include "twophase/errors.hpp"

namespace twophase {

SparseMatrix strength_graph(const SparseMatrix& a, double theta, double max_row_sum,
                            std::span<const int> functions) {
  if (!functions.empty() && static_cast<int>(functions.size()) != a.rows())
    throw DimensionError("strength_graph: function labels differ from matrix size");
  auto same = [&](int i, int j) { return functions.empty() || functions[i] == functions[j]; };
  std::vector<int> row_ptr(a.rows() + 1, 0);
  std::vector<int> col_idx;
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    double max_off = 0.0, diag = 0.0, row_sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!same(i, cols[k])) continue;
      row_sum += vals[k];
      if (cols[k] != i) max_off = std::max(max_off, std::abs(vals[k]));
      else diag = vals[k];
    }
    const bool dominant = max_row_sum < 1.0 && std::abs(row_sum) > max_row_sum * std::abs(diag);
    if (max_off > 0.0 && !dominant) {
      const double cut = theta * max_off;
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k] != i && same(i, cols[k]) && vals[k] != 0.0 && std::abs(vals[k]) >= cut) col_idx.push_back(cols[k]);
    }
    row_ptr[i + 1] = static_cast<int>(col_idx.size());
  }
  std::vector<double> ones(col_idx.size(), 1.0);
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(ones));
}

std::vector<PointType> ruge_stueben_splitting(const SparseMatrix& strength) {
  const int n = strength.rows();
  const SparseMatrix influence = transpose(strength);  // row j: points strongly depending on j

  enum State : char { Undecided, C, F };
  std::vector<State> state(n, Undecided);
  std::vector<int> measure(n, 0);
  std::set<std::pair<int, int>> queue;  // (-measure, index)

  for (int i = 0; i < n; ++i) {
    measure[i] = static_cast<int>(influence.row_cols(i).size());
    if (strength.row_cols(i).empty() && measure[i] == 0)
      state[i] = F;  // isolated: no off-diagonal coupling at all
    else
      queue.insert({-measure[i], i});
  }

  auto bump = [&](int j, int delta) {
    if (state[j] != Undecided) return;
    queue.erase({-measure[j], j});
    measure[j] += delta;
    queue.insert({-measure[j], j});
  };

  while (!queue.empty()) {
    const auto [neg_measure, i] = *queue.begin();
    queue.erase(queue.begin());
    if (neg_measure == 0) {
      // Nothing undecided depends on the rest; they become F-points.
      state[i] = F;
      for (const auto& entry : queue) state[entry.second] = F;
      queue.clear();
      break;
    }
    state[i] = C;
    for (int j : influence.row_cols(i)) {
      if (state[j] != Undecided) continue;
      queue.erase({-measure[j], j});
      state[j] = F;
      for (int k : strength.row_cols(j)) bump(k, +1);
    }
    for (int k : strength.row_cols(i)) bump(k, -1);
  }

  // Second pass: strongly connected F-points must share a strong C-point.
  std::vector<int> c_marker(n, -1);
  for (int i = 0; i < n; ++i) {
    if (state[i] != F) continue;
    auto si = strength.row_cols(i);
    if (si.empty()) continue;
    for (int j : si)
      if (state[j] == C) c_marker[j] = i;
    int tentative = -1;
    for (int k : si) {
      if (state[k] != F) continue;
      bool shares = false;
      for (int m : strength.row_cols(k))
        if (c_marker[m] == i) {
          shares = true;
          break;
        }
      if (shares) continue;
      if (tentative >= 0) {
        state[i] = C;
        c_marker[tentative] = -1;
        tentative = -1;
        break;
      }
      tentative = k;
      c_marker[k] = i;
    }
    if (tentative >= 0) state[tentative] = C;
  }

  std::vector<PointType> out(n);
  for (int i = 0; i < n; ++i) out[i] = state[i] == C ? PointType::Coarse : PointType::Fine;
  return out;
}

SparseMatrix classical_interpolation(const SparseMatrix& a, const SparseMatrix& strength,
                                     const std::vector<PointType>& splitting, std::span<const int> functions) {
  const int n = a.rows();
  auto same = [&](int i, int j) { return functions.empty() || functions[i] == functions[j]; };
  std::vector<int> coarse_index(n, -1);
  int nc = 0;
  for (int i = 0; i < n; ++i)
    if (splitting[i] == PointType::Coarse) coarse_index[i] = nc++;

  std::vector<Triplet> t;
  std::vector<char> strong(n, 0);
  std::vector<int> c_owner(n, -1);
  std::vector<double> weight(n, 0.0);
  std::vector<int> touched;

  for (int i = 0; i < n; ++i) {
    if (splitting[i] == PointType::Coarse) {
      t.push_back({i, coarse_index[i], 1.0});
      continue;
    }
    auto si = strength.row_cols(i);
    for (int j : si) {
      strong[j] = 1;
      if (splitting[j] == PointType::Coarse) c_owner[j] = i;
    }
    touched.clear();
    double diag = 0.0;
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const int j = cols[p];
      const double aij = vals[p];
      if (!same(i, j)) continue;
      if (j == i) {
        diag += aij;
      } else if (!strong[j]) {
        diag += aij;
      } else if (splitting[j] == PointType::Coarse) {
        if (weight[j] == 0.0) touched.push_back(j);
        weight[j] += aij;
      } else {
        // Strong F neighbor: distribute to the C-points of i it is connected to.
        const double ajj = a.coeff(j, j);
        auto jcols = a.row_cols(j);
        auto jvals = a.row_values(j);
        double sum = 0.0;
        for (std::size_t q = 0; q < jcols.size(); ++q)
          if (c_owner[jcols[q]] == i && (jvals[q] < 0.0) != (ajj < 0.0)) sum += jvals[q];
        if (sum == 0.0) {
          diag += aij;
          continue;
        }
        for (std::size_t q = 0; q < jcols.size(); ++q) {
          const int m = jcols[q];
          if (c_owner[m] == i && (jvals[q] < 0.0) != (ajj < 0.0)) {
            if (weight[m] == 0.0) touched.push_back(m);
            weight[m] += aij * jvals[q] / sum;
          }
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int j : touched) {
      if (diag != 0.0 && weight[j] != 0.0) t.push_back({i, coarse_index[j], -weight[j] / diag});
      weight[j] = 0.0;
    }
    for (int j : si) {
      strong[j] = 0;
      c_owner[j] = -1;
    }
  }
  return SparseMatrix::from_triplets(n, nc, t);
}

void gauss_seidel_forward(const SparseMatrix& a, std::span<const double> b, std::span<double> x) {
  auto ptr = a.row_ptr();
  auto col = a.col_idx();
  auto val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double s = b[i];
    double d = 0.0;
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) {
      if (col[p] == i)
        d = val[p];
      else
        s -= val[p] * x[col[p]];
    }
    if (d != 0.0) x[i] = s / d;
  }
}

struct AmgHierarchy::CoarseSolver {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
  bool use_dense = false;

  explicit CoarseSolver(const SparseMatrix& a) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(a.nnz());
    for (int i = 0; i < a.rows(); ++i) {
      auto cols = a.row_cols(i);
      auto vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) t.emplace_back(i, cols[k], vals[k]);
    }
    Eigen::SparseMatrix<double> m(a.rows(), a.cols());
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    sparse_lu.compute(m);
    if (sparse_lu.info() != Eigen::Success) {
      // Singular or numerically rank deficient; the dense factorization still
      // produces a (possibly non-finite) answer and lets the caller observe it.
      use_dense = true;
      dense_lu.compute(to_dense(a));
    }
  }

  void solve(std::span<const double> b, std::span<double> x) const {
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(x.size()));
    if (use_dense)
      out = dense_lu.solve(rhs);
    else
      out = sparse_lu.solve(rhs);
  }
};

AmgHierarchy::AmgHierarchy(SparseMatrix a, const AmgOptions& options) : options_(options) {
  if (a.rows() != a.cols()) throw DimensionError("AMG needs a square matrix");
  if (a.rows() == 0) throw ValidationError("AMG on an empty matrix");
  if (options.cycles < 1) throw ValidationError("AMG cycles must be >= 1");
  if (options.num_functions < 1) throw ValidationError("AMG num_functions must be >= 1");
  std::vector<int> functions;
  if (options.num_functions > 1) {
    if (a.rows() % options.num_functions != 0)
      throw DimensionError("AMG: matrix size is not a multiple of num_functions");
    functions.resize(a.rows());
    for (int i = 0; i < a.rows(); ++i) functions[i] = i % options.num_functions;
  }
  levels_.push_back(Level{std::move(a), {}, {}, {}, std::move(functions)});
  while (static_cast<int>(levels_.size()) < options.max_levels) {
    Level& fine = levels_.back();
    const int n = fine.a.rows();
    if (n <= options.coarse_size) break;
    const SparseMatrix s = strength_graph(fine.a, options.strength_threshold, options.max_row_sum, fine.functions);
    auto splitting = ruge_stueben_splitting(s);
    const auto nc = std::count(splitting.begin(), splitting.end(), PointType::Coarse);
    if (nc == 0 || nc == n) break;  // stagnation: solve directly here
    SparseMatrix p = classical_interpolation(fine.a, s, splitting, fine.functions);
    std::vector<int> coarse_functions;
    for (int i = 0; i < n && !fine.functions.empty(); ++i)
      if (splitting[i] == PointType::Coarse) coarse_functions.push_back(fine.functions[i]);
    SparseMatrix r = transpose(p);
    SparseMatrix coarse = multiply(r, multiply(fine.a, p));
    fine.p = std::move(p);
    fine.r = std::move(r);
    fine.splitting = std::move(splitting);
    levels_.push_back(Level{std::move(coarse), {}, {}, {}, std::move(coarse_functions)});
  }
  coarse_ = std::make_unique<CoarseSolver>(levels_.back().a);
}

AmgHierarchy::~AmgHierarchy() = default;
AmgHierarchy::AmgHierarchy(AmgHierarchy&&) noexcept = default;
AmgHierarchy& AmgHierarchy::operator=(AmgHierarchy&&) noexcept = default;

void AmgHierarchy::cycle(int l, std::span<const double> b, std::span<double> x) const {
  const Level& lev = levels_[l];
  if (l + 1 == num_levels()) {
    coarse_->solve(b, x);
    return;
  }
  const int n = lev.a.rows();
  for (int s = 0; s < options_.pre_sweeps; ++s) gauss_seidel_forward(lev.a, b, x);
  std::vector<double> r(n);
  lev.a.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  std::vector<double> rc(lev.r.rows());
  lev.r.multiply(r, rc);
  std::vector<double> ec(rc.size(), 0.0);
  cycle(l + 1, rc, ec);
  lev.p.multiply(ec, r);
  for (int i = 0; i < n; ++i) x[i] += r[i];
  for (int s = 0; s < options_.post_sweeps; ++s) gauss_seidel_forward(lev.a, b, x);
}

void AmgHierarchy::apply(std::span<const double> b, std::span<double> x) const {
  const int n = size();
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw DimensionError("AMG apply: size mismatch");
  std::fill(x.begin(), x.end(), 0.0);
  cycle(0, b, x);
  if (options_.cycles > 1) {
    const SparseMatrix& a = levels_.front().a;
    std::vector<double> r(n), e(n);
    for (int c = 1; c < options_.cycles; ++c) {
      a.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      std::fill(e.begin(), e.end(), 0.0);
      cycle(0, r, e);
      for (int i = 0; i < n; ++i) x[i] += e[i];
    }
  }
}

double AmgHierarchy::operator_complexity() const {
  double total = 0.0;
  for (const auto& l : levels_) total += l.a.nnz();
  return total / levels_.front().a.nnz();
}

double AmgHierarchy::grid_complexity() const {
  double total = 0.0;
  for (const auto& l : levels_) total += l.a.rows();
  return total / levels_.front().a.rows();
}

}  // namespace twophase
