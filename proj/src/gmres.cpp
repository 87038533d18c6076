#include "twophase/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twophase/errors.hpp"

namespace twophase {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

std::vector<double> true_residual(const LinearOperator& a, std::span<const double> b,
                                  std::span<const double> x) {
  std::vector<double> r(b.size());
  a.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

GmresResult gmres(const LinearOperator& a, std::span<const double> b,
                  const LinearOperator* preconditioner, const GmresOptions& options) {
  const int n = a.size();
  if (static_cast<int>(b.size()) != n) throw DimensionError("gmres: rhs size differs from operator");
  if (preconditioner && preconditioner->size() != n)
    throw DimensionError("gmres: preconditioner size differs from operator");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) throw ValidationError("gmres: rel_tol must be in (0,1)");
  for (double v : b)
    if (!std::isfinite(v)) throw ValidationError("gmres: non-finite right-hand side");

  GmresResult result;
  result.x.assign(n, 0.0);
  KrylovStats& stats = result.stats;

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    stats.converged = true;
    return result;
  }
  const double target = options.rel_tol * bnorm;
  const int m = std::max(1, std::min(options.restart, options.max_iters));

  std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> precond_basis(m, std::vector<double>(n));
  // Column-major Hessenberg, (m+1) x m.
  std::vector<double> h((m + 1) * m, 0.0);
  auto H = [&](int i, int j) -> double& { return h[j * (m + 1) + i]; };
  std::vector<double> cs(m), sn(m), g(m + 1);

  std::vector<double> r(b.begin(), b.end());
  double beta = bnorm;
  std::vector<double> best_x = result.x;
  double best_res = bnorm;
  int stagnant = 0;

  while (stats.iterations < options.max_iters) {
    std::fill(h.begin(), h.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    for (int i = 0; i < n; ++i) basis[0][i] = r[i] / beta;

    int k = 0;  // number of Arnoldi steps in this cycle
    bool cycle_done = false;
    bool estimate_met = false;
    for (int j = 0; j < m && stats.iterations < options.max_iters; ++j) {
      auto& z = precond_basis[j];
      if (preconditioner)
        preconditioner->apply(basis[j], z);
      else
        std::copy(basis[j].begin(), basis[j].end(), z.begin());
      auto& w = basis[j + 1];
      a.apply(z, w);
      const double w_norm0 = norm2(w);

      for (int i = 0; i <= j; ++i) {
        const double hij = dot(w, basis[i]);
        H(i, j) = hij;
        axpy(-hij, basis[i], w);
      }
      double w_norm = norm2(w);
      if (w_norm > 0.0) {
        double loss = 0.0;
        std::vector<double> coeff(j + 1);
        for (int i = 0; i <= j; ++i) {
          coeff[i] = dot(w, basis[i]);
          loss = std::max(loss, std::abs(coeff[i]) / w_norm);
        }
        if (loss > options.reorth_threshold) {
          for (int i = 0; i <= j; ++i) {
            H(i, j) += coeff[i];
            axpy(-coeff[i], basis[i], w);
          }
          w_norm = norm2(w);
        }
      }
      H(j + 1, j) = w_norm;
      ++stats.iterations;
      k = j + 1;

      const bool breakdown =
          w_norm <= 10.0 * std::numeric_limits<double>::epsilon() * std::max(w_norm0, 1e-300);
      if (!breakdown)
        for (int i = 0; i < n; ++i) w[i] /= w_norm;

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = H(j, j) / denom;
        sn[j] = H(j + 1, j) / denom;
      }
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      const double estimate = std::abs(g[j + 1]);
      stats.residual_history.push_back(estimate / bnorm);
      if (!std::isfinite(estimate)) {
        cycle_done = true;
        break;
      }
      if (breakdown) {
        stats.breakdown = true;
        cycle_done = true;
        break;
      }
      if (estimate <= target) {
        estimate_met = true;
        break;
      }
    }

    // Back substitution for the least-squares coefficients.
    std::vector<double> y(k, 0.0);
    bool finite = true;
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < k; ++l) s -= H(i, l) * y[l];
      y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
      finite = finite && std::isfinite(y[i]);
    }
    if (finite)
      for (int i = 0; i < k; ++i) axpy(y[i], precond_basis[i], result.x);

    r = true_residual(a, b, result.x);
    beta = norm2(r);
    const double previous_best = best_res;
    if (std::isfinite(beta) && beta < best_res) {
      best_res = beta;
      best_x = result.x;
    }
    if (beta <= target) {
      stats.converged = true;
      break;
    }
    if (cycle_done || !std::isfinite(beta)) break;
    if (options.stagnation_cycles > 0) {
      const bool no_progress = beta > (1.0 - 1e-3) * previous_best;
      const bool estimate_only = estimate_met && beta > 0.5 * previous_best;
      stagnant = no_progress || estimate_only ? stagnant + 1 : 0;
      if (stagnant >= options.stagnation_cycles) {
        stats.stagnated = true;
        break;
      }
    }
  }

  if (!stats.converged) result.x = best_x;
  stats.final_relative_residual = (stats.converged ? beta : best_res) / bnorm;
  return result;
}

}  // namespace twophase
