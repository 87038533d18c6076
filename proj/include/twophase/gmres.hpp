#pragma once

#include <span>
#include <vector>

#include "twophase/linear_operator.hpp"

namespace twophase {

struct GmresOptions {
  double rel_tol = 1e-12;
  int max_iters = 2000;
  int restart = 200;
  // Reorthogonalize when any |<w, v_i>| / |w| exceeds this after the first pass.
  double reorth_threshold = 1e-8;
  // Stop after this many consecutive restarts that either reduced the true
  // residual by less than 0.1%, or met the target in the Arnoldi estimate while
  // the true residual failed to halve (0 disables the check).
  int stagnation_cycles = 3;
};

struct KrylovStats {
  int iterations = 0;  // Arnoldi steps over all restart cycles
  double final_relative_residual = 0.0;  // true ||b - A x|| / ||b||
  bool converged = false;
  bool breakdown = false;
  // The true residual sits at a rounding floor above the target.
  bool stagnated = false;
  // Relative residual estimate after each Arnoldi step.
  std::vector<double> residual_history;
};

struct GmresResult {
  std::vector<double> x;
  KrylovStats stats;
};

/// Restarted GMRES with right preconditioning: solves A M^{-1} y = b and
/// returns x = M^{-1} y, so the monitored residual is the true residual of
/// A x = b. Starts from x = 0. A null preconditioner means M = I.
GmresResult gmres(const LinearOperator& a, std::span<const double> b,
                  const LinearOperator* preconditioner, const GmresOptions& options = {});

}  // namespace twophase
