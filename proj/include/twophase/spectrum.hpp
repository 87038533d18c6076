#pragma once

#include <complex>
#include <vector>

#include "twophase/linear_operator.hpp"

namespace twophase {

struct SpectrumOptions {
  int max_dimension = 2000;
  // Eigenpairs checked by inverse iteration, spread evenly over the spectrum.
  int verify_samples = 3;
  double residual_tol = 1e-8;  // relative to ||A||_F
};

/// All eigenvalues of a (small) operator. The operator is materialized by
/// applying it to canonical basis vectors, reduced to Hessenberg form and
/// processed by shifted QR. A sample of eigenvalues is verified with inverse
/// iteration; failure of either step raises SolverError. Sorted by modulus.
std::vector<std::complex<double>> dense_spectrum(const LinearOperator& op,
                                                 const SpectrumOptions& options = {});

std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& a,
                                                 const SpectrumOptions& options = {});

}  // namespace twophase
