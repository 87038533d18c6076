#include "twophase/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {
namespace {

// Residual ||A v - lambda v|| / ||v|| after a few steps of inverse iteration
// with a slightly perturbed shift.
double inverse_iteration_residual(const Eigen::MatrixXd& a, std::complex<double> lambda) {
  using CMat = Eigen::MatrixXcd;
  using CVec = Eigen::VectorXcd;
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.norm());
  const std::complex<double> shift = lambda + std::complex<double>(1e-10 * scale, 1e-10 * scale);
  CMat shifted = a.cast<std::complex<double>>();
  shifted.diagonal().array() -= shift;
  Eigen::PartialPivLU<CMat> lu(shifted);
  CVec v = CVec::Ones(n) / std::sqrt(static_cast<double>(n));
  for (int it = 0; it < 3; ++it) {
    CVec w = lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw) || nw == 0.0) break;
    v = w / nw;
  }
  const CVec av = a.cast<std::complex<double>>() * v;
  // Rayleigh quotient refines the eigenvalue estimate for the residual check.
  const std::complex<double> rq = v.dot(av);
  return (av - rq * v).norm();
}

}  // namespace

std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& a,
                                                 const SpectrumOptions& options) {
  if (a.rows() != a.cols()) throw DimensionError("dense_spectrum: matrix must be square");
  if (a.rows() > options.max_dimension)
    throw ValidationError("dense_spectrum: dimension " + std::to_string(a.rows()) +
                          " exceeds cap " + std::to_string(options.max_dimension));
  if (!a.allFinite()) throw SolverError("dense_spectrum: operator has non-finite entries");

  // Hessenberg reduction followed by Francis double-shift QR.
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw SolverError("dense_spectrum: QR iteration did not converge");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) < std::abs(y);
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });

  const double anorm = std::max(a.norm(), 1e-300);
  const int samples = std::min<int>(options.verify_samples, static_cast<int>(out.size()));
  for (int s = 0; s < samples; ++s) {
    const std::size_t idx =
        samples == 1 ? 0 : static_cast<std::size_t>(s) * (out.size() - 1) / (samples - 1);
    const double res = inverse_iteration_residual(a, out[idx]);
    if (!(res <= options.residual_tol * anorm))
      throw SolverError("dense_spectrum: eigenpair residual check failed");
  }
  return out;
}

std::vector<std::complex<double>> dense_spectrum(const LinearOperator& op,
                                                 const SpectrumOptions& options) {
  if (op.size() > options.max_dimension)
    throw ValidationError("dense_spectrum: dimension " + std::to_string(op.size()) +
                          " exceeds cap " + std::to_string(options.max_dimension));
  return dense_spectrum(materialize(op), options);
}

}  // namespace twophase
