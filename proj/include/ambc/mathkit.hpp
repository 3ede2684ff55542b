#pragma once
// Special functions and numerical quadrature used by the detection analytics:
// Gaussian tail probability, log-gamma, regularized incomplete gamma
// (series / continued fraction, evaluated in log domain so large shape
// parameters cannot overflow), and an adaptive Gauss-Kronrod integrator.

#include <functional>
#include <stdexcept>
#include <string>

namespace ambc {

/// Tolerances and subdivision budget for adaptive quadrature.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;

  /// Throws std::domain_error if tolerances are not strictly positive or the
  /// budget is below one subdivision.
  void validate() const;
};

/// Thrown when the subdivision budget runs out before the requested tolerance
/// is reached; carries the best estimate computed so far.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& message, double best_estimate)
      : std::runtime_error(message), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// Gaussian upper-tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
/// Throws std::domain_error for non-finite input.
double q_function(double x);

/// Natural logarithm of the gamma function for s > 0.
/// Throws std::domain_error for s <= 0 or non-finite input.
double log_gamma(double s);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
/// Requires s > 0 and x >= 0; result lies in [0, 1].
double upper_incomplete_gamma_regularized(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x).
double lower_incomplete_gamma_regularized(double s, double x);

/// Adaptive Gauss-Kronrod (G7, K15) estimate of the integral of f over
/// [a, b], a <= b finite. The subdivision loop refines the segment with the
/// largest error estimate until the combined error is below
/// max(abs_tol, rel_tol * |integral|). Throws convergence_error (carrying the
/// best estimate) when the budget is exhausted first, and std::domain_error
/// when the integrand evaluates to a non-finite value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace ambc
