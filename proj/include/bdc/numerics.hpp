#pragma once

// Special functions for the Gamma marginal likelihoods and the dependence
// penalty. Everything that can underflow is returned in log space.

#include <cstddef>
#include <functional>
#include <span>

#include "bdc/error.hpp"

namespace bdc::numerics {

struct QuadratureSpec {
  std::size_t max_nodes = 15 * 4000; ///< function evaluations allowed
  double rel_tol = 1e-12;
  double abs_tol = 0.0;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t nodes = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on a finite interval. Endpoints
/// are never evaluated, so integrable endpoint singularities are allowed.
QuadratureResult integrate(const std::function<double(double)> &f, double lo,
                           double hi, const QuadratureSpec &spec = {});

/// Integral over [lo, inf) through s = lo + t/(1-t).
QuadratureResult integrate_to_infinity(const std::function<double(double)> &f,
                                       double lo, const QuadratureSpec &spec = {});

[[nodiscard]] double log_gamma_fn(double x);
[[nodiscard]] double log_beta(double a, double b);
/// ln C(n, k)
[[nodiscard]] double log_binomial(std::size_t n, std::size_t k);

/// shape*ln(rate) - lnGamma(shape) + (shape-1)*ln(x) - rate*x
[[nodiscard]] double log_gamma_density(double x, double shape, double rate);

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
[[nodiscard]] double regularized_gamma_p(double a, double x);
[[nodiscard]] double regularized_gamma_q(double a, double x);

[[nodiscard]] double gamma_cdf(double x, double shape, double rate);
/// x with gamma_cdf(x) = p.
[[nodiscard]] double gamma_quantile(double p, double shape, double rate);
/// x with 1 - gamma_cdf(x) = q; keeps resolution in the upper tail.
[[nodiscard]] double gamma_quantile_upper(double q, double shape, double rate);

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_cdf_upper(double z);

/// Confluent hypergeometric U(a, b, x) for a > 0, x > 0 from
/// Gamma(a) U = int_0^inf e^{-xt} t^{a-1} (1+t)^{b-a-1} dt.
[[nodiscard]] double tricomi_u(double a, double b, double x,
                               const QuadratureSpec &spec = {15 * 4000, 1e-11, 0.0});
[[nodiscard]] double log_tricomi_u(double a, double b, double x,
                                   const QuadratureSpec &spec = {15 * 4000, 1e-11, 0.0});

[[nodiscard]] double log_sum_exp(std::span<const double> values);
[[nodiscard]] double log_add_exp(double a, double b);

} // namespace bdc::numerics
