#pragma once

// Independent references used by the unit and acceptance suites: brute-force
// enumerations and Boost.Math quadrature of the quantities the library
// computes in closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bdc/core.hpp"

namespace oracle {

/// Every nonempty subset of {0..n-1}, as sorted index lists.
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Every set partition of {0..n-1} as a restricted growth string.
inline std::vector<std::vector<std::size_t>> all_partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  if (n == 0) return out;
  std::vector<std::size_t> z(n, 0);
  std::vector<std::size_t> maxp(n, 0);
  while (true) {
    out.push_back(z);
    std::size_t i = n - 1;
    while (i > 0 && z[i] == maxp[i - 1] + 1) --i;
    if (i == 0) break;
    ++z[i];
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) z[j] = 0;
      maxp[j] = std::max(maxp[j - 1], z[j]);
    }
  }
  return out;
}

inline std::vector<std::size_t> block_sizes(const std::vector<std::size_t> &z) {
  std::map<std::size_t, std::size_t> c;
  for (std::size_t v : z) ++c[v];
  std::vector<std::size_t> out;
  for (const auto &[k, v] : c) out.push_back(v);
  return out;
}

/// Unnormalized weights to a normalized distribution.
inline std::vector<double> normalize_log(const std::vector<double> &lw) {
  const double hi = *std::max_element(lw.begin(), lw.end());
  std::vector<double> p(lw.size());
  double s = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) s += (p[i] = std::exp(lw[i] - hi));
  for (double &v : p) v /= s;
  return p;
}

inline double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double boost_log_gamma_pdf(double x, double shape, double rate) {
  return std::log(boost::math::pdf(boost::math::gamma_distribution<double>(shape, 1.0 / rate), x));
}

/// ln of int_0^inf prod_l Gamma(x_l; shape, r) Gamma(r; mu, beta) dr by
/// exp-sinh quadrature on the rate. Densities come from Boost.
inline double log_block_by_quadrature(const std::vector<double> &x, double shape, double mu,
                                      double beta) {
  if (x.empty()) return 0.0;
  auto logf = [&](double r) {
    double s = boost_log_gamma_pdf(r, mu, beta);
    for (double v : x) s += boost_log_gamma_pdf(v, shape, r);
    return s;
  };
  // Shift by the integrand's maximum on a log grid so nothing underflows.
  double shift = -std::numeric_limits<double>::infinity();
  for (double lr = -20.0; lr <= 20.0; lr += 0.05) shift = std::max(shift, logf(std::exp(lr)));
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double r) {
    if (!(r > 0.0) || !std::isfinite(r)) return 0.0;
    const double v = logf(r) - shift;
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };
  const double val = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                          1e-13);
  return std::log(val) + shift;
}

/// ln int_0^1 exp(-d alpha/(1-alpha)) Beta(alpha; a, b) d alpha.
inline double log_penalty_by_quadrature(double d, double a, double b) {
  boost::math::beta_distribution<double> beta(a, b);
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double x) {
    if (!(x > 0.0) || !(x < 1.0)) return 0.0;
    return std::exp(-d * x / (1.0 - x)) * boost::math::pdf(beta, x);
  };
  return std::log(integrator.integrate(f, 0.0, 1.0, 1e-14));
}

/// Random symmetric matrix with zero diagonal and off-diagonals in [lo, hi).
inline bdc::DistanceMatrix random_distances(std::size_t n, std::mt19937_64 &rng,
                                            double lo = 0.1, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = u(rng);
  }
  return bdc::DistanceMatrix::validate(n, std::move(v));
}

/// Euclidean distances of Gaussian points around well-separated 2-d centers.
inline bdc::DistanceMatrix blob_distances(const std::vector<std::size_t> &labels,
                                          double spread, std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0.0, spread);
  const std::size_t n = labels.size();
  std::vector<std::pair<double, double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {3.0 * static_cast<double>(labels[i]) + g(rng), g(rng)};
  }
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts[i].first - pts[j].first;
      const double dy = pts[i].second - pts[j].second;
      v[i * n + j] = v[j * n + i] = std::sqrt(dx * dx + dy * dy);
    }
  }
  return bdc::DistanceMatrix::validate(n, std::move(v));
}

/// Brute-force nearest medoid, ties to the smallest medoid index.
inline std::vector<std::size_t> argmin_labels(const bdc::DistanceMatrix &d,
                                              const std::vector<std::size_t> &medoids) {
  std::vector<std::size_t> z(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t p = 0; p < medoids.size(); ++p) {
      if (medoids[p] == j) {
        best = p;
        break;
      }
      if (d(medoids[p], j) < d(medoids[best], j)) best = p;
    }
    z[j] = best;
  }
  return z;
}

} // namespace oracle
