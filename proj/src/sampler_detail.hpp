#pragma once

// Helpers shared by the medoid-set and label samplers.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "bdc/samplers.hpp"

namespace bdc::detail {

inline double uniform01(std::mt19937_64 &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(std::size_t n, std::mt19937_64 &rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Metropolis test on a log ratio; NaN rejects. A uniform is always drawn so
/// the random stream does not depend on the ratio.
inline bool accept_log(double log_ratio, std::mt19937_64 &rng) {
  const double u = uniform01(rng);
  if (std::isnan(log_ratio)) return false;
  return u < std::exp(std::min(0.0, log_ratio));
}

/// Index drawn with probability proportional to exp(w[i]).
std::size_t sample_log_weights(const std::vector<double> &w, std::mt19937_64 &rng);

inline bool retained(std::size_t t, const ChainConfig &chain) {
  return t > chain.burn_in && (t - chain.burn_in) % chain.thin == 0;
}

double sample_beta(double a, double b, std::mt19937_64 &rng);

} // namespace bdc::detail
