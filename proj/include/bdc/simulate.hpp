#pragma once

// Two-layer Gaussian-mixture benchmark data and the distance transforms used
// to feed real-valued dissimilarities into the Gamma likelihoods.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bdc/core.hpp"

namespace bdc {

using PointMatrix = std::vector<std::vector<double>>;

struct SimConfig {
  std::size_t n = 100;
  std::size_t n_clusters = 10;
  std::size_t dim = 10;
  double sigma_s = 0.1; ///< within-cluster standard deviation
  double alpha_s = 1.0; ///< share of objects whose layer-2 label copies layer 1
  /// Per-component Dirichlet parameter of the mixing weights (1 = uniform
  /// on the simplex).
  double dirichlet_alpha = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimOutput {
  PointMatrix x1;
  PointMatrix x2;
  std::vector<std::size_t> z1_true;
  std::vector<std::size_t> z2_true;
  DistanceMatrix d1;
  DistanceMatrix d2;
};

[[nodiscard]] SimOutput simulate_two_layer(const SimConfig &cfg);

/// The k unit basis vectors of R^dim.
[[nodiscard]] PointMatrix centers_standard_simplex(std::size_t k, std::size_t dim);

[[nodiscard]] DistanceMatrix euclidean_distances(const PointMatrix &x);

/// Off-diagonal entries standardized by their mean and sample sd, then
/// mapped through the standard normal CDF and the Gamma(shape, rate)
/// quantile. Throws DegenerateDistances when the sd is zero.
[[nodiscard]] DistanceMatrix gamma_quantile_transform(const DistanceMatrix &d, double shape = 3.0,
                                                      double rate = 5.0);

} // namespace bdc
