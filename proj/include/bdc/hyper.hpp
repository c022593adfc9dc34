#pragma once

// Empirical-Bayes hyperparameters from a distance matrix, and the prefilter
// that sets aside objects far from everything else.

#include <cstddef>
#include <span>
#include <vector>

#include "bdc/core.hpp"
#include "bdc/likelihood.hpp"

namespace bdc {

struct MomentDiagnostics {
  double a_mean = 0.0;
  double a_var = 0.0; ///< unbiased
  double b_mean = 0.0;
  double b_var = 0.0; ///< unbiased
};

struct HyperSelection {
  LikelihoodConfig cfg;
  std::size_t k_elbow = 0;
  std::size_t a_set_size = 0;
  std::size_t b_set_size = 0;
  MomentDiagnostics diagnostics;
  MedoidSet pam_medoids;
};

/// Method-of-moments shapes and rates from within distances `a`
/// (member-to-medoid) and between distances `b` (medoid-to-medoid).
/// Throws DegenerateDistances if either set has fewer than two entries or a
/// variance below 1e-12.
[[nodiscard]] LikelihoodConfig moment_hyperparameters(std::span<const double> a,
                                                      std::span<const double> b,
                                                      MomentDiagnostics *diag = nullptr);

/// Default upper end of the elbow sweep: min(30, N/2).
[[nodiscard]] std::size_t default_k_max(std::size_t n);

/// Elbow K, PAM at that K, then moment_hyperparameters on its distances.
/// k_hi = 0 selects default_k_max.
[[nodiscard]] HyperSelection select_hyperparameters(const DistanceMatrix &d,
                                                    std::size_t k_lo = 2,
                                                    std::size_t k_hi = 0);

struct PrefilterResult {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> singletons;
  DistanceMatrix restricted; ///< d restricted to `kept`
};

/// Type-7 (linear interpolation) sample quantile.
[[nodiscard]] double sample_quantile(std::vector<double> values, double q);

/// Flags i when the q-quantile of {D_ij : j != i} exceeds threshold.
[[nodiscard]] std::vector<bool> singleton_flags(const DistanceMatrix &d, double q,
                                                double threshold);

[[nodiscard]] PrefilterResult singleton_prefilter(const DistanceMatrix &d, double q,
                                                  double threshold);

/// Splits on precomputed flags (e.g. the union over several layers).
[[nodiscard]] PrefilterResult apply_prefilter(const DistanceMatrix &d,
                                              const std::vector<bool> &flags);

} // namespace bdc
