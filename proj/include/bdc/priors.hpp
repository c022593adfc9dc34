#pragma once

// Priors: the truncated-geometric medoid-set prior, the Pitman-Yor EPPF, and
// the Beta-marginalized agreement penalty of the joint two-layer model.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "bdc/core.hpp"

namespace bdc {

struct MedoidPriorConfig {
  double p = 0.5; ///< truncated-geometric parameter on K
  void validate() const;
};

/// -ln C(n, K) + ln TGeom(K; p), TGeom truncated to {1..n}.
[[nodiscard]] double log_medoid_prior(std::size_t k, std::size_t n,
                                      const MedoidPriorConfig &cfg);
[[nodiscard]] double log_medoid_prior(const MedoidSet &medoids, const MedoidPriorConfig &cfg);

struct PYConfig {
  double m = 1.0;         ///< concentration
  double discount = 0.01; ///< in [0, 1)
  void validate() const;
};

/// ln [x]_{m;a} = ln prod_{i<m} (x + i a).
[[nodiscard]] double log_rising(double x, std::size_t m, double a);

[[nodiscard]] double log_py_eppf(std::span<const std::size_t> sizes, const PYConfig &cfg);

struct AlphaPriorConfig {
  double a = 1.0;
  double b = 1.0;
  void validate() const;
};

/// ln of int_0^1 exp(-d alpha/(1-alpha)) Beta(alpha; a, b) d alpha.
/// Zero at d = 0, -inf at d = +inf; throws NonFiniteDistance for NaN or d < 0.
[[nodiscard]] double log_penalty_C(double d, const AlphaPriorConfig &cfg);

/// 1/RI - 1 with the unadjusted Rand index; +inf when RI = 0.
[[nodiscard]] double partition_distance(const Partition &t1, const Partition &t2);

/// Posterior of alpha given a partition distance d, tabulated once and
/// sampled by inverse CDF.
class AlphaPosterior {
public:
  AlphaPosterior(double d, const AlphaPriorConfig &cfg);

  [[nodiscard]] double sample(std::mt19937_64 &rng) const;
  [[nodiscard]] double cdf(double alpha) const;
  /// ln of the unnormalized density's integral, i.e. ln B(a,b) + ln C(d).
  [[nodiscard]] double log_mass() const noexcept { return log_mass_; }
  [[nodiscard]] double log_density(double alpha) const; ///< unnormalized

private:
  struct Cell {
    double lo;
    double hi;
    bool near_one; // cell bounds are in w = 1 - alpha
    double log_lo;
    double log_hi;
  };

  [[nodiscard]] double log_f(double x, bool near_one) const;
  [[nodiscard]] double sample_in_cell(std::size_t c, double u) const;
  [[nodiscard]] double partial_cell_mass(std::size_t c, double x) const;

  double d_;
  AlphaPriorConfig cfg_;
  std::vector<Cell> cells_;
  std::vector<double> cum_; // normalized CDF at each cell's upper edge
  double log_mass_ = 0.0;
};

[[nodiscard]] double sample_alpha_posterior(double d, const AlphaPriorConfig &cfg,
                                            std::mt19937_64 &rng);

} // namespace bdc
