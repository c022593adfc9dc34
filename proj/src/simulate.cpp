#include "bdc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bdc/numerics.hpp"

namespace bdc {

void SimConfig::validate() const {
  if (n_clusters < 1 || n < n_clusters) {
    throw Error(ErrorCode::InvalidConfig, "need n >= n_clusters >= 1");
  }
  if (n_clusters > dim) throw Error(ErrorCode::InvalidConfig, "need n_clusters <= dim");
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be positive");
  }
  if (!(alpha_s >= 0.0 && alpha_s <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in [0, 1]");
  }
  if (!(dirichlet_alpha > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "Dirichlet parameter must be positive");
  }
}

PointMatrix centers_standard_simplex(std::size_t k, std::size_t dim) {
  if (k > dim) throw Error(ErrorCode::InvalidConfig, "need k <= dim");
  PointMatrix c(k, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < k; ++i) c[i][i] = 1.0;
  return c;
}

DistanceMatrix euclidean_distances(const PointMatrix &x) {
  const std::size_t n = x.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x[i].size(); ++c) {
        const double diff = x[i][c] - x[j][c];
        s += diff * diff;
      }
      out[i * n + j] = out[j * n + i] = std::sqrt(s);
    }
  }
  return DistanceMatrix::validate(n, std::move(out));
}

namespace {

PointMatrix draw_points(const std::vector<std::size_t> &z, const PointMatrix &centers,
                        double sigma, std::mt19937_64 &rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  PointMatrix x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    x[i] = centers[z[i]];
    for (double &v : x[i]) v += noise(rng);
  }
  return x;
}

} // namespace

SimOutput simulate_two_layer(const SimConfig &cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const PointMatrix centers = centers_standard_simplex(cfg.n_clusters, cfg.dim);

  std::gamma_distribution<double> gamma(cfg.dirichlet_alpha, 1.0);
  std::vector<double> weights(cfg.n_clusters);
  for (double &w : weights) w = gamma(rng);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  SimOutput out;
  out.z1_true.resize(cfg.n);
  for (auto &z : out.z1_true) z = pick(rng);

  // floor(n alpha) objects keep their label; the rest receive a random
  // permutation of their own layer-1 labels.
  std::vector<std::size_t> order(cfg.n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto copied =
      static_cast<std::size_t>(std::floor(static_cast<double>(cfg.n) * cfg.alpha_s + 1e-12));
  out.z2_true = out.z1_true;
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(copied), order.end());
  std::vector<std::size_t> shuffled_labels;
  for (std::size_t i : rest) shuffled_labels.push_back(out.z1_true[i]);
  std::shuffle(shuffled_labels.begin(), shuffled_labels.end(), rng);
  for (std::size_t r = 0; r < rest.size(); ++r) out.z2_true[rest[r]] = shuffled_labels[r];

  out.x1 = draw_points(out.z1_true, centers, cfg.sigma_s, rng);
  out.x2 = draw_points(out.z2_true, centers, cfg.sigma_s, rng);
  out.d1 = euclidean_distances(out.x1);
  out.d2 = euclidean_distances(out.x2);
  return out;
}

DistanceMatrix gamma_quantile_transform(const DistanceMatrix &d, double shape, double rate) {
  const std::size_t n = d.size();
  if (n < 3) throw Error(ErrorCode::DegenerateDistances, "need at least two off-diagonal pairs");
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += d(i, j);
      count += 1.0;
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) ss += (d(i, j) - mean) * (d(i, j) - mean);
  }
  const double sd = std::sqrt(ss / (count - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateDistances, "off-diagonal distances are constant");

  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double z = (d(i, j) - mean) / sd;
      // The upper-tail form keeps resolution when Phi(z) is close to one.
      constexpr double tiny = 1e-300;
      const double v =
          z <= 0.0
              ? numerics::gamma_quantile(std::max(tiny, numerics::normal_cdf(z)), shape, rate)
              : numerics::gamma_quantile_upper(std::max(tiny, numerics::normal_cdf_upper(z)),
                                               shape, rate);
      out[i * n + j] = out[j * n + i] = v;
    }
  }
  return DistanceMatrix::validate(n, std::move(out));
}

} // namespace bdc
