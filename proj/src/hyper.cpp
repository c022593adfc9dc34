#include "bdc/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdc/kmedoids.hpp"

namespace bdc {

namespace {

constexpr double kShapeMargin = 1e-6;
constexpr double kMinVariance = 1e-12;

void moments(std::span<const double> xs, const char *name, double &mean, double &var) {
  if (xs.size() < 2) {
    throw Error(ErrorCode::DegenerateDistances,
                std::string(name) + " set needs at least two distances");
  }
  double s = 0.0;
  for (double x : xs) s += x;
  mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  var = ss / static_cast<double>(xs.size() - 1);
  if (!(var >= kMinVariance) || !(mean > 0.0)) {
    throw Error(ErrorCode::DegenerateDistances,
                std::string(name) + " set has (near) zero variance or mean");
  }
}

} // namespace

LikelihoodConfig moment_hyperparameters(std::span<const double> a, std::span<const double> b,
                                        MomentDiagnostics *diag) {
  MomentDiagnostics m;
  moments(a, "within", m.a_mean, m.a_var);
  moments(b, "between", m.b_mean, m.b_var);
  if (diag) *diag = m;

  LikelihoodConfig cfg;
  cfg.delta1 = std::clamp(m.a_mean * m.a_mean / m.a_var, kShapeMargin, 1.0 - kShapeMargin);
  cfg.mu = cfg.delta1 * static_cast<double>(a.size());
  cfg.beta = 0.0;
  for (double x : a) cfg.beta += x;
  cfg.delta2 = std::max(m.b_mean * m.b_mean / m.b_var, 1.0 + kShapeMargin);
  cfg.theta_rate = m.b_mean / m.b_var;
  cfg.zeta = cfg.delta2 * static_cast<double>(b.size());
  cfg.gamma_rate = 0.0;
  for (double x : b) cfg.gamma_rate += x;
  return cfg;
}

std::size_t default_k_max(std::size_t n) { return std::min<std::size_t>(30, n / 2); }

HyperSelection select_hyperparameters(const DistanceMatrix &d, std::size_t k_lo,
                                      std::size_t k_hi) {
  if (d.size() < 4) {
    throw Error(ErrorCode::DegenerateDistances, "hyperparameter selection needs N >= 4");
  }
  if (k_hi == 0) k_hi = default_k_max(d.size());
  HyperSelection sel;
  sel.k_elbow = elbow_k(d, k_lo, k_hi);
  const PamResult fit = pam(d, sel.k_elbow);
  sel.pam_medoids = fit.medoids;

  std::vector<double> a;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const std::size_t m = fit.medoids[fit.labels.label(j)];
    if (m != j) a.push_back(d.positive(m, j));
  }
  std::vector<double> b;
  const auto med = fit.medoids.indices();
  for (std::size_t i = 0; i < med.size(); ++i) {
    for (std::size_t j = i + 1; j < med.size(); ++j) b.push_back(d.positive(med[i], med[j]));
  }
  sel.a_set_size = a.size();
  sel.b_set_size = b.size();
  sel.cfg = moment_hyperparameters(a, b, &sel.diagnostics);
  return sel;
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::DegenerateDistances, "quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::OutOfRangeProbability, "quantile level must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<bool> singleton_flags(const DistanceMatrix &d, double q, double threshold) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::OutOfRangeProbability, "prefilter quantile must lie in (0, 1)");
  }
  const std::size_t n = d.size();
  std::vector<bool> flags(n, false);
  if (n < 2) return flags;
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(d(i, j));
    }
    flags[i] = sample_quantile(row, q) > threshold;
  }
  return flags;
}

PrefilterResult apply_prefilter(const DistanceMatrix &d, const std::vector<bool> &flags) {
  if (flags.size() != d.size()) {
    throw Error(ErrorCode::LengthMismatch, "prefilter flags differ in length from matrix");
  }
  PrefilterResult out;
  for (std::size_t i = 0; i < d.size(); ++i) (flags[i] ? out.singletons : out.kept).push_back(i);
  out.restricted = d.subset(out.kept);
  return out;
}

PrefilterResult singleton_prefilter(const DistanceMatrix &d, double q, double threshold) {
  return apply_prefilter(d, singleton_flags(d, q, threshold));
}

} // namespace bdc
