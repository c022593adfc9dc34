#include "bdc/priors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "bdc/metrics.hpp"
#include "bdc/numerics.hpp"

namespace bdc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void MedoidPriorConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::OutOfRangeProbability, "medoid prior p must lie in (0, 1)");
  }
}

double log_medoid_prior(std::size_t k, std::size_t n, const MedoidPriorConfig &cfg) {
  cfg.validate();
  if (k < 1 || k > n) return -kInf;
  const double log_q = std::log1p(-cfg.p);
  // ln(1 - (1-p)^n) without cancellation.
  const double log_norm = std::log(-std::expm1(static_cast<double>(n) * log_q));
  return -numerics::log_binomial(n, k) + std::log(cfg.p) +
         static_cast<double>(k - 1) * log_q - log_norm;
}

double log_medoid_prior(const MedoidSet &medoids, const MedoidPriorConfig &cfg) {
  return log_medoid_prior(medoids.size(), medoids.universe(), cfg);
}

void PYConfig::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorCode::InvalidConfig, "PY concentration must be positive");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "PY discount must lie in [0, 1)");
  }
}

double log_rising(double x, std::size_t m, double a) {
  if (m == 0) return 0.0;
  if (a == 0.0) return static_cast<double>(m) * std::log(x);
  if (m <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::log(x + static_cast<double>(i) * a);
    return s;
  }
  // [x]_{m;a} = a^m Gamma(x/a + m) / Gamma(x/a)
  const double r = x / a;
  return static_cast<double>(m) * std::log(a) + numerics::log_gamma_fn(r + static_cast<double>(m)) -
         numerics::log_gamma_fn(r);
}

double log_py_eppf(std::span<const std::size_t> sizes, const PYConfig &cfg) {
  cfg.validate();
  if (sizes.empty()) throw Error(ErrorCode::InvalidConfig, "EPPF needs at least one block");
  std::size_t n = 0;
  double blocks = 0.0;
  for (std::size_t s : sizes) {
    if (s == 0) throw Error(ErrorCode::InvalidConfig, "EPPF block sizes must be positive");
    n += s;
    blocks += log_rising(1.0 - cfg.discount, s - 1, 1.0);
  }
  return log_rising(cfg.m + cfg.discount, sizes.size() - 1, cfg.discount) -
         log_rising(cfg.m + 1.0, n - 1, 1.0) + blocks;
}

void AlphaPriorConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::NonPositiveArgument, "alpha prior a, b must be positive");
  }
}

double log_penalty_C(double d, const AlphaPriorConfig &cfg) {
  cfg.validate();
  if (std::isnan(d) || d < 0.0) {
    throw Error(ErrorCode::NonFiniteDistance, "partition distance must be >= 0");
  }
  if (d == 0.0) return 0.0;
  if (std::isinf(d)) return -kInf;
  return numerics::log_gamma_fn(cfg.a) + numerics::log_tricomi_u(cfg.a, 1.0 - cfg.b, d) -
         numerics::log_beta(cfg.a, cfg.b);
}

double partition_distance(const Partition &t1, const Partition &t2) {
  const double ri = rand_index(t1, t2);
  if (ri <= 0.0) return kInf;
  return 1.0 / ri - 1.0;
}

// ---------------------------------------------------------------------------
// AlphaPosterior
//
// The support is split at 1/2. Below it, cells are geometric in alpha from
// kEdge up; above it, geometric in w = 1 - alpha. Each cell's mass comes from
// 8-point Gauss-Legendre in the log variable; the leftover tails (0, kEdge)
// are integrated as power laws.

namespace {

constexpr double kEdge = 1e-15;
constexpr std::size_t kCellsPerSide = 1024;

constexpr std::array<double, 8> kGlNodes = {
    -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
    -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
    0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
constexpr std::array<double, 8> kGlWeights = {
    0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
    0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
    0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
    0.222381034453374470544355994426241, 0.101228536290376259152531354309962};

// Inverse CDF of a density proportional to x^{e-1} on [lo, hi], lo > 0,
// in a form that stays finite for large |e|.
double power_law_inverse(double lo, double hi, double e, double v) {
  const double span = std::log(hi / lo);
  if (std::abs(e * span) < 1e-10) return lo * std::exp(v * span);
  const double t =
      numerics::log_add_exp(std::log1p(-v), std::log(v) + e * span) / e;
  return std::clamp(lo * std::exp(t), lo, hi);
}

// Fraction of that power-law mass lying below x.
double power_law_fraction(double lo, double hi, double e, double x) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double span = std::log(hi / lo);
  const double r = std::log(x / lo);
  if (std::abs(e * span) < 1e-10) return r / span;
  if (e > 0.0) return std::exp(e * (r - span)) * std::expm1(-e * r) / std::expm1(-e * span);
  return std::expm1(e * r) / std::expm1(e * span);
}

} // namespace

AlphaPosterior::AlphaPosterior(double d, const AlphaPriorConfig &cfg) : d_(d), cfg_(cfg) {
  cfg.validate();
  if (std::isnan(d) || d < 0.0) {
    throw Error(ErrorCode::NonFiniteDistance, "partition distance must be >= 0");
  }
  if (std::isinf(d)) {
    log_mass_ = -kInf;
    return;
  }
  // Cells in increasing alpha: tail near 0, low side, high side, tail near 1.
  const double log_edge = std::log(kEdge);
  const double log_half = std::log(0.5);
  cells_.push_back({0.0, kEdge, false, -kInf, log_edge});
  for (std::size_t i = 0; i < kCellsPerSide; ++i) {
    const double l0 = log_edge + (log_half - log_edge) * static_cast<double>(i) / kCellsPerSide;
    const double l1 =
        log_edge + (log_half - log_edge) * static_cast<double>(i + 1) / kCellsPerSide;
    cells_.push_back({std::exp(l0), i + 1 == kCellsPerSide ? 0.5 : std::exp(l1), false, l0, l1});
  }
  for (std::size_t i = kCellsPerSide; i-- > 0;) {
    const double l0 = log_edge + (log_half - log_edge) * static_cast<double>(i) / kCellsPerSide;
    const double l1 =
        log_edge + (log_half - log_edge) * static_cast<double>(i + 1) / kCellsPerSide;
    cells_.push_back({std::exp(l0), i + 1 == kCellsPerSide ? 0.5 : std::exp(l1), true, l0, l1});
  }
  cells_.push_back({0.0, kEdge, true, -kInf, log_edge});

  std::vector<double> log_masses(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell &cell = cells_[c];
    if (cell.lo == 0.0) {
      const double e = cell.near_one ? cfg_.b : cfg_.a;
      const double lf = log_f(kEdge, cell.near_one);
      log_masses[c] = lf + log_edge - std::log(e);
      if (cell.near_one && d_ > 0.0) log_masses[c] = -kInf;
      continue;
    }
    const double mid = 0.5 * (cell.log_lo + cell.log_hi);
    const double half = 0.5 * (cell.log_hi - cell.log_lo);
    std::array<double, 8> terms{};
    for (std::size_t q = 0; q < 8; ++q) {
      const double u = mid + half * kGlNodes[q];
      terms[q] = log_f(std::exp(u), cell.near_one) + u + std::log(kGlWeights[q] * half);
    }
    log_masses[c] = numerics::log_sum_exp(terms);
  }
  log_mass_ = numerics::log_sum_exp(log_masses);
  cum_.resize(cells_.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    acc += std::exp(log_masses[c] - log_mass_);
    cum_[c] = acc;
  }
  for (auto &v : cum_) v /= acc;
  cum_.back() = 1.0;
}

double AlphaPosterior::log_f(double x, bool near_one) const {
  const double log_alpha = near_one ? std::log1p(-x) : std::log(x);
  const double log_comp = near_one ? std::log(x) : std::log1p(-x);
  double v = (cfg_.a - 1.0) * log_alpha + (cfg_.b - 1.0) * log_comp;
  if (d_ > 0.0) v -= d_ * (near_one ? (1.0 - x) / x : x / (1.0 - x));
  return v;
}

double AlphaPosterior::log_density(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) return -kInf;
  return alpha <= 0.5 ? log_f(alpha, false) : log_f(1.0 - alpha, true);
}

double AlphaPosterior::sample_in_cell(std::size_t c, double v) const {
  const Cell &cell = cells_[c];
  double x = 0.0;
  if (cell.lo == 0.0) {
    const double e = cell.near_one ? cfg_.b : cfg_.a;
    x = kEdge * std::pow(v, 1.0 / e);
  } else {
    const double slope = (log_f(cell.hi, cell.near_one) - log_f(cell.lo, cell.near_one)) /
                         (cell.log_hi - cell.log_lo);
    x = power_law_inverse(cell.lo, cell.hi, slope + 1.0, v);
  }
  return cell.near_one ? 1.0 - x : x;
}

double AlphaPosterior::partial_cell_mass(std::size_t c, double x) const {
  const Cell &cell = cells_[c];
  if (cell.lo == 0.0) {
    const double e = cell.near_one ? cfg_.b : cfg_.a;
    return x <= 0.0 ? 0.0 : std::min(1.0, std::pow(x / kEdge, e));
  }
  const double slope = (log_f(cell.hi, cell.near_one) - log_f(cell.lo, cell.near_one)) /
                       (cell.log_hi - cell.log_lo);
  return power_law_fraction(cell.lo, cell.hi, slope + 1.0, x);
}

double AlphaPosterior::sample(std::mt19937_64 &rng) const {
  if (cells_.empty()) return 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const std::size_t c =
      std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  const double below = c == 0 ? 0.0 : cum_[c - 1];
  const double width = cum_[c] - below;
  const double v = width > 0.0 ? std::clamp((u - below) / width, 0.0, 1.0) : 0.5;
  // Cells on the high side are parameterized by w = 1 - alpha, which runs
  // backwards, so flip v to keep the map monotone in alpha.
  return sample_in_cell(c, cells_[c].near_one ? 1.0 - v : v);
}

double AlphaPosterior::cdf(double alpha) const {
  if (cells_.empty()) return alpha >= 0.0 ? 1.0 : 0.0;
  if (alpha <= 0.0) return 0.0;
  if (alpha >= 1.0) return 1.0;
  double below = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell &cell = cells_[c];
    const double a_lo = cell.near_one ? 1.0 - cell.hi : cell.lo;
    const double a_hi = cell.near_one ? 1.0 - cell.lo : cell.hi;
    const double mass = cum_[c] - below;
    if (alpha >= a_hi) {
      below = cum_[c];
      continue;
    }
    if (alpha <= a_lo) return below;
    const double frac = cell.near_one ? 1.0 - partial_cell_mass(c, 1.0 - alpha)
                                      : partial_cell_mass(c, alpha);
    return below + mass * frac;
  }
  return 1.0;
}

double sample_alpha_posterior(double d, const AlphaPriorConfig &cfg, std::mt19937_64 &rng) {
  return AlphaPosterior(d, cfg).sample(rng);
}

} // namespace bdc
