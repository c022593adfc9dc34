#include "bdc/kmedoids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(const DistanceMatrix &d, std::size_t k) {
  if (k < 1 || k > d.size()) {
    throw Error(ErrorCode::InvalidConfig,
                "k must lie in [1, " + std::to_string(d.size()) + "], got " + std::to_string(k));
  }
}

// Nearest and second-nearest medoid distance per object.
void nearest_two(const DistanceMatrix &d, const std::vector<std::size_t> &med,
                 std::vector<double> &first, std::vector<double> &second,
                 std::vector<std::size_t> &owner) {
  const std::size_t n = d.size();
  first.assign(n, kInf);
  second.assign(n, kInf);
  owner.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < med.size(); ++p) {
      const double v = d(med[p], j);
      if (v < first[j]) {
        second[j] = first[j];
        first[j] = v;
        owner[j] = p;
      } else if (v < second[j]) {
        second[j] = v;
      }
    }
  }
}

template <typename Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit visit) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

} // namespace

double medoid_cost(const DistanceMatrix &d, const MedoidSet &medoids) {
  double cost = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double best = kInf;
    for (std::size_t m : medoids.indices()) best = std::min(best, d(m, j));
    cost += best;
  }
  return cost;
}

PamResult pam(const DistanceMatrix &d, std::size_t k) {
  check_k(d, k);
  const std::size_t n = d.size();
  std::vector<std::size_t> med;
  std::vector<char> is_med(n, 0);
  std::vector<double> nearest(n, kInf);

  // BUILD
  for (std::size_t step = 0; step < k; ++step) {
    double best_gain = -kInf;
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_med[i]) continue;
      double gain = 0.0;
      if (step == 0) {
        for (std::size_t j = 0; j < n; ++j) gain -= d(i, j);
      } else {
        for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - d(i, j));
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    med.push_back(best);
    is_med[best] = 1;
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(best, j));
  }

  // SWAP
  std::vector<double> first;
  std::vector<double> second;
  std::vector<std::size_t> owner;
  std::size_t iterations = 0;
  double scale = 0.0;
  for (double v : d.values()) scale = std::max(scale, v);
  const double tol = 1e-12 * std::max(1.0, scale);
  while (k < n) {
    nearest_two(d, med, first, second, owner);
    double best_delta = -tol;
    std::size_t best_p = k;
    std::size_t best_h = n;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t h = 0; h < n; ++h) {
        if (is_med[h]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double dh = d(h, j);
          if (owner[j] == p) {
            delta += std::min(dh, second[j]) - first[j];
          } else if (dh < first[j]) {
            delta += dh - first[j];
          }
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_p = p;
          best_h = h;
        }
      }
    }
    if (best_p == k) break;
    is_med[med[best_p]] = 0;
    is_med[best_h] = 1;
    med[best_p] = best_h;
    ++iterations;
  }

  PamResult out;
  out.medoids = MedoidSet(med, n);
  out.labels = induce_partition(d, out.medoids);
  out.cost = medoid_cost(d, out.medoids);
  out.iterations = iterations;
  return out;
}

std::vector<double> pam_cost_curve(const DistanceMatrix &d, std::size_t k_lo, std::size_t k_hi) {
  if (k_lo < 1 || k_lo > k_hi || k_hi > d.size()) {
    throw Error(ErrorCode::DegenerateRange, "k range [" + std::to_string(k_lo) + ", " +
                                                std::to_string(k_hi) + "] is not within [1, " +
                                                std::to_string(d.size()) + "]");
  }
  std::vector<double> costs;
  for (std::size_t k = k_lo; k <= k_hi; ++k) costs.push_back(pam(d, k).cost);
  return costs;
}

std::size_t elbow_k(const DistanceMatrix &d, std::size_t k_lo, std::size_t k_hi) {
  const auto costs = pam_cost_curve(d, k_lo, k_hi);
  const std::size_t m = costs.size();
  if (m <= 2) return k_lo;
  const auto [lo_it, hi_it] = std::minmax_element(costs.begin(), costs.end());
  const double range = *hi_it - *lo_it;
  if (!(range > 0.0)) return k_lo;
  // Normalized points (x_i, y_i); chord from the first to the last point.
  auto x = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(m - 1); };
  auto y = [&](std::size_t i) { return (costs[i] - *lo_it) / range; };
  const double dx = x(m - 1) - x(0);
  const double dy = y(m - 1) - y(0);
  const double len = std::hypot(dx, dy);
  std::size_t best = 0;
  double best_dist = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dist = std::abs(dy * (x(i) - x(0)) - dx * (y(i) - y(0))) / len;
    if (dist > best_dist + 1e-12) {
      best_dist = dist;
      best = i;
    }
  }
  return k_lo + best;
}

MapEquivalenceReport map_equivalence_report(const DistanceMatrix &d, std::size_t k) {
  check_k(d, k);
  const std::size_t n = d.size();
  struct Scored {
    std::vector<std::size_t> set;
    double value;
  };
  std::vector<Scored> posterior;
  std::vector<Scored> cost;
  for_each_subset(n, k, [&](const std::vector<std::size_t> &idx) {
    const MedoidSet ms(idx, n);
    const Partition t = induce_partition(d, ms);
    double log_post = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t m = ms[t.label(j)];
      if (m != j) log_post += std::log(std::exp(-d(m, j)));
    }
    posterior.push_back({idx, log_post});
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double best = kInf;
      for (std::size_t m : idx) best = std::min(best, d(m, j));
      c += best;
    }
    cost.push_back({idx, c});
  });
  const double tol = 1e-9;
  double best_post = -kInf;
  double best_cost = kInf;
  for (const auto &s : posterior) best_post = std::max(best_post, s.value);
  for (const auto &s : cost) best_cost = std::min(best_cost, s.value);
  MapEquivalenceReport report;
  for (const auto &s : posterior) {
    if (s.value >= best_post - tol * std::max(1.0, std::abs(best_post))) {
      report.posterior_modes.emplace_back(s.set, n);
    }
  }
  for (const auto &s : cost) {
    if (s.value <= best_cost + tol * std::max(1.0, std::abs(best_cost))) {
      report.kmedoid_optima.emplace_back(s.set, n);
    }
  }
  report.equivalent = report.posterior_modes == report.kmedoid_optima;
  return report;
}

bool map_equivalence_check(const DistanceMatrix &d, std::size_t k) {
  return map_equivalence_report(d, k).equivalent;
}

} // namespace bdc
