#include "bdc/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace bdc {

namespace {

struct Contingency {
  std::size_t n = 0;
  std::vector<double> rows;  // block sizes of t1
  std::vector<double> cols;  // block sizes of t2
  std::vector<double> cells; // nonzero joint counts
};

Contingency contingency(const Partition &t1, const Partition &t2) {
  if (t1.size() != t2.size()) {
    throw Error(ErrorCode::LengthMismatch, "partitions cover different numbers of objects");
  }
  Contingency c;
  c.n = t1.size();
  c.rows.assign(t1.k(), 0.0);
  c.cols.assign(t2.k(), 0.0);
  std::unordered_map<std::size_t, double> joint;
  for (std::size_t i = 0; i < c.n; ++i) {
    const std::size_t a = t1.label(i);
    const std::size_t b = t2.label(i);
    c.rows[a] += 1.0;
    c.cols[b] += 1.0;
    joint[a * t2.k() + b] += 1.0;
  }
  // Summation order must not depend on hash layout.
  std::vector<std::pair<std::size_t, double>> sorted(joint.begin(), joint.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto &[key, v] : sorted) c.cells.push_back(v);
  return c;
}

double pairs(double x) { return 0.5 * x * (x - 1.0); }

} // namespace

double rand_index(const Partition &t1, const Partition &t2) {
  const Contingency c = contingency(t1, t2);
  const double total = pairs(static_cast<double>(c.n));
  if (total <= 0.0) return 1.0;
  double both = 0.0;
  double a = 0.0;
  double b = 0.0;
  for (double v : c.cells) both += pairs(v);
  for (double v : c.rows) a += pairs(v);
  for (double v : c.cols) b += pairs(v);
  // agreements = pairs together in both + pairs apart in both
  return (total + 2.0 * both - a - b) / total;
}

double adjusted_rand(const Partition &t1, const Partition &t2) {
  const Contingency c = contingency(t1, t2);
  const double total = pairs(static_cast<double>(c.n));
  double both = 0.0;
  double a = 0.0;
  double b = 0.0;
  for (double v : c.cells) both += pairs(v);
  for (double v : c.rows) a += pairs(v);
  for (double v : c.cols) b += pairs(v);
  if (total <= 0.0) return 1.0;
  const double expected = a * b / total;
  const double max_index = 0.5 * (a + b);
  const double denom = max_index - expected;
  if (denom == 0.0) return both == expected ? 1.0 : 0.0;
  return (both - expected) / denom;
}

double variation_of_information(const Partition &t1, const Partition &t2) {
  const Contingency c = contingency(t1, t2);
  if (c.n == 0) return 0.0;
  const double n = static_cast<double>(c.n);
  auto entropy = [n](const std::vector<double> &counts) {
    double h = 0.0;
    for (double v : counts) {
      if (v > 0.0) h -= (v / n) * std::log(v / n);
    }
    return h;
  };
  const double vi = 2.0 * entropy(c.cells) - entropy(c.rows) - entropy(c.cols);
  return std::max(0.0, vi);
}

const LabelDraws &layer_draws(const TraceSet &trace, std::size_t layer) {
  if (layer >= 2 || trace.labels[layer].empty()) {
    throw Error(ErrorCode::EmptyTrace, "no retained draws for layer " + std::to_string(layer + 1));
  }
  return trace.labels[layer];
}

CoClusteringMatrix coclustering(const LabelDraws &draws) {
  if (draws.empty()) throw Error(ErrorCode::EmptyTrace, "no draws to summarize");
  const std::size_t n = draws.front().size();
  CoClusteringMatrix out;
  out.n = n;
  std::vector<std::size_t> counts(n * n, 0);
  for (const auto &z : draws) {
    if (z.size() != n) throw Error(ErrorCode::LengthMismatch, "draws differ in length");
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (z[j] == z[k]) ++counts[j * n + k];
      }
    }
  }
  out.s.assign(n * n, 0.0);
  const double m = static_cast<double>(draws.size());
  for (std::size_t j = 0; j < n; ++j) {
    out.s[j * n + j] = 1.0;
    for (std::size_t k = j + 1; k < n; ++k) {
      const double v = static_cast<double>(counts[j * n + k]) / m;
      out.s[j * n + k] = v;
      out.s[k * n + j] = v;
    }
  }
  return out;
}

CoClusteringMatrix coclustering(const TraceSet &trace, std::size_t layer) {
  return coclustering(layer_draws(trace, layer));
}

Partition point_estimate(const LabelDraws &draws) {
  if (draws.empty()) throw Error(ErrorCode::EmptyTrace, "no draws to summarize");
  // Distinct partitions in order of first appearance, with multiplicities.
  std::vector<Partition> unique;
  std::vector<double> weight;
  std::map<std::vector<std::size_t>, std::size_t> index;
  for (const auto &z : draws) {
    Partition p = Partition::from_labels(std::span<const std::size_t>(z));
    auto key = p.canonical_labels();
    auto [it, inserted] = index.emplace(std::move(key), unique.size());
    if (inserted) {
      unique.push_back(std::move(p));
      weight.push_back(0.0);
    }
    weight[it->second] += 1.0;
  }
  // VI(a,b) = 2 H(a,b) - H(a) - H(b). Entropies are computed once per
  // partition and joint entropies from a dense contingency table, each pair
  // visited once.
  const std::size_t u = unique.size();
  const std::size_t n = unique.front().size();
  const double nn = static_cast<double>(n);
  auto h_term = [nn](double c) { return c > 0.0 ? -(c / nn) * std::log(c / nn) : 0.0; };
  std::vector<double> h(u, 0.0);
  std::size_t k_max = 0;
  for (std::size_t a = 0; a < u; ++a) {
    for (std::size_t s : unique[a].sizes()) h[a] += h_term(static_cast<double>(s));
    k_max = std::max(k_max, unique[a].k());
  }
  std::vector<std::size_t> table(k_max * k_max, 0);
  std::vector<std::size_t> touched;
  std::vector<double> score(u, 0.0);
  for (std::size_t a = 0; a < u; ++a) {
    const auto la = unique[a].labels();
    for (std::size_t b = a + 1; b < u; ++b) {
      const auto lb = unique[b].labels();
      touched.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cell = la[i] * k_max + lb[i];
        if (table[cell]++ == 0) touched.push_back(cell);
      }
      double joint = 0.0;
      for (std::size_t cell : touched) {
        joint += h_term(static_cast<double>(table[cell]));
        table[cell] = 0;
      }
      const double vi = std::max(0.0, 2.0 * joint - h[a] - h[b]);
      score[a] += weight[b] * vi;
      score[b] += weight[a] * vi;
    }
  }
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < u; ++a) {
    if (score[a] < best_score - 1e-12 * std::max(1.0, std::abs(score[a]))) {
      best_score = score[a];
      best = a;
    }
  }
  return unique[best];
}

Partition point_estimate(const TraceSet &trace, std::size_t layer) {
  return point_estimate(layer_draws(trace, layer));
}

KPosterior k_posterior(const LabelDraws &draws) {
  if (draws.empty()) throw Error(ErrorCode::EmptyTrace, "no draws to summarize");
  KPosterior out;
  std::vector<double> ks;
  for (const auto &z : draws) {
    std::vector<std::size_t> s(z);
    std::sort(s.begin(), s.end());
    const auto k = static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
    ks.push_back(static_cast<double>(k));
    out.pmf[k] += 1.0;
  }
  const double m = static_cast<double>(ks.size());
  for (auto &[k, p] : out.pmf) p /= m;
  double sum = 0.0;
  for (double k : ks) sum += k;
  out.mean = sum / m;
  if (ks.size() > 1) {
    double ss = 0.0;
    for (double k : ks) ss += (k - out.mean) * (k - out.mean);
    out.sd = std::sqrt(ss / (m - 1.0));
  }
  return out;
}

KPosterior k_posterior(const TraceSet &trace, std::size_t layer) {
  return k_posterior(layer_draws(trace, layer));
}

} // namespace bdc
