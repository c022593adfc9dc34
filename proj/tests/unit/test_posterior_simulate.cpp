#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/gamma.hpp>

#include "doctest.h"

#include "bdc/kmedoids.hpp"
#include "bdc/posterior.hpp"
#include "bdc/simulate.hpp"
#include "../support/oracles.hpp"

using namespace bdc;

namespace {

Partition part(std::vector<std::size_t> z) {
  return Partition::from_labels(std::span<const std::size_t>(z));
}

std::vector<std::size_t> random_labels(std::size_t n, std::size_t k, std::mt19937_64 &rng) {
  std::uniform_int_distribution<std::size_t> u(0, k - 1);
  std::vector<std::size_t> z(n);
  for (auto &v : z) v = u(rng);
  return z;
}

// VI by explicit pairwise entropy sums over the joint label table.
double brute_vi(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  const double n = static_cast<double>(a.size());
  std::map<std::size_t, double> pa;
  std::map<std::size_t, double> pb;
  std::map<std::pair<std::size_t, std::size_t>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[{a[i], b[i]}] += 1.0 / n;
  }
  double vi = 0.0;
  for (const auto &[key, p] : pab) {
    vi -= p * (std::log(p / pa[key.first]) + std::log(p / pb[key.second]));
  }
  return vi;
}

} // namespace

TEST_CASE("metrics on identical partitions") {
  const auto p = part({0, 0, 1, 2, 2});
  CHECK(rand_index(p, p) == 1.0);
  CHECK(adjusted_rand(p, p) == doctest::Approx(1.0));
  CHECK(variation_of_information(p, p) == doctest::Approx(0.0));
}

TEST_CASE("metrics worked values") {
  CHECK(rand_index(part({0, 0, 1}), part({0, 1, 1})) == doctest::Approx(1.0 / 3.0));
  const auto singletons = part({0, 1, 2, 3});
  const auto one = part({0, 0, 0, 0});
  CHECK(adjusted_rand(singletons, one) == doctest::Approx(0.0));
  CHECK(variation_of_information(singletons, one) == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS((void)rand_index(part({0, 1}), part({0, 1, 2})), Error);
}

TEST_CASE("metric properties on random partitions") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 11);
    const auto a = random_labels(n, 4, rng);
    const auto b = random_labels(n, 3, rng);
    const auto c = random_labels(n, 5, rng);
    const auto pa = part(a);
    const auto pb = part(b);
    const auto pc = part(c);
    // ARI is invariant to relabelling either argument.
    std::vector<std::size_t> relabel(5);
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin(), relabel.end(), rng);
    std::vector<std::size_t> a2(a);
    for (auto &v : a2) v = relabel[v];
    CHECK(adjusted_rand(part(a2), pb) == doctest::Approx(adjusted_rand(pa, pb)));
    CHECK(adjusted_rand(pa, pb) <= 1.0 + 1e-12);
    const double vab = variation_of_information(pa, pb);
    CHECK(vab == doctest::Approx(brute_vi(a, b)).epsilon(1e-12));
    CHECK(vab == doctest::Approx(variation_of_information(pb, pa)).epsilon(1e-12));
    CHECK(variation_of_information(pa, pc) <= vab + variation_of_information(pb, pc) + 1e-12);
    CHECK(rand_index(pa, pb) >= 0.0);
    CHECK(rand_index(pa, pb) <= 1.0);
  }
}

TEST_CASE("co-clustering counts") {
  const LabelDraws one{{0, 0, 1}};
  const auto s1 = coclustering(one);
  CHECK(s1(0, 1) == 1.0);
  CHECK(s1(0, 2) == 0.0);
  const LabelDraws two{{0, 0, 1}, {0, 1, 1}};
  const auto s2 = coclustering(two);
  CHECK(s2(0, 1) == 0.5);
  CHECK(s2(1, 2) == 0.5);
  CHECK_THROWS_AS((void)coclustering(LabelDraws{}), Error);
}

TEST_CASE("co-clustering of a two-state mixture is within binomial error") {
  std::mt19937_64 rng(2);
  const std::vector<std::size_t> a{0, 0, 0, 1, 1, 1};
  const std::vector<std::size_t> b{0, 1, 1, 1, 2, 2};
  LabelDraws draws;
  const double w = 0.3;
  std::bernoulli_distribution pick(w);
  for (int i = 0; i < 1000; ++i) draws.push_back(pick(rng) ? a : b);
  const auto s = coclustering(draws);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(s(j, j) == 1.0);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(s(j, k) == s(k, j));
      CHECK(s(j, k) >= 0.0);
      CHECK(s(j, k) <= 1.0);
      const double truth = w * (a[j] == a[k]) + (1 - w) * (b[j] == b[k]);
      const double se = std::sqrt(std::max(truth * (1 - truth), 1e-12) / 1000.0);
      CHECK(std::abs(s(j, k) - truth) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("point estimate") {
  const LabelDraws same{{0, 0, 1}, {1, 1, 0}, {0, 0, 1}};
  CHECK(point_estimate(same).same_grouping(part({0, 0, 1})));
  // Draw two is one swap from each of the others.
  const LabelDraws three{{0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 1, 1}, {0, 1, 1, 1, 1, 1}};
  CHECK(point_estimate(three).same_grouping(part({0, 0, 1, 1, 1, 1})));
  CHECK_THROWS_AS((void)point_estimate(LabelDraws{}), Error);
}

TEST_CASE("point estimate minimizes mean VI over the draws") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    LabelDraws draws;
    for (int i = 0; i < 15; ++i) draws.push_back(random_labels(7, 3, rng));
    draws.push_back(draws[3]);
    const auto est = point_estimate(draws);
    double best = std::numeric_limits<double>::infinity();
    for (const auto &c : draws) {
      double s = 0.0;
      for (const auto &o : draws) s += brute_vi(c, o);
      best = std::min(best, s);
    }
    double got = 0.0;
    const auto el = est.labels();
    const std::vector<std::size_t> e(el.begin(), el.end());
    for (const auto &o : draws) got += brute_vi(e, o);
    CHECK(got == doctest::Approx(best).epsilon(1e-10));
    // Reordering the draws gives an estimate with the same score.
    LabelDraws rev(draws.rbegin(), draws.rend());
    const auto er = point_estimate(rev);
    double got_r = 0.0;
    const std::vector<std::size_t> e2(er.labels().begin(), er.labels().end());
    for (const auto &o : draws) got_r += brute_vi(e2, o);
    CHECK(got_r == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("K posterior") {
  const LabelDraws constant{{0, 1, 1}, {0, 0, 1}};
  const auto c = k_posterior(constant);
  CHECK(c.pmf.at(2) == 1.0);
  CHECK(c.sd == 0.0);
  const LabelDraws mixed{{0, 0, 1}, {0, 1, 1}, {0, 1, 2}, {2, 1, 0}};
  const auto m = k_posterior(mixed);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.sd == doctest::Approx(0.5773502692).epsilon(1e-9));
  TraceSet empty;
  CHECK_THROWS_AS((void)k_posterior(empty, 0), Error);
}

TEST_CASE("standard simplex centers") {
  const auto c2 = centers_standard_simplex(2, 2);
  CHECK(c2 == PointMatrix{{1, 0}, {0, 1}});
  const auto c10 = centers_standard_simplex(10, 10);
  const auto d = euclidean_distances(c10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(c10[i][i] == 1.0);
    for (std::size_t j = 0; j < 10; ++j) {
      if (i != j) CHECK(d(i, j) == doctest::Approx(std::sqrt(2.0)));
    }
  }
  CHECK_THROWS_AS((void)centers_standard_simplex(3, 2), Error);
}

TEST_CASE("simulation: label copying") {
  SimConfig sc;
  sc.alpha_s = 1.0;
  const auto full = simulate_two_layer(sc);
  CHECK(full.z1_true == full.z2_true);
  for (double alpha : {0.0, 0.3, 0.7}) {
    sc.alpha_s = alpha;
    sc.seed = 5;
    const auto sim = simulate_two_layer(sc);
    std::size_t same = 0;
    for (std::size_t i = 0; i < sc.n; ++i) same += sim.z1_true[i] == sim.z2_true[i];
    CHECK(same >= static_cast<std::size_t>(std::floor(alpha * static_cast<double>(sc.n))));
    // Layer 2 keeps the layer-1 label counts.
    auto a = sim.z1_true;
    auto b = sim.z2_true;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("simulation: reproducible and valid") {
  SimConfig sc;
  sc.seed = 77;
  sc.alpha_s = 0.5;
  const auto a = simulate_two_layer(sc);
  const auto b = simulate_two_layer(sc);
  CHECK(a.d1 == b.d1);
  CHECK(a.d2 == b.d2);
  CHECK(a.z2_true == b.z2_true);
  CHECK(a.d1.size() == 100u);
  CHECK(a.x1.size() == 100u);
  CHECK(a.x1[0].size() == 10u);
  sc.sigma_s = 0.0;
  CHECK_THROWS_AS((void)simulate_two_layer(sc), Error);
  sc.sigma_s = 0.1;
  sc.alpha_s = 1.5;
  CHECK_THROWS_AS((void)simulate_two_layer(sc), Error);
}

TEST_CASE("simulation: PAM recovers well-separated clusters") {
  int good = 0;
  for (int rep = 0; rep < 10; ++rep) {
    SimConfig sc;
    sc.seed = 300 + static_cast<std::uint64_t>(rep);
    sc.dirichlet_alpha = 10.0;
    const auto sim = simulate_two_layer(sc);
    const auto r = pam(sim.d1, 10);
    if (adjusted_rand(r.labels, part(sim.z1_true)) >= 0.9) ++good;
  }
  CHECK(good == 10);
}

TEST_CASE("gamma-quantile transform") {
  std::mt19937_64 rng(6);
  const auto d = oracle::random_distances(30, rng);
  const auto t = gamma_quantile_transform(d);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(t(i, i) == 0.0);
    for (std::size_t j = 0; j < 30; ++j) {
      if (i == j) continue;
      CHECK(t(i, j) > 0.0);
      CHECK(std::isfinite(t(i, j)));
      CHECK(t(i, j) == t(j, i));
    }
  }
  // Order preserving.
  for (int k = 0; k < 200; ++k) {
    std::uniform_int_distribution<std::size_t> u(0, 29);
    const std::size_t a = u(rng), b = u(rng), c = u(rng), e = u(rng);
    if (a == b || c == e) continue;
    if (d(a, b) < d(c, e)) CHECK(t(a, b) <= t(c, e));
  }
  const auto flat = DistanceMatrix::validate(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  CHECK_THROWS_AS((void)gamma_quantile_transform(flat), Error);
}

TEST_CASE("gamma-quantile transform of normal inputs is Gamma(3, 5)") {
  // 450 objects give 101025 off-diagonal pairs.
  const std::size_t n = 450;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(10.0, 1.0);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = z(rng);
  }
  const auto t = gamma_quantile_transform(DistanceMatrix::validate(n, v), 3.0, 5.0);
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) x.push_back(t(i, j));
  }
  std::sort(x.begin(), x.end());
  const boost::math::gamma_distribution<double> g(3.0, 1.0 / 5.0);
  double ks = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::cdf(g, x[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / m),
                   std::abs(f - static_cast<double>(i + 1) / m)});
  }
  CHECK(ks < 0.02);
}
