#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"

#include "bdc/hyper.hpp"
#include "bdc/kmedoids.hpp"
#include "bdc/metrics.hpp"
#include "bdc/simulate.hpp"
#include "../support/oracles.hpp"

using namespace bdc;

namespace {

double brute_cost(const DistanceMatrix &d, const std::vector<std::size_t> &m) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : m) best = std::min(best, d(i, j));
    s += best;
  }
  return s;
}

double exhaustive_min_cost(const DistanceMatrix &d, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &s : oracle::all_subsets(d.size())) {
    if (s.size() == k) best = std::min(best, brute_cost(d, s));
  }
  return best;
}

} // namespace

TEST_CASE("PAM with k = N has zero cost") {
  std::mt19937_64 rng(1);
  const auto d = oracle::random_distances(7, rng);
  const auto r = pam(d, 7);
  CHECK(r.cost == 0.0);
  CHECK(r.labels.k() == 7u);
}

TEST_CASE("PAM reaches the exhaustive optimum on most small instances") {
  std::mt19937_64 rng(2);
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 5 + static_cast<std::size_t>(rep % 5);
    const std::size_t k = 1 + static_cast<std::size_t>(rep % 3);
    const auto d = oracle::random_distances(n, rng);
    const auto r = pam(d, k);
    const double opt = exhaustive_min_cost(d, k);
    CHECK(r.cost >= opt - 1e-12);
    CHECK(r.cost == doctest::Approx(brute_cost(d, {r.medoids.indices().begin(),
                                                   r.medoids.indices().end()}))
                        .epsilon(1e-9));
    if (r.cost <= opt + 1e-9) ++hits;
  }
  CHECK(hits >= 80);
}

TEST_CASE("PAM separates two blobs and is deterministic") {
  SimConfig sc;
  sc.n = 40;
  sc.n_clusters = 2;
  sc.dim = 2;
  sc.sigma_s = 0.05;
  sc.seed = 4;
  const auto sim = simulate_two_layer(sc);
  const auto r = pam(sim.d1, 2);
  CHECK(adjusted_rand(r.labels, Partition::from_labels(std::span<const std::size_t>(
                                    sim.z1_true))) == doctest::Approx(1.0));
  const auto again = pam(sim.d1, 2);
  CHECK(again.medoids == r.medoids);
  CHECK(again.cost == r.cost);
}

TEST_CASE("PAM cost equals the cost recomputed from its labels") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_distances(25, rng);
    const auto r = pam(d, 4);
    double s = 0.0;
    for (std::size_t j = 0; j < 25; ++j) s += d(r.medoids[r.labels.label(j)], j);
    CHECK(s == doctest::Approx(r.cost).epsilon(1e-9));
    CHECK(medoid_cost(d, r.medoids) == doctest::Approx(r.cost).epsilon(1e-9));
  }
}

TEST_CASE("elbow rule edge cases") {
  // Equidistant objects give a linear cost curve with no knee.
  const std::size_t n = 12;
  std::vector<double> v(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
  const auto flat = DistanceMatrix::validate(n, v);
  CHECK(elbow_k(flat, 2, 6) == 2u);
  std::mt19937_64 rng(4);
  const auto d = oracle::random_distances(10, rng);
  CHECK(elbow_k(d, 2, 2) == 2u);
  CHECK_THROWS_AS((void)elbow_k(d, 3, 2), Error);
  CHECK_THROWS_AS((void)elbow_k(d, 0, 2), Error);
  CHECK_THROWS_AS((void)elbow_k(d, 2, 11), Error);
}

TEST_CASE("elbow finds ten well-separated clusters") {
  int hits = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    SimConfig sc;
    sc.seed = 100 + static_cast<std::uint64_t>(rep);
    // Balanced weights so that all ten clusters are occupied; with
    // Dirichlet(1) weights clusters of one or two objects are common.
    sc.dirichlet_alpha = 10.0;
    const auto sim = simulate_two_layer(sc);
    const std::size_t k = elbow_k(sim.d1, 2, 30);
    if (k >= 9 && k <= 11) ++hits;
  }
  CHECK(hits >= 90);
}

TEST_CASE("MAP correspondence on small instances") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 6 + static_cast<std::size_t>(rep % 3);
    const std::size_t k = 2 + static_cast<std::size_t>(rep % 2);
    const auto d = oracle::random_distances(n, rng);
    const auto report = map_equivalence_report(d, k);
    CHECK(report.equivalent);
    CHECK(map_equivalence_check(d, k));
    const double opt = exhaustive_min_cost(d, k);
    for (const auto &m : report.posterior_modes) {
      CHECK(brute_cost(d, {m.indices().begin(), m.indices().end()}) ==
            doctest::Approx(opt).epsilon(1e-12));
    }
  }
}

TEST_CASE("MAP correspondence reports tied optima") {
  // Two identical pairs: either member of each pair is an optimal medoid.
  const auto d = DistanceMatrix::validate(
      {{0, 1, 5, 5}, {1, 0, 5, 5}, {5, 5, 0, 1}, {5, 5, 1, 0}});
  const auto report = map_equivalence_report(d, 2);
  CHECK(report.equivalent);
  CHECK(report.posterior_modes.size() == 4u);
  CHECK(report.kmedoid_optima.size() == 4u);
}

TEST_CASE("moment hyperparameters: worked sets") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{2, 4};
  MomentDiagnostics diag;
  const auto c = moment_hyperparameters(a, b, &diag);
  CHECK(diag.a_mean == doctest::Approx(2.0));
  CHECK(diag.a_var == doctest::Approx(1.0));
  CHECK(c.delta1 == doctest::Approx(1.0 - 1e-6).epsilon(1e-15));
  CHECK(c.mu == doctest::Approx(3.0 * (1.0 - 1e-6)));
  CHECK(c.beta == doctest::Approx(6.0));
  CHECK(diag.b_var == doctest::Approx(2.0));
  CHECK(c.delta2 == doctest::Approx(4.5));
  CHECK(c.theta_rate == doctest::Approx(1.5));
  CHECK(c.zeta == doctest::Approx(9.0));
  CHECK(c.gamma_rate == doctest::Approx(6.0));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("moment hyperparameters: degenerate sets and clamps") {
  const std::vector<double> flat{2, 2, 2};
  const std::vector<double> b{2, 4};
  CHECK_THROWS_AS((void)moment_hyperparameters(flat, b), Error);
  CHECK_THROWS_AS((void)moment_hyperparameters(b, flat), Error);
  const std::vector<double> one{3};
  CHECK_THROWS_AS((void)moment_hyperparameters(one, b), Error);
  // Overdispersed between set would give delta2 < 1.
  const std::vector<double> wide{0.01, 10.0, 0.02};
  CHECK(moment_hyperparameters(b, wide).delta2 == doctest::Approx(1.0 + 1e-6));
}

TEST_CASE("moment estimates recover a Gamma(0.5) shape") {
  std::mt19937_64 rng(6);
  std::gamma_distribution<double> g(0.5, 1.0 / 3.0);
  std::vector<double> a(1000);
  for (auto &x : a) x = g(rng);
  const std::vector<double> b{2, 4, 3};
  const auto c = moment_hyperparameters(a, b);
  CHECK(c.delta1 >= 0.3);
  CHECK(c.delta1 <= 0.7);
}

TEST_CASE("hyperparameter selection is invariant to object order") {
  SimConfig sc;
  sc.n = 60;
  sc.seed = 9;
  const auto sim = simulate_two_layer(sc);
  const auto h = select_hyperparameters(sim.d1);
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(7);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto hp = select_hyperparameters(sim.d1.permuted(perm));
  CHECK(hp.k_elbow == h.k_elbow);
  CHECK(hp.cfg.delta1 == doctest::Approx(h.cfg.delta1).epsilon(1e-9));
  CHECK(hp.cfg.delta2 == doctest::Approx(h.cfg.delta2).epsilon(1e-9));
  CHECK(hp.cfg.theta_rate == doctest::Approx(h.cfg.theta_rate).epsilon(1e-9));
  CHECK(h.cfg.delta1 < 1.0);
  CHECK(h.cfg.delta2 > 1.0);
  CHECK(h.a_set_size + h.k_elbow == 60u);
  CHECK(h.b_set_size == h.k_elbow * (h.k_elbow - 1) / 2);
  CHECK(default_k_max(100) == 30u);
  CHECK(default_k_max(20) == 10u);
}

TEST_CASE("hyperparameter selection needs four objects") {
  std::mt19937_64 rng(8);
  CHECK_THROWS_AS((void)select_hyperparameters(oracle::random_distances(3, rng)), Error);
}

TEST_CASE("type-7 quantile") {
  CHECK(sample_quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(sample_quantile({5, 1}, 0.0) == 1.0);
  CHECK(sample_quantile({5, 1}, 1.0) == 5.0);
  CHECK(sample_quantile({1, 2, 3, 4, 5}, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("singleton prefilter") {
  std::mt19937_64 rng(9);
  const std::size_t n = 30;
  std::uniform_real_distribution<double> near(0.01, 0.1);
  std::uniform_real_distribution<double> far(0.5, 1.0);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      v[i * n + j] = v[j * n + i] = (i == 7 || j == 7) ? far(rng) : near(rng);
    }
  }
  const auto d = DistanceMatrix::validate(n, v);
  const auto r = singleton_prefilter(d, 0.01, 0.15);
  CHECK(r.singletons == std::vector<std::size_t>{7});
  CHECK(r.kept.size() == n - 1);
  CHECK(r.restricted.size() == n - 1);
  CHECK(singleton_prefilter(d, 0.01, std::numeric_limits<double>::infinity()).singletons.empty());
  CHECK(singleton_prefilter(d, 0.01, 0.0).kept.empty());
  CHECK_THROWS_AS((void)singleton_prefilter(d, 0.0, 1.0), Error);
  std::vector<bool> flags(n, false);
  flags[3] = flags[9] = true;
  CHECK(apply_prefilter(d, flags).singletons == std::vector<std::size_t>{3, 9});
}
