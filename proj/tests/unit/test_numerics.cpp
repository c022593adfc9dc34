#include <cmath>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"

#include "bdc/numerics.hpp"

using namespace bdc;
using namespace bdc::numerics;

namespace {

// Kummer connection formula; valid for non-integer b.
// Power series for 1F1, long double; fine for the small |x| used here.
long double kummer_m(long double a, long double b, long double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < 500; ++n) {
    term *= (a + n) / (b + n) * x / (n + 1);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

double tricomi_by_kummer(double a, double b, double x) {
  using boost::math::tgamma;
  const long double m1 = kummer_m(a, b, x);
  const long double m2 = kummer_m(a - b + 1.0L, 2.0L - b, x);
  return static_cast<double>(tgamma(1.0 - b) / tgamma(a - b + 1.0) * m1 +
                             tgamma(b - 1.0) / tgamma(a) * std::pow(x, 1.0 - b) * m2);
}

} // namespace

TEST_CASE("log-gamma special values and Boost agreement") {
  CHECK(log_gamma_fn(1.0) == 0.0);
  CHECK(log_gamma_fn(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  for (double x : {1e-6, 0.01, 0.3, 2.5, 12.3, 100.0, 1e4, 1e6}) {
    CHECK(log_gamma_fn(x) == doctest::Approx(boost::math::lgamma(x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS((void)log_gamma_fn(0.0), Error);
  CHECK_THROWS_AS((void)log_gamma_fn(-1.0), Error);
}

TEST_CASE("log-beta and log-binomial") {
  CHECK(log_beta(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-14));
  CHECK(log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(log_binomial(10, 0) == 0.0);
}

TEST_CASE("gamma log-density") {
  CHECK(log_gamma_density(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(log_gamma_density(0.5, 2.0, 3.0) ==
        doctest::Approx(std::log(4.5) - 1.5).epsilon(1e-14));
  // Shape below one diverges toward zero.
  CHECK(log_gamma_density(1e-8, 0.5, 2.0) > log_gamma_density(1e-4, 0.5, 2.0));
  CHECK(std::isfinite(log_gamma_density(1e-12, 0.5, 2.0)));
  CHECK_THROWS_AS((void)log_gamma_density(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS((void)log_gamma_density(1.0, -1.0, 1.0), Error);
}

TEST_CASE("gamma log-density integrates to one") {
  for (double shape : {0.5, 1.0, 2.0, 5.0}) {
    auto f = [shape](double x) { return std::exp(log_gamma_density(x, shape, 1.7)); };
    const double total = integrate_to_infinity(f, 0.0, {200000, 1e-10, 0.0}).value;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("gamma quantile") {
  CHECK(gamma_quantile(0.5, 1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  const boost::math::gamma_distribution<double> g35(3.0, 1.0 / 5.0);
  CHECK(gamma_quantile(0.5, 3.0, 5.0) ==
        doctest::Approx(boost::math::quantile(g35, 0.5)).epsilon(1e-12));
  CHECK(gamma_quantile(0.5, 3.0, 5.0) == doctest::Approx(0.534812).epsilon(1e-6));
  CHECK(gamma_quantile(1e-12, 2.0, 1.0) < 1e-5);
  CHECK(gamma_quantile(1.0 - 1e-12, 2.0, 1.0) > 25.0);
  CHECK_THROWS_AS((void)gamma_quantile(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS((void)gamma_quantile(1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS((void)gamma_quantile(1.5, 1.0, 1.0), Error);
}

TEST_CASE("gamma quantile inverts the CDF on a grid") {
  for (double shape : {0.3, 1.0, 3.0, 20.0}) {
    for (double rate : {0.5, 5.0}) {
      for (double p : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1 - 1e-6}) {
        const double x = gamma_quantile(p, shape, rate);
        CHECK(gamma_cdf(x, shape, rate) == doctest::Approx(p).epsilon(1e-9));
        const boost::math::gamma_distribution<double> g(shape, 1.0 / rate);
        CHECK(x == doctest::Approx(boost::math::quantile(g, p)).epsilon(1e-10));
        const double xu = gamma_quantile_upper(p, shape, rate);
        CHECK(xu == doctest::Approx(boost::math::quantile(boost::math::complement(g, p)))
                        .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("incomplete gamma against Boost") {
  for (double a : {0.5, 1.0, 4.0, 30.0}) {
    for (double x : {0.01, 0.5, 3.0, 10.0, 60.0}) {
      CHECK(regularized_gamma_p(a, x) ==
            doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-12));
      CHECK(regularized_gamma_q(a, x) ==
            doctest::Approx(boost::math::gamma_q(a, x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("normal CDF tails") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-1.0) + normal_cdf_upper(-1.0) == doctest::Approx(1.0));
  CHECK(normal_cdf_upper(10.0) > 0.0);
}

TEST_CASE("adaptive quadrature") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  // Integrable endpoint singularity.
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                           {200000, 1e-10, 0.0});
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS((void)integrate([](double x) { return std::sin(1.0 / x) / x; }, 0.0, 1.0,
                                  {16, 1e-14, 0.0}),
                  NonConvergentQuadrature);
  CHECK_THROWS_AS((QuadratureSpec{8, 1e-8, 0.0}.validate()), Error);
}

TEST_CASE("non-convergence carries the node count") {
  try {
    (void)integrate([](double x) { return std::sin(1.0 / x) / x; }, 0.0, 1.0, {30, 1e-14, 0.0});
    FAIL("expected NonConvergentQuadrature");
  } catch (const NonConvergentQuadrature &e) {
    CHECK(e.nodes() >= 15u);
  }
}

TEST_CASE("Tricomi U: exponential-integral identity") {
  for (double x : {0.01, 0.5, 1.0, 4.0, 30.0}) {
    const double expected = std::exp(x) * boost::math::expint(1, x);
    CHECK(tricomi_u(1.0, 1.0, x) == doctest::Approx(expected).epsilon(1e-8));
  }
  CHECK(tricomi_u(1.0, 1.0, 1.0) == doctest::Approx(0.5963473623).epsilon(1e-9));
}

TEST_CASE("Tricomi U: Kummer connection formula at non-integer b") {
  for (double a : {0.5, 1.0, 2.0, 3.5}) {
    for (double b : {-1.5, -0.5, 0.3, 0.5}) {
      for (double x : {0.1, 1.0, 5.0}) {
        CHECK(tricomi_u(a, b, x) == doctest::Approx(tricomi_by_kummer(a, b, x)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("Tricomi U: a = 1 recurrence and large-x asymptotics") {
  // U(a,b,x) - a U(a+1,b,x) - U(a,b-1,x) = 0
  for (double b : {-0.7, 0.2, 1.5}) {
    for (double x : {0.3, 2.0}) {
      const double r = tricomi_u(1.0, b, x) - tricomi_u(2.0, b, x) - tricomi_u(1.0, b - 1.0, x);
      CHECK(std::abs(r) < 1e-8 * tricomi_u(1.0, b, x));
    }
  }
  const double x = 1e4;
  CHECK(tricomi_u(2.0, 0.5, x) / std::pow(x, -2.0) == doctest::Approx(1.0).epsilon(0.01));
  // Ten times the node budget gives the same answer.
  CHECK(tricomi_u(1.0, 0.4, 0.7) ==
        doctest::Approx(tricomi_u(1.0, 0.4, 0.7, {600000, 1e-13, 0.0})).epsilon(1e-9));
}

TEST_CASE("Tricomi U is positive and decreasing in x") {
  for (double a : {0.5, 1.0, 3.0}) {
    for (double b : {-2.0, 0.0, 1.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double x = 0.01; x < 50.0; x *= 1.7) {
        const double u = tricomi_u(a, b, x);
        CHECK(u > 0.0);
        CHECK(u < prev);
        prev = u;
      }
    }
  }
  CHECK_THROWS_AS((void)tricomi_u(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS((void)tricomi_u(1.0, 1.0, 0.0), Error);
}

TEST_CASE("log-space helpers") {
  const std::vector<double> v{std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(6.0)));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_add_exp(ninf, 0.0) == 0.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}
