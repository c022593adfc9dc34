#include "bdc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <math.h>
#include <queue>
#include <string>
#include <vector>

namespace bdc::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// Kronrod abscissae (descending), Kronrod weights, and the embedded 7-point
// Gauss weights for nodes xgk[1], xgk[3], xgk[5], 0.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment &other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)> &f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double x = half * kXgk[j];
    f1[j] = f(centre - x);
    f2[j] = f(centre + x);
    const double sum = f1[j] + f2[j];
    res_k += kWgk[j] * sum;
    res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double scale = std::abs(half);
  res_abs *= scale;
  res_asc *= scale;
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * res_abs, err);
  return {lo, hi, res_k * half, err};
}

} // namespace

void QuadratureSpec::validate() const {
  if (max_nodes < 16 || !(rel_tol > 0.0) || abs_tol < 0.0) {
    throw Error(ErrorCode::InvalidConfig,
                "quadrature spec needs max_nodes >= 16 and rel_tol > 0");
  }
}

QuadratureResult integrate(const std::function<double(double)> &f, double lo,
                           double hi, const QuadratureSpec &spec) {
  spec.validate();
  if (lo == hi) return {0.0, 0.0, 0};
  std::priority_queue<Segment> open;
  std::vector<Segment> frozen;
  Segment first = kronrod15(f, lo, hi);
  std::size_t nodes = 15;
  double total = first.value;
  double total_err = first.error;
  open.push(first);

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (total_err > tolerance() && !open.empty()) {
    if (nodes + 30 > spec.max_nodes) {
      throw NonConvergentQuadrature(nodes, total, total_err);
    }
    Segment worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi)) ||
        std::abs(worst.hi - worst.lo) <= 4.0 * kEps * std::max(std::abs(mid), kTiny)) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = kronrod15(f, worst.lo, mid);
    Segment right = kronrod15(f, mid, worst.hi);
    nodes += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }
  // Re-sum to shed accumulated update drift.
  double value = 0.0;
  double error = 0.0;
  for (const auto &s : frozen) {
    value += s.value;
    error += s.error;
  }
  while (!open.empty()) {
    value += open.top().value;
    error += open.top().error;
    open.pop();
  }
  if (!std::isfinite(value)) throw NonConvergentQuadrature(nodes, value, error);
  if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) * 1.0001 &&
      error > 1e3 * kEps * std::abs(value)) {
    throw NonConvergentQuadrature(nodes, value, error);
  }
  return {value, error, nodes};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)> &f,
                                       double lo, const QuadratureSpec &spec) {
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double s = lo + t / one_minus;
    const double v = f(s);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

double log_gamma_fn(double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument,
                "log_gamma_fn needs x > 0, got " + std::to_string(x));
  }
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) {
  return log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b);
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  int sign = 0;
  const auto dn = static_cast<double>(n);
  const auto dk = static_cast<double>(k);
  return ::lgamma_r(dn + 1.0, &sign) - ::lgamma_r(dk + 1.0, &sign) -
         ::lgamma_r(dn - dk + 1.0, &sign);
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0) || !(shape > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument,
                "log_gamma_density needs positive x, shape, rate");
  }
  return shape * std::log(rate) - log_gamma_fn(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

namespace {

// Series for P(a, x), valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma_fn(a)) * sum;
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma_fn(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument,
                "incomplete gamma needs a > 0 and x >= 0");
  }
}

} // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double gamma_cdf(double x, double shape, double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "rate must be > 0");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(shape, rate * x);
}

namespace {

// Solves for y = rate * x. `upper` selects the complementary equation
// Q(a, y) = target, which stays well conditioned when the CDF is near one.
double solve_gamma_quantile(double target, double shape, bool upper) {
  auto residual = [&](double y) {
    return upper ? target - regularized_gamma_q(shape, y)
                 : regularized_gamma_p(shape, y) - target;
  };
  // residual is increasing in y in both forms.
  double lo = 0.0;
  double hi = std::max(1.0, shape);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  const double log_norm = log_gamma_fn(shape);
  double y = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double r = residual(y);
    if (r == 0.0) return y;
    if (r < 0.0) lo = y;
    else hi = y;
    const double log_density = -y + (shape - 1.0) * std::log(y) - log_norm;
    const double density = std::exp(log_density);
    double next = density > 0.0 ? y - r / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - y);
    y = next;
    if (step <= 4.0 * kEps * y || hi - lo <= 4.0 * kEps * y) break;
  }
  return y;
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::OutOfRangeProbability,
                "probability must lie in (0, 1), got " + std::to_string(p));
  }
}

} // namespace

double gamma_quantile(double p, double shape, double rate) {
  check_probability(p);
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument, "shape and rate must be > 0");
  }
  const double y = p <= 0.5 ? solve_gamma_quantile(p, shape, false)
                            : solve_gamma_quantile(1.0 - p, shape, true);
  return y / rate;
}

double gamma_quantile_upper(double q, double shape, double rate) {
  check_probability(q);
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument, "shape and rate must be > 0");
  }
  const double y = q < 0.5 ? solve_gamma_quantile(q, shape, true)
                           : solve_gamma_quantile(1.0 - q, shape, false);
  return y / rate;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_cdf_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double log_tricomi_u(double a, double b, double x, const QuadratureSpec &spec) {
  if (!(a > 0.0) || !(x > 0.0)) {
    throw Error(ErrorCode::NonPositiveArgument, "tricomi_u needs a > 0 and x > 0");
  }
  // Rescaled by t = s/x so the integrand lives on s = O(1) for every x. The
  // factor (1+s/x)^c is divided by its value at s = 1 to avoid underflow
  // when x is small.
  const double c = b - a - 1.0;
  const double shift = c * std::log1p(1.0 / x);
  QuadratureResult r;
  double log_prefactor = -a * std::log(x) + shift;
  if (a < 1.0) {
    // s = u^{1/a} absorbs the s^{a-1} endpoint singularity.
    const double inv_a = 1.0 / a;
    r = integrate_to_infinity(
        [&](double u) {
          const double s = std::pow(u, inv_a);
          return std::exp(-s + c * std::log1p(s / x) - shift);
        },
        0.0, spec);
    log_prefactor -= log_gamma_fn(a + 1.0);
  } else {
    r = integrate_to_infinity(
        [&](double s) {
          if (s == 0.0) return a == 1.0 ? std::exp(-shift) : 0.0;
          return std::exp(-s + (a - 1.0) * std::log(s) + c * std::log1p(s / x) - shift);
        },
        0.0, spec);
    log_prefactor -= log_gamma_fn(a);
  }
  return log_prefactor + std::log(r.value);
}

double tricomi_u(double a, double b, double x, const QuadratureSpec &spec) {
  return std::exp(log_tricomi_u(a, b, x, spec));
}

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

} // namespace bdc::numerics
