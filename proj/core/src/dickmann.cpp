#include "multcorr/dickmann.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "multcorr/accumulate.hpp"
#include "multcorr/errors.hpp"
#include "multcorr/quadrature.hpp"

namespace multcorr {
namespace {

constexpr int kDefaultNodes = 64;
constexpr int kDefaultSamples = 400000;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Monotone-cubic (Fritsch-Carlson) slopes for uniformly spaced data.
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y[i + 1] - y[i]) / h;

  auto clamp_end = [](double cand, double s0) {
    if (s0 == 0.0 || cand * s0 <= 0.0) return 0.0;
    if (std::fabs(cand) > 3.0 * std::fabs(s0)) return 3.0 * s0;
    return cand;
  };
  d[0] = clamp_end(1.5 * sec[0] - 0.5 * (n > 2 ? sec[1] : sec[0]), sec[0]);
  d[n - 1] = clamp_end(
      1.5 * sec[n - 2] - 0.5 * (n > 2 ? sec[n - 3] : sec[n - 2]), sec[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = sec[i - 1], b = sec[i];
    d[i] = (a * b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
  }
  return d;
}

}  // namespace

RhoTable build_rho(double step, double u_max, double tol) {
  if (!(step > 0.0) || step > 0.01) {
    throw std::domain_error("grid step must lie in (0, 0.01], got " + fmt(step));
  }
  if (!(u_max >= 2.0)) {
    throw std::domain_error("u_max must be at least 2, got " + fmt(u_max));
  }
  if (!(tol > 0.0)) {
    throw std::domain_error("residual tolerance must be positive");
  }

  // Snap the spacing to 1/M so that u - 1 is exactly M grid points back.
  const std::size_t M =
      static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  const double h = 1.0 / static_cast<double>(M);
  const std::size_t N =
      static_cast<std::size_t>(std::ceil(u_max / h - 1e-9));

  RhoTable table;
  table.step = h;
  table.u_max = static_cast<double>(N) * h;
  table.tol = tol;
  table.values.assign(N + 1, 1.0);

  for (std::size_t i = M + 1; i <= N; ++i) {
    const double u = static_cast<double>(i) * h;
    // Implicit trapezoid for u*rho(u) = integral_{u-1}^{u} rho: the window
    // sum is rebuilt from scratch each step so no cumulative drift enters.
    NeumaierSum w;
    w.add(0.5 * table.values[i - M]);
    for (std::size_t j = i - M + 1; j < i; ++j) w.add(table.values[j]);
    const double rhs = h * w.value();
    const double rho_i = rhs / (u - 0.5 * h);
    if (!std::isfinite(rho_i) || rho_i <= 0.0) {
      throw NumericError("delay-equation step failed at grid point u = " +
                         fmt(u));
    }
    table.values[i] = rho_i;
    const double residual =
        std::fabs(u * rho_i - (rhs + 0.5 * h * rho_i));
    if (residual > tol) {
      throw NumericError("delay-identity residual " + fmt(residual) +
                         " exceeds tolerance at grid point u = " + fmt(u));
    }
  }

  table.slopes = pchip_slopes(table.values, h);
  for (double d : table.slopes) {
    table.max_slope = std::max(table.max_slope, std::fabs(d));
  }
  return table;
}

double rho_at(const RhoTable& table, double u, bool* truncated) {
  if (truncated) *truncated = false;
  if (!(u >= 0.0)) {
    throw std::domain_error("rho argument must be nonnegative, got " + fmt(u));
  }
  if (u <= 1.0) return 1.0;
  if (u > table.u_max) {
    if (truncated) *truncated = true;
    return 0.0;
  }
  const double h = table.step;
  std::size_t i = static_cast<std::size_t>(u / h);
  if (i >= table.values.size() - 1) i = table.values.size() - 2;
  const double t = u / h - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return table.values[i] * h00 + h * table.slopes[i] * h10 +
         table.values[i + 1] * h01 + h * table.slopes[i + 1] * h11;
}

double u_density(const RhoTable& table, double x, bool* truncated) {
  if (!(x > 0.0) || x > 1.0) {
    throw std::domain_error("u_density argument must lie in (0, 1], got " +
                            fmt(x));
  }
  return rho_at(table, 1.0 / x - 1.0, truncated) / x;
}

double integral_I(const RhoTable& table, const IntegralRequest& req) {
  const double alpha = req.alpha;
  if (!std::isfinite(alpha) || !(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("alpha must lie in (0, 1), got " + fmt(alpha));
  }
  if (req.m < 0) throw std::domain_error("dimension m must be nonnegative");
  if (req.m == 0) return rho_at(table, 1.0 / alpha);
  const int m = req.m;
  if (static_cast<double>(m) * alpha >= 1.0) return 0.0;  // empty region

  if (req.method == IntegralMethod::tensor_quadrature) {
    if (m > 3) {
      throw CapacityError(
          "tensor quadrature supports m <= 3; use monte_carlo for m >= 4");
    }
    const int nodes =
        req.nodes_or_samples > 0 ? req.nodes_or_samples : kDefaultNodes;
    if (nodes > 512) {
      throw CapacityError("tensor quadrature node count capped at 512");
    }
    const GaussLegendre& rule = gauss_legendre(nodes);
    // Iterated integral; every axis is split where the remaining budget
    // crosses a multiple of alpha, which is where the rho argument (and the
    // inner piece structure) has kinks.
    std::function<double(int, double)> level = [&](int depth,
                                                   double remaining) -> double {
      if (depth == m) return rho_at(table, remaining / alpha);
      const int dims_after = m - depth - 1;
      const double lo = alpha;
      const double hi = remaining - static_cast<double>(dims_after) * alpha;
      if (!(hi > lo)) return 0.0;
      std::vector<double> cuts;
      for (int k = 1;; ++k) {
        const double c = remaining - static_cast<double>(k) * alpha;
        if (c <= lo) break;
        if (c < hi) cuts.push_back(c);
      }
      return gl_integrate_split(rule, lo, hi, std::move(cuts), [&](double u) {
        return level(depth + 1, remaining - u) / u;
      });
    };
    return level(0, 1.0);
  }

  // Stratified Monte Carlo over the shifted simplex {v >= 0, sum v <= R},
  // R = 1 - m*alpha: the first coordinate is drawn by inverse CDF from a
  // stratified uniform, the rest by sequential inverse CDF.
  const int samples =
      req.nodes_or_samples > 0 ? req.nodes_or_samples : kDefaultSamples;
  const double R = 1.0 - static_cast<double>(m) * alpha;
  double volume = 1.0;
  for (int k = 1; k <= m; ++k) volume *= R / static_cast<double>(k);

  std::mt19937_64 eng(req.seed);
  auto unit = [&]() {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };
  NeumaierSum acc;
  for (int j = 0; j < samples; ++j) {
    double rem = R;
    double inv_prod = 1.0;
    for (int k = 0; k < m; ++k) {
      const double w =
          (k == 0)
              ? (static_cast<double>(j) + unit()) / static_cast<double>(samples)
              : unit();
      const double exponent = 1.0 / static_cast<double>(m - k);
      const double v = rem * (1.0 - std::pow(1.0 - w, exponent));
      rem -= v;
      inv_prod /= (alpha + v);
    }
    acc.add(rho_at(table, rem / alpha) * inv_prod);
  }
  return volume * acc.value() / static_cast<double>(samples);
}

TriangleResult integral_T(const RhoTable& table, double alpha, int nodes) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw std::domain_error("alpha must lie in [0, 1], got " + fmt(alpha));
  }
  if (nodes <= 0) nodes = kDefaultNodes;
  TriangleResult result;
  result.truncation_bound = table.values.back();
  if (alpha >= 1.0) return result;

  const GaussLegendre& rule = gauss_legendre(nodes);
  const double x_min = 1.0 / (table.u_max + 1.0);
  const double x_hi = 1.0 - alpha;
  if (!(x_hi > x_min)) return result;

  // u(x) has kinks where 1/x - 1 crosses an integer, i.e. x = 1/(k+1); the
  // inner lower limit x + alpha crosses those same points at x = 1/(k+1) - a.
  std::vector<double> outer_cuts;
  for (int k = 1;; ++k) {
    const double c = 1.0 / static_cast<double>(k + 1);
    if (c <= x_min) break;
    outer_cuts.push_back(c);
    if (c - alpha > x_min) outer_cuts.push_back(c - alpha);
  }

  auto inner = [&](double x) {
    const double y_lo = std::max(x + alpha, x_min);
    if (!(1.0 > y_lo)) return 0.0;
    std::vector<double> cuts;
    for (int k = 1;; ++k) {
      const double c = 1.0 / static_cast<double>(k + 1);
      if (c <= y_lo) break;
      cuts.push_back(c);
    }
    return gl_integrate_split(rule, y_lo, 1.0, std::move(cuts),
                              [&](double y) { return u_density(table, y); });
  };
  result.value = gl_integrate_split(
      rule, x_min, x_hi, std::move(outer_cuts),
      [&](double x) { return u_density(table, x) * inner(x); });
  return result;
}

double rect_density(const RhoTable& table, double a, double b, double c,
                    double d) {
  if (!(0.0 < a) || !(a < b) || !(b <= 1.0)) {
    throw std::domain_error(
        "first exponent window must satisfy 0 < a < b <= 1");
  }
  if (!(0.0 < c) || !(c < d) || !(d <= 1.0)) {
    throw std::domain_error(
        "second exponent window must satisfy 0 < c < d <= 1");
  }
  return (rho_at(table, 1.0 / d) - rho_at(table, 1.0 / c)) *
         (rho_at(table, 1.0 / b) - rho_at(table, 1.0 / a));
}

}  // namespace multcorr
