#pragma once

#include <cstdint>
#include <vector>

namespace multcorr {

// Tabulated Dickmann rho on a uniform grid [0, u_max] with monotone-cubic
// interpolation.  Immutable once built; share freely across threads.
struct RhoTable {
  double step = 0.0;       // grid spacing, snapped to 1/M for integer M
  double u_max = 0.0;      // last grid point
  double tol = 0.0;        // delay-identity residual bound the build enforced
  double max_slope = 0.0;  // max |interpolant slope|: empirical Lipschitz bound
  std::vector<double> values;  // rho at 0, step, 2*step, ..., u_max
  std::vector<double> slopes;  // monotone-cubic derivative at each grid point
};

inline constexpr double kDefaultRhoStep = 1e-3;
inline constexpr double kDefaultRhoUMax = 40.0;
inline constexpr double kDefaultRhoTol = 1e-8;

// Solve u*rho(u) = integral_{u-1}^{u} rho(t) dt forward from rho = 1 on
// [0,1] with an implicit trapezoid step (each step is a closed-form scalar
// solve).  The requested step is snapped to 1/M so the delay offset u-1 is an
// exact grid shift.
RhoTable build_rho(double step = kDefaultRhoStep, double u_max = kDefaultRhoUMax,
                   double tol = kDefaultRhoTol);

// Interpolated rho(u); exactly 1 for u <= 1; 0 for u > u_max (sets
// *truncated when non-null).
double rho_at(const RhoTable& table, double u, bool* truncated = nullptr);

// Density kernel u(x) = rho(1/x - 1)/x for 0 < x <= 1; the distribution of
// log P+(n) / log n.  Sets *truncated when 1/x - 1 exceeds the table.
double u_density(const RhoTable& table, double x, bool* truncated = nullptr);

// Largest u with rho(u) evaluable before truncation kicks in, i.e. u_max.
// x below 1/(u_max + 1) truncates u_density.

enum class IntegralMethod { tensor_quadrature, monte_carlo };

struct IntegralRequest {
  double alpha = 0.0;            // in (0, 1)
  int m = 0;                     // simplex dimension, >= 0
  IntegralMethod method = IntegralMethod::tensor_quadrature;
  int nodes_or_samples = 0;      // 0 -> default (64 nodes / 400000 samples)
  std::uint64_t seed = 12345;    // monte_carlo only
};

// I_{alpha,m} = integral over {alpha <= u_i <= 1, sum u_i <= 1} of
// rho((1 - sum u_i)/alpha) / (u_1 ... u_m).  m = 0 gives rho(1/alpha);
// m >= 1/alpha gives exactly 0 (empty region).
double integral_I(const RhoTable& table, const IntegralRequest& req);

struct TriangleResult {
  double value = 0.0;
  double truncation_bound = 0.0;  // rho(u_max): bound on the truncated mass
};

// integral over {(x,y) in [0,1]^2 : y >= x + alpha} of u(x) u(y) dx dy,
// iterated Gauss-Legendre on both axes with kink-aware splitting.
TriangleResult integral_T(const RhoTable& table, double alpha, int nodes = 64);

// (rho(1/d) - rho(1/c)) * (rho(1/b) - rho(1/a)): the predicted logarithmic
// density of {n : P+(n) in [n^a, n^b], P+(n+1) in [n^c, n^d]}.
double rect_density(const RhoTable& table, double a, double b, double c,
                    double d);

}  // namespace multcorr
