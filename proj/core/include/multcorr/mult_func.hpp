#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multcorr/factor_sieve.hpp"

namespace multcorr {

enum class FuncKind {
  constant_one,
  liouville,
  moebius,
  truncated_liouville_gt,
  truncated_liouville_lt,
  smooth_indicator,
  power_weight,
  real_character,
};

// A named bounded multiplicative function, evaluable from a factorization.
// Immutable value type; evaluation is pure.
class MultFuncSpec {
 public:
  static MultFuncSpec constant_one();
  static MultFuncSpec liouville();
  static MultFuncSpec moebius();
  // (-1)^(multiplicity-counted number of prime factors > y); y >= 1.
  static MultFuncSpec truncated_liouville_gt(double y);
  // (-1)^(multiplicity-counted number of prime factors < y); y >= 1.
  static MultFuncSpec truncated_liouville_lt(double y);
  // 1 iff P+(n) <= y.
  static MultFuncSpec smooth_indicator(double y);
  // z^(distinct count of prime factors > y); z in [-1, 1].
  static MultFuncSpec power_weight(double y, double z);
  // Jacobi symbol (n | Q) for odd squarefree Q > 1.
  static MultFuncSpec real_character(std::uint64_t Q);

  // Compact string form, e.g. "one", "liouville", "tliouville_gt:y=1000",
  // "power:y=1e4,z=0.5", "char:Q=12345", "smooth:y=1e5".  parse() accepts
  // exactly what to_string() emits; errors name the offending token.
  static MultFuncSpec parse(std::string_view text);
  std::string to_string() const;

  FuncKind kind() const { return kind_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::uint64_t Q() const { return Q_; }

  // Value at n given its factorization; verifies that the factor list
  // multiplies back to n.
  double eval(std::uint64_t n, std::span<const PrimePower> factors) const;

  // Value at a prime argument (used by the pretentious distance).
  double eval_at_prime(std::uint64_t p) const;

 private:
  MultFuncSpec(FuncKind kind, double y, double z, std::uint64_t Q)
      : kind_(kind), y_(y), z_(z), Q_(Q) {}

  FuncKind kind_ = FuncKind::constant_one;
  double y_ = 0.0;
  double z_ = 0.0;
  std::uint64_t Q_ = 0;
};

struct UniformityReport {
  std::uint64_t x = 0;
  std::uint64_t Q = 0;
  double eta_star = 0.0;  // max over 1 <= a <= q <= Q of q * |deviation|
  std::uint64_t worst_q = 1;
  std::uint64_t worst_a = 1;
};

struct StrongUniformityReport {
  std::uint64_t x = 0;
  std::uint64_t Q = 0;
  double omega = 0.0;
  double delta = 0.0;  // reference mean over [x, 2x]
  double eta_star = 0.0;
  std::vector<double> probe_points;  // geometric probes spanning [x/omega, x]
};

// (1/x) sum_{x <= n <= 2x} g(n), inclusive endpoints.
double mean_value(const MultFuncSpec& g, std::uint64_t x);

// (1/log omega) sum_{x/omega <= n <= x} g(n)/n; requires 1 < omega <= log(3x).
double log_mean_value(const MultFuncSpec& g, std::uint64_t x, double omega);

// Pretentious distance D(f, g; X) = sqrt(sum_{p <= X} (1 - f(p) g(p)) / p).
double pretentious_distance(const MultFuncSpec& f, const MultFuncSpec& g,
                            std::uint64_t X);

// Smallest eta such that |S_g(x, 2x; a mod q)/x - S_g(x, 2x)/(q x)| <= eta/q
// for all 1 <= a <= q <= Q, together with the maximizing pair.
UniformityReport uniformity_deficiency(const MultFuncSpec& g, std::uint64_t x,
                                       std::uint64_t Q);

// Same deviation with the progression means taken over [y, 2y] for probe
// points y spaced geometrically across [x/omega, x], against the fixed
// reference mean over [x, 2x].  Probing under-approximates the continuum.
StrongUniformityReport strong_uniformity_deficiency(const MultFuncSpec& g,
                                                    std::uint64_t x,
                                                    std::uint64_t Q,
                                                    double omega, int probes);

inline constexpr int kDefaultStrongProbes = 8;

// | (1/x) sum_{[x,2x], n = a mod q} g  -  (y/x) sum_{[x/y,2x/y], n = a mod q} g |
// for y = y_shrink in [1, log^10 x]; the window means of a bounded
// multiplicative function drift only slowly under this shrink.
double stability_gap(const MultFuncSpec& g, std::uint64_t x, double y_shrink,
                     std::uint64_t a, std::uint64_t q);

}  // namespace multcorr
