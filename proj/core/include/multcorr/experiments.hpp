#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multcorr/dickmann.hpp"
#include "multcorr/factor_sieve.hpp"

namespace multcorr {

enum class Weighting { logarithmic, natural };
enum class WindowKind { full, tail };

struct DensityEstimate {
  std::string label;
  std::uint64_t x = 0;
  Weighting weighting = Weighting::logarithmic;
  WindowKind window = WindowKind::full;
  double estimate = 0.0;
  std::optional<double> target;               // analytic value, when known
  std::optional<double> abs_error;            // |estimate - target|
  std::optional<double> target_uncertainty;   // quadrature/MC bound on target
};

const char* to_string(Weighting w);
const char* to_string(WindowKind w);

// sign of p - n^a for a prime factor p of a sieved integer: positive when
// p > n^a.  Near the float representability boundary the comparison is
// resolved exactly by integer powering when 1/a is (close to) an integer.
int compare_prime_to_power(std::uint64_t p, std::uint64_t n, double a);

// Count of distinct prime factors of n strictly above n^a.
int count_large_factors(std::span<const PrimePower> factors, std::uint64_t n,
                        double a);

struct OmegaJointResult {
  DensityEstimate joint;      // omega_{>n^a}(n) = k and omega_{>n^b}(n+1) = l
  DensityEstimate marginal1;  // omega_{>n^a}(n) = k
  DensityEstimate marginal2;  // omega_{>n^b}(n+1) = l
};

// Joint large-prime-factor count law: the joint logarithmic density against
// the product of the simplex-integral marginals I_{a,k}/k! * I_{b,l}/l!.
OmegaJointResult exp_omega_joint(const RhoTable& table, std::uint64_t x,
                                 double a, double b, int k, int l);

// Pr[P+(n) <= n^a and P+(n+1) <= n^b] in logarithmic density, against
// rho(1/a) rho(1/b).
DensityEstimate exp_erdos_pomerance(const RhoTable& table, std::uint64_t x,
                                    double a, double b);

// Pr[P+(n) < P+(n+1)] in logarithmic density, against 1/2.
DensityEstimate exp_erdos_turan(std::uint64_t x);

struct EtPartition {
  double less = 0.0;
  double greater = 0.0;
  double ties = 0.0;  // impossible for n >= 2 (n and n+1 are coprime)
};
EtPartition exp_erdos_turan_partition(std::uint64_t x);

// Raw harmonic-weighted mass of {P+(n) < P+(n+1)} over lo <= n <= hi.
// Building block for window-chaining consistency checks.
double erdos_turan_window_sum(std::uint64_t lo, std::uint64_t hi);

// Pr[P+(n+1) > P+(n) * n^alpha] in logarithmic density, against the
// triangle integral of the u-density.
DensityEstimate exp_alpha_shift(const RhoTable& table, std::uint64_t x,
                                double alpha);

// Natural density of {P+(n) in [n^a, n^b], P+(n+1) in [n^c, n^d]} against
// the rect_density logarithmic-limit reference.
DensityEstimate exp_hildebrand_rect(const RhoTable& table, std::uint64_t x,
                                    double a, double b, double c, double d);

struct OrderingReport {
  std::uint64_t x = 0;
  int k = 0;
  // One estimate per permutation, lexicographic by label; label "213" means
  // P+(n+2) < P+(n+1) < P+(n+3).  Normalized by the window's harmonic mass
  // so that the k! classes plus ties form an exact probability partition.
  std::vector<DensityEstimate> orderings;
  DensityEstimate ties;
};

// Exploratory scan of all k! relative orderings of P+(n+1), ..., P+(n+k),
// k <= 4; the conjectured limit 1/k! is attached as target.
OrderingReport exp_ordering(std::uint64_t x, int k);

// Full-window logarithmic correlation of the truncated Liouville function
// lambda_{>x^eps} with its unit shift.
double exp_truncated_liouville(std::uint64_t x, double eps);

}  // namespace multcorr
