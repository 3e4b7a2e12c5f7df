#include "multcorr/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "multcorr/accumulate.hpp"
#include "multcorr/errors.hpp"
#include "multcorr/mult_func.hpp"
#include "multcorr/parallel.hpp"

namespace multcorr {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void require_x(std::uint64_t x, std::uint64_t minimum) {
  if (x < minimum) {
    throw std::domain_error("window end x must be at least " +
                            std::to_string(minimum) + ", got " +
                            std::to_string(x));
  }
}

void require_unit_interval(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0) || !(v < 1.0)) {
    throw std::domain_error(std::string("exponent ") + name +
                            " must lie in (0, 1), got " + fmt(v));
  }
}

struct ScanResult {
  std::vector<double> slot;
  double mass = 0.0;  // total weight of the window
};

// Deterministic parallel classification of n in [2, x]: the classifier
// returns a bitmask of slots (bit i -> slot i) given access to the factored
// segment covering [n, n + shift_span].  Weight is 1/n (logarithmic) or 1.
template <class Cls>
ScanResult classified_scan(std::uint64_t x, std::uint64_t shift_span,
                           int n_slots, bool log_weight, const Cls& cls) {
  struct Part {
    std::vector<NeumaierSum> slot;
    NeumaierSum mass;
  };
  Part total;
  total.slot.resize(static_cast<std::size_t>(n_slots));
  parallel_chunks<Part>(
      2, x, kScanChunk,
      [&](std::uint64_t a, std::uint64_t b) {
        Part part;
        part.slot.resize(static_cast<std::size_t>(n_slots));
        FactoredSegment seg = sieve_segment(a, b + shift_span + 1);
        for (std::uint64_t n = a; n <= b; ++n) {
          const double w = log_weight ? 1.0 / static_cast<double>(n) : 1.0;
          std::uint32_t mask = cls(n, seg);
          part.mass.add(w);
          while (mask != 0) {
            const int bit = __builtin_ctz(mask);
            part.slot[static_cast<std::size_t>(bit)].add(w);
            mask &= mask - 1;
          }
        }
        return part;
      },
      [&](Part&& part) {
        for (int i = 0; i < n_slots; ++i) total.slot[i].merge(part.slot[i]);
        total.mass.merge(part.mass);
      });
  ScanResult out;
  out.slot.resize(static_cast<std::size_t>(n_slots));
  for (int i = 0; i < n_slots; ++i) out.slot[i] = total.slot[i].value();
  out.mass = total.mass.value();
  return out;
}

// I_{alpha,m}/m! with a crude quadrature uncertainty from node (or sample)
// halving.  Empty regions give exactly 0 with zero uncertainty.
double marginal_target(const RhoTable& table, double alpha, int m,
                       double* uncertainty) {
  *uncertainty = 0.0;
  IntegralRequest req;
  req.alpha = alpha;
  req.m = m;
  req.method =
      m <= 3 ? IntegralMethod::tensor_quadrature : IntegralMethod::monte_carlo;
  const double v = integral_I(table, req);
  if (m >= 1 && static_cast<double>(m) * alpha < 1.0) {
    IntegralRequest half = req;
    half.nodes_or_samples =
        req.method == IntegralMethod::tensor_quadrature ? 32 : 200000;
    *uncertainty = std::fabs(v - integral_I(table, half));
  }
  double factorial = 1.0;
  for (int i = 2; i <= m; ++i) factorial *= static_cast<double>(i);
  *uncertainty /= factorial;
  return v / factorial;
}

}  // namespace

const char* to_string(Weighting w) {
  return w == Weighting::logarithmic ? "logarithmic" : "natural";
}

const char* to_string(WindowKind w) {
  return w == WindowKind::full ? "full" : "tail";
}

int compare_prime_to_power(std::uint64_t p, std::uint64_t n, double a) {
  const double gap = std::log(static_cast<double>(p)) -
                     a * std::log(static_cast<double>(n));
  if (std::fabs(gap) >= 1e-12) return gap > 0.0 ? 1 : -1;
  // Inside the representability guard band: if 1/a is an integer r, decide
  // p vs n^a exactly via p^r vs n.
  const double inv = 1.0 / a;
  const long long r = std::llround(inv);
  if (r >= 1 && r <= 64 && std::fabs(inv - static_cast<double>(r)) < 1e-9) {
    unsigned __int128 acc = 1;
    for (long long i = 0; i < r; ++i) {
      acc *= p;
      if (acc > n) return 1;
    }
    if (acc < n) return -1;
    return 0;
  }
  return 0;
}

int count_large_factors(std::span<const PrimePower> factors, std::uint64_t n,
                        double a) {
  int count = 0;
  for (const PrimePower& pp : factors) {
    if (compare_prime_to_power(pp.prime, n, a) > 0) ++count;
  }
  return count;
}

OmegaJointResult exp_omega_joint(const RhoTable& table, std::uint64_t x,
                                 double a, double b, int k, int l) {
  require_x(x, 100);
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  if (k < 0 || l < 0) {
    throw std::domain_error("factor counts k and l must be nonnegative");
  }

  const ScanResult scan = classified_scan(
      x, 1, 3, true, [&](std::uint64_t n, const FactoredSegment& seg) {
        const int c1 = count_large_factors(seg.factors(n), n, a);
        const int c2 = count_large_factors(seg.factors(n + 1), n, b);
        std::uint32_t mask = 0;
        if (c1 == k) mask |= 2u;
        if (c2 == l) mask |= 4u;
        if (mask == 6u) mask |= 1u;
        return mask;
      });
  const double L = std::log(static_cast<double>(x));

  double ua = 0.0, ub = 0.0;
  const double ta = marginal_target(table, a, k, &ua);
  const double tb = marginal_target(table, b, l, &ub);

  auto make = [&](const char* name, double est, double target, double unc) {
    DensityEstimate e;
    e.label = std::string(name) + "[a=" + fmt(a) + ",b=" + fmt(b) +
              ",k=" + std::to_string(k) + ",l=" + std::to_string(l) + "]";
    e.x = x;
    e.weighting = Weighting::logarithmic;
    e.window = WindowKind::full;
    e.estimate = est;
    e.target = target;
    e.abs_error = std::fabs(est - target);
    e.target_uncertainty = unc;
    return e;
  };
  OmegaJointResult result;
  result.joint = make("omega_joint", scan.slot[0] / L, ta * tb,
                      ua * tb + ub * ta + ua * ub);
  result.marginal1 = make("omega_marginal1", scan.slot[1] / L, ta, ua);
  result.marginal2 = make("omega_marginal2", scan.slot[2] / L, tb, ub);
  return result;
}

DensityEstimate exp_erdos_pomerance(const RhoTable& table, std::uint64_t x,
                                    double a, double b) {
  require_x(x, 100);
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");

  const ScanResult scan = classified_scan(
      x, 1, 1, true, [&](std::uint64_t n, const FactoredSegment& seg) {
        const bool smooth1 = compare_prime_to_power(seg.lpf(n), n, a) <= 0;
        const bool smooth2 =
            smooth1 && compare_prime_to_power(seg.lpf(n + 1), n, b) <= 0;
        return smooth2 ? 1u : 0u;
      });

  DensityEstimate e;
  e.label = "erdos_pomerance[a=" + fmt(a) + ",b=" + fmt(b) + "]";
  e.x = x;
  e.weighting = Weighting::logarithmic;
  e.window = WindowKind::full;
  e.estimate = scan.slot[0] / std::log(static_cast<double>(x));
  e.target = rho_at(table, 1.0 / a) * rho_at(table, 1.0 / b);
  e.abs_error = std::fabs(e.estimate - *e.target);
  return e;
}

EtPartition exp_erdos_turan_partition(std::uint64_t x) {
  require_x(x, 10000);
  const ScanResult scan = classified_scan(
      x, 1, 3, true, [&](std::uint64_t n, const FactoredSegment& seg) {
        const std::uint64_t p0 = seg.lpf(n);
        const std::uint64_t p1 = seg.lpf(n + 1);
        if (p0 < p1) return 1u;
        if (p0 > p1) return 2u;
        return 4u;
      });
  const double L = std::log(static_cast<double>(x));
  return EtPartition{scan.slot[0] / L, scan.slot[1] / L, scan.slot[2] / L};
}

DensityEstimate exp_erdos_turan(std::uint64_t x) {
  const EtPartition part = exp_erdos_turan_partition(x);
  DensityEstimate e;
  e.label = "erdos_turan";
  e.x = x;
  e.weighting = Weighting::logarithmic;
  e.window = WindowKind::full;
  e.estimate = part.less;
  e.target = 0.5;
  e.abs_error = std::fabs(e.estimate - 0.5);
  return e;
}

double erdos_turan_window_sum(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 1 || hi < lo) {
    throw std::domain_error("window bounds must satisfy 1 <= lo <= hi");
  }
  NeumaierSum total;
  parallel_chunks<NeumaierSum>(
      lo, hi, kScanChunk,
      [&](std::uint64_t a, std::uint64_t b) {
        NeumaierSum s;
        FactoredSegment seg = sieve_segment(a, b + 2);
        for (std::uint64_t n = a; n <= b; ++n) {
          if (seg.lpf(n) < seg.lpf(n + 1)) s.add(1.0 / static_cast<double>(n));
        }
        return s;
      },
      [&](NeumaierSum&& part) { total.merge(part); });
  return total.value();
}

DensityEstimate exp_alpha_shift(const RhoTable& table, std::uint64_t x,
                                double alpha) {
  require_x(x, 100);
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw std::domain_error("shift exponent alpha must lie in [0, 1], got " +
                            fmt(alpha));
  }

  const ScanResult scan = classified_scan(
      x, 1, 1, true, [&](std::uint64_t n, const FactoredSegment& seg) {
        const std::uint64_t p0 = seg.lpf(n);
        const std::uint64_t p1 = seg.lpf(n + 1);
        bool hit;
        if (alpha == 0.0) {
          hit = p1 > p0;
        } else {
          hit = std::log(static_cast<double>(p1)) >
                std::log(static_cast<double>(p0)) +
                    alpha * std::log(static_cast<double>(n));
        }
        return hit ? 1u : 0u;
      });

  const TriangleResult t64 = integral_T(table, alpha, 64);
  const TriangleResult t32 = integral_T(table, alpha, 32);

  DensityEstimate e;
  e.label = "alpha_shift[alpha=" + fmt(alpha) + "]";
  e.x = x;
  e.weighting = Weighting::logarithmic;
  e.window = WindowKind::full;
  e.estimate = scan.slot[0] / std::log(static_cast<double>(x));
  e.target = t64.value;
  e.abs_error = std::fabs(e.estimate - *e.target);
  e.target_uncertainty =
      std::fabs(t64.value - t32.value) + t64.truncation_bound;
  return e;
}

DensityEstimate exp_hildebrand_rect(const RhoTable& table, std::uint64_t x,
                                    double a, double b, double c, double d) {
  require_x(x, 100);
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  require_unit_interval(c, "c");
  require_unit_interval(d, "d");
  if (!(a < b)) {
    throw std::domain_error("exponent bounds must satisfy a < b, got a = " +
                            fmt(a) + ", b = " + fmt(b));
  }
  if (!(c < d)) {
    throw std::domain_error("exponent bounds must satisfy c < d, got c = " +
                            fmt(c) + ", d = " + fmt(d));
  }

  const ScanResult scan = classified_scan(
      x, 1, 1, false, [&](std::uint64_t n, const FactoredSegment& seg) {
        const std::uint64_t p0 = seg.lpf(n);
        const std::uint64_t p1 = seg.lpf(n + 1);
        const bool hit = compare_prime_to_power(p0, n, a) >= 0 &&
                         compare_prime_to_power(p0, n, b) <= 0 &&
                         compare_prime_to_power(p1, n, c) >= 0 &&
                         compare_prime_to_power(p1, n, d) <= 0;
        return hit ? 1u : 0u;
      });

  DensityEstimate e;
  e.label = "hildebrand_rect[a=" + fmt(a) + ",b=" + fmt(b) + ",c=" + fmt(c) +
            ",d=" + fmt(d) + "]";
  e.x = x;
  e.weighting = Weighting::natural;
  e.window = WindowKind::full;
  e.estimate = scan.slot[0] / static_cast<double>(x);
  e.target = rect_density(table, a, b, c, d);
  e.abs_error = std::fabs(e.estimate - *e.target);
  return e;
}

OrderingReport exp_ordering(std::uint64_t x, int k) {
  require_x(x, 100);
  if (k < 2) throw std::domain_error("ordering experiment requires k >= 2");
  if (k > 4) {
    throw CapacityError(
        "ordering experiment capped at k = 4 (k! permutation classes)");
  }

  // Lexicographic permutation labels of {1, ..., k}.
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> ident{1, 2, 3, 4};
  std::vector<int> base(ident.begin(), ident.begin() + k);
  do {
    std::array<int, 4> p{0, 0, 0, 0};
    std::copy(base.begin(), base.end(), p.begin());
    perms.push_back(p);
  } while (std::next_permutation(base.begin(), base.end()));
  const int n_perms = static_cast<int>(perms.size());
  const int tie_slot = n_perms;

  static constexpr int kFactorial[5] = {1, 1, 2, 6, 24};
  const ScanResult scan = classified_scan(
      x, static_cast<std::uint64_t>(k), n_perms + 1, true,
      [&](std::uint64_t n, const FactoredSegment& seg) -> std::uint32_t {
        std::uint64_t v[4];
        for (int j = 0; j < k; ++j) {
          v[j] = seg.lpf(n + 1 + static_cast<std::uint64_t>(j));
        }
        // Shift indices sorted by increasing P+; equal values mean a tie.
        int order[4] = {1, 2, 3, 4};
        for (int i = 1; i < k; ++i) {
          int j = i;
          while (j > 0 && v[order[j] - 1] < v[order[j - 1] - 1]) {
            std::swap(order[j], order[j - 1]);
            --j;
          }
        }
        for (int i = 0; i + 1 < k; ++i) {
          if (v[order[i] - 1] == v[order[i + 1] - 1]) {
            return 1u << tie_slot;
          }
        }
        // Lexicographic rank via the Lehmer code.
        int rank = 0;
        for (int i = 0; i < k; ++i) {
          int smaller_after = 0;
          for (int j = i + 1; j < k; ++j) {
            if (order[j] < order[i]) ++smaller_after;
          }
          rank += smaller_after * kFactorial[k - 1 - i];
        }
        return 1u << rank;
      });

  // Normalize by the window's harmonic mass so the classes form an exact
  // probability partition (the k! orderings plus ties sum to 1).
  OrderingReport report;
  report.x = x;
  report.k = k;
  auto make = [&](const std::string& label, double est) {
    DensityEstimate e;
    e.label = label;
    e.x = x;
    e.weighting = Weighting::logarithmic;
    e.window = WindowKind::full;
    e.estimate = est;
    return e;
  };
  for (int i = 0; i < n_perms; ++i) {
    std::string label;
    for (int j = 0; j < k; ++j) label += static_cast<char>('0' + perms[i][j]);
    DensityEstimate e = make(label, scan.slot[i] / scan.mass);
    e.target = 1.0 / static_cast<double>(kFactorial[k]);
    e.abs_error = std::fabs(e.estimate - *e.target);
    report.orderings.push_back(std::move(e));
  }
  report.ties = make("ties", scan.slot[tie_slot] / scan.mass);
  return report;
}

double exp_truncated_liouville(std::uint64_t x, double eps) {
  require_x(x, 100);
  if (!std::isfinite(eps) || !(eps > 0.0) || !(eps < 1.0)) {
    throw std::domain_error("truncation exponent must lie in (0, 1), got " +
                            fmt(eps));
  }
  const double y = std::pow(static_cast<double>(x), eps);
  const MultFuncSpec tl = MultFuncSpec::truncated_liouville_gt(y);

  NeumaierSum total;
  parallel_chunks<NeumaierSum>(
      2, x, kScanChunk,
      [&](std::uint64_t a, std::uint64_t b) {
        NeumaierSum s;
        FactoredSegment seg = sieve_segment(a, b + 2);
        for (std::uint64_t n = a; n <= b; ++n) {
          const double v = tl.eval(n, seg.factors(n)) *
                           tl.eval(n + 1, seg.factors(n + 1));
          s.add(v / static_cast<double>(n));
        }
        return s;
      },
      [&](NeumaierSum&& part) { total.merge(part); });
  return total.value() / std::log(static_cast<double>(x));
}

}  // namespace multcorr
