#include "multcorr/mult_func.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "multcorr/accumulate.hpp"
#include "multcorr/char_sum.hpp"
#include "multcorr/errors.hpp"
#include "multcorr/parallel.hpp"

namespace multcorr {
namespace {

std::string shortest_double(double v) {
  char buf[48];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

[[noreturn]] void bad_spec(const std::string& what) {
  throw std::invalid_argument("invalid function spec: " + what);
}

double parse_real(std::string_view tok, const char* key) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    bad_spec(std::string("parameter ") + key + " has non-numeric value '" +
             std::string(tok) + "'");
  }
  return v;
}

std::uint64_t parse_modulus(std::string_view tok) {
  std::uint64_t q = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, q);
  if (ec == std::errc{} && ptr == last) return q;
  // Allow scientific notation for the modulus as long as it is an exact
  // integer below 2^53.
  const double v = parse_real(tok, "Q");
  if (!(v >= 1.0) || v != std::floor(v) || v > 9.007199254740992e15) {
    bad_spec("parameter Q has non-integral value '" + std::string(tok) + "'");
  }
  return static_cast<std::uint64_t>(v);
}

void require_threshold(double y) {
  if (!std::isfinite(y) || y < 1.0) {
    throw std::invalid_argument(
        "prime threshold y must be a finite real >= 1, got " +
        shortest_double(y));
  }
}

// Sum of term(n, factors(n)) over the inclusive integer range [lo, hi],
// chunked deterministically.
template <class Term>
double scan_sum(std::uint64_t lo, std::uint64_t hi, const Term& term) {
  if (lo > hi) return 0.0;
  NeumaierSum total;
  parallel_chunks<NeumaierSum>(
      lo, hi, kScanChunk,
      [&](std::uint64_t a, std::uint64_t b) {
        NeumaierSum s;
        FactoredSegment seg = sieve_segment(a, b + 1);
        for (std::uint64_t n = a; n <= b; ++n) {
          s.add(term(n, seg.factors(n)));
        }
        return s;
      },
      [&](NeumaierSum&& part) { total.merge(part); });
  return total.value();
}

// Per-chunk accumulator for progression sums: one compensated bucket per
// pair (q, a) with 1 <= a <= q <= Q, in lexicographic (q, a) order.
struct BucketSums {
  std::vector<NeumaierSum> cell;
};

inline std::size_t bucket_index(std::uint64_t q, std::uint64_t a) {
  return static_cast<std::size_t>(q * (q - 1) / 2 + (a - 1));
}

// Progression sums of g over the inclusive range [lo, hi] for every modulus
// q <= Q at once.
std::vector<double> progression_sums(const MultFuncSpec& g, std::uint64_t lo,
                                     std::uint64_t hi, std::uint64_t Q) {
  const std::size_t n_buckets = static_cast<std::size_t>(Q * (Q + 1) / 2);
  std::vector<NeumaierSum> total(n_buckets);
  if (lo <= hi) {
    parallel_chunks<BucketSums>(
        lo, hi, kScanChunk,
        [&](std::uint64_t a, std::uint64_t b) {
          BucketSums part;
          part.cell.resize(n_buckets);
          FactoredSegment seg = sieve_segment(a, b + 1);
          for (std::uint64_t n = a; n <= b; ++n) {
            const double v = g.eval(n, seg.factors(n));
            if (v == 0.0) continue;
            for (std::uint64_t q = 1; q <= Q; ++q) {
              std::uint64_t r = n % q;
              if (r == 0) r = q;
              part.cell[bucket_index(q, r)].add(v);
            }
          }
          return part;
        },
        [&](BucketSums&& part) {
          for (std::size_t i = 0; i < n_buckets; ++i) total[i].merge(part.cell[i]);
        });
  }
  std::vector<double> out(n_buckets);
  for (std::size_t i = 0; i < n_buckets; ++i) out[i] = total[i].value();
  return out;
}

void require_window_start(std::uint64_t x) {
  if (x < 1) throw std::domain_error("window start x must be at least 1");
}

void require_omega_range(std::uint64_t x, double omega, double min_omega) {
  if (!std::isfinite(omega) || omega < min_omega) {
    throw std::domain_error("averaging scale omega must be a finite real " +
                            std::string(min_omega > 1.0 ? "> 1" : ">= 1") +
                            ", got " + shortest_double(omega));
  }
  const double cap = std::log(3.0 * static_cast<double>(x));
  if (omega > cap * (1.0 + 1e-12)) {
    throw std::domain_error("averaging scale omega = " + shortest_double(omega) +
                            " exceeds log(3x) = " + shortest_double(cap));
  }
}

}  // namespace

MultFuncSpec MultFuncSpec::constant_one() {
  return MultFuncSpec(FuncKind::constant_one, 0.0, 0.0, 0);
}

MultFuncSpec MultFuncSpec::liouville() {
  return MultFuncSpec(FuncKind::liouville, 0.0, 0.0, 0);
}

MultFuncSpec MultFuncSpec::moebius() {
  return MultFuncSpec(FuncKind::moebius, 0.0, 0.0, 0);
}

MultFuncSpec MultFuncSpec::truncated_liouville_gt(double y) {
  require_threshold(y);
  return MultFuncSpec(FuncKind::truncated_liouville_gt, y, 0.0, 0);
}

MultFuncSpec MultFuncSpec::truncated_liouville_lt(double y) {
  require_threshold(y);
  return MultFuncSpec(FuncKind::truncated_liouville_lt, y, 0.0, 0);
}

MultFuncSpec MultFuncSpec::smooth_indicator(double y) {
  require_threshold(y);
  return MultFuncSpec(FuncKind::smooth_indicator, y, 0.0, 0);
}

MultFuncSpec MultFuncSpec::power_weight(double y, double z) {
  require_threshold(y);
  if (!std::isfinite(z) || z < -1.0 || z > 1.0) {
    throw std::invalid_argument("power-weight base z must lie in [-1, 1], got " +
                                shortest_double(z));
  }
  return MultFuncSpec(FuncKind::power_weight, y, z, 0);
}

MultFuncSpec MultFuncSpec::real_character(std::uint64_t Q) {
  factor_modulus(Q);  // validates: odd, squarefree, Q > 1
  return MultFuncSpec(FuncKind::real_character, 0.0, 0.0, Q);
}

MultFuncSpec MultFuncSpec::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  std::string_view params =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  // Collect key=value parameters.
  bool have_y = false, have_z = false, have_Q = false;
  double y = 0.0, z = 0.0;
  std::uint64_t Q = 0;
  while (!params.empty()) {
    const std::size_t comma = params.find(',');
    std::string_view item = params.substr(0, comma);
    params = comma == std::string_view::npos ? std::string_view{}
                                             : params.substr(comma + 1);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      bad_spec("parameter '" + std::string(item) + "' is not of the form key=value");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    if (key == "y") {
      if (have_y) bad_spec("duplicate parameter y");
      y = parse_real(val, "y");
      have_y = true;
    } else if (key == "z") {
      if (have_z) bad_spec("duplicate parameter z");
      z = parse_real(val, "z");
      have_z = true;
    } else if (key == "Q") {
      if (have_Q) bad_spec("duplicate parameter Q");
      Q = parse_modulus(val);
      have_Q = true;
    } else {
      bad_spec("unknown parameter '" + std::string(key) + "'");
    }
  }

  auto no_params = [&](const char* name) {
    if (have_y || have_z || have_Q) {
      bad_spec(std::string(name) + " takes no parameters");
    }
  };
  auto need = [&](bool have, const char* key, const char* name) {
    if (!have) bad_spec(std::string(name) + " requires parameter " + key);
  };
  auto only = [&](bool extra, const char* name) {
    if (extra) bad_spec(std::string("unexpected parameter for ") + name);
  };

  if (head == "one") {
    no_params("one");
    return constant_one();
  }
  if (head == "liouville") {
    no_params("liouville");
    return liouville();
  }
  if (head == "moebius") {
    no_params("moebius");
    return moebius();
  }
  if (head == "tliouville_gt") {
    need(have_y, "y", "tliouville_gt");
    only(have_z || have_Q, "tliouville_gt");
    return truncated_liouville_gt(y);
  }
  if (head == "tliouville_lt") {
    need(have_y, "y", "tliouville_lt");
    only(have_z || have_Q, "tliouville_lt");
    return truncated_liouville_lt(y);
  }
  if (head == "smooth") {
    need(have_y, "y", "smooth");
    only(have_z || have_Q, "smooth");
    return smooth_indicator(y);
  }
  if (head == "power") {
    need(have_y, "y", "power");
    need(have_z, "z", "power");
    only(have_Q, "power");
    return power_weight(y, z);
  }
  if (head == "char") {
    need(have_Q, "Q", "char");
    only(have_y || have_z, "char");
    return real_character(Q);
  }
  bad_spec("unknown function name '" + std::string(head) + "'");
}

std::string MultFuncSpec::to_string() const {
  switch (kind_) {
    case FuncKind::constant_one:
      return "one";
    case FuncKind::liouville:
      return "liouville";
    case FuncKind::moebius:
      return "moebius";
    case FuncKind::truncated_liouville_gt:
      return "tliouville_gt:y=" + shortest_double(y_);
    case FuncKind::truncated_liouville_lt:
      return "tliouville_lt:y=" + shortest_double(y_);
    case FuncKind::smooth_indicator:
      return "smooth:y=" + shortest_double(y_);
    case FuncKind::power_weight:
      return "power:y=" + shortest_double(y_) + ",z=" + shortest_double(z_);
    case FuncKind::real_character:
      return "char:Q=" + std::to_string(Q_);
  }
  return "one";
}

double MultFuncSpec::eval(std::uint64_t n,
                          std::span<const PrimePower> factors) const {
  // One pass: verify the factorization and gather every statistic any kind
  // needs; all are a handful of integer ops per prime power.
  std::uint64_t check = 1;
  std::uint64_t big_omega = 0;       // with multiplicity
  std::uint64_t mult_gt = 0;         // multiplicity-counted, p > y
  std::uint64_t mult_lt = 0;         // multiplicity-counted, p < y
  std::uint64_t distinct_gt = 0;     // distinct, p > y
  std::uint64_t max_prime = 1;
  bool squarefree = true;
  for (const PrimePower& pp : factors) {
    std::uint64_t pe = 1;
    for (std::uint32_t i = 0; i < pp.mult; ++i) pe *= pp.prime;
    check *= pe;
    big_omega += pp.mult;
    if (pp.mult > 1) squarefree = false;
    const double p_real = static_cast<double>(pp.prime);
    if (p_real > y_) {
      mult_gt += pp.mult;
      ++distinct_gt;
    }
    if (p_real < y_) mult_lt += pp.mult;
    max_prime = pp.prime;  // factors are sorted ascending
  }
  if (check != n) {
    throw std::invalid_argument(
        "factor list multiplies to " + std::to_string(check) +
        ", expected n = " + std::to_string(n));
  }

  switch (kind_) {
    case FuncKind::constant_one:
      return 1.0;
    case FuncKind::liouville:
      return (big_omega & 1) ? -1.0 : 1.0;
    case FuncKind::moebius:
      if (!squarefree) return 0.0;
      return (factors.size() & 1) ? -1.0 : 1.0;
    case FuncKind::truncated_liouville_gt:
      return (mult_gt & 1) ? -1.0 : 1.0;
    case FuncKind::truncated_liouville_lt:
      return (mult_lt & 1) ? -1.0 : 1.0;
    case FuncKind::smooth_indicator:
      return static_cast<double>(max_prime) <= y_ ? 1.0 : 0.0;
    case FuncKind::power_weight: {
      double v = 1.0;
      for (std::uint64_t i = 0; i < distinct_gt; ++i) v *= z_;
      return v;
    }
    case FuncKind::real_character:
      return static_cast<double>(jacobi(n, Q_));
  }
  return 0.0;
}

double MultFuncSpec::eval_at_prime(std::uint64_t p) const {
  const double p_real = static_cast<double>(p);
  switch (kind_) {
    case FuncKind::constant_one:
      return 1.0;
    case FuncKind::liouville:
    case FuncKind::moebius:
      return -1.0;
    case FuncKind::truncated_liouville_gt:
      return p_real > y_ ? -1.0 : 1.0;
    case FuncKind::truncated_liouville_lt:
      return p_real < y_ ? -1.0 : 1.0;
    case FuncKind::smooth_indicator:
      return p_real <= y_ ? 1.0 : 0.0;
    case FuncKind::power_weight:
      return p_real > y_ ? z_ : 1.0;
    case FuncKind::real_character:
      return static_cast<double>(jacobi(p, Q_));
  }
  return 0.0;
}

double mean_value(const MultFuncSpec& g, std::uint64_t x) {
  require_window_start(x);
  const double sum = scan_sum(
      x, 2 * x, [&](std::uint64_t n, std::span<const PrimePower> f) {
        return g.eval(n, f);
      });
  return sum / static_cast<double>(x);
}

double log_mean_value(const MultFuncSpec& g, std::uint64_t x, double omega) {
  require_window_start(x);
  require_omega_range(x, omega, std::nextafter(1.0, 2.0));
  const double lo_real = static_cast<double>(x) / omega;
  const std::uint64_t lo =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(lo_real)));
  const double sum = scan_sum(
      lo, x, [&](std::uint64_t n, std::span<const PrimePower> f) {
        return g.eval(n, f) / static_cast<double>(n);
      });
  return sum / std::log(omega);
}

double pretentious_distance(const MultFuncSpec& f, const MultFuncSpec& g,
                            std::uint64_t X) {
  if (X < 2) throw std::domain_error("prime cutoff X must be at least 2");
  const std::vector<std::uint32_t> primes = primes_up_to(X);
  NeumaierSum s;
  for (std::uint32_t p : primes) {
    const double term =
        (1.0 - f.eval_at_prime(p) * g.eval_at_prime(p)) / static_cast<double>(p);
    s.add(term);
  }
  return std::sqrt(std::max(0.0, s.value()));
}

UniformityReport uniformity_deficiency(const MultFuncSpec& g, std::uint64_t x,
                                       std::uint64_t Q) {
  require_window_start(x);
  if (Q < 1) throw std::domain_error("modulus bound Q must be at least 1");
  if (Q > x) {
    throw std::domain_error("modulus bound Q = " + std::to_string(Q) +
                            " exceeds window start x = " + std::to_string(x));
  }
  const std::vector<double> sums = progression_sums(g, x, 2 * x, Q);
  const double full = sums[bucket_index(1, 1)];
  const double x_real = static_cast<double>(x);

  UniformityReport rep;
  rep.x = x;
  rep.Q = Q;
  for (std::uint64_t q = 1; q <= Q; ++q) {
    for (std::uint64_t a = 1; a <= q; ++a) {
      const double dev = static_cast<double>(q) *
                         std::fabs(sums[bucket_index(q, a)] / x_real -
                                   full / (static_cast<double>(q) * x_real));
      if (dev > rep.eta_star) {
        rep.eta_star = dev;
        rep.worst_q = q;
        rep.worst_a = a;
      }
    }
  }
  return rep;
}

StrongUniformityReport strong_uniformity_deficiency(const MultFuncSpec& g,
                                                    std::uint64_t x,
                                                    std::uint64_t Q,
                                                    double omega, int probes) {
  require_window_start(x);
  if (Q < 1) throw std::domain_error("modulus bound Q must be at least 1");
  if (Q > x) {
    throw std::domain_error("modulus bound Q = " + std::to_string(Q) +
                            " exceeds window start x = " + std::to_string(x));
  }
  if (probes < 2) throw std::domain_error("probe count must be at least 2");
  require_omega_range(x, omega, 1.0);

  StrongUniformityReport rep;
  rep.x = x;
  rep.Q = Q;
  rep.omega = omega;
  rep.delta = mean_value(g, x);

  for (int i = 0; i < probes; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(probes - 1);
    const double y = static_cast<double>(x) * std::pow(omega, t - 1.0);
    rep.probe_points.push_back(y);
    const std::uint64_t lo =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(y)));
    const std::uint64_t hi = static_cast<std::uint64_t>(std::floor(2.0 * y));
    const std::vector<double> sums = progression_sums(g, lo, hi, Q);
    for (std::uint64_t q = 1; q <= Q; ++q) {
      for (std::uint64_t a = 1; a <= q; ++a) {
        const double dev =
            static_cast<double>(q) *
            std::fabs(sums[bucket_index(q, a)] / y -
                      rep.delta / static_cast<double>(q));
        rep.eta_star = std::max(rep.eta_star, dev);
      }
    }
  }
  return rep;
}

double stability_gap(const MultFuncSpec& g, std::uint64_t x, double y_shrink,
                     std::uint64_t a, std::uint64_t q) {
  require_window_start(x);
  if (q < 1) throw std::domain_error("modulus q must be at least 1");
  if (!std::isfinite(y_shrink) || y_shrink < 1.0) {
    throw std::domain_error("shrink factor must be a finite real >= 1, got " +
                            shortest_double(y_shrink));
  }
  const double log_x = std::log(static_cast<double>(x));
  const double cap = std::pow(log_x, 10.0);
  if (y_shrink > cap * (1.0 + 1e-12)) {
    throw std::domain_error("shrink factor " + shortest_double(y_shrink) +
                            " exceeds log^10 x = " + shortest_double(cap));
  }
  const double shrunk = static_cast<double>(x) / y_shrink;
  if (shrunk < static_cast<double>(q)) {
    throw std::domain_error("shrunken window start x/y = " +
                            shortest_double(shrunk) +
                            " falls below the modulus q = " + std::to_string(q));
  }

  const std::uint64_t r = a % q;
  auto term = [&](std::uint64_t n, std::span<const PrimePower> f) {
    return n % q == r ? g.eval(n, f) : 0.0;
  };

  const double mean1 =
      scan_sum(x, 2 * x, term) / static_cast<double>(x);
  const std::uint64_t lo2 =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(shrunk)));
  const std::uint64_t hi2 = static_cast<std::uint64_t>(std::floor(2.0 * shrunk));
  const double mean2 = scan_sum(lo2, hi2, term) / shrunk;
  return std::fabs(mean1 - mean2);
}

}  // namespace multcorr
