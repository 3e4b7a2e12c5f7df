#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "multcorr/mult_func.hpp"

namespace multcorr {

// Averaging-scale expression: log x, log 3x, or a fixed constant.  The
// correlation theorems allow any omega with 1 <= omega <= log(3x).
struct OmegaExpr {
  enum class Kind { log_x, log_3x, constant };
  Kind kind = Kind::log_x;
  double c = 0.0;

  double value_at(std::uint64_t x) const;
  std::string to_string() const;
  // Accepts "logx", "log3x", "const:<c>"; errors name the offending token.
  static OmegaExpr parse(std::string_view text);
};

struct CorrelationRequest {
  MultFuncSpec g1;
  MultFuncSpec g2;
  std::int64_t h = 1;       // nonzero shift
  std::uint64_t x = 0;      // window end, >= 100
  double omega = 0.0;       // averaging scale, 1 < omega <= log(3x)
};

struct CorrelationReport {
  double lhs = 0.0;         // (1/log w) sum_{x/w <= n <= x} g1(n) g2(n+h) / n
  double delta1 = 0.0;      // (1/x) sum_{x <= n <= 2x} g1(n)
  double delta2 = 0.0;      // (1/x) sum_{x <= n <= 2x} g2(n)
  double rhs = 0.0;         // delta1 * delta2
  double discrepancy = 0.0; // |lhs - rhs|
  std::uint64_t n_terms = 0;
};

// The logarithmically averaged correlation over n in [ceil(x/omega),
// floor(x)]; terms with n + h < 1 are skipped.
double log_correlation(const CorrelationRequest& req);

// Same window with both factors centered:
// (1/log w) sum (g1(n) - delta1)(g2(n+h) - delta2) / n.
double normalized_correlation(const CorrelationRequest& req);

// Both sides of the product law: the correlation on the left, the product of
// the window mean values on the right, and their gap.
CorrelationReport theorem13_check(const CorrelationRequest& req);

// One theorem13_check per x in ascending x_list, with omega re-evaluated at
// each x; returns (x, discrepancy) pairs.
std::vector<std::pair<std::uint64_t, double>> discrepancy_trend(
    const MultFuncSpec& g1, const MultFuncSpec& g2, std::int64_t h,
    const OmegaExpr& omega, const std::vector<std::uint64_t>& x_list);

}  // namespace multcorr
