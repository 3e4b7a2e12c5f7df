#include "multcorr/correlate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>

#include "multcorr/accumulate.hpp"
#include "multcorr/parallel.hpp"

namespace multcorr {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void validate(const CorrelationRequest& req) {
  if (req.h == 0) throw std::domain_error("shift h must be nonzero");
  if (req.x < 100) {
    throw std::domain_error("window end x must be at least 100, got " +
                            std::to_string(req.x));
  }
  if (!std::isfinite(req.omega) || req.omega <= 1.0) {
    throw std::domain_error(
        "averaging scale omega must be a finite real > 1, got " +
        fmt(req.omega));
  }
  const double cap = std::log(3.0 * static_cast<double>(req.x));
  if (req.omega > cap * (1.0 + 1e-12)) {
    throw std::domain_error("averaging scale omega = " + fmt(req.omega) +
                            " exceeds log(3x) = " + fmt(cap));
  }
}

struct WindowSums {
  NeumaierSum s12;    // g1(n) g2(n+h) / n
  NeumaierSum s1;     // g1(n) / n
  NeumaierSum s2;     // g2(n+h) / n
  NeumaierSum s0;     // 1 / n
  NeumaierSum s12c;   // (g1(n) - d1)(g2(n+h) - d2) / n, when centered
  std::uint64_t terms = 0;

  void merge(WindowSums&& o) {
    s12.merge(o.s12);
    s1.merge(o.s1);
    s2.merge(o.s2);
    s0.merge(o.s0);
    s12c.merge(o.s12c);
    terms += o.terms;
  }
};

// One deterministic pass over the correlation window [ceil(x/omega), x],
// accumulating every sum the reports need.  Terms with n + h < 1 are
// skipped.  When `centered`, also accumulates the (g1-d1)(g2-d2) sum.
WindowSums scan_window(const CorrelationRequest& req, bool centered, double d1,
                       double d2) {
  const std::uint64_t x = req.x;
  const std::int64_t h = req.h;
  std::uint64_t lo = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(x) / req.omega));
  if (lo < 1) lo = 1;
  if (h < 0) {
    // n + h >= 1  <=>  n >= 1 - h
    const std::uint64_t min_n = static_cast<std::uint64_t>(1 - h);
    lo = std::max(lo, min_n);
  }
  WindowSums total;
  if (lo > x) return total;

  parallel_chunks<WindowSums>(
      lo, x, kScanChunk,
      [&](std::uint64_t a, std::uint64_t b) {
        WindowSums part;
        // Factor both n and n+h; for small |h| one widened segment covers
        // both ranges, otherwise a second segment is fetched.
        const std::uint64_t abs_h =
            static_cast<std::uint64_t>(h < 0 ? -h : h);
        const std::uint64_t a2 = h < 0 ? a - abs_h : a + abs_h;
        const std::uint64_t b2 = h < 0 ? b - abs_h : b + abs_h;
        std::optional<FactoredSegment> shifted_seg;
        FactoredSegment main_seg = [&] {
          if (abs_h <= kScanChunk) {
            return sieve_segment(std::min(a, a2), std::max(b, b2) + 1);
          }
          shifted_seg = sieve_segment(a2, b2 + 1);
          return sieve_segment(a, b + 1);
        }();
        const FactoredSegment& src2 = shifted_seg ? *shifted_seg : main_seg;
        for (std::uint64_t n = a; n <= b; ++n) {
          const std::uint64_t n2 = h < 0 ? n - abs_h : n + abs_h;
          const double inv_n = 1.0 / static_cast<double>(n);
          const double v1 = req.g1.eval(n, main_seg.factors(n));
          const double v2 = req.g2.eval(n2, src2.factors(n2));
          part.s12.add(v1 * v2 * inv_n);
          part.s1.add(v1 * inv_n);
          part.s2.add(v2 * inv_n);
          part.s0.add(inv_n);
          if (centered) part.s12c.add((v1 - d1) * (v2 - d2) * inv_n);
          ++part.terms;
        }
        return part;
      },
      [&](WindowSums&& part) { total.merge(std::move(part)); });
  return total;
}

}  // namespace

double OmegaExpr::value_at(std::uint64_t x) const {
  switch (kind) {
    case Kind::log_x:
      return std::log(static_cast<double>(x));
    case Kind::log_3x:
      return std::log(3.0 * static_cast<double>(x));
    case Kind::constant:
      return c;
  }
  return c;
}

std::string OmegaExpr::to_string() const {
  switch (kind) {
    case Kind::log_x:
      return "logx";
    case Kind::log_3x:
      return "log3x";
    case Kind::constant:
      return "const:" + fmt(c);
  }
  return "logx";
}

OmegaExpr OmegaExpr::parse(std::string_view text) {
  OmegaExpr expr;
  if (text == "logx") {
    expr.kind = Kind::log_x;
    return expr;
  }
  if (text == "log3x") {
    expr.kind = Kind::log_3x;
    return expr;
  }
  constexpr std::string_view prefix = "const:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view num = text.substr(prefix.size());
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw std::invalid_argument("invalid omega constant '" +
                                  std::string(num) + "'");
    }
    expr.kind = Kind::constant;
    expr.c = v;
    return expr;
  }
  throw std::invalid_argument("invalid omega expression '" + std::string(text) +
                              "'; expected logx, log3x, or const:<c>");
}

double log_correlation(const CorrelationRequest& req) {
  validate(req);
  const WindowSums sums = scan_window(req, false, 0.0, 0.0);
  return sums.s12.value() / std::log(req.omega);
}

double normalized_correlation(const CorrelationRequest& req) {
  validate(req);
  const double d1 = mean_value(req.g1, req.x);
  const double d2 = mean_value(req.g2, req.x);
  const WindowSums sums = scan_window(req, true, d1, d2);
  return sums.s12c.value() / std::log(req.omega);
}

CorrelationReport theorem13_check(const CorrelationRequest& req) {
  validate(req);
  CorrelationReport rep;
  rep.delta1 = mean_value(req.g1, req.x);
  rep.delta2 = mean_value(req.g2, req.x);
  const WindowSums sums = scan_window(req, false, 0.0, 0.0);
  rep.lhs = sums.s12.value() / std::log(req.omega);
  rep.rhs = rep.delta1 * rep.delta2;
  rep.discrepancy = std::fabs(rep.lhs - rep.rhs);
  rep.n_terms = sums.terms;
  return rep;
}

std::vector<std::pair<std::uint64_t, double>> discrepancy_trend(
    const MultFuncSpec& g1, const MultFuncSpec& g2, std::int64_t h,
    const OmegaExpr& omega, const std::vector<std::uint64_t>& x_list) {
  if (x_list.empty()) {
    throw std::domain_error("x_list must be nonempty");
  }
  for (std::size_t i = 1; i < x_list.size(); ++i) {
    if (x_list[i] <= x_list[i - 1]) {
      throw std::domain_error("x_list must be strictly ascending");
    }
  }
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(x_list.size());
  for (std::uint64_t x : x_list) {
    CorrelationRequest req{g1, g2, h, x, omega.value_at(x)};
    out.push_back({x, theorem13_check(req).discrepancy});
  }
  return out;
}

}  // namespace multcorr
