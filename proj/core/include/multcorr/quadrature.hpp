#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace multcorr {

// Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule with n points (n >= 1).  Nodes are Newton-refined roots of the
// Legendre polynomial; accurate to machine precision for n <= 256.
const GaussLegendre& gauss_legendre(int n);

// Integrate f over [a, b] with the given rule.
template <class F>
double gl_integrate(const GaussLegendre& rule, double a, double b, const F& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

// Integrate f over [a, b] split at the interior breakpoints (any values
// outside (a, b) are ignored); pieces are integrated left to right so the
// result is deterministic.
template <class F>
double gl_integrate_split(const GaussLegendre& rule, double a, double b,
                          std::vector<double> breakpoints, const F& f) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double c : breakpoints) {
    if (c > cuts.back() && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gl_integrate(rule, cuts[i], cuts[i + 1], f);
  }
  return total;
}

}  // namespace multcorr
