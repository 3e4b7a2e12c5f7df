#include "multcorr/char_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "multcorr/accumulate.hpp"
#include "multcorr/errors.hpp"
#include "multcorr/parallel.hpp"

namespace multcorr {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128{a} * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Pollard-Brent rho; returns a nontrivial factor of composite odd n.
u64 pollard_brent(u64 n, u64 seed) {
  if (n % 2 == 0) return 2;
  u64 y = seed % n, c = 1 + seed % (n - 1), m = 128;
  u64 g = 1, r = 1, q = 1, x = 0, ys = 0;
  while (g == 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = (mulmod(y, y, n) + c) % n;
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      const u64 count = std::min(m, r - k);
      for (u64 i = 0; i < count; ++i) {
        y = (mulmod(y, y, n) + c) % n;
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      g = std::gcd(q, n);
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = (mulmod(ys, ys, n) + c) % n;
      g = std::gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

void factor_recursive(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  u64 d = n;
  for (u64 seed = 2; d == n; ++seed) d = pollard_brent(n, seed);
  factor_recursive(d, out);
  factor_recursive(n / d, out);
}

}  // namespace

int jacobi(u64 n, u64 Q) {
  if (Q % 2 == 0) throw std::domain_error("Jacobi symbol requires an odd modulus");
  n %= Q;
  int t = 1;
  while (n != 0) {
    while (n % 2 == 0) {
      n /= 2;
      const u64 r = Q % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(n, Q);
    if (n % 4 == 3 && Q % 4 == 3) t = -t;
    n %= Q;
  }
  return Q == 1 ? t : 0;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  // This base set is deterministic for all n < 2^64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 v = powmod(a, d, n);
    if (v == 1 || v == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < s; ++i) {
      v = mulmod(v, v, n);
      if (v == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::vector<std::pair<u64, std::uint32_t>> factor_u64(u64 n) {
  std::vector<std::pair<u64, std::uint32_t>> out;
  if (n <= 1) return out;
  for (u64 p = 2; p <= 1000000 && p * p <= n; p == 2 ? p = 3 : p += 2) {
    if (n % p == 0) {
      std::uint32_t e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) {
    std::vector<u64> rest;
    factor_recursive(n, rest);
    std::sort(rest.begin(), rest.end());
    for (std::size_t i = 0; i < rest.size();) {
      std::size_t j = i;
      while (j < rest.size() && rest[j] == rest[i]) ++j;
      out.emplace_back(rest[i], static_cast<std::uint32_t>(j - i));
      i = j;
    }
  }
  return out;
}

CharacterModulus factor_modulus(u64 Q) {
  if (Q % 2 == 0) throw std::domain_error("character modulus must be odd");
  if (Q <= 1) throw std::domain_error("character modulus must exceed 1");
  if (Q >= (u64{1} << 63)) {
    throw CapacityError("character modulus must be below 2^63");
  }
  CharacterModulus mod;
  mod.Q = Q;
  for (const auto& [p, e] : factor_u64(Q)) {
    if (e > 1) {
      throw std::domain_error("character modulus is not squarefree: " +
                              std::to_string(p) + "^" + std::to_string(e) +
                              " divides " + std::to_string(Q));
    }
    mod.prime_factors.push_back(p);
  }
  return mod;
}

double euler_product_factor(const CharacterModulus& mod) {
  double prod = 1.0;
  for (u64 p : mod.prime_factors) prod *= 1.0 - 2.0 / static_cast<double>(p);
  return prod;
}

BurgessReport burgess_corr(u64 Q, std::int64_t h, u64 x, double omega) {
  if (h == 0) throw std::domain_error("shift h must be nonzero");
  const CharacterModulus mod = factor_modulus(Q);
  if (!(omega > 1.0) || !std::isfinite(omega)) {
    throw std::domain_error("omega must be a finite value above 1");
  }
  if (x < 2) throw std::domain_error("window end x must be at least 2");

  const u64 lo = static_cast<u64>(std::ceil(static_cast<double>(x) / omega));
  const u64 hi = x;

  struct Partial {
    NeumaierSum sum;
    u64 terms = 0;
  };
  NeumaierSum total;
  u64 terms = 0;
  parallel_chunks<Partial>(
      lo, hi, kScanChunk,
      [&](u64 a, u64 b) {
        Partial part;
        for (u64 n = a; n <= b; ++n) {
          const std::int64_t shifted = static_cast<std::int64_t>(n) + h;
          if (shifted < 1) continue;
          const int c =
              jacobi(n, Q) * jacobi(static_cast<u64>(shifted), Q);
          if (c != 0) part.sum.add(c / static_cast<double>(n));
          ++part.terms;
        }
        return part;
      },
      [&](Partial&& part) {
        total.merge(part.sum);
        terms += part.terms;
      });

  BurgessReport rep;
  rep.Q = Q;
  rep.h = h;
  rep.x = x;
  rep.omega = omega;
  rep.value = total.value() / std::log(omega);
  rep.in_burgess_regime =
      std::log(static_cast<double>(Q)) <=
      (4.0 - kBurgessEpsilon) * std::log(static_cast<double>(x));
  rep.n_terms = terms;
  return rep;
}

QnrPairReport qnr_pair_densities(u64 Q, u64 x) {
  const CharacterModulus mod = factor_modulus(Q);
  if (x < 10000) throw std::domain_error("density scan needs x >= 10^4");

  struct Partial {
    NeumaierSum log_sum;
    u64 count = 0;
  };
  NeumaierSum log_sum;
  u64 count = 0;
  parallel_chunks<Partial>(
      1, x, kScanChunk,
      [&](u64 a, u64 b) {
        Partial part;
        for (u64 n = a; n <= b; ++n) {
          if (jacobi(n, Q) == -1 && jacobi(n + 1, Q) == -1) {
            part.log_sum.add(1.0 / static_cast<double>(n));
            ++part.count;
          }
        }
        return part;
      },
      [&](Partial&& part) {
        log_sum.merge(part.log_sum);
        count += part.count;
      });

  QnrPairReport rep;
  rep.Q = Q;
  rep.x = x;
  rep.log_density = log_sum.value() / std::log(static_cast<double>(x));
  rep.natural_density = static_cast<double>(count) / static_cast<double>(x);
  rep.target = euler_product_factor(mod) / 4.0;
  return rep;
}

}  // namespace multcorr
