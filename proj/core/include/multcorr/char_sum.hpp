#pragma once

#include <cstdint>
#include <vector>

namespace multcorr {

// Odd squarefree modulus Q > 1 together with its prime factorization.
// For such Q the Jacobi symbol (. | Q) is the real primitive character mod Q.
struct CharacterModulus {
  std::uint64_t Q = 0;
  std::vector<std::uint64_t> prime_factors;  // sorted ascending, distinct
};

struct QnrPairReport {
  std::uint64_t Q = 0;
  std::uint64_t x = 0;
  double log_density = 0.0;      // (1/log x) sum over n <= x, both QNR, of 1/n
  double natural_density = 0.0;  // (1/x) count of n <= x with both QNR
  double target = 0.0;           // (1/4) prod_{p|Q} (1 - 2/p)
};

struct BurgessReport {
  std::uint64_t Q = 0;
  std::int64_t h = 0;
  std::uint64_t x = 0;
  double omega = 0.0;
  double value = 0.0;
  bool in_burgess_regime = false;  // Q <= x^(4 - eps); reported, not enforced
  std::uint64_t n_terms = 0;
};

// Slack in the reported Burgess-regime flag Q <= x^(4 - eps).
inline constexpr double kBurgessEpsilon = 0.1;

// Jacobi symbol (n | Q) for odd Q >= 1 via the binary reciprocity algorithm.
// Completely multiplicative in n, period Q, zero iff gcd(n, Q) > 1.
int jacobi(std::uint64_t n, std::uint64_t Q);

// Deterministic Miller-Rabin primality test for 64-bit integers.
bool is_prime_u64(std::uint64_t n);

// Factorization of an arbitrary 64-bit integer: trial division to 1e6, then
// Miller-Rabin plus Pollard-Brent rho.  Returns distinct primes with
// multiplicities, sorted ascending.
std::vector<std::pair<std::uint64_t, std::uint32_t>> factor_u64(std::uint64_t n);

// Validate Q as an odd squarefree modulus > 1 and factor it.  Rejection
// messages name the repeated prime for non-squarefree input.
CharacterModulus factor_modulus(std::uint64_t Q);

// prod_{p|Q} (1 - 2/p); the QNR pair target is a quarter of this.
double euler_product_factor(const CharacterModulus& mod);

// (1/log omega) sum_{x/omega <= n <= x} chi_Q(n) chi_Q(n+h) / n, the
// logarithmic average of chi_Q(n(n+h)) by complete multiplicativity.
BurgessReport burgess_corr(std::uint64_t Q, std::int64_t h, std::uint64_t x,
                           double omega);

// Logarithmic and natural densities of {n <= x : n and n+1 both QNR mod Q}.
QnrPairReport qnr_pair_densities(std::uint64_t Q, std::uint64_t x);

}  // namespace multcorr
