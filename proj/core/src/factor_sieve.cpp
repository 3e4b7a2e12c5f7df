#include "multcorr/factor_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "multcorr/errors.hpp"

namespace multcorr {

namespace {

std::uint64_t isqrt_u64(std::uint64_t n) {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Sub-block length for the residual pass: keeps the scratch slot arrays
// (32768 * 15 PrimePower) inside the L2-ish working set regardless of the
// requested segment size.
constexpr std::uint64_t kSubBlock = std::uint64_t{1} << 15;

}  // namespace

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  if (limit >= (std::uint64_t{1} << 32)) {
    throw CapacityError("prime table limit " + std::to_string(limit) +
                        " exceeds 2^32");
  }
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  if (limit < 3) return primes;

  // Odd-only bit sieve: bit i represents 2i + 3.
  const std::uint64_t n_odds = (limit - 1) / 2;  // odds in [3, limit]
  std::vector<std::uint64_t> bits((n_odds + 63) / 64, ~std::uint64_t{0});
  const std::uint64_t root = isqrt_u64(limit);
  for (std::uint64_t p = 3; p <= root; p += 2) {
    const std::uint64_t i = (p - 3) / 2;
    if (!(bits[i >> 6] & (std::uint64_t{1} << (i & 63)))) continue;
    for (std::uint64_t m = p * p; m <= limit; m += 2 * p) {
      const std::uint64_t j = (m - 3) / 2;
      bits[j >> 6] &= ~(std::uint64_t{1} << (j & 63));
    }
  }
  for (std::uint64_t i = 0; i < n_odds; ++i) {
    if (bits[i >> 6] & (std::uint64_t{1} << (i & 63))) {
      primes.push_back(static_cast<std::uint32_t>(2 * i + 3));
    }
  }
  return primes;
}

std::shared_ptr<const std::vector<std::uint32_t>> sieving_primes(std::uint64_t limit) {
  static std::mutex mu;
  static std::uint64_t cached_limit = 0;
  static std::shared_ptr<const std::vector<std::uint32_t>> cached;

  std::lock_guard<std::mutex> lock(mu);
  if (!cached || limit > cached_limit) {
    cached = std::make_shared<const std::vector<std::uint32_t>>(primes_up_to(limit));
    cached_limit = limit;
  }
  return cached;
}

void FactoredSegment::check_range(std::uint64_t n) const {
  if (!contains(n)) {
    throw std::out_of_range("integer " + std::to_string(n) +
                            " outside sieved segment [" + std::to_string(lo_) +
                            ", " + std::to_string(hi_) + ")");
  }
}

std::span<const PrimePower> FactoredSegment::factors(std::uint64_t n) const {
  check_range(n);
  const auto i = static_cast<std::size_t>(n - lo_);
  return {arena_.data() + offset_[i], offset_[i + 1] - offset_[i]};
}

std::uint64_t FactoredSegment::lpf(std::uint64_t n) const {
  check_range(n);
  return lpf_[static_cast<std::size_t>(n - lo_)];
}

int FactoredSegment::omega_gt(std::uint64_t n, double y) const {
  if (!(y > 1.0) || !std::isfinite(y)) {
    throw std::domain_error("omega_gt threshold must be finite and > 1");
  }
  int count = 0;
  for (const auto& pp : factors(n)) {
    if (static_cast<double>(pp.prime) > y) ++count;
  }
  return count;
}

int omega_gt(const FactoredSegment& seg, std::uint64_t n, double y) {
  return seg.omega_gt(n, y);
}

std::uint64_t lpf(const FactoredSegment& seg, std::uint64_t n) {
  return seg.lpf(n);
}

FactoredSegment sieve_segment(std::uint64_t lo, std::uint64_t hi) {
  if (lo == 0) throw std::domain_error("sieve range must start at 1 or above");
  if (hi <= lo) throw std::domain_error("sieve range is empty");
  if (hi > kSieveWordLimit) {
    throw CapacityError("sieve range end " + std::to_string(hi) +
                        " exceeds the word limit 2^53");
  }
  if (hi - lo > kMaxSegmentSize) {
    throw CapacityError("segment of " + std::to_string(hi - lo) +
                        " integers exceeds the arena limit 2^26");
  }

  const std::uint64_t count = hi - lo;
  const std::uint64_t root = isqrt_u64(hi - 1);
  const auto primes = sieving_primes(root);

  FactoredSegment seg;
  seg.lo_ = lo;
  seg.hi_ = hi;
  seg.offset_.resize(static_cast<std::size_t>(count) + 1);
  seg.lpf_.resize(static_cast<std::size_t>(count));
  seg.arena_.reserve(static_cast<std::size_t>(count) * 4);

  std::vector<std::uint64_t> residual(kSubBlock);
  std::vector<PrimePower> slots(kSubBlock * kMaxFactorSlots);
  std::vector<std::uint8_t> n_slots(kSubBlock);

  std::uint32_t arena_pos = 0;
  for (std::uint64_t block_lo = lo; block_lo < hi; block_lo += kSubBlock) {
    const std::uint64_t block_hi = std::min(hi, block_lo + kSubBlock);
    const std::uint64_t len = block_hi - block_lo;

    for (std::uint64_t i = 0; i < len; ++i) residual[i] = block_lo + i;
    std::fill_n(n_slots.begin(), len, std::uint8_t{0});

    for (std::uint32_t p : *primes) {
      const std::uint64_t p64 = p;
      std::uint64_t m = ((block_lo + p64 - 1) / p64) * p64;
      for (; m < block_hi; m += p64) {
        const std::uint64_t i = m - block_lo;
        std::uint64_t& r = residual[i];
        std::uint32_t e = 0;
        while (r % p64 == 0) {
          r /= p64;
          ++e;
        }
        if (n_slots[i] == kMaxFactorSlots) {
          throw CapacityError("factor slot overflow at n = " + std::to_string(m));
        }
        slots[i * kMaxFactorSlots + n_slots[i]++] = PrimePower{p64, e};
      }
    }

    for (std::uint64_t i = 0; i < len; ++i) {
      if (residual[i] > 1) {
        if (n_slots[i] == kMaxFactorSlots) {
          throw CapacityError("factor slot overflow at n = " +
                              std::to_string(block_lo + i));
        }
        slots[i * kMaxFactorSlots + n_slots[i]++] = PrimePower{residual[i], 1};
      }
      const std::size_t seg_i = static_cast<std::size_t>(block_lo + i - lo);
      seg.offset_[seg_i] = arena_pos;
      const std::uint8_t k = n_slots[i];
      for (std::uint8_t j = 0; j < k; ++j) {
        seg.arena_.push_back(slots[i * kMaxFactorSlots + j]);
      }
      arena_pos += k;
      seg.lpf_[seg_i] = k == 0 ? 1 : seg.arena_.back().prime;
    }
  }
  seg.offset_[static_cast<std::size_t>(count)] = arena_pos;
  return seg;
}

void sieve_range(const SieveRequest& req,
                 const std::function<void(FactoredSegment&&)>& emit) {
  if (req.segment_size == 0) {
    throw std::domain_error("segment_size must be at least 1");
  }
  if (req.segment_size > kMaxSegmentSize) {
    throw CapacityError("segment_size exceeds the arena limit 2^26");
  }
  if (req.lo == 0) throw std::domain_error("sieve range must start at 1 or above");
  if (req.hi <= req.lo) throw std::domain_error("sieve range is empty");
  if (req.hi > kSieveWordLimit) {
    throw CapacityError("sieve range end " + std::to_string(req.hi) +
                        " exceeds the word limit 2^53");
  }

  // Build the shared prime table before the fan-out so concurrent segment
  // builds never race on the cache rebuild.
  sieving_primes(isqrt_u64(req.hi - 1));

  for (std::uint64_t lo = req.lo; lo < req.hi; lo += req.segment_size) {
    const std::uint64_t hi = std::min(req.hi, lo + req.segment_size);
    emit(sieve_segment(lo, hi));
  }
}

}  // namespace multcorr
