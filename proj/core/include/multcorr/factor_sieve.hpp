#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace multcorr {

// One prime of a factorization together with its multiplicity.
struct PrimePower {
  std::uint64_t prime;
  std::uint32_t mult;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Largest integer the sieve accepts.  Residual arithmetic, factor
// reconstruction and the threshold guards all stay comfortably inside
// uint64/__int128 below this bound, and the sieving-prime table for
// sqrt(2^53) < 9.5e7 fits in a few megabytes.
inline constexpr std::uint64_t kSieveWordLimit = std::uint64_t{1} << 53;

// Any n < 2^64 has at most 15 distinct prime factors (2*3*...*47 > 2^64),
// so a fixed per-integer slot budget suffices; exceeding it is a logic bug.
inline constexpr int kMaxFactorSlots = 15;

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 20;

// Segments larger than this would overflow the 32-bit arena offsets.
inline constexpr std::uint64_t kMaxSegmentSize = std::uint64_t{1} << 26;

struct SieveRequest {
  std::uint64_t lo = 1;  // half-open range [lo, hi)
  std::uint64_t hi = 2;
  std::uint64_t segment_size = kDefaultSegmentSize;
};

// Complete factorizations for every integer in a contiguous half-open range.
// Immutable once built; safe to share across threads.
class FactoredSegment {
 public:
  FactoredSegment() = default;

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }
  std::uint64_t size() const { return hi_ - lo_; }
  bool contains(std::uint64_t n) const { return n >= lo_ && n < hi_; }

  // Distinct primes with multiplicities, sorted by prime ascending.
  // Empty exactly for n = 1.
  std::span<const PrimePower> factors(std::uint64_t n) const;

  // Largest prime factor, with P+(1) = 1.
  std::uint64_t lpf(std::uint64_t n) const;

  // Count of distinct primes p | n with p > y.  Requires finite y > 1.
  int omega_gt(std::uint64_t n, double y) const;

 private:
  friend FactoredSegment sieve_segment(std::uint64_t, std::uint64_t);

  void check_range(std::uint64_t n) const;

  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
  std::vector<PrimePower> arena_;
  std::vector<std::uint32_t> offset_;  // size() + 1 entries into arena_
  std::vector<std::uint64_t> lpf_;
};

// All primes <= limit, ascending.  Requires limit < 2^32.
std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);

// Cached, thread-safe variant used by the sieve; the table only grows.
std::shared_ptr<const std::vector<std::uint32_t>> sieving_primes(std::uint64_t limit);

// Factor every integer in the half-open range [lo, hi).  Pure function of
// its arguments; concurrent invocations are safe.
FactoredSegment sieve_segment(std::uint64_t lo, std::uint64_t hi);

// Stream the requested range segment by segment in ascending order.
void sieve_range(const SieveRequest& req,
                 const std::function<void(FactoredSegment&&)>& emit);

// Free-function forms of the segment queries (range-checked).
int omega_gt(const FactoredSegment& seg, std::uint64_t n, double y);
std::uint64_t lpf(const FactoredSegment& seg, std::uint64_t n);

}  // namespace multcorr
