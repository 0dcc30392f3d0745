#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <random>

namespace gene {

using Value = std::int32_t;

// 32-bit two's-complement arithmetic. Overflow wraps silently; division by
// zero must be guarded by the caller.
inline Value wrap_add(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint32_t>(a) + static_cast<std::uint32_t>(b));
}

inline Value wrap_sub(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint32_t>(a) - static_cast<std::uint32_t>(b));
}

inline Value wrap_mul(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(b));
}

inline Value wrap_neg(Value a) { return wrap_sub(0, a); }

// Truncates toward zero; INT32_MIN / -1 wraps back to INT32_MIN.
inline Value wrap_div(Value a, Value b) {
  if (b == -1) return wrap_neg(a);
  return a / b;
}

inline Value wrap_mod(Value a, Value b) {
  if (b == -1) return 0;
  return a % b;
}

// splitmix64, used to derive independent seeds for sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

// Deterministic RNG. Bounded draws avoid std::uniform_int_distribution so the
// byte stream is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

// A work budget: a cap on attempts, wall-clock seconds, or both. Zero means
// unbounded. Attempt-capped runs are bit-reproducible; wall-clock caps are
// checked at batch granularity and stop at a machine-dependent point.
struct Budget {
  std::uint64_t max_attempts = 0;
  double max_seconds = 0.0;

  static Budget attempts(std::uint64_t n) { return Budget{n, 0.0}; }
  static Budget seconds(double s) { return Budget{0, s}; }
  bool unbounded() const { return max_attempts == 0 && max_seconds == 0.0; }
};

class BudgetGate {
 public:
  explicit BudgetGate(Budget b)
      : budget_(b), start_(std::chrono::steady_clock::now()) {}

  void charge(std::uint64_t n = 1) { used_ += n; }
  std::uint64_t used() const { return used_; }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool exhausted() const {
    if (budget_.max_attempts && used_ >= budget_.max_attempts) return true;
    if (budget_.max_seconds > 0.0 && elapsed() >= budget_.max_seconds) return true;
    return false;
  }

 private:
  Budget budget_;
  std::uint64_t used_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace gene
