#pragma once

#include <cstdint>

// Arithmetic in GF(p) for the Mersenne prime p = 2^61 - 1.
namespace sketchspan::field {

inline constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;
inline constexpr unsigned kBits = 61;

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kModulus ? s - kModulus : s;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) {
  return a >= b ? a - b : a + kModulus - b;
}

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  __uint128_t z = static_cast<__uint128_t>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(z) & kModulus;
  std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
  std::uint64_t s = lo + hi;
  return s >= kModulus ? s - kModulus : s;
}

inline std::uint64_t pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  while (exp != 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

// a must be nonzero.
inline std::uint64_t inverse(std::uint64_t a) { return pow(a, kModulus - 2); }

inline std::uint64_t from_signed(std::int64_t v) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % kModulus;
  std::uint64_t m = static_cast<std::uint64_t>(-(v + 1)) % kModulus;  // |v| - 1, overflow-safe
  return sub(kModulus - 1, m);
}

// Representative in (-p/2, p/2].
inline std::int64_t to_signed(std::uint64_t a) {
  return a > kModulus / 2 ? -static_cast<std::int64_t>(kModulus - a) : static_cast<std::int64_t>(a);
}

}  // namespace sketchspan::field
