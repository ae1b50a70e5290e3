#include "sketchspan/seed.hpp"

#include <bit>
#include <cstdio>

namespace sketchspan {

namespace {

inline void sip_round(std::uint64_t& v0, std::uint64_t& v1, std::uint64_t& v2, std::uint64_t& v3) {
  v0 += v1;
  v1 = std::rotl(v1, 13);
  v1 ^= v0;
  v0 = std::rotl(v0, 32);
  v2 += v3;
  v3 = std::rotl(v3, 16);
  v3 ^= v2;
  v0 += v3;
  v3 = std::rotl(v3, 21);
  v3 ^= v0;
  v2 += v1;
  v1 = std::rotl(v1, 17);
  v1 ^= v2;
  v2 = std::rotl(v2, 32);
}

constexpr std::uint64_t kDeriveTag = 0x6465726976650000ULL;

}  // namespace

std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, std::span<const std::uint64_t> words) {
  std::uint64_t v0 = k0 ^ 0x736f6d6570736575ULL;
  std::uint64_t v1 = k1 ^ 0x646f72616e646f6dULL;
  std::uint64_t v2 = k0 ^ 0x6c7967656e657261ULL;
  std::uint64_t v3 = k1 ^ 0x7465646279746573ULL;
  for (std::uint64_t m : words) {
    v3 ^= m;
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    v0 ^= m;
  }
  // Final block holds only the message length byte (input is word-aligned).
  std::uint64_t b = static_cast<std::uint64_t>(words.size() * 8) << 56;
  v3 ^= b;
  sip_round(v0, v1, v2, v3);
  sip_round(v0, v1, v2, v3);
  v0 ^= b;
  v2 ^= 0xff;
  for (int i = 0; i < 4; ++i) sip_round(v0, v1, v2, v3);
  return v0 ^ v1 ^ v2 ^ v3;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Seed Seed::from_u64(std::uint64_t value) {
  std::uint64_t state = value;
  std::array<std::uint64_t, 4> w{};
  for (auto& x : w) x = splitmix64(state);
  return Seed(w);
}

Seed Seed::derive(std::uint64_t tag, std::uint64_t index) const {
  std::array<std::uint64_t, 4> w{};
  for (std::uint64_t j = 0; j < 4; ++j) {
    const std::uint64_t msg[4] = {kDeriveTag, tag, index, j};
    w[j] = siphash24(key0(), key1(), msg);
  }
  return Seed(w);
}

std::uint64_t Seed::prf(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
  const std::uint64_t msg[3] = {a, b, c};
  return siphash24(key0(), key1(), msg);
}

std::mt19937_64 Seed::rng() const {
  std::seed_seq seq{static_cast<std::uint32_t>(words_[0]), static_cast<std::uint32_t>(words_[0] >> 32),
                    static_cast<std::uint32_t>(words_[1]), static_cast<std::uint32_t>(words_[1] >> 32),
                    static_cast<std::uint32_t>(words_[2]), static_cast<std::uint32_t>(words_[2] >> 32),
                    static_cast<std::uint32_t>(words_[3]), static_cast<std::uint32_t>(words_[3] >> 32)};
  return std::mt19937_64(seq);
}

std::string Seed::hex() const {
  std::string out;
  char buf[17];
  for (auto it = words_.rbegin(); it != words_.rend(); ++it) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*it));
    out += buf;
  }
  return out;
}

}  // namespace sketchspan
