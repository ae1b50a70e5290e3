#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace sketchspan {

/// SipHash-2-4 over a sequence of 64-bit words (little-endian word encoding).
std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, std::span<const std::uint64_t> words);

std::uint64_t splitmix64(std::uint64_t& state);

/// 256-bit seed. All randomness in the library (sketch subsampling, fingerprint
/// bases, graph samplers) is a deterministic function of one of these, so any
/// party holding the same seed reproduces the same random choices.
class Seed {
 public:
  constexpr Seed() = default;
  constexpr explicit Seed(std::array<std::uint64_t, 4> words) : words_(words) {}

  static Seed from_u64(std::uint64_t value);

  const std::array<std::uint64_t, 4>& words() const { return words_; }

  /// Child seed for (tag, index); distinct (tag, index) give independent-looking seeds.
  Seed derive(std::uint64_t tag, std::uint64_t index = 0) const;

  /// Keyed pseudorandom function of up to three words.
  std::uint64_t prf(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

  std::mt19937_64 rng() const;

  std::string hex() const;

  bool operator==(const Seed&) const = default;

 private:
  std::uint64_t key0() const { return words_[0] ^ words_[2]; }
  std::uint64_t key1() const { return words_[1] ^ words_[3]; }

  std::array<std::uint64_t, 4> words_{};
};

// Tags used with Seed::derive so that independent consumers never share a stream.
namespace seed_tag {
inline constexpr std::uint64_t kRound = 0x726f756e64ULL;        // "round"
inline constexpr std::uint64_t kTrial = 0x747269616cULL;        // "trial"
inline constexpr std::uint64_t kStream = 0x73747265616dULL;     // "stream"
inline constexpr std::uint64_t kBank = 0x62616e6bULL;           // "bank"
inline constexpr std::uint64_t kGraph = 0x6772617068ULL;        // "graph"
inline constexpr std::uint64_t kPermutation = 0x7065726dULL;    // "perm"
inline constexpr std::uint64_t kSketch = 0x736b65746368ULL;     // "sketch"
inline constexpr std::uint64_t kInstance = 0x696e7374ULL;       // "inst"
inline constexpr std::uint64_t kPrivate = 0x707269760ULL;       // "priv"
}  // namespace seed_tag

}  // namespace sketchspan
