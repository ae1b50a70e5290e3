#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketchspan/seed.hpp"
#include "sketchspan/ur.hpp"

namespace sketchspan {

/// Everything the encoder writes down for a set S.
struct EncRecord {
  ElementSet t0;
  std::vector<std::uint8_t> message;
  std::vector<bool> accept_bits;  // one per stage i0 .. R-1
  ElementSet tail;                // S \ (A u T0)

  std::vector<std::uint8_t> serialize() const;
  static EncRecord deserialize(std::span<const std::uint8_t> in);

  bool operator==(const EncRecord&) const = default;
};

struct EncodeStats {
  std::uint32_t first_stage = 0;  // i0
  std::uint32_t accepted = 0;     // |A|
  std::uint32_t stages = 0;       // R - i0
};

/// Public permutation of [U]: rank[x] is x's position.
std::vector<std::uint32_t> shared_permutation_ranks(std::uint32_t universe, const Seed& shared_seed);

/// Encodes S (|S| = m) using the protocol's message once for (S, T0) and its
/// output function on every grown T. T0 follows the schedule drawn from the
/// private seed; the fill order comes from the shared seed.
EncRecord encode(const ElementSet& s, const UrParams& p, const UrProtocol& protocol, const Seed& shared_seed,
                 const Seed& private_seed, EncodeStats* stats = nullptr);

/// Replays the protocol outputs and permutation fills; returns S for every
/// record produced by encode, whatever the protocol does.
ElementSet decode(const EncRecord& rec, const UrParams& p, const UrProtocol& protocol, const Seed& shared_seed);

}  // namespace sketchspan
