#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sketchspan/seed.hpp"

namespace sketchspan {

using Element = std::uint32_t;
using ElementSet = std::vector<Element>;  // sorted, distinct

/// Size schedule of the hard UR-subset distribution over [U].
///   m = floor(sqrt(U log2(1/delta))), alpha = c_size / log2(1/delta),
///   R = floor(log2(alpha m) / (c_r alpha)), r_i = floor(m (1 - (1-alpha)^i)).
struct UrParams {
  std::uint32_t universe = 0;
  double delta = 0;
  double c_size = 20;
  double c_r = 20;
  std::uint32_t m = 0;
  double alpha = 0;
  std::uint32_t rounds = 0;
  std::vector<std::uint32_t> schedule;  // r_0 .. r_{R-1}
  // A single-entry schedule (R = 1) only ever produces T = {}.
  bool degenerate = false;

  /// r_i, with r_R = m.
  std::uint32_t size_at(std::uint32_t i) const { return i < rounds ? schedule[i] : m; }
  /// i with r_i == size, if any.
  std::optional<std::uint32_t> stage_of(std::uint32_t size) const;
};

inline constexpr double kPaperSizeConstant = 20.0;
inline constexpr double kPaperRoundConstant = 20.0;

/// Throws RegimeError when alpha >= 1 or m > U, ScheduleError when the
/// schedule is empty or not strictly increasing.
UrParams ur_params(std::uint32_t universe, double delta, double c_size = kPaperSizeConstant,
                   double c_r = kPaperRoundConstant);

struct UrInstance {
  ElementSet s;
  ElementSet t;
  std::uint32_t stage = 0;  // i with |T| = r_i
};

UrInstance sample_d_ur(const UrParams& p, std::mt19937_64& rng);

/// Throws ParameterError unless t is a proper subset of s.
void check_ur_pair(const ElementSet& s, const ElementSet& t);

ElementSet set_difference(const ElementSet& a, const ElementSet& b);
bool contains(const ElementSet& s, Element x);

/// Uniform k-subset of [0, universe), sorted.
ElementSet random_subset(std::uint32_t universe, std::uint32_t k, std::mt19937_64& rng);
/// Uniform k-subset of `from`, sorted.
ElementSet random_subset_of(const ElementSet& from, std::uint32_t k, std::mt19937_64& rng);

/// Alice sketches the indicator of S with a SupportFind_1 sketch over [U].
std::vector<std::uint8_t> ur_alice(const ElementSet& s, std::uint32_t universe, double delta1, double delta2,
                                   const Seed& seed);
/// Bob subtracts the indicator of T and queries; nullopt is Fail.
std::optional<Element> ur_bob(std::span<const std::uint8_t> message, const ElementSet& t);

/// One-way UR-subset protocol: a message from S, an output function of
/// (message, T). Output nullopt stands for Fail.
class UrProtocol {
 public:
  virtual ~UrProtocol() = default;
  virtual std::vector<std::uint8_t> message(const ElementSet& s, const Seed& alice_seed) const = 0;
  virtual std::optional<Element> output(std::span<const std::uint8_t> message, const ElementSet& t) const = 0;
};

class SketchUrProtocol final : public UrProtocol {
 public:
  SketchUrProtocol(std::uint32_t universe, double delta1, double delta2)
      : universe_(universe), delta1_(delta1), delta2_(delta2) {}
  std::vector<std::uint8_t> message(const ElementSet& s, const Seed& alice_seed) const override;
  std::optional<Element> output(std::span<const std::uint8_t> message, const ElementSet& t) const override;

 private:
  std::uint32_t universe_;
  double delta1_;
  double delta2_;
};

class AlwaysFailProtocol final : public UrProtocol {
 public:
  std::vector<std::uint8_t> message(const ElementSet&, const Seed&) const override { return {}; }
  std::optional<Element> output(std::span<const std::uint8_t>, const ElementSet&) const override { return std::nullopt; }
};

/// Sends S in the clear and answers with an element outside S \ T whenever one
/// exists in [U].
class AlwaysWrongProtocol final : public UrProtocol {
 public:
  explicit AlwaysWrongProtocol(std::uint32_t universe) : universe_(universe) {}
  std::vector<std::uint8_t> message(const ElementSet& s, const Seed&) const override;
  std::optional<Element> output(std::span<const std::uint8_t> message, const ElementSet& t) const override;

 private:
  std::uint32_t universe_;
};

}  // namespace sketchspan
