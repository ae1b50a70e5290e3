#include "sketchspan/ur.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sketchspan/bytes.hpp"
#include "sketchspan/errors.hpp"
#include "sketchspan/support_find.hpp"

namespace sketchspan {

std::optional<std::uint32_t> UrParams::stage_of(std::uint32_t size) const {
  auto it = std::find(schedule.begin(), schedule.end(), size);
  if (it == schedule.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - schedule.begin());
}

UrParams ur_params(std::uint32_t universe, double delta, double c_size, double c_r) {
  if (universe < 4) throw ParameterError("UR universe must have at least 4 elements");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(c_size > 0.0) || !(c_r > 0.0)) throw ParameterError("schedule constants must be positive");

  UrParams p;
  p.universe = universe;
  p.delta = delta;
  p.c_size = c_size;
  p.c_r = c_r;
  const double log_inv = std::log2(1.0 / delta);
  p.alpha = c_size / log_inv;
  if (p.alpha >= 1.0) throw RegimeError("alpha = " + std::to_string(p.alpha) + " >= 1; need log2(1/delta) > c_size");
  p.m = static_cast<std::uint32_t>(std::floor(std::sqrt(universe * log_inv) + 1e-9));
  if (p.m > universe) throw RegimeError("set size m = " + std::to_string(p.m) + " exceeds the universe");
  if (p.m == 0) throw RegimeError("set size m is zero");

  const double am = p.alpha * p.m;
  const double rounds = am > 1.0 ? std::floor(std::log2(am) / (c_r * p.alpha) + 1e-9) : 0.0;
  if (rounds < 1.0) throw ScheduleError("empty size schedule (R = 0)");
  p.rounds = static_cast<std::uint32_t>(rounds);
  for (std::uint32_t i = 0; i < p.rounds; ++i) {
    const double r = p.m * (1.0 - std::pow(1.0 - p.alpha, static_cast<double>(i)));
    p.schedule.push_back(static_cast<std::uint32_t>(std::floor(r + 1e-9)));
  }
  for (std::uint32_t i = 0; i + 1 < p.rounds; ++i) {
    if (p.schedule[i + 1] <= p.schedule[i]) {
      throw ScheduleError("schedule not strictly increasing at i = " + std::to_string(i + 1) + " (r = " +
                          std::to_string(p.schedule[i + 1]) + ")");
    }
  }
  if (p.schedule.back() >= p.m) throw ScheduleError("largest T size must stay below m");
  p.degenerate = p.rounds == 1;
  return p;
}

ElementSet random_subset(std::uint32_t universe, std::uint32_t k, std::mt19937_64& rng) {
  if (k > universe) throw ParameterError("subset larger than universe");
  // Floyd's algorithm.
  ElementSet out;
  out.reserve(k);
  std::vector<bool> taken(universe, false);
  for (std::uint32_t j = universe - k; j < universe; ++j) {
    const auto t = std::uniform_int_distribution<std::uint32_t>(0, j)(rng);
    const Element pick = taken[t] ? j : t;
    taken[pick] = true;
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ElementSet random_subset_of(const ElementSet& from, std::uint32_t k, std::mt19937_64& rng) {
  ElementSet positions = random_subset(static_cast<std::uint32_t>(from.size()), k, rng);
  for (auto& x : positions) x = from[x];
  return positions;
}

UrInstance sample_d_ur(const UrParams& p, std::mt19937_64& rng) {
  UrInstance inst;
  inst.s = random_subset(p.universe, p.m, rng);
  inst.stage = std::uniform_int_distribution<std::uint32_t>(0, p.rounds - 1)(rng);
  inst.t = random_subset_of(inst.s, p.schedule[inst.stage], rng);
  return inst;
}

bool contains(const ElementSet& s, Element x) { return std::binary_search(s.begin(), s.end(), x); }

ElementSet set_difference(const ElementSet& a, const ElementSet& b) {
  ElementSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_ur_pair(const ElementSet& s, const ElementSet& t) {
  if (!std::includes(s.begin(), s.end(), t.begin(), t.end())) throw ParameterError("T is not a subset of S");
  if (t.size() >= s.size()) throw ParameterError("T must be a proper subset of S");
}

std::vector<std::uint8_t> ur_alice(const ElementSet& s, std::uint32_t universe, double delta1, double delta2,
                                   const Seed& seed) {
  SupportFindSketch sketch = new_support_find(universe, 1, delta1, delta2, seed);
  for (Element x : s) sketch.update(x, +1);
  return sketch.serialize();
}

std::optional<Element> ur_bob(std::span<const std::uint8_t> message, const ElementSet& t) {
  SupportFindSketch sketch = SupportFindSketch::deserialize(message);
  for (Element x : t) sketch.update(x, -1);
  const SupportResult result = sketch.query();
  if (result.is_fail() || result.indices().empty()) return std::nullopt;
  return static_cast<Element>(result.indices().front());
}

std::vector<std::uint8_t> SketchUrProtocol::message(const ElementSet& s, const Seed& alice_seed) const {
  return ur_alice(s, universe_, delta1_, delta2_, alice_seed);
}

std::optional<Element> SketchUrProtocol::output(std::span<const std::uint8_t> message, const ElementSet& t) const {
  return ur_bob(message, t);
}

std::vector<std::uint8_t> AlwaysWrongProtocol::message(const ElementSet& s, const Seed&) const {
  std::vector<std::uint8_t> out;
  bytes::Writer w(out);
  w.u32(static_cast<std::uint32_t>(s.size()));
  for (Element x : s) w.u32(x);
  return out;
}

std::optional<Element> AlwaysWrongProtocol::output(std::span<const std::uint8_t> message, const ElementSet& t) const {
  bytes::Reader r(message);
  ElementSet s(r.u32());
  for (auto& x : s) x = r.u32();
  for (Element x = 0; x < universe_; ++x) {
    if (!contains(s, x) || contains(t, x)) return x;
  }
  return std::nullopt;
}

}  // namespace sketchspan
