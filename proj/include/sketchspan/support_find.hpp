#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sketchspan/seed.hpp"

namespace sketchspan {

// Repetition constant: num_reps = ceil(kRepsPerLog * log2(1/delta1)).
inline constexpr double kRepsPerLog = 4.0;
inline constexpr std::uint32_t kMaxFingerprints = 8;

/// Shape of a support-finding sketch. Everything here is a pure function of
/// (universe_size, k, delta1, delta2); see SketchParams::make.
struct SketchParams {
  std::uint64_t universe_size = 0;
  std::uint32_t k = 1;
  double delta1 = 0.5;
  double delta2 = 0.5;
  std::uint32_t num_levels = 0;
  std::uint32_t num_reps = 0;
  // Independent polynomial fingerprints per cell; more than one only when a
  // single fingerprint cannot meet delta2 by union bound over all cells.
  std::uint32_t num_fingerprints = 1;
  std::uint64_t field_modulus = 0;

  static SketchParams make(std::uint64_t universe_size, std::uint32_t k, double delta1, double delta2);

  std::uint32_t cell_width() const { return 2 + num_fingerprints; }
  std::uint64_t num_cells() const { return std::uint64_t{num_levels} * num_reps; }
  std::uint32_t slot(std::uint32_t level, std::uint32_t rep) const { return level * num_reps + rep; }

  bool operator==(const SketchParams&) const = default;
};

/// Serialized header size of one sketch, in bits.
inline constexpr std::uint64_t kSketchHeaderBytes = 92;
inline constexpr std::uint64_t kSketchHeaderBits = kSketchHeaderBytes * 8;

/// Bits of packed cell words: cell_width * num_levels * num_reps * ceil(log2 p).
std::uint64_t payload_bits(const SketchParams& params);

/// Exact serialized size in bits: header, packed cells, and padding to a byte.
std::uint64_t size_bits(const SketchParams& params);

/// Parameters plus the randomness derived from a seed. Sketches that share a
/// context (by value) are addable.
class SketchContext {
 public:
  SketchContext(SketchParams params, Seed seed);

  const SketchParams& params() const { return params_; }
  const Seed& seed() const { return seed_; }

  /// Deepest level at which `index` survives subsampling in repetition `rep`.
  /// Level l keeps an index with probability 2^-l; levels are nested.
  std::uint32_t depth(std::uint32_t rep, std::uint64_t index) const;
  bool in_level(std::uint32_t level, std::uint32_t rep, std::uint64_t index) const {
    return depth(rep, index) >= level;
  }

  std::uint64_t rho(std::uint32_t fingerprint) const { return rho_[fingerprint]; }

  bool compatible(const SketchContext& other) const {
    return this == &other || (params_ == other.params_ && seed_ == other.seed_);
  }

 private:
  SketchParams params_;
  Seed seed_;
  std::vector<std::uint64_t> rho_;
};

struct DecodedCell {
  std::uint64_t index;
  std::int64_t value;
  bool operator==(const DecodedCell&) const = default;
};

/// One-sparse test on a cell (count, index_sum, fingerprints...). Returns the
/// (index, value) pair when the cell is consistent with a single nonzero
/// coordinate inside the universe.
std::optional<DecodedCell> one_sparse_decode(const SketchContext& ctx, std::span<const std::uint64_t> cell);

class SupportResult {
 public:
  static SupportResult found(std::vector<std::uint64_t> indices) { return SupportResult(false, std::move(indices)); }
  static SupportResult fail() { return SupportResult(true, {}); }

  bool is_fail() const { return fail_; }
  const std::vector<std::uint64_t>& indices() const { return indices_; }

  bool operator==(const SupportResult&) const = default;

 private:
  SupportResult(bool fail, std::vector<std::uint64_t> indices) : fail_(fail), indices_(std::move(indices)) {}
  bool fail_;
  std::vector<std::uint64_t> indices_;
};

/// Precomputed per-index data for an update: subsampling depth per repetition
/// and rho_f^index per fingerprint. Lets several sketches sharing a context
/// absorb the same coordinate without rehashing.
struct IndexTouch {
  std::uint64_t index = 0;
  std::vector<std::uint32_t> depth;
  std::vector<std::uint64_t> rho_power;
};

IndexTouch touch_index(const SketchContext& ctx, std::uint64_t index);

/// Linear support-finding sketch of an integer vector over [0, universe_size).
///
/// Level l, repetition j holds a one-sparse cell fed by the coordinates that
/// survive subsampling to depth >= l in repetition j. Only nonzero cells are
/// stored, sorted by slot = level * num_reps + rep; the zero sketch is empty.
/// The serialized form is dense and independent of the data.
class SupportFindSketch {
 public:
  explicit SupportFindSketch(std::shared_ptr<const SketchContext> ctx);

  const SketchContext& context() const { return *ctx_; }
  const std::shared_ptr<const SketchContext>& shared_context() const { return ctx_; }
  const SketchParams& params() const { return ctx_->params(); }

  /// z[index] += delta. Throws RangeError if index >= universe_size.
  void update(std::uint64_t index, std::int64_t delta);
  void apply(const IndexTouch& touch, std::int64_t delta);

  /// Cell-wise sum. Throws IncompatibleError on differing params or seed.
  SupportFindSketch& operator+=(const SupportFindSketch& other);

  SupportResult query() const;

  bool is_zero() const { return slots_.empty(); }
  std::size_t nonzero_cells() const { return slots_.size(); }
  /// Words of cell (level, rep); all zeros for an untouched cell.
  std::vector<std::uint64_t> cell(std::uint32_t level, std::uint32_t rep) const;

  std::uint64_t size_bits() const { return sketchspan::size_bits(params()); }

  std::vector<std::uint8_t> serialize() const;
  void serialize_to(std::vector<std::uint8_t>& out) const;
  /// Parses one sketch from the front of `in`; `consumed` receives its length.
  /// When `ctx` is given the header must match it and the result shares it.
  static SupportFindSketch deserialize(std::span<const std::uint8_t> in, std::size_t* consumed = nullptr,
                                       std::shared_ptr<const SketchContext> ctx = nullptr);

  /// Sum of several sketches sharing one context, accumulated through a dense
  /// scratch buffer. Empty input is not allowed.
  static SupportFindSketch sum(std::span<const SupportFindSketch* const> parts);

  bool operator==(const SupportFindSketch& other) const;

 private:
  void merge_add(std::span<const std::uint32_t> slots, std::span<const std::uint64_t> words);

  std::shared_ptr<const SketchContext> ctx_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint64_t> words_;  // cell_width words per stored slot
};

SupportFindSketch new_support_find(std::uint64_t universe_size, std::uint32_t k, double delta1, double delta2,
                                   const Seed& seed);

SupportFindSketch sf_add(const SupportFindSketch& a, const SupportFindSketch& b);

}  // namespace sketchspan
