#include "sketchspan/support_find.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sketchspan/bytes.hpp"
#include "sketchspan/errors.hpp"
#include "sketchspan/field.hpp"

namespace sketchspan {

namespace {

constexpr std::uint64_t kDepthTag = 0x6465707468ULL;  // "depth"
constexpr std::uint64_t kRhoTag = 0x72686fULL;        // "rho"
constexpr std::uint32_t kMagic = 0x31534653;          // "SFS1"

bool valid_probability(double p) { return p > 0.0 && p < 1.0; }

bool all_zero(std::span<const std::uint64_t> words) {
  return std::all_of(words.begin(), words.end(), [](std::uint64_t w) { return w == 0; });
}

}  // namespace

SketchParams SketchParams::make(std::uint64_t universe_size, std::uint32_t k, double delta1, double delta2) {
  if (universe_size == 0) throw ParameterError("universe size must be positive");
  if (k == 0) throw ParameterError("k must be positive");
  if (!valid_probability(delta1)) throw ParameterError("delta1 must lie in (0,1)");
  if (!valid_probability(delta2)) throw ParameterError("delta2 must lie in (0,1)");
  if (universe_size >= field::kModulus) throw ParameterError("universe size must be below the field modulus");

  SketchParams p;
  p.universe_size = universe_size;
  p.k = k;
  p.delta1 = delta1;
  p.delta2 = delta2;
  p.field_modulus = field::kModulus;
  // ceil(log2 N) + 1
  p.num_levels = static_cast<std::uint32_t>(std::bit_width(universe_size - 1)) + 1;
  const double t = std::max(static_cast<double>(k), std::log2(1.0 / delta1));
  double reps = std::ceil(kRepsPerLog * t - 1e-9);
  p.num_reps = static_cast<std::uint32_t>(std::max(1.0, reps));

  // Wrong output needs a fingerprint collision in some decoded cell; each has
  // probability <= N/p per fingerprint. Union bound over all cells.
  const double log_cells = std::log2(static_cast<double>(p.num_cells()));
  const double log_collision = std::log2(static_cast<double>(universe_size)) - std::log2(static_cast<double>(field::kModulus));
  const double target = std::log2(delta2);
  std::uint32_t f = 1;
  while (log_cells + f * log_collision > target) {
    if (++f > kMaxFingerprints) throw ParameterError("delta2 too small for this universe size");
  }
  p.num_fingerprints = f;
  return p;
}

std::uint64_t payload_bits(const SketchParams& params) {
  return std::uint64_t{params.cell_width()} * params.num_cells() * field::kBits;
}

std::uint64_t size_bits(const SketchParams& params) {
  return kSketchHeaderBits + (payload_bits(params) + 7) / 8 * 8;
}

SketchContext::SketchContext(SketchParams params, Seed seed) : params_(params), seed_(seed) {
  rho_.reserve(params_.num_fingerprints);
  for (std::uint32_t f = 0; f < params_.num_fingerprints; ++f) {
    std::uint64_t r = 0;
    for (std::uint64_t attempt = 0; r < 2; ++attempt) r = seed_.prf(kRhoTag, f, attempt) % field::kModulus;
    rho_.push_back(r);
  }
}

std::uint32_t SketchContext::depth(std::uint32_t rep, std::uint64_t index) const {
  const std::uint64_t h = seed_.prf(kDepthTag, rep, index);
  const auto d = static_cast<std::uint32_t>(std::countr_zero(h));
  return std::min(d, params_.num_levels - 1);
}

std::optional<DecodedCell> one_sparse_decode(const SketchContext& ctx, std::span<const std::uint64_t> cell) {
  const std::uint64_t count = cell[0];
  if (count == 0) return std::nullopt;
  const std::uint64_t index = field::mul(cell[1], field::inverse(count));
  if (index >= ctx.params().universe_size) return std::nullopt;
  for (std::uint32_t f = 0; f < ctx.params().num_fingerprints; ++f) {
    if (cell[2 + f] != field::mul(count, field::pow(ctx.rho(f), index))) return std::nullopt;
  }
  return DecodedCell{index, field::to_signed(count)};
}

IndexTouch touch_index(const SketchContext& ctx, std::uint64_t index) {
  const SketchParams& p = ctx.params();
  if (index >= p.universe_size) {
    throw RangeError("index " + std::to_string(index) + " outside universe of size " + std::to_string(p.universe_size));
  }
  IndexTouch t;
  t.index = index;
  t.depth.resize(p.num_reps);
  for (std::uint32_t j = 0; j < p.num_reps; ++j) t.depth[j] = ctx.depth(j, index);
  t.rho_power.resize(p.num_fingerprints);
  for (std::uint32_t f = 0; f < p.num_fingerprints; ++f) t.rho_power[f] = field::pow(ctx.rho(f), index);
  return t;
}

SupportFindSketch::SupportFindSketch(std::shared_ptr<const SketchContext> ctx) : ctx_(std::move(ctx)) {
  if (!ctx_) throw ParameterError("null sketch context");
}

SupportFindSketch new_support_find(std::uint64_t universe_size, std::uint32_t k, double delta1, double delta2,
                                   const Seed& seed) {
  auto params = SketchParams::make(universe_size, k, delta1, delta2);
  return SupportFindSketch(std::make_shared<const SketchContext>(params, seed));
}

void SupportFindSketch::update(std::uint64_t index, std::int64_t delta) { apply(touch_index(*ctx_, index), delta); }

void SupportFindSketch::apply(const IndexTouch& touch, std::int64_t delta) {
  if (delta == 0) return;
  const SketchParams& p = params();
  const std::uint32_t width = p.cell_width();
  const std::uint64_t d = field::from_signed(delta);
  const std::uint64_t di = field::mul(d, touch.index % field::kModulus);

  std::vector<std::uint64_t> cell(width);
  cell[0] = d;
  cell[1] = di;
  for (std::uint32_t f = 0; f < p.num_fingerprints; ++f) cell[2 + f] = field::mul(d, touch.rho_power[f]);

  std::vector<std::uint32_t> slots;
  for (std::uint32_t level = 0; level < p.num_levels; ++level) {
    for (std::uint32_t j = 0; j < p.num_reps; ++j) {
      if (touch.depth[j] >= level) slots.push_back(p.slot(level, j));
    }
  }
  std::vector<std::uint64_t> words;
  words.reserve(slots.size() * width);
  for (std::size_t i = 0; i < slots.size(); ++i) words.insert(words.end(), cell.begin(), cell.end());
  merge_add(slots, words);
}

void SupportFindSketch::merge_add(std::span<const std::uint32_t> slots, std::span<const std::uint64_t> words) {
  const std::uint32_t width = params().cell_width();
  std::vector<std::uint32_t> out_slots;
  std::vector<std::uint64_t> out_words;
  out_slots.reserve(slots_.size() + slots.size());
  out_words.reserve(words_.size() + words.size());

  auto emit = [&](std::uint32_t slot, const std::uint64_t* w) {
    out_slots.push_back(slot);
    out_words.insert(out_words.end(), w, w + width);
  };

  std::size_t a = 0, b = 0;
  std::vector<std::uint64_t> tmp(width);
  while (a < slots_.size() || b < slots.size()) {
    if (b == slots.size() || (a < slots_.size() && slots_[a] < slots[b])) {
      emit(slots_[a], &words_[a * width]);
      ++a;
    } else if (a == slots_.size() || slots[b] < slots_[a]) {
      emit(slots[b], &words[b * width]);
      ++b;
    } else {
      for (std::uint32_t w = 0; w < width; ++w) tmp[w] = field::add(words_[a * width + w], words[b * width + w]);
      if (!all_zero(tmp)) emit(slots_[a], tmp.data());
      ++a;
      ++b;
    }
  }
  slots_ = std::move(out_slots);
  words_ = std::move(out_words);
}

SupportFindSketch& SupportFindSketch::operator+=(const SupportFindSketch& other) {
  if (!ctx_->compatible(*other.ctx_)) throw IncompatibleError("sketches differ in parameters or seed");
  merge_add(other.slots_, other.words_);
  return *this;
}

SupportFindSketch sf_add(const SupportFindSketch& a, const SupportFindSketch& b) {
  SupportFindSketch out = a;
  out += b;
  return out;
}

SupportFindSketch SupportFindSketch::sum(std::span<const SupportFindSketch* const> parts) {
  if (parts.empty()) throw ParameterError("sum of zero sketches");
  const SupportFindSketch& first = *parts.front();
  if (parts.size() == 1) return first;
  for (const auto* s : parts) {
    if (!first.ctx_->compatible(*s->ctx_)) throw IncompatibleError("sketches differ in parameters or seed");
  }
  const SketchParams& p = first.params();
  const std::uint32_t width = p.cell_width();

  thread_local std::vector<std::uint64_t> scratch;
  thread_local std::vector<std::uint8_t> touched;
  scratch.assign(p.num_cells() * width, 0);
  touched.assign(p.num_cells(), 0);
  std::vector<std::uint32_t> touched_slots;
  for (const auto* s : parts) {
    for (std::size_t i = 0; i < s->slots_.size(); ++i) {
      const std::uint32_t slot = s->slots_[i];
      if (!touched[slot]) {
        touched[slot] = 1;
        touched_slots.push_back(slot);
      }
      std::uint64_t* dst = &scratch[std::size_t{slot} * width];
      const std::uint64_t* src = &s->words_[i * width];
      for (std::uint32_t w = 0; w < width; ++w) dst[w] = field::add(dst[w], src[w]);
    }
  }
  std::sort(touched_slots.begin(), touched_slots.end());
  SupportFindSketch out(first.ctx_);
  for (std::uint32_t slot : touched_slots) {
    std::span<const std::uint64_t> w(&scratch[std::size_t{slot} * width], width);
    if (all_zero(w)) continue;
    out.slots_.push_back(slot);
    out.words_.insert(out.words_.end(), w.begin(), w.end());
  }
  return out;
}

SupportResult SupportFindSketch::query() const {
  if (slots_.empty()) return SupportResult::found({});
  const std::uint32_t width = params().cell_width();
  const std::uint32_t k = params().k;
  std::vector<std::uint64_t> found;
  // Highest slot first: sparsest level down.
  for (std::size_t i = slots_.size(); i-- > 0;) {
    auto decoded = one_sparse_decode(*ctx_, std::span<const std::uint64_t>(&words_[i * width], width));
    if (!decoded) continue;
    if (std::find(found.begin(), found.end(), decoded->index) != found.end()) continue;
    found.push_back(decoded->index);
    if (found.size() == k) break;
  }
  if (found.empty()) return SupportResult::fail();
  return SupportResult::found(std::move(found));
}

std::vector<std::uint64_t> SupportFindSketch::cell(std::uint32_t level, std::uint32_t rep) const {
  const SketchParams& p = params();
  if (level >= p.num_levels || rep >= p.num_reps) throw RangeError("cell coordinates out of range");
  const std::uint32_t width = p.cell_width();
  const std::uint32_t slot = p.slot(level, rep);
  auto it = std::lower_bound(slots_.begin(), slots_.end(), slot);
  if (it == slots_.end() || *it != slot) return std::vector<std::uint64_t>(width, 0);
  const std::size_t i = static_cast<std::size_t>(it - slots_.begin());
  return std::vector<std::uint64_t>(words_.begin() + i * width, words_.begin() + (i + 1) * width);
}

bool SupportFindSketch::operator==(const SupportFindSketch& other) const {
  return ctx_->compatible(*other.ctx_) && slots_ == other.slots_ && words_ == other.words_;
}

std::vector<std::uint8_t> SupportFindSketch::serialize() const {
  std::vector<std::uint8_t> out;
  serialize_to(out);
  return out;
}

void SupportFindSketch::serialize_to(std::vector<std::uint8_t>& out) const {
  const SketchParams& p = params();
  const std::size_t start = out.size();
  out.reserve(start + size_bits() / 8);
  bytes::Writer w(out);
  w.u64(0);  // length, patched below
  w.u32(kMagic);
  w.u64(p.universe_size);
  w.u32(p.k);
  w.f64(p.delta1);
  w.f64(p.delta2);
  w.u32(p.num_levels);
  w.u32(p.num_reps);
  w.u32(p.num_fingerprints);
  w.u64(p.field_modulus);
  for (std::uint64_t word : ctx_->seed().words()) w.u64(word);

  const std::uint32_t width = p.cell_width();
  bytes::BitWriter bits(out);
  std::size_t next = 0;
  for (std::uint32_t slot = 0; slot < p.num_cells(); ++slot) {
    if (next < slots_.size() && slots_[next] == slot) {
      for (std::uint32_t k = 0; k < width; ++k) bits.put(words_[next * width + k], field::kBits);
      ++next;
    } else {
      for (std::uint32_t k = 0; k < width; ++k) bits.put(0, field::kBits);
    }
  }
  bits.flush();
  w.patch_u64(start, out.size() - start - 8);
}

SupportFindSketch SupportFindSketch::deserialize(std::span<const std::uint8_t> in, std::size_t* consumed,
                                                 std::shared_ptr<const SketchContext> ctx) {
  bytes::Reader r(in);
  const std::uint64_t length = r.u64();
  if (length > r.remaining()) throw FormatError("sketch length prefix exceeds input");
  if (r.u32() != kMagic) throw FormatError("bad sketch magic");
  const std::uint64_t universe = r.u64();
  const std::uint32_t k = r.u32();
  const double delta1 = r.f64();
  const double delta2 = r.f64();
  const std::uint32_t levels = r.u32();
  const std::uint32_t reps = r.u32();
  const std::uint32_t fps = r.u32();
  const std::uint64_t modulus = r.u64();
  std::array<std::uint64_t, 4> seed_words{};
  for (auto& word : seed_words) word = r.u64();

  SketchParams params;
  try {
    params = SketchParams::make(universe, k, delta1, delta2);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid sketch parameters: ") + e.what());
  }
  if (params.num_levels != levels || params.num_reps != reps || params.num_fingerprints != fps ||
      params.field_modulus != modulus) {
    throw FormatError("sketch header inconsistent with its parameters");
  }
  const Seed seed(seed_words);
  if (ctx) {
    if (ctx->params() != params || ctx->seed() != seed) throw FormatError("sketch header does not match expected context");
  } else {
    ctx = std::make_shared<const SketchContext>(params, seed);
  }
  const std::uint64_t payload_bytes = (payload_bits(params) + 7) / 8;
  if (length != kSketchHeaderBytes - 8 + payload_bytes) throw FormatError("sketch length prefix mismatch");

  SupportFindSketch out(std::move(ctx));
  const std::uint32_t width = params.cell_width();
  bytes::BitReader bits(r.raw(payload_bytes));
  std::vector<std::uint64_t> cell(width);
  for (std::uint32_t slot = 0; slot < params.num_cells(); ++slot) {
    for (std::uint32_t k2 = 0; k2 < width; ++k2) {
      cell[k2] = bits.get(field::kBits);
      if (cell[k2] >= field::kModulus) throw FormatError("cell word outside the field");
    }
    if (all_zero(cell)) continue;
    out.slots_.push_back(slot);
    out.words_.insert(out.words_.end(), cell.begin(), cell.end());
  }
  if (consumed) *consumed = r.position();
  return out;
}

}  // namespace sketchspan
