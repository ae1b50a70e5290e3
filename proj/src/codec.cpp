#include "sketchspan/codec.hpp"

#include <algorithm>
#include <numeric>

#include "sketchspan/bytes.hpp"
#include "sketchspan/errors.hpp"

namespace sketchspan {

namespace {

void write_set(bytes::Writer& w, const ElementSet& s) {
  w.u32(static_cast<std::uint32_t>(s.size()));
  for (Element x : s) w.u32(x);
}

ElementSet read_set(bytes::Reader& r) {
  const std::uint32_t count = r.u32();
  if (count > r.remaining() / 4) throw FormatError("set length exceeds input");
  ElementSet s(count);
  for (auto& x : s) x = r.u32();
  if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw FormatError("set is not sorted and distinct");
  }
  return s;
}

void insert_sorted(ElementSet& s, Element x) { s.insert(std::upper_bound(s.begin(), s.end(), x), x); }

// Adds the (target - |t|) elements of candidates \ t with the smallest rank.
void fill_by_rank(ElementSet& t, const ElementSet& candidates, std::uint32_t target,
                  const std::vector<std::uint32_t>& rank) {
  if (t.size() >= target) return;
  ElementSet pool = set_difference(candidates, t);
  std::sort(pool.begin(), pool.end(), [&](Element a, Element b) { return rank[a] < rank[b]; });
  const std::size_t need = target - t.size();
  if (pool.size() < need) throw InternalError("not enough elements to fill T");
  for (std::size_t k = 0; k < need; ++k) insert_sorted(t, pool[k]);
}

}  // namespace

std::vector<std::uint8_t> EncRecord::serialize() const {
  std::vector<std::uint8_t> out;
  bytes::Writer w(out);
  write_set(w, t0);
  w.u64(message.size());
  w.raw(message);
  w.u32(static_cast<std::uint32_t>(accept_bits.size()));
  bytes::BitWriter bits(out);
  for (bool b : accept_bits) bits.put(b ? 1 : 0, 1);
  bits.flush();
  write_set(w, tail);
  return out;
}

EncRecord EncRecord::deserialize(std::span<const std::uint8_t> in) {
  bytes::Reader r(in);
  EncRecord rec;
  rec.t0 = read_set(r);
  const std::uint64_t len = r.u64();
  if (len > r.remaining()) throw FormatError("message length exceeds input");
  auto msg = r.raw(static_cast<std::size_t>(len));
  rec.message.assign(msg.begin(), msg.end());
  const std::uint32_t nbits = r.u32();
  bytes::BitReader bits(r.raw((nbits + 7) / 8));
  rec.accept_bits.resize(nbits);
  for (std::uint32_t i = 0; i < nbits; ++i) rec.accept_bits[i] = bits.get(1) != 0;
  rec.tail = read_set(r);
  if (r.remaining() != 0) throw FormatError("trailing bytes after record");
  return rec;
}

std::vector<std::uint32_t> shared_permutation_ranks(std::uint32_t universe, const Seed& shared_seed) {
  std::vector<Element> order(universe);
  std::iota(order.begin(), order.end(), Element{0});
  auto rng = shared_seed.derive(seed_tag::kPermutation).rng();
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint32_t> rank(universe);
  for (std::uint32_t pos = 0; pos < universe; ++pos) rank[order[pos]] = pos;
  return rank;
}

EncRecord encode(const ElementSet& s, const UrParams& p, const UrProtocol& protocol, const Seed& shared_seed,
                 const Seed& private_seed, EncodeStats* stats) {
  if (s.size() != p.m) throw ParameterError("encode requires |S| = m");
  EncRecord rec;
  // 1. T0 from the schedule, using private coins.
  auto rng = private_seed.derive(seed_tag::kInstance).rng();
  const auto i0 = std::uniform_int_distribution<std::uint32_t>(0, p.rounds - 1)(rng);
  rec.t0 = random_subset_of(s, p.schedule[i0], rng);
  // 2. One message for (S, T0), reused on every later T.
  rec.message = protocol.message(s, private_seed.derive(seed_tag::kSketch));
  // 3. Public permutation.
  const auto rank = shared_permutation_ranks(p.universe, shared_seed);
  // 4-5. Grow T stage by stage.
  ElementSet t = rec.t0;
  ElementSet accepted;
  for (std::uint32_t i = i0; i < p.rounds; ++i) {
    const std::optional<Element> x = protocol.output(rec.message, t);
    const bool hit = x && contains(s, *x) && !contains(t, *x);
    rec.accept_bits.push_back(hit);
    if (hit) {
      insert_sorted(accepted, *x);
      insert_sorted(t, *x);
    }
    fill_by_rank(t, s, p.size_at(i + 1), rank);
  }
  // 6. Everything not recovered through the protocol.
  ElementSet known = rec.t0;
  known.insert(known.end(), accepted.begin(), accepted.end());
  std::sort(known.begin(), known.end());
  rec.tail = set_difference(s, known);

  if (stats) *stats = EncodeStats{i0, static_cast<std::uint32_t>(accepted.size()), p.rounds - i0};
  return rec;
}

ElementSet decode(const EncRecord& rec, const UrParams& p, const UrProtocol& protocol, const Seed& shared_seed) {
  const auto i0 = p.stage_of(static_cast<std::uint32_t>(rec.t0.size()));
  if (!i0) throw FormatError("|T0| is not on the size schedule");
  if (rec.accept_bits.size() != p.rounds - *i0) throw FormatError("wrong number of acceptance bits");
  const auto rank = shared_permutation_ranks(p.universe, shared_seed);
  ElementSet t = rec.t0;
  std::size_t bit = 0;
  for (std::uint32_t i = *i0; i < p.rounds; ++i) {
    const std::optional<Element> x = protocol.output(rec.message, t);
    if (rec.accept_bits[bit++]) {
      if (!x) throw FormatError("acceptance bit set on a Fail output");
      insert_sorted(t, *x);
    }
    fill_by_rank(t, rec.tail, p.size_at(i + 1), rank);
  }
  return t;
}

}  // namespace sketchspan
