#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sketchspan/codec.hpp"
#include "sketchspan/errors.hpp"

using namespace sketchspan;

namespace {

// An adversary that names a pseudorandom element of [U] derived from T.
class NoiseProtocol final : public UrProtocol {
 public:
  explicit NoiseProtocol(std::uint32_t u) : u_(u) {}
  std::vector<std::uint8_t> message(const ElementSet& s, const Seed&) const override {
    return std::vector<std::uint8_t>(s.size() % 7, 0xab);
  }
  std::optional<Element> output(std::span<const std::uint8_t>, const ElementSet& t) const override {
    std::uint64_t h = 1469598103934665603ULL;
    for (Element x : t) h = (h ^ x) * 1099511628211ULL;
    if (h % 5 == 0) return std::nullopt;
    return static_cast<Element>(h % u_);
  }

 private:
  std::uint32_t u_;
};

const UrParams& params() {
  static const UrParams p = ur_params(256, std::ldexp(1.0, -8), 2, 2);
  return p;
}

void round_trips(const UrProtocol& proto, int trials, std::uint64_t base) {
  std::mt19937_64 rng(base);
  for (int i = 0; i < trials; ++i) {
    const ElementSet s = random_subset(256, params().m, rng);
    const Seed shared = Seed::from_u64(base + i), priv = Seed::from_u64(~(base + i));
    const EncRecord rec = encode(s, params(), proto, shared, priv);
    ASSERT_EQ(decode(EncRecord::deserialize(rec.serialize()), params(), proto, shared), s);
  }
}

}  // namespace

TEST(Codec, AlwaysFailRoundTrips) {
  const AlwaysFailProtocol proto;
  round_trips(proto, 500, 1);
  std::mt19937_64 rng(1);
  EncodeStats st;
  const auto rec = encode(random_subset(256, params().m, rng), params(), proto, Seed::from_u64(1), Seed::from_u64(2), &st);
  EXPECT_EQ(st.accepted, 0u);
  for (bool b : rec.accept_bits) EXPECT_FALSE(b);
}

TEST(Codec, AlwaysWrongRoundTrips) { round_trips(AlwaysWrongProtocol(256), 500, 2); }
TEST(Codec, SketchRoundTrips) { round_trips(SketchUrProtocol(256, 0.05, 0.01), 500, 3); }
TEST(Codec, AdversarialNoiseRoundTrips) { round_trips(NoiseProtocol(256), 500, 4); }

TEST(Codec, RecordShape) {
  const SketchUrProtocol proto(256, 0.05, 0.01);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const ElementSet s = random_subset(256, params().m, rng);
    EncodeStats st;
    const auto rec = encode(s, params(), proto, Seed::from_u64(i), Seed::from_u64(1000 + i), &st);
    EXPECT_EQ(rec.t0.size(), params().schedule[st.first_stage]);
    EXPECT_EQ(rec.accept_bits.size(), st.stages);
    EXPECT_EQ(st.stages, params().rounds - st.first_stage);
    EXPECT_EQ(rec.t0.size() + st.accepted + rec.tail.size(), s.size());
    EXPECT_TRUE(std::includes(s.begin(), s.end(), rec.t0.begin(), rec.t0.end()));
  }
}

TEST(Codec, MeanAcceptedTracksProtocolSuccess) {
  // Measure the sketch protocol's per-stage miss rate on D_ur pairs, then check
  // mean |A| against stages * (1 - miss).
  const SketchUrProtocol proto(256, 0.05, 0.01);
  std::mt19937_64 rng(6);
  int miss = 0;
  const int probes = 2000;
  for (int i = 0; i < probes; ++i) {
    const auto inst = sample_d_ur(params(), rng);
    const auto x = proto.output(proto.message(inst.s, Seed::from_u64(50000 + i)), inst.t);
    miss += !(x && contains(set_difference(inst.s, inst.t), *x));
  }
  const double q = 1 - static_cast<double>(miss) / probes;
  const int runs = 500;
  std::vector<double> a;
  double stages = 0;
  for (int i = 0; i < runs; ++i) {
    EncodeStats st;
    encode(random_subset(256, params().m, rng), params(), proto, Seed::from_u64(i), Seed::from_u64(9000 + i), &st);
    a.push_back(st.accepted);
    stages += st.stages;
  }
  double mean = 0, var = 0;
  for (double x : a) mean += x / runs;
  for (double x : a) var += (x - mean) * (x - mean) / (runs - 1);
  EXPECT_GE(mean, stages / runs * q - 3 * std::sqrt(var / runs));
}

TEST(Codec, RejectsWrongSize) {
  EXPECT_THROW(encode({1, 2, 3}, params(), AlwaysFailProtocol(), Seed::from_u64(1), Seed::from_u64(2)), ParameterError);
}

TEST(EncRecord, SerializationRoundTripAndErrors) {
  EncRecord r;
  r.t0 = {1, 5, 9};
  r.message = {1, 2, 3, 4};
  r.accept_bits = {true, false, true, true, false, false, false, true, true};
  r.tail = {2, 3};
  const auto bytes = r.serialize();
  EXPECT_EQ(EncRecord::deserialize(bytes), r);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(EncRecord::deserialize(extra), FormatError);
  EXPECT_THROW(EncRecord::deserialize(std::span(bytes).first(bytes.size() - 2)), FormatError);
}

TEST(EncRecord, DecodeRejectsInconsistentRecord) {
  EncRecord r;
  r.t0 = {1, 2, 3};  // size 3 is not on the schedule
  EXPECT_THROW(decode(r, params(), AlwaysFailProtocol(), Seed::from_u64(1)), FormatError);
}

TEST(Permutation, IsAPermutationAndSeeded) {
  const auto a = shared_permutation_ranks(100, Seed::from_u64(1));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(a, shared_permutation_ranks(100, Seed::from_u64(1)));
  EXPECT_NE(a, shared_permutation_ranks(100, Seed::from_u64(2)));
}
