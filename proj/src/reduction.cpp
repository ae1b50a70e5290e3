#include "sketchspan/reduction.hpp"

#include "sketchspan/agm.hpp"
#include "sketchspan/errors.hpp"

namespace sketchspan {

NfoldResult nfold_reduction(const std::vector<UrInstance>& instances, double delta, const Seed& seed) {
  const auto n = static_cast<std::uint32_t>(instances.size());
  if (n == 0) throw ParameterError("need at least one instance");
  for (const auto& inst : instances) {
    check_ur_pair(inst.s, inst.t);
    if (inst.s.back() >= n) throw ParameterError("instance sets must lie inside [n]");
  }
  const AgmParams params = agm_params(2 * n, delta);
  auto right = [n](std::uint32_t i) { return static_cast<Vertex>(n + i); };

  // Alice.
  VertexSketchBank alice(params, seed);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Element x : instances[i].s) alice.update(x, right(i), +1);
  }
  const std::vector<std::uint8_t> shipped = alice.serialize();

  // Bob.
  VertexSketchBank bob = VertexSketchBank::deserialize(shipped);
  if (!(bob == alice)) throw InternalError("bank did not survive serialization");
  ExactGraph truth(2 * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Element x : instances[i].t) bob.update(x, right(i), -1);
    for (Element x : set_difference(instances[i].s, instances[i].t)) truth.insert(x, right(i));
  }
  const SpanningForest forest = agm_query(bob);

  NfoldResult result;
  result.serialized_bytes = shipped.size();
  result.communicated_bytes = shipped.size() - VertexSketchBank::kPreambleBytes;
  result.memory_bits = alice.total_size_bits();
  result.forest_valid = verify_forest(forest, truth).is_valid;
  result.answers.assign(n, std::nullopt);
  for (const Edge& e : forest.edges) {
    // Left vertices are [0, n), so e.u is the element and e.v the instance.
    if (e.u < n && e.v >= n && !result.answers[e.v - n]) result.answers[e.v - n] = e.u;
  }
  result.all_correct = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& a = result.answers[i];
    if (!a || !contains(instances[i].s, *a) || contains(instances[i].t, *a)) result.all_correct = false;
  }
  return result;
}

std::vector<UrInstance> random_ur_instances(std::uint32_t n, std::mt19937_64& rng) {
  std::vector<UrInstance> out(n);
  for (auto& inst : out) {
    const auto s_size = std::uniform_int_distribution<std::uint32_t>(1, n)(rng);
    inst.s = random_subset(n, s_size, rng);
    const auto t_size = std::uniform_int_distribution<std::uint32_t>(0, s_size - 1)(rng);
    inst.t = random_subset_of(inst.s, t_size, rng);
  }
  return out;
}

}  // namespace sketchspan
