#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "sketchspan/distributed.hpp"
#include "sketchspan/dsk.hpp"
#include "sketchspan/errors.hpp"

using namespace sketchspan;

namespace {

constexpr std::uint64_t kSmall = 4 * 4 * 4 * 4 * 4;
constexpr std::uint64_t kEight = 8 * 8 * 8 * 8 * 8;

const UrParams& ur4() {
  static const UrParams p = ur_params(4, 1.0 / 16, 2, 1);
  return p;
}
const UrParams& ur8() {
  static const UrParams p = ur_params(8, 1.0 / 16, 2, 1);
  return p;
}

// Components of the graph with vertex `drop` removed.
std::vector<std::vector<Vertex>> components_without(const ExactGraph& g, Vertex drop) {
  ExactGraph h(g.n());
  for (const auto& e : g.edges()) {
    if (e.u != drop && e.v != drop) h.insert(e.u, e.v);
  }
  return oracle::bfs_components(h);
}

}  // namespace

TEST(DskLayout, Sizes) {
  const auto l = dsk_layout(kSmall);
  EXPECT_EQ(l.base, 4u);
  EXPECT_EQ(l.vertex_count, 256u);
  EXPECT_EQ(l.hubs, 32u);
  EXPECT_EQ(l.block_size, 4u);
  EXPECT_EQ(l.right_size, 4u);
  EXPECT_EQ(dsk_layout(kEight).vertex_count, 4096u);
  EXPECT_EQ(dsk_layout(kEight).hubs, 256u);
  EXPECT_THROW(dsk_layout(1000), SizeError);
  EXPECT_THROW(dsk_layout(243), SizeError);  // 3^5: base too small
}

TEST(Dsk, GroupsPartitionTheVertices) {
  std::mt19937_64 rng(1);
  const DskGraph g = sample_d_sk(kSmall, ur4(), rng);
  std::vector<int> seen(g.layout.vertex_count, 0);
  for (Vertex v : g.hubs) ++seen[v];
  for (const auto& b : g.blocks) {
    EXPECT_EQ(b.size(), 4u);
    for (Vertex v : b) ++seen[v];
  }
  for (Vertex v : g.right) ++seen[v];
  for (Vertex v : g.isolated) ++seen[v];
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_EQ(g.isolated.size(), 256u - 32 - 128 - 4);
  EXPECT_THROW(sample_d_sk(kSmall, ur8(), rng), SizeError);
}

TEST(Dsk, HubNeighborhoodsEncodeInstances) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const DskGraph g = sample_d_sk(kSmall, ur4(), rng);
    const auto adj = g.graph.adjacency();
    for (std::size_t j = 0; j < g.hubs.size(); ++j) {
      const auto& inst = g.instances[j];
      ASSERT_NO_THROW(check_ur_pair(inst.s, inst.t));
      std::size_t in_block = 0, in_right = 0;
      for (Vertex w : adj[g.hubs[j]]) {
        in_block += g.role[w] == Role::kBlock;
        in_right += g.role[w] == Role::kRight;
      }
      EXPECT_EQ(in_block, inst.t.size());
      EXPECT_EQ(in_right, inst.s.size() - inst.t.size());
    }
  }
}

TEST(Dsk, StructureHoldsOnSamples) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const DskGraph g = sample_d_sk(kSmall, ur4(), rng);
    const auto check = check_dsk_structure(g);
    ASSERT_TRUE(check.ok()) << check.edge_type_violations << " " << check.block_isolation_violations;
  }
}

TEST(Dsk, StructureCheckCatchesPlantedViolations) {
  std::mt19937_64 rng(4);
  DskGraph g = sample_d_sk(kSmall, ur4(), rng);
  DskGraph a = g;
  a.graph.insert(a.blocks[0][0], a.blocks[1][0]);
  EXPECT_GT(check_dsk_structure(a).edge_type_violations, 0u);
  EXPECT_GT(check_dsk_structure(a).block_isolation_violations, 0u);
  DskGraph b = g;
  b.graph.insert(b.right[0], b.right[1]);
  EXPECT_GT(check_dsk_structure(b).edge_type_violations, 0u);
  DskGraph c = g;
  c.graph.insert(c.hubs[0], c.hubs[1]);
  EXPECT_FALSE(check_dsk_structure(c).ok());
}

TEST(Dsk, BlocksReachRightOnlyThroughTheirHub) {
  // Removing v_j disconnects V_j from V_r, so every spanning forest routes
  // V_j's escape through v_j.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const DskGraph g = sample_d_sk(kSmall, ur4(), rng);
    for (std::size_t j = 0; j < g.hubs.size(); ++j) {
      for (const auto& comp : components_without(g.graph, g.hubs[j])) {
        bool has_block = false, has_right = false;
        for (Vertex v : comp) {
          has_block |= g.role[v] == Role::kBlock && g.owner[v] == j;
          has_right |= g.role[v] == Role::kRight;
        }
        ASSERT_FALSE(has_block && has_right);
      }
    }
  }
}

TEST(Dsk, ComponentCountFromContactGraph) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const DskGraph g = sample_d_sk(kSmall, ur4(), rng);
    ExactGraph contact(g.layout.vertex_count);
    for (const auto& e : g.graph.edges()) {
      if (g.role[e.u] != Role::kBlock && g.role[e.v] != Role::kBlock) contact.insert(e.u, e.v);
    }
    std::size_t contact_components = 0;
    for (const auto& comp : oracle::bfs_components(contact)) {
      contact_components += g.role[comp.front()] == Role::kHub || g.role[comp.front()] == Role::kRight;
    }
    std::size_t loose_block = 0;
    for (const auto& inst : g.instances) loose_block += g.layout.block_size - inst.t.size();
    EXPECT_EQ(oracle_components(g.graph).size(), g.isolated.size() + loose_block + contact_components);
  }
}

TEST(DskPrime, CaseMixAndBipartiteSplit) {
  std::mt19937_64 rng(7);
  std::map<DskPrimeCase, int> mix;
  const int samples = 3000;
  for (int i = 0; i < samples; ++i) {
    const auto s = sample_d_sk_prime(kSmall, ur4(), rng);
    ++mix[s.which];
    if (s.which == DskPrimeCase::kDsk) {
      ASSERT_TRUE(s.dsk.has_value());
      continue;
    }
    std::vector<int> side(s.graph.n(), 0);
    for (Vertex v : s.u1) side[v] = 1;
    for (Vertex v : s.u2) side[v] = 2;
    for (const auto& e : s.graph.edges()) ASSERT_EQ(side[e.u] + side[e.v], 3);
  }
  for (auto c : {DskPrimeCase::kDsk, DskPrimeCase::kMiddleDegrees, DskPrimeCase::kRightDegrees}) {
    EXPECT_NEAR(mix[c], samples / 3.0, 3 * std::sqrt(samples * (1.0 / 3) * (2.0 / 3)));
  }
}

TEST(DskPrime, DegreeHistogramsMatchDsk) {
  std::mt19937_64 rng(8);
  // Reference histograms from 3000 D_sk draws.
  std::map<std::uint32_t, double> hub_ref, right_ref;
  for (int i = 0; i < 3000; ++i) {
    ++hub_ref[sample_hub_degree(kSmall, ur4(), rng)];
    ++right_ref[sample_right_degree(kSmall, ur4(), rng)];
  }
  // Every hub has degree |S_j| = m.
  EXPECT_EQ(hub_ref.size(), 1u);
  EXPECT_EQ(hub_ref.begin()->first, ur4().m);

  std::map<std::uint32_t, double> hub_obs, right_obs;
  int right_cases = 0;
  while (right_cases < 30) {
    const auto s = sample_d_sk_prime(kSmall, ur4(), rng);
    if (s.which == DskPrimeCase::kDsk) continue;
    const auto adj = s.graph.adjacency();
    auto& obs = s.which == DskPrimeCase::kMiddleDegrees ? hub_obs : right_obs;
    for (std::size_t i = 0; i < s.u1.size(); ++i) {
      EXPECT_EQ(adj[s.u1[i]].size(), s.u1_degrees[i]);
      ++obs[static_cast<std::uint32_t>(adj[s.u1[i]].size())];
    }
    right_cases += s.which == DskPrimeCase::kRightDegrees;
  }
  for (const auto& [d, c] : hub_obs) EXPECT_EQ(d, ur4().m) << c;

  // Two-sample chi-squared homogeneity test at the 5% level.
  std::map<std::uint32_t, std::pair<double, double>> table;
  for (auto [d, c] : right_ref) table[d].first += c;
  for (auto [d, c] : right_obs) table[d].second += c;
  // Pool sparse tails so expected counts stay usable.
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> pending{0, 0};
  for (auto [d, c] : table) {
    pending.first += c.first;
    pending.second += c.second;
    if (pending.first + pending.second >= 40) {
      cells.push_back(pending);
      pending = {0, 0};
    }
  }
  if (pending.first + pending.second > 0) {
    if (cells.empty()) cells.push_back(pending);
    else {
      cells.back().first += pending.first;
      cells.back().second += pending.second;
    }
  }
  ASSERT_GE(cells.size(), 2u);
  double n1 = 0, n2 = 0;
  for (auto [a, b] : cells) {
    n1 += a;
    n2 += b;
  }
  double chi2 = 0;
  for (auto [a, b] : cells) {
    const double tot = a + b;
    const double e1 = tot * n1 / (n1 + n2), e2 = tot * n2 / (n1 + n2);
    chi2 += (a - e1) * (a - e1) / e1 + (b - e2) * (b - e2) / e2;
  }
  const boost::math::chi_squared dist(static_cast<double>(cells.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.95));
}

TEST(Embed, PlantsTheInstance) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto inst = sample_d_ur(ur8(), rng);
    const Embedding e = embed_ur_in_dsk(inst.s, inst.t, kEight, ur8(), rng);
    const auto& g = e.dsk;
    ASSERT_TRUE(check_dsk_structure(g).ok());
    EXPECT_EQ(e.hub, g.hubs[e.hub_index]);
    // Hub neighborhood is beta(S).
    std::vector<Vertex> expect;
    for (Element x : inst.s) expect.push_back(e.beta[x]);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(g.graph.adjacency()[e.hub], expect);
    // beta(T) inside the planted block, the rest of beta inside V_r.
    for (Element x = 0; x < ur8().universe; ++x) {
      if (contains(inst.t, x)) {
        EXPECT_EQ(g.role[e.beta[x]], Role::kBlock);
        EXPECT_EQ(g.owner[e.beta[x]], e.hub_index);
      } else {
        EXPECT_EQ(g.role[e.beta[x]], Role::kRight);
      }
    }
    EXPECT_EQ(g.right.size(), g.layout.right_size);
  }
}

TEST(Embed, RecoveryFromAnyExactForestIsSound) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const auto inst = sample_d_ur(ur4(), rng);
    const Embedding e = embed_ur_in_dsk(inst.s, inst.t, kSmall, ur4(), rng);
    std::vector<StreamOp> ops;
    std::vector<Edge> edges(e.dsk.graph.edges().begin(), e.dsk.graph.edges().end());
    std::shuffle(edges.begin(), edges.end(), rng);
    for (const auto& ed : edges) ops.push_back(StreamOp::insert(ed.u, ed.v));
    const auto got = recover_element(e, incremental_baseline(e.dsk.layout.vertex_count, ops));
    ASSERT_TRUE(got.has_value());
    EXPECT_TRUE(contains(set_difference(inst.s, inst.t), *got));
  }
}

TEST(Embed, SingletonDifferenceIsForced) {
  std::mt19937_64 rng(11);
  int valid = 0;
  for (int i = 0; i < 20; ++i) {
    const ElementSet s{1, 3, 6}, t{1, 6};
    const Embedding e = embed_ur_in_dsk(s, t, kEight, ur8(), rng);
    const auto sim = simulate(e.dsk.graph, 0.05, Seed::from_u64(i), Transport::kInMemory);
    if (!sim.valid) continue;
    ++valid;
    EXPECT_EQ(recover_element(e, sim.forest), 3u);
  }
  EXPECT_GT(valid, 15);
}

TEST(Embed, RejectsBadInstances) {
  std::mt19937_64 rng(12);
  EXPECT_THROW(embed_ur_in_dsk({1, 2}, {1, 2}, kSmall, ur4(), rng), ParameterError);
  EXPECT_THROW(embed_ur_in_dsk({1, 9}, {1}, kSmall, ur4(), rng), ParameterError);
  EXPECT_THROW(embed_ur_in_dsk({1, 2}, {1}, 1000, ur4(), rng), SizeError);
}

TEST(Copies, TwoTriangles) {
  ExactGraph tri(3);
  tri.insert(0, 1);
  tri.insert(1, 2);
  tri.insert(0, 2);
  const ExactGraph both = disconnected_copies({tri, tri});
  EXPECT_EQ(both.n(), 6u);
  EXPECT_EQ(oracle_components(both).size(), 2u);
  const auto f = simulate(both, 0.1, Seed::from_u64(1));
  if (f.valid) {
    EXPECT_EQ(f.forest.edges.size(), 4u);
    EXPECT_EQ(f.forest.components.size(), 2u);
  }
}

TEST(Copies, EmptyGraphs) {
  const ExactGraph g = disconnected_copies({ExactGraph(4), ExactGraph(4), ExactGraph(4)});
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_TRUE(simulate(g, 0.1, Seed::from_u64(2)).forest.edges.empty());
  EXPECT_THROW(disconnected_copies({ExactGraph(3), ExactGraph(4)}), ParameterError);
}

TEST(Copies, RestrictionValidityMatchesWhole) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    std::vector<ExactGraph> parts;
    for (int c = 0; c < 4; ++c) parts.push_back(random_graph(20, 2, rng));
    const ExactGraph whole = disconnected_copies(parts);
    const auto sim = simulate(whole, 0.3, Seed::from_u64(i), Transport::kInMemory);
    bool all = true;
    for (std::uint32_t c = 0; c < 4; ++c) all &= verify_forest(restrict_to_copy(sim.forest, 20, c), parts[c]).is_valid;
    EXPECT_EQ(all, sim.valid);
  }
}
