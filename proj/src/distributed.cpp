#include "sketchspan/distributed.hpp"

#include <algorithm>
#include <string>

#include "sketchspan/errors.hpp"

namespace sketchspan {

std::vector<VertexView> vertex_views(const ExactGraph& g, const Seed& shared_seed) {
  auto adj = g.adjacency();
  std::vector<VertexView> views(g.n());
  for (Vertex u = 0; u < g.n(); ++u) views[u] = VertexView{u, std::move(adj[u]), g.n(), shared_seed};
  return views;
}

namespace {

std::vector<SupportFindSketch> round_sketches(const VertexView& view, const AgmParams& params,
                                              const std::vector<std::shared_ptr<const SketchContext>>& contexts) {
  if (view.vertex_id >= params.n) throw RangeError("vertex id outside [0, n)");
  std::vector<SupportFindSketch> out;
  out.reserve(params.rounds);
  for (std::uint32_t r = 0; r < params.rounds; ++r) out.emplace_back(contexts[r]);
  for (Vertex w : view.neighbors) {
    if (w >= params.n || w == view.vertex_id) {
      throw RangeError("neighbor " + std::to_string(w) + " invalid for vertex " + std::to_string(view.vertex_id));
    }
    const Edge e = Edge::make(view.vertex_id, w);
    const std::uint64_t idx = edge_index(params.n, e.u, e.v);
    for (std::uint32_t r = 0; r < params.rounds; ++r) out[r].apply(touch_index(*contexts[r], idx), edge_sign(e, view.vertex_id));
  }
  return out;
}

std::vector<std::shared_ptr<const SketchContext>> round_contexts(const AgmParams& params, const Seed& seed) {
  const SketchParams sp = params.sketch_params();
  std::vector<std::shared_ptr<const SketchContext>> out;
  out.reserve(params.rounds);
  for (std::uint32_t r = 0; r < params.rounds; ++r) {
    out.push_back(std::make_shared<const SketchContext>(sp, seed.derive(seed_tag::kRound, r)));
  }
  return out;
}

Message pack(const std::vector<SupportFindSketch>& sketches) {
  Message m;
  for (const auto& s : sketches) s.serialize_to(m.payload);
  m.bit_length = 8 * m.payload.size();
  return m;
}

}  // namespace

Message vertex_message(const VertexView& view, const AgmParams& params) {
  return pack(round_sketches(view, params, round_contexts(params, view.shared_seed)));
}

Referee::Referee(const AgmParams& params, const Seed& shared_seed) : bank_(params, shared_seed), seen_(params.n, false) {}

void Referee::receive(Vertex u, const Message& message) {
  if (u >= bank_.n()) throw RangeError("message from unknown vertex");
  const std::span<const std::uint8_t> payload(message.payload);
  std::vector<SupportFindSketch> sketches;
  sketches.reserve(bank_.rounds());
  std::size_t offset = 0;
  for (std::uint32_t r = 0; r < bank_.rounds(); ++r) {
    std::size_t used = 0;
    sketches.push_back(SupportFindSketch::deserialize(payload.subspan(offset), &used, bank_.round_context(r)));
    offset += used;
  }
  if (offset != payload.size()) throw FormatError("trailing bytes in message from vertex " + std::to_string(u));
  receive_sketches(u, std::move(sketches));
}

void Referee::receive_sketches(Vertex u, std::vector<SupportFindSketch> sketches) {
  if (u >= bank_.n()) throw RangeError("message from unknown vertex");
  bank_.set_vertex_sketches(u, std::move(sketches));
  if (!seen_[u]) {
    seen_[u] = true;
    ++received_;
  }
}

SpanningForest Referee::decode(Execution exec, QueryTrace* trace) const {
  if (received_ != bank_.n()) throw FormatError("referee is missing messages");
  return agm_query(bank_, exec, trace);
}

SpanningForest referee_decode(std::span<const Message> messages, const AgmParams& params, const Seed& shared_seed,
                              Execution exec) {
  if (messages.size() != params.n) throw FormatError("expected one message per vertex");
  Referee referee(params, shared_seed);
  for (Vertex u = 0; u < params.n; ++u) referee.receive(u, messages[u]);
  return referee.decode(exec);
}

SimReport simulate(const ExactGraph& g, double delta, const Seed& shared_seed, Transport transport, Execution exec) {
  const AgmParams params = agm_params(g.n(), delta);
  const auto views = vertex_views(g, shared_seed);
  Referee referee(params, shared_seed);
  std::vector<std::shared_ptr<const SketchContext>> contexts;
  for (std::uint32_t r = 0; r < params.rounds; ++r) contexts.push_back(referee.bank().round_context(r));
  SimReport report;

  // Vertices are independent; build in blocks so serialized payloads never
  // pile up for the whole graph.
  constexpr std::int64_t kBlock = 256;
  const auto n = static_cast<std::int64_t>(g.n());
  std::vector<std::vector<SupportFindSketch>> built(kBlock);
  std::vector<Message> messages(kBlock);
  for (std::int64_t base = 0; base < n; base += kBlock) {
    const std::int64_t count = std::min(kBlock, n - base);
    const bool serialize = transport == Transport::kSerialized;
    const bool parallel = exec == Execution::kParallel;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
      built[i] = round_sketches(views[base + i], params, contexts);
      if (serialize) {
        messages[i] = pack(built[i]);
        built[i].clear();
      }
    }
    for (std::int64_t i = 0; i < count; ++i) {
      const auto u = static_cast<Vertex>(base + i);
      std::uint64_t bits = 0;
      if (serialize) {
        bits = messages[i].bit_length;
        referee.receive(u, messages[i]);
        messages[i] = Message{};
      } else {
        bits = std::uint64_t{params.rounds} * size_bits(params.sketch_params());
        referee.receive_sketches(u, std::move(built[i]));
      }
      report.total_message_bits += bits;
      report.max_message_bits = std::max(report.max_message_bits, bits);
    }
  }
  report.avg_message_bits = static_cast<double>(report.total_message_bits) / static_cast<double>(g.n());
  report.forest = referee.decode(exec);
  report.report = verify_forest(report.forest, g);
  report.valid = report.report.is_valid;
  return report;
}

}  // namespace sketchspan
