#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketchspan/agm.hpp"
#include "sketchspan/graph.hpp"

namespace sketchspan {

/// What a vertex knows in the simultaneous-message model.
struct VertexView {
  Vertex vertex_id = 0;
  std::vector<Vertex> neighbors;  // sorted, excludes vertex_id
  std::uint32_t n = 0;
  Seed shared_seed;
};

std::vector<VertexView> vertex_views(const ExactGraph& g, const Seed& shared_seed);

struct Message {
  std::vector<std::uint8_t> payload;  // R serialized round sketches
  std::uint64_t bit_length = 0;       // 8 * payload.size()
};

/// The vertex's R round sketches of its incidence vector, serialized back to
/// back. Depends only on the view and params.
Message vertex_message(const VertexView& view, const AgmParams& params);

/// Reassembles the bank from all n messages and runs the query. Throws
/// FormatError if any payload fails to decode against (params, shared_seed).
SpanningForest referee_decode(std::span<const Message> messages, const AgmParams& params, const Seed& shared_seed,
                              Execution exec = Execution::kParallel);

/// Incremental referee: absorbs messages one at a time so a large simulation
/// never holds all payloads at once.
class Referee {
 public:
  Referee(const AgmParams& params, const Seed& shared_seed);

  void receive(Vertex u, const Message& message);
  /// Direct hand-off of already-built round sketches (no serialization).
  void receive_sketches(Vertex u, std::vector<SupportFindSketch> sketches);

  std::size_t received() const { return received_; }
  SpanningForest decode(Execution exec = Execution::kParallel, QueryTrace* trace = nullptr) const;
  const VertexSketchBank& bank() const { return bank_; }

 private:
  VertexSketchBank bank_;
  std::vector<bool> seen_;
  std::size_t received_ = 0;
};

enum class Transport {
  kSerialized,  // every message is serialized and parsed by the referee
  kInMemory,    // sketches handed over directly; bits are accounted from params
};

struct SimReport {
  SpanningForest forest;
  double avg_message_bits = 0;
  std::uint64_t max_message_bits = 0;
  std::uint64_t total_message_bits = 0;
  bool valid = false;
  VerificationReport report;
};

SimReport simulate(const ExactGraph& g, double delta, const Seed& shared_seed,
                   Transport transport = Transport::kSerialized, Execution exec = Execution::kParallel);

}  // namespace sketchspan
