#include "micn/network.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace micn {

Network::Network(const TopologyGraph& graph, LinkParams params, EventQueue& events, Rng& rng,
                 TraceLog& trace)
    : params_(params), events_(events), rng_(rng), trace_(trace), faces_(graph.size()) {
  if (params_.propagation <= 0 || params_.data_tx <= 0 || params_.interest_tx <= 0) {
    throw std::invalid_argument("link delays must be strictly positive");
  }
  if (params_.loss < 0 || params_.loss > 1) throw std::invalid_argument("loss probability outside [0,1]");
  for (std::size_t v = 0; v < graph.size(); ++v) {
    for (std::size_t u : graph.neighbors(v)) {
      faces_[v].push_back(Face{u, graph.face_toward(u, v)});
    }
  }
}

bool Network::lost() {
  if (params_.loss <= 0.0) return false;
  if (params_.loss >= 1.0) return true;
  return uniform01(rng_) < params_.loss;
}

SimTime Network::jitter() {
  if (params_.jitter_max <= 0.0) return 0.0;
  return std::uniform_real_distribution<double>(0.0, params_.jitter_max)(rng_);
}

void Network::send_interest(std::size_t node, std::size_t face, InterestPacket pkt) {
  Face& f = faces_[node][face];
  const SimTime start = std::max(events_.now(), f.interest_free_at);
  f.interest_free_at = start + params_.interest_tx;
  ++counters_.interest_tx;
  trace_.record({events_.now(), node, TraceKind::InterestTx, pkt.index, std::nullopt, f.peer});
  const bool drop = lost();
  const SimTime arrival = f.interest_free_at + params_.propagation + jitter();
  if (drop) {
    ++counters_.drops;
    ++counters_.interest_drops;
    trace_.record({events_.now(), node, TraceKind::Drop, pkt.index, std::nullopt, f.peer});
    return;
  }
  events_.schedule(arrival, [this, peer = f.peer, pf = f.peer_face, pkt = std::move(pkt)] {
    handlers_.on_interest(peer, pf, pkt);
  });
}

void Network::send_data(std::size_t node, std::size_t face, DataPacket pkt) {
  Face& f = faces_[node][face];
  if (f.data_busy) {
    throw std::logic_error(fmt::format("data sent on busy face {} of node {}", face, node));
  }
  f.data_busy = true;
  ++counters_.data_tx;
  trace_.record({events_.now(), node, TraceKind::DataTx, pkt.segment.index, std::nullopt, f.peer});
  const bool drop = lost();
  const SimTime done = events_.now() + params_.data_tx;
  const SimTime arrival = done + params_.propagation + jitter();
  events_.schedule(done, [this, node, face] {
    faces_[node][face].data_busy = false;
    handlers_.on_drain(node, face);
  });
  if (drop) {
    ++counters_.drops;
    ++counters_.data_drops;
    trace_.record({events_.now(), node, TraceKind::Drop, pkt.segment.index, std::nullopt, f.peer});
    return;
  }
  events_.schedule(arrival, [this, peer = f.peer, pf = f.peer_face, pkt = std::move(pkt)] {
    handlers_.on_data(peer, pf, pkt);
  });
}

}  // namespace micn
