#ifndef MICN_NETWORK_HPP
#define MICN_NETWORK_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "micn/content.hpp"
#include "micn/event_queue.hpp"
#include "micn/random.hpp"
#include "micn/topology.hpp"
#include "micn/trace.hpp"

namespace micn {

struct LinkParams {
  double propagation = 0.1;
  double data_tx = 1.0;
  double interest_tx = 1.0 / 16384.0;  // 2^-14
  double jitter_max = 1.0 / 262144.0;  // 2^-18
  double loss = 0.0;
};

struct NetworkCounters {
  std::size_t data_tx = 0;
  std::size_t interest_tx = 0;
  std::size_t drops = 0;
  std::size_t data_drops = 0;
  std::size_t interest_drops = 0;
};

/// Bidirectional links between topology nodes. Every face has a data
/// transmitter holding at most one packet in flight; a node may only hand it
/// a packet while idle and learns through the drain callback when the
/// transmission ends. Interests bypass the data slot and are serialized on
/// their own short transmission time. Losses strike on the wire: a dropped
/// packet still occupies the transmitter.
class Network {
 public:
  struct Handlers {
    std::function<void(std::size_t node, std::size_t face, const InterestPacket&)> on_interest;
    std::function<void(std::size_t node, std::size_t face, const DataPacket&)> on_data;
    std::function<void(std::size_t node, std::size_t face)> on_drain;
  };

  Network(const TopologyGraph& graph, LinkParams params, EventQueue& events, Rng& rng, TraceLog& trace);

  void set_handlers(Handlers handlers) { handlers_ = std::move(handlers); }

  std::size_t face_count(std::size_t node) const { return faces_[node].size(); }
  std::size_t neighbor(std::size_t node, std::size_t face) const { return faces_[node][face].peer; }
  bool data_idle(std::size_t node, std::size_t face) const { return !faces_[node][face].data_busy; }

  void send_interest(std::size_t node, std::size_t face, InterestPacket pkt);
  // Throws std::logic_error when the face is still transmitting.
  void send_data(std::size_t node, std::size_t face, DataPacket pkt);

  const NetworkCounters& counters() const { return counters_; }
  const LinkParams& params() const { return params_; }

 private:
  struct Face {
    std::size_t peer;
    std::size_t peer_face;
    bool data_busy = false;
    SimTime interest_free_at = 0.0;
  };

  bool lost();
  SimTime jitter();

  LinkParams params_;
  EventQueue& events_;
  Rng& rng_;
  TraceLog& trace_;
  Handlers handlers_;
  std::vector<std::vector<Face>> faces_;
  NetworkCounters counters_;
};

}  // namespace micn

#endif  // MICN_NETWORK_HPP
