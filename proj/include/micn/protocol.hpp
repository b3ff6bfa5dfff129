#ifndef MICN_PROTOCOL_HPP
#define MICN_PROTOCOL_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "micn/content.hpp"
#include "micn/event_queue.hpp"
#include "micn/network.hpp"
#include "micn/tables.hpp"
#include "micn/topology.hpp"
#include "micn/trace.hpp"

namespace micn {

// Reply drawn from A_i: the row with pivot i times a random nonzero scalar
// plus random multiples of every row with a higher pivot. Throws
// std::logic_error when the basis has no pivot at i.
CodedSegment generate_reply(const RrefBasis& cs, const GenerationKey& key, milic::SubsetIndex i, Rng& rng);

// Uniformly weighted combination of every cached row (NetCodCCN replies).
CodedSegment random_combination(const RrefBasis& cs, const GenerationKey& key, Rng& rng);

struct SimulationConfig {
  Protocol protocol = Protocol::Micn;
  std::size_t n = 100;
  unsigned q = 256;
  std::size_t pipeline = 10;
  double timeout = 10.0;
  double interest_lifetime = 0.0;  // 0 means same as timeout
  LinkParams link;
  std::uint64_t seed = 1;
  std::size_t segment_size = 64;
  bool trace = true;
  std::uint64_t event_ceiling = 50'000'000;
  std::string prefix = "/content";
  std::uint64_t generation = 1;
};

struct ClientState {
  struct Outstanding {
    std::uint64_t nonce = 0;
    EventId timer = 0;
  };

  std::uint64_t id = 0;  // hash of the node name
  std::size_t pipeline = 1;
  std::size_t cursor = 1;  // next candidate index or segment
  // Keyed by index (MICN), segment (NDN) or issue sequence (NetCodCCN).
  std::map<std::size_t, Outstanding> outstanding;
  std::uint64_t sequence = 0;
  bool started = false;
  bool complete = false;
  std::optional<SimTime> download_time;
  bool decode_ok = false;

  std::size_t interests_sent = 0;
  std::size_t data_rx = 0;
  std::size_t data_rx_innovative = 0;
  std::size_t redundant_before_decode = 0;
  std::size_t timeouts = 0;
  std::map<std::size_t, std::size_t> issue_count;  // index or segment -> times requested
};

struct NodeState {
  std::string name;
  Role role = Role::Router;
  Fib fib;
  PitTable pit;
  ContentStore cs;
  // NetCodCCN: coded segments sent per (generation, face).
  std::map<std::pair<GenerationKey, std::size_t>, std::size_t> sent;
  std::unordered_set<std::uint64_t> forwarded_nonces;
  std::optional<ClientState> client;

  std::size_t rank(const GenerationKey& key) const;
};

struct Diagnostics {
  std::size_t loop_drops = 0;
  std::size_t redirects = 0;
  std::size_t volatile_entries = 0;
  std::size_t aggregated = 0;  // NDN
  std::size_t pit_expired = 0;
  std::size_t low_priority_marks = 0;
  std::size_t low_priority_deleted = 0;
  std::size_t inconsistent_data = 0;
  std::size_t index_violations = 0;
  std::size_t duplicate_forwards = 0;
  std::size_t decode_mismatches = 0;
  std::size_t interests_at_clients = 0;
  std::size_t timeouts = 0;
  std::size_t data_rx = 0;  // all nodes
  std::size_t data_rx_innovative = 0;
};

struct RunResult {
  RunSummary summary;
  Diagnostics diagnostics;
  SimTime end_time = 0.0;
  std::size_t pit_entries_left = 0;
  std::uint64_t events = 0;

  bool all_decoded() const;
};

/// One network, one generation, one protocol. Owns the event loop; not
/// copyable or movable since handlers capture `this`.
class Simulation {
 public:
  Simulation(TopologyGraph graph, SimulationConfig config);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Starts all clients at the current time and runs to quiescence. Throws
  // RunawayError when the event ceiling is hit.
  RunResult run();
  void start_clients();
  void start_client(std::size_t node);
  void run_until(SimTime t) { events_.run_until(t); }
  SimTime run_to_quiescence() { return events_.run_until_quiescent(); }
  RunResult result() const;

  // Calls the packet handlers directly, as if the packet had just arrived.
  void deliver_interest(std::size_t node, std::size_t face, const InterestPacket& pkt) {
    on_interest(node, face, pkt);
  }
  void deliver_data(std::size_t node, std::size_t face, const DataPacket& pkt) { on_data(node, face, pkt); }

  const SimulationConfig& config() const { return config_; }
  const TopologyGraph& graph() const { return graph_; }
  const gf::Field& field() const { return *field_; }
  const Generation& generation() const { return generation_; }
  GenerationKey key() const { return {config_.prefix, config_.generation}; }
  NodeState& node(std::size_t v) { return nodes_[v]; }
  const NodeState& node(std::size_t v) const { return nodes_[v]; }
  Network& network() { return *network_; }
  EventQueue& events() { return events_; }
  const TraceLog& trace() const { return trace_; }
  const Diagnostics& diagnostics() const { return diag_; }
  Rng& rng() { return rng_; }
  RunSummary summary() const;
  std::size_t pit_entries() const;

  // Cache-hit test for the configured protocol.
  bool cache_hit(std::size_t v, const GenerationKey& key, std::size_t index) const;

 private:
  bool coded() const { return config_.protocol != Protocol::Ndn; }
  bool micn() const { return config_.protocol == Protocol::Micn || config_.protocol == Protocol::MicnIc; }

  void on_interest(std::size_t v, std::size_t face, const InterestPacket& pkt);
  void on_data(std::size_t v, std::size_t face, const DataPacket& pkt);
  void on_drain(std::size_t v, std::size_t face) { serve(v, face); }

  void try_redirect(std::size_t v, std::size_t face, const GenerationKey& key, PitEntry& live,
                    const InterestPacket& pkt);
  PitEntry& add_entry(std::size_t v, const GenerationKey& key, PitEntry entry);
  void drop_entry(std::size_t v, std::uint64_t id);
  void forward(std::size_t v, std::size_t in_face, const InterestPacket& pkt, PitEntry& entry);
  bool satisfiable(std::size_t v, std::size_t face, const GenerationKey& key, const PitEntry& e) const;
  void serve(std::size_t v, std::size_t face);
  void serve_all(std::size_t v);
  // Builds the reply, updates the tables and hands it to the link.
  void reply(std::size_t v, std::size_t face, const GenerationKey& key, PitEntry& entry);
  DataPacket make_reply(std::size_t v, std::size_t face, const GenerationKey& key, const PitEntry& entry);

  bool data_consistent(const DataPacket& pkt) const;
  bool store(std::size_t v, const GenerationKey& key, const DataPacket& pkt);

  void client_data(std::size_t v, const DataPacket& pkt, bool innovative);
  void client_refill(std::size_t v);
  void client_issue(std::size_t v, std::size_t slot);
  void client_timeout(std::size_t v, std::size_t slot);
  void client_finish(std::size_t v);
  // Client already has A_i (MICN) or segment i (NDN).
  bool holds(const NodeState& ns, std::size_t index) const;
  std::optional<std::size_t> next_request(const NodeState& ns) const;
  std::vector<bool> client_state(const NodeState& ns) const;

  TopologyGraph graph_;
  SimulationConfig config_;
  const gf::Field* field_;
  EventQueue events_;
  Rng rng_;
  TraceLog trace_;
  std::unique_ptr<Network> network_;
  Generation generation_;
  std::vector<NodeState> nodes_;
  Diagnostics diag_;
};

}  // namespace micn

#endif  // MICN_PROTOCOL_HPP
