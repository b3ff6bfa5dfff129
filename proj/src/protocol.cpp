#include "micn/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace micn {

CodedSegment generate_reply(const RrefBasis& cs, const GenerationKey& key, milic::SubsetIndex i, Rng& rng) {
  if (i == 0 || !cs.has_pivot(i - 1)) {
    throw std::logic_error(fmt::format("no cached content for index {}", i));
  }
  const auto& field = cs.field();
  std::vector<gf::Element> weights(cs.rank(), 0);
  for (std::size_t r = 0; r < cs.rank(); ++r) {
    if (cs.pivot(r) == i - 1) {
      weights[r] = uniform_nonzero(field, rng);
    } else if (cs.pivot(r) > i - 1) {
      weights[r] = uniform_element(field, rng);
    }
  }
  CodedRow row = cs.combine(weights);
  return CodedSegment{key.prefix, key.generation, i, std::move(row.coefficients), std::move(row.payload)};
}

CodedSegment random_combination(const RrefBasis& cs, const GenerationKey& key, Rng& rng) {
  if (cs.rank() == 0) throw std::logic_error("random combination of an empty cache");
  const auto& field = cs.field();
  std::vector<gf::Element> weights(cs.rank());
  // Rows are independent, so only the all-zero weight vector gives zero.
  do {
    for (auto& w : weights) w = uniform_element(field, rng);
  } while (std::all_of(weights.begin(), weights.end(), [](gf::Element w) { return w == 0; }));
  CodedRow row = cs.combine(weights);
  const std::size_t lead = *leading_column(row.coefficients);
  return CodedSegment{key.prefix, key.generation, lead + 1, std::move(row.coefficients), std::move(row.payload)};
}

std::size_t NodeState::rank(const GenerationKey& key) const {
  return std::max(cs.rank(key), cs.segment_count(key));
}

bool RunResult::all_decoded() const {
  return std::all_of(summary.clients.begin(), summary.clients.end(),
                     [](const ClientSummary& c) { return c.download_time.has_value(); });
}

namespace {

std::vector<std::string> node_names(const TopologyGraph& g) {
  std::vector<std::string> out;
  for (std::size_t v = 0; v < g.size(); ++v) out.push_back(g.node(v).name);
  return out;
}

void check_config(const SimulationConfig& c) {
  if (c.n == 0) throw std::invalid_argument("generation size must be at least 1");
  if (c.pipeline == 0) throw std::invalid_argument("pipeline size must be at least 1");
  if (!(c.timeout > 0)) throw std::invalid_argument("timeout must be positive");
  if (c.interest_lifetime < 0) throw std::invalid_argument("interest lifetime must be nonnegative");
  if (c.segment_size == 0) throw std::invalid_argument("segment size must be at least 1");
}

}  // namespace

Simulation::Simulation(TopologyGraph graph, SimulationConfig config)
    : graph_(std::move(graph)),
      config_(std::move(config)),
      field_((check_config(config_), &gf::Field::of_order(config_.q))),
      events_(config_.event_ceiling),
      rng_(config_.seed),
      trace_(node_names(graph_), config_.trace) {
  graph_.validate();
  network_ = std::make_unique<Network>(graph_, config_.link, events_, rng_, trace_);
  generation_ = Generation::random(config_.prefix, config_.generation, config_.n, config_.segment_size, rng_);

  const auto fibs = compute_fib(graph_);
  const GenerationKey k = key();
  nodes_.reserve(graph_.size());
  for (std::size_t v = 0; v < graph_.size(); ++v) {
    const auto& info = graph_.node(v);
    nodes_.push_back(NodeState{info.name, info.role, fibs[v], PitTable{},
                               ContentStore(*field_, config_.n, config_.segment_size), {}, {}, std::nullopt});
    NodeState& ns = nodes_.back();
    if (info.role == Role::Source) {
      for (std::size_t j = 0; j < config_.n; ++j) {
        if (coded()) {
          EncodingVector unit(config_.n, 0);
          unit[j] = 1;
          ns.cs.coded(k).insert(unit, generation_.segments[j]);
        } else {
          ns.cs.store_segment(k, j + 1, generation_.segments[j]);
        }
      }
    } else if (info.role == Role::Client) {
      ClientState cs;
      cs.id = fnv1a64(info.name);
      cs.pipeline = config_.pipeline;
      ns.client = std::move(cs);
    }
  }

  network_->set_handlers(Network::Handlers{
      [this](std::size_t v, std::size_t f, const InterestPacket& p) { on_interest(v, f, p); },
      [this](std::size_t v, std::size_t f, const DataPacket& p) { on_data(v, f, p); },
      [this](std::size_t v, std::size_t f) { on_drain(v, f); }});
}

RunResult Simulation::run() {
  start_clients();
  run_to_quiescence();
  return result();
}

void Simulation::start_clients() {
  for (std::size_t v : graph_.clients()) start_client(v);
}

void Simulation::start_client(std::size_t v) {
  ClientState& c = *nodes_[v].client;
  if (c.started) return;
  c.started = true;
  client_refill(v);
}

RunResult Simulation::result() const {
  return RunResult{summary(), diag_, events_.now(), pit_entries(), events_.executed()};
}

RunSummary Simulation::summary() const {
  RunSummary s;
  for (std::size_t v : graph_.clients()) {
    const NodeState& ns = nodes_[v];
    const ClientState& c = *ns.client;
    s.clients.push_back(ClientSummary{ns.name, c.download_time, ns.rank(key()), c.interests_sent, c.data_rx,
                                      c.data_rx_innovative});
  }
  const auto& counters = network_->counters();
  s.network = NetworkSummary{counters.data_tx, counters.interest_tx, counters.drops};
  s.data_rx_total = diag_.data_rx;
  s.data_rx_innovative_total = diag_.data_rx_innovative;
  return s;
}

std::size_t Simulation::pit_entries() const {
  std::size_t total = 0;
  for (const auto& ns : nodes_) total += ns.pit.size();
  return total;
}

bool Simulation::cache_hit(std::size_t v, const GenerationKey& key, std::size_t index) const {
  const NodeState& ns = nodes_[v];
  switch (config_.protocol) {
    case Protocol::Ndn: return ns.cs.has_segment(key, index);
    case Protocol::NetCodCcn: return ns.cs.rank(key) > 0;
    case Protocol::Micn:
    case Protocol::MicnIc: {
      const RrefBasis* basis = ns.cs.find_coded(key);
      return index >= 1 && basis && basis->has_pivot(index - 1);
    }
  }
  return false;
}

bool Simulation::satisfiable(std::size_t v, std::size_t face, const GenerationKey& key, const PitEntry& e) const {
  if (config_.protocol != Protocol::NetCodCcn) return cache_hit(v, key, e.index);
  const NodeState& ns = nodes_[v];
  const std::size_t rank = ns.cs.rank(key);
  if (rank == 0) return false;
  if (ns.role == Role::Source || e.upstream_answered) return true;
  auto it = ns.sent.find({key, face});
  return rank > (it == ns.sent.end() ? 0 : it->second);
}

PitEntry& Simulation::add_entry(std::size_t v, const GenerationKey& key, PitEntry entry) {
  const double lifetime = config_.interest_lifetime > 0 ? config_.interest_lifetime : config_.timeout;
  PitEntry& e = nodes_[v].pit.add(key, std::move(entry));
  const std::uint64_t id = e.id;
  e.expiry = events_.schedule_in(lifetime, [this, v, id] {
    if (nodes_[v].pit.remove(id)) ++diag_.pit_expired;
  });
  return e;
}

void Simulation::drop_entry(std::size_t v, std::uint64_t id) {
  auto removed = nodes_[v].pit.remove(id);
  if (removed && removed->expiry) events_.cancel(*removed->expiry);
}

void Simulation::on_interest(std::size_t v, std::size_t face, const InterestPacket& pkt) {
  NodeState& ns = nodes_[v];
  if (ns.role == Role::Client) {
    ++diag_.interests_at_clients;
    return;
  }
  const GenerationKey key{pkt.prefix, pkt.generation};

  if (PitEntry* live = ns.pit.find_nonce(key, pkt.nonce)) {
    if (micn() && !live->has_in_face(face)) {
      try_redirect(v, face, key, *live, pkt);
    } else {
      ++diag_.loop_drops;
    }
    return;
  }
  if (ns.pit.seen(pkt.nonce)) {
    ++diag_.loop_drops;
    return;
  }
  ns.pit.mark_seen(pkt.nonce);

  PitEntry entry;
  entry.index = pkt.index;
  entry.nonce = pkt.nonce;
  entry.in_faces = {face};
  entry.client_id = pkt.client_id;
  if (config_.protocol == Protocol::MicnIc && pkt.client_id && pkt.state) {
    diag_.low_priority_marks += ns.pit.mark_low_priority(key, *pkt.client_id, *pkt.state);
  }

  if (satisfiable(v, face, key, entry)) {
    entry.is_volatile = true;
    if (!network_->data_idle(v, face)) ++diag_.volatile_entries;
    add_entry(v, key, std::move(entry));
    serve(v, face);
    return;
  }
  if (config_.protocol == Protocol::Ndn) {
    if (PitEntry* pending = ns.pit.find_forwarded(key, pkt.index)) {
      if (!pending->has_in_face(face)) pending->in_faces.push_back(face);
      ++diag_.aggregated;
      return;
    }
  }
  PitEntry& added = add_entry(v, key, std::move(entry));
  forward(v, face, pkt, added);
}

void Simulation::try_redirect(std::size_t v, std::size_t face, const GenerationKey& key, PitEntry& live,
                              const InterestPacket& pkt) {
  (void)pkt;
  const std::size_t first = live.in_faces.front();
  if (!network_->data_idle(v, first) && network_->data_idle(v, face) && satisfiable(v, face, key, live)) {
    ++diag_.redirects;
    live.in_faces = {face};
    reply(v, face, key, live);
  } else {
    ++diag_.loop_drops;
  }
}

void Simulation::forward(std::size_t v, std::size_t in_face, const InterestPacket& pkt, PitEntry& entry) {
  NodeState& ns = nodes_[v];
  if (!ns.forwarded_nonces.insert(pkt.nonce).second) ++diag_.duplicate_forwards;
  for (std::size_t f : ns.fib) {
    if (f == in_face) continue;
    entry.out_faces.push_back(f);
    network_->send_interest(v, f, pkt);
  }
}

void Simulation::serve_all(std::size_t v) {
  for (std::size_t f = 0; f < network_->face_count(v); ++f) serve(v, f);
}

void Simulation::serve(std::size_t v, std::size_t face) {
  if (!network_->data_idle(v, face)) return;
  NodeState& ns = nodes_[v];
  auto pick = ns.pit.oldest_for_face(
      face, [&](const GenerationKey& k, const PitEntry& e) { return satisfiable(v, face, k, e); });
  if (!pick) return;
  PitEntry* entry = ns.pit.find_id(pick->second);
  reply(v, face, pick->first, *entry);
}

DataPacket Simulation::make_reply(std::size_t v, std::size_t face, const GenerationKey& key, const PitEntry& entry) {
  (void)face;
  NodeState& ns = nodes_[v];
  switch (config_.protocol) {
    case Protocol::Ndn: {
      EncodingVector unit(config_.n, 0);
      unit[entry.index - 1] = 1;
      return DataPacket{
          CodedSegment{key.prefix, key.generation, entry.index, std::move(unit), *ns.cs.segment(key, entry.index)},
          true};
    }
    case Protocol::NetCodCcn: return DataPacket{random_combination(ns.cs.coded(key), key, rng_), false};
    case Protocol::Micn:
    case Protocol::MicnIc: break;
  }
  return DataPacket{generate_reply(ns.cs.coded(key), key, entry.index, rng_), false};
}

void Simulation::reply(std::size_t v, std::size_t face, const GenerationKey& key, PitEntry& entry) {
  NodeState& ns = nodes_[v];
  DataPacket pkt = make_reply(v, face, key, entry);
  if (micn() && pkt.segment.index != entry.index) ++diag_.index_violations;
  if (config_.protocol == Protocol::NetCodCcn) ++ns.sent[{key, face}];

  const std::size_t index = entry.index;
  const auto client = entry.client_id;
  std::erase(entry.in_faces, face);
  if (entry.in_faces.empty()) drop_entry(v, entry.id);
  if (config_.protocol == Protocol::MicnIc && client) {
    for (const PitEntry& gone : ns.pit.erase_low_priority_below(key, *client, index)) {
      if (gone.expiry) events_.cancel(*gone.expiry);
      ++diag_.low_priority_deleted;
    }
  }
  network_->send_data(v, face, std::move(pkt));
}

bool Simulation::data_consistent(const DataPacket& pkt) const {
  const auto& seg = pkt.segment;
  if (seg.vector.size() != config_.n || seg.payload.size() != config_.segment_size) return false;
  if (pkt.plain) return seg.index >= 1 && seg.index <= config_.n;
  const auto lead = leading_column(seg.vector);
  return lead && *lead + 1 == seg.index;
}

bool Simulation::store(std::size_t v, const GenerationKey& key, const DataPacket& pkt) {
  NodeState& ns = nodes_[v];
  bool innovative;
  if (pkt.plain) {
    innovative = ns.cs.store_segment(key, pkt.segment.index, pkt.segment.payload);
  } else {
    innovative = ns.cs.coded(key).insert(pkt.segment.vector, pkt.segment.payload);
  }
  if (innovative) {
    trace_.record({events_.now(), v, TraceKind::RankChange, ns.rank(key), std::nullopt, std::nullopt});
  }
  return innovative;
}

void Simulation::on_data(std::size_t v, std::size_t face, const DataPacket& pkt) {
  if (!data_consistent(pkt)) {
    ++diag_.inconsistent_data;
    return;
  }
  NodeState& ns = nodes_[v];
  const GenerationKey key{pkt.segment.prefix, pkt.segment.generation};
  const bool innovative = store(v, key, pkt);
  trace_.record({events_.now(), v, TraceKind::DataRx, pkt.segment.index, innovative, network_->neighbor(v, face)});
  ++diag_.data_rx;
  if (innovative) ++diag_.data_rx_innovative;

  if (ns.client) {
    ClientState& c = *ns.client;
    ++c.data_rx;
    if (innovative) ++c.data_rx_innovative;
    if (c.complete) return;
    if (!innovative) ++c.redundant_before_decode;
    client_data(v, pkt, innovative);
    return;
  }

  if (config_.protocol == Protocol::NetCodCcn) {
    if (auto* table = ns.pit.sub_table(key)) {
      for (auto& e : *table) {
        if (e.is_volatile || e.upstream_answered) continue;
        if (std::find(e.out_faces.begin(), e.out_faces.end(), face) == e.out_faces.end()) continue;
        e.upstream_answered = true;
        break;
      }
    }
  }
  serve_all(v);
}

std::vector<bool> Simulation::client_state(const NodeState& ns) const {
  std::vector<bool> state(config_.n, false);
  if (const RrefBasis* basis = ns.cs.find_coded(key())) {
    for (std::size_t p : basis->pivots()) state[p] = true;
  }
  return state;
}

bool Simulation::holds(const NodeState& ns, std::size_t index) const {
  const GenerationKey k = key();
  if (config_.protocol == Protocol::Ndn) return ns.cs.has_segment(k, index);
  const RrefBasis* basis = ns.cs.find_coded(k);
  return basis && basis->has_pivot(index - 1);
}

std::optional<std::size_t> Simulation::next_request(const NodeState& ns) const {
  const ClientState& c = *ns.client;
  if (config_.protocol == Protocol::NetCodCcn) return std::size_t(c.sequence + 1);
  auto wanted = [&](std::size_t i) { return !c.outstanding.contains(i) && !holds(ns, i); };
  // Held indices are skipped, which makes every first reply to an interest
  // innovative. Past n, wrap around to whatever is still missing.
  for (std::size_t i = c.cursor; i <= config_.n; ++i) {
    if (wanted(i)) return i;
  }
  for (std::size_t i = 1; i < std::min(c.cursor, config_.n + 1); ++i) {
    if (wanted(i)) return i;
  }
  return std::nullopt;
}

void Simulation::client_refill(std::size_t v) {
  NodeState& ns = nodes_[v];
  ClientState& c = *ns.client;
  while (!c.complete && c.outstanding.size() < c.pipeline) {
    auto slot = next_request(ns);
    if (!slot) break;
    client_issue(v, *slot);
  }
}

void Simulation::client_issue(std::size_t v, std::size_t slot) {
  NodeState& ns = nodes_[v];
  ClientState& c = *ns.client;
  InterestPacket pkt;
  pkt.prefix = config_.prefix;
  pkt.generation = config_.generation;
  pkt.index = config_.protocol == Protocol::NetCodCcn ? 0 : slot;
  pkt.nonce = rng_();
  if (config_.protocol == Protocol::MicnIc) {
    pkt.client_id = c.id;
    pkt.state = client_state(ns);
  }
  if (config_.protocol == Protocol::NetCodCcn) {
    c.sequence = slot;
  } else if (slot >= c.cursor) {
    c.cursor = slot + 1;
  }
  for (std::size_t f : ns.fib) {
    network_->send_interest(v, f, pkt);
    ++c.interests_sent;
  }
  ++c.issue_count[slot];
  const EventId timer = events_.schedule_in(config_.timeout, [this, v, slot] { client_timeout(v, slot); });
  c.outstanding[slot] = ClientState::Outstanding{pkt.nonce, timer};
}

void Simulation::client_timeout(std::size_t v, std::size_t slot) {
  NodeState& ns = nodes_[v];
  ClientState& c = *ns.client;
  c.outstanding.erase(slot);
  ++c.timeouts;
  ++diag_.timeouts;
  if (c.complete) return;
  if (config_.protocol != Protocol::NetCodCcn && !holds(ns, slot)) {
    client_issue(v, slot);
  } else {
    client_refill(v);
  }
}

void Simulation::client_data(std::size_t v, const DataPacket& pkt, bool innovative) {
  NodeState& ns = nodes_[v];
  ClientState& c = *ns.client;
  if (config_.protocol == Protocol::NetCodCcn) {
    if (!c.outstanding.empty()) {
      events_.cancel(c.outstanding.begin()->second.timer);
      c.outstanding.erase(c.outstanding.begin());
    }
  } else if (innovative) {
    auto it = c.outstanding.find(pkt.segment.index);
    if (it != c.outstanding.end()) {
      events_.cancel(it->second.timer);
      c.outstanding.erase(it);
    }
  }
  if (ns.rank(key()) == config_.n) {
    client_finish(v);
    return;
  }
  client_refill(v);
}

void Simulation::client_finish(std::size_t v) {
  NodeState& ns = nodes_[v];
  ClientState& c = *ns.client;
  c.complete = true;
  c.download_time = events_.now();
  for (const auto& [slot, out] : c.outstanding) events_.cancel(out.timer);
  c.outstanding.clear();
  trace_.record({events_.now(), v, TraceKind::DecodeComplete, config_.n, std::nullopt, std::nullopt});

  const GenerationKey k = key();
  if (coded()) {
    auto decoded = ns.cs.coded(k).decode();
    const auto* payloads = std::get_if<std::vector<Payload>>(&decoded);
    c.decode_ok = payloads && *payloads == generation_.segments;
  } else {
    c.decode_ok = true;
    for (std::size_t j = 0; j < config_.n; ++j) {
      const Payload* p = ns.cs.segment(k, j + 1);
      if (!p || *p != generation_.segments[j]) c.decode_ok = false;
    }
  }
  if (!c.decode_ok) ++diag_.decode_mismatches;
}

}  // namespace micn
