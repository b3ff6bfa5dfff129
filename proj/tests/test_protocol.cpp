#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "micn/experiment.hpp"
#include "micn/protocol.hpp"

using namespace micn;

namespace {

// S - R - D - U, plus a second branch R - E - U so R has two downstream faces.
TopologyGraph diamond() {
  return parse_topology(R"(
node S source
node R router
node D router
node E router
node U client
link S R
link R D
link R E
link D U
link E U
)");
}

SimulationConfig small(Protocol p, std::size_t n = 8) {
  SimulationConfig c;
  c.protocol = p;
  c.n = n;
  c.segment_size = 8;
  c.seed = 42;
  return c;
}

InterestPacket interest(const Simulation& sim, std::size_t index, std::uint64_t nonce) {
  InterestPacket p;
  p.prefix = sim.config().prefix;
  p.generation = sim.config().generation;
  p.index = index;
  p.nonce = nonce;
  return p;
}

DataPacket coded_from_source(Simulation& sim, std::size_t index) {
  return DataPacket{source_reply(sim.generation(), index, sim.field(), sim.rng()), false};
}

struct Faces {
  std::size_t r, s_face, d_face, e_face;
};

Faces faces(const Simulation& sim) {
  const auto& g = sim.graph();
  const std::size_t r = g.index_of("R");
  return {r, g.face_toward(r, g.index_of("S")), g.face_toward(r, g.index_of("D")), g.face_toward(r, g.index_of("E"))};
}

std::vector<TraceRecord> data_tx_from(const Simulation& sim, std::size_t node) {
  std::vector<TraceRecord> out;
  for (const auto& r : sim.trace().records()) {
    if (r.kind == TraceKind::DataTx && r.node == node) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("reply generation stays in the requested subset") {
  const auto& f = gf::Field::gf256();
  Rng rng(3);
  const GenerationKey key{"/c", 1};
  RrefBasis single(f, 6, 4);
  single.insert(EncodingVector{0, 0, 5, 1, 0, 2}, Payload{1, 2, 3, 4});
  for (int t = 0; t < 50; ++t) {
    const auto seg = generate_reply(single, key, 3, rng);
    CHECK(milic::subset_of(seg.vector) == 3);
    RrefBasis copy = single;
    CHECK_FALSE(copy.insert(seg.vector, seg.payload));  // scalar multiple of the row
  }
  CHECK_THROWS_AS(generate_reply(single, key, 2, rng), std::logic_error);

  auto gen = Generation::random("/c", 1, 6, 4, rng);
  RrefBasis full(f, 6, 4);
  for (std::size_t j = 0; j < 6; ++j) {
    EncodingVector unit(6, 0);
    unit[j] = 1;
    full.insert(unit, gen.segments[j]);
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t i = 1 + rng() % 6;
    const auto seg = generate_reply(full, key, i, rng);
    CHECK(milic::subset_of(seg.vector) == i);
    CHECK(seg.payload == combine_plaintext(gen, seg.vector, f));
  }
}

TEST_CASE("interest at a source is always a hit") {
  Simulation sim(butterfly_topology(), small(Protocol::Micn));
  const auto& g = sim.graph();
  const std::size_t s1 = g.index_of("S1");
  for (std::size_t i = 1; i <= 8; ++i) CHECK(sim.cache_hit(s1, sim.key(), i));
  sim.deliver_interest(s1, 0, interest(sim, 5, 1));
  CHECK_FALSE(sim.network().data_idle(s1, 0));
  CHECK(sim.pit_entries() == 0);
}

TEST_CASE("cache miss creates an entry and forwards to FIB minus in-face") {
  Simulation sim(butterfly_topology(), small(Protocol::Micn));
  const auto& g = sim.graph();
  const std::size_t r3 = g.index_of("R3");
  const std::size_t from_r4 = g.face_toward(r3, g.index_of("R4"));
  sim.deliver_interest(r3, from_r4, interest(sim, 2, 77));
  REQUIRE(sim.node(r3).pit.size() == 1);
  const auto* table = sim.node(r3).pit.sub_tables().begin()->second.data();
  CHECK_FALSE(table->is_volatile);
  CHECK(table->in_faces == std::vector<std::size_t>{from_r4});
  std::set<std::size_t> out(table->out_faces.begin(), table->out_faces.end());
  CHECK(out == std::set<std::size_t>{g.face_toward(r3, g.index_of("R1")), g.face_toward(r3, g.index_of("R2"))});
  CHECK(sim.network().counters().interest_tx == 2);

  // same nonce again is a loop
  sim.deliver_interest(r3, from_r4, interest(sim, 2, 77));
  CHECK(sim.diagnostics().loop_drops == 1);
  CHECK(sim.node(r3).pit.size() == 1);
}

TEST_CASE("just-in-time encoding picks up data that arrives while the face is busy") {
  Simulation sim(diamond(), small(Protocol::Micn));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  const auto key = sim.key();
  sim.deliver_data(r, s_face, coded_from_source(sim, 1));
  sim.deliver_data(r, s_face, coded_from_source(sim, 3));
  const RrefBasis before = *sim.node(r).cs.find_coded(key);

  sim.deliver_interest(r, d_face, interest(sim, 1, 100));  // starts c_1 on the D face
  REQUIRE_FALSE(sim.network().data_idle(r, d_face));
  sim.deliver_interest(r, d_face, interest(sim, 3, 101));
  CHECK(sim.diagnostics().volatile_entries == 1);
  REQUIRE(sim.node(r).pit.size() == 1);
  CHECK(sim.node(r).pit.sub_tables().begin()->second.front().is_volatile);

  sim.deliver_data(r, s_face, coded_from_source(sim, 5));  // c_2 arrives meanwhile
  sim.run_until(2.5);

  const auto sent = data_tx_from(sim, r);
  REQUIRE(sent.size() == 2);
  CHECK(sent[1].index == 3u);
  CHECK(sim.pit_entries() == 0);

  // The deferred reply leaves the span R had when the interest arrived.
  const RrefBasis* at_d = sim.node(sim.graph().index_of("D")).cs.find_coded(key);
  REQUIRE(at_d);
  REQUIRE(at_d->rank() == 2);
  bool outside = false;
  for (std::size_t row = 0; row < at_d->rank(); ++row) {
    RrefBasis probe = before;
    if (probe.insert(at_d->coefficients(row))) outside = true;
  }
  CHECK(outside);

  // Encoding at arrival time could only have used the old span.
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    RrefBasis probe = before;
    CHECK_FALSE(probe.insert(generate_reply(before, key, 3, rng).vector));
  }
}

TEST_CASE("older satisfiable entry is served first") {
  Simulation sim(diamond(), small(Protocol::Micn));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  sim.deliver_data(r, s_face, coded_from_source(sim, 1));
  sim.deliver_data(r, s_face, coded_from_source(sim, 2));
  sim.deliver_interest(r, d_face, interest(sim, 1, 1));
  sim.deliver_interest(r, d_face, interest(sim, 2, 2));
  sim.deliver_interest(r, d_face, interest(sim, 1, 3));
  sim.run_until(3.5);
  const auto sent = data_tx_from(sim, r);
  REQUIRE(sent.size() == 3);
  CHECK(sent[1].index == 2u);
  CHECK(sent[2].index == 1u);
}

TEST_CASE("duplicate data leaves the store alone but still serves") {
  Simulation sim(diamond(), small(Protocol::Micn));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  const auto pkt = coded_from_source(sim, 2);
  sim.deliver_data(r, s_face, pkt);
  sim.deliver_interest(r, d_face, interest(sim, 3, 1));  // miss, forwarded
  const RrefBasis before = *sim.node(r).cs.find_coded(sim.key());
  sim.deliver_data(r, s_face, pkt);
  CHECK(*sim.node(r).cs.find_coded(sim.key()) == before);
  CHECK(sim.diagnostics().data_rx == 2);
  CHECK(sim.diagnostics().data_rx_innovative == 1);
  // pivot 2 only: the index-3 entry is still unsatisfiable and waits
  CHECK(sim.network().data_idle(r, d_face));
  CHECK(sim.node(r).pit.size() == 1);
}

TEST_CASE("redirect to an idle face") {
  Simulation sim(diamond(), small(Protocol::Micn));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  sim.deliver_data(r, s_face, coded_from_source(sim, 1));
  sim.deliver_data(r, s_face, coded_from_source(sim, 2));

  SUBCASE("alternate face idle: reply goes there") {
    sim.deliver_interest(r, d_face, interest(sim, 1, 5));
    sim.deliver_interest(r, d_face, interest(sim, 2, 9));  // pending on busy D face
    sim.deliver_interest(r, e_face, interest(sim, 2, 9));
    CHECK(sim.diagnostics().redirects == 1);
    CHECK_FALSE(sim.network().data_idle(r, e_face));
    CHECK(sim.node(r).pit.size() == 0);
    const auto sent = data_tx_from(sim, r);
    REQUIRE(sent.size() == 2);
    CHECK(sent[1].index == 2u);
    CHECK(sent[1].peer == sim.graph().index_of("E"));
  }
  SUBCASE("alternate face busy: loop drop") {
    sim.deliver_interest(r, d_face, interest(sim, 1, 5));
    sim.deliver_interest(r, e_face, interest(sim, 1, 6));
    sim.deliver_interest(r, d_face, interest(sim, 2, 9));
    sim.deliver_interest(r, e_face, interest(sim, 2, 9));
    CHECK(sim.diagnostics().redirects == 0);
    CHECK(sim.diagnostics().loop_drops == 1);
    CHECK(sim.node(r).pit.size() == 1);
  }
  SUBCASE("cache miss: loop drop, entry unchanged") {
    sim.deliver_interest(r, d_face, interest(sim, 1, 5));
    sim.deliver_interest(r, d_face, interest(sim, 4, 9));
    sim.deliver_interest(r, e_face, interest(sim, 4, 9));
    CHECK(sim.diagnostics().loop_drops == 1);
    REQUIRE(sim.node(r).pit.size() == 1);
    CHECK(sim.node(r).pit.sub_tables().begin()->second.front().in_faces == std::vector<std::size_t>{d_face});
  }
}

TEST_CASE("pending lower-index entries are cancelled once a higher reply is sent") {
  Simulation sim(diamond(), small(Protocol::MicnIc));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  const std::uint64_t client = 77;
  auto ic = [&](std::size_t index, std::uint64_t nonce, std::vector<std::size_t> have) {
    InterestPacket p = interest(sim, index, nonce);
    p.client_id = client;
    p.state = std::vector<bool>(8, false);
    for (std::size_t i : have) (*p.state)[i - 1] = true;
    return p;
  };
  sim.deliver_interest(r, d_face, ic(3, 1, {}));
  sim.deliver_interest(r, d_face, ic(4, 2, {}));
  sim.deliver_interest(r, d_face, ic(6, 3, {1, 2, 3}));
  CHECK(sim.diagnostics().low_priority_marks == 1);
  const auto& table = sim.node(r).pit.sub_tables().begin()->second;
  REQUIRE(table.size() == 3);
  CHECK(table[0].index == 3);
  CHECK(table[0].priority == Priority::Low);
  CHECK(table[1].priority == Priority::Normal);
  CHECK(table[2].priority == Priority::Normal);

  sim.deliver_data(r, s_face, coded_from_source(sim, 4));  // A_4 reply goes to D
  CHECK(sim.diagnostics().low_priority_deleted == 1);
  std::set<std::size_t> left;
  for (const auto& e : sim.node(r).pit.sub_tables().begin()->second) left.insert(e.index);
  CHECK(left == std::set<std::size_t>{6});
}

TEST_CASE("NetCodCCN rank rule") {
  Simulation sim(diamond(), small(Protocol::NetCodCcn));
  const auto [r, s_face, d_face, e_face] = faces(sim);
  for (std::size_t i : {1, 2, 3}) sim.deliver_data(r, s_face, coded_from_source(sim, i));
  REQUIRE(sim.node(r).cs.rank(sim.key()) == 3);
  sim.node(r).sent[{sim.key(), d_face}] = 3;
  sim.deliver_interest(r, d_face, interest(sim, 0, 1));
  CHECK(sim.network().data_idle(r, d_face));
  CHECK(sim.node(r).pit.size() == 1);
  sim.deliver_interest(r, e_face, interest(sim, 0, 2));
  CHECK_FALSE(sim.network().data_idle(r, e_face));
  CHECK(sim.node(r).sent[{sim.key(), e_face}] == 1);
}

TEST_CASE("full butterfly runs") {
  for (Protocol p : {Protocol::Micn, Protocol::MicnIc, Protocol::NetCodCcn, Protocol::Ndn}) {
    CAPTURE(protocol_name(p));
    SimulationConfig c;
    c.protocol = p;
    c.seed = 3;
    Simulation sim(butterfly_topology(), c);
    const RunResult r = sim.run();
    CHECK(r.all_decoded());
    CHECK(r.pit_entries_left == 0);
    CHECK(r.diagnostics.decode_mismatches == 0);
    CHECK(r.diagnostics.index_violations == 0);
    CHECK(r.diagnostics.inconsistent_data == 0);
    CHECK(r.diagnostics.duplicate_forwards == 0);
    for (const auto& cl : r.summary.clients) {
      CHECK(cl.rank == 100);
      CHECK(cl.data_rx_innovative == 100);
      CHECK(*cl.download_time >= 50.0);
    }
  }
}

TEST_CASE("stop-and-wait and full-burst pipelines") {
  SUBCASE("pipeline 1 keeps one index outstanding") {
    SimulationConfig c = small(Protocol::Micn, 20);
    c.pipeline = 1;
    Simulation sim(butterfly_topology(), c);
    sim.start_clients();
    for (double t = 0.5; t < 200; t += 0.5) {
      sim.run_until(t);
      for (std::size_t v : sim.graph().clients()) CHECK(sim.node(v).client->outstanding.size() <= 1);
      if (sim.events().pending() == 0) break;
    }
    CHECK(sim.result().all_decoded());
  }
  SUBCASE("pipeline n issues every index at once") {
    SimulationConfig c = small(Protocol::Micn, 20);
    c.pipeline = 20;
    Simulation sim(butterfly_topology(), c);
    sim.start_clients();
    for (std::size_t v : sim.graph().clients()) {
      CHECK(sim.node(v).client->outstanding.size() == 20);
      CHECK(sim.node(v).client->issue_count.size() == 20);
    }
    sim.run_to_quiescence();
    CHECK(sim.result().all_decoded());
  }
}

TEST_CASE("trace fold reproduces the counters") {
  for (Protocol p : {Protocol::Micn, Protocol::Ndn}) {
    SimulationConfig c;
    c.protocol = p;
    c.link.loss = 0.05;
    Simulation sim(butterfly_topology(), c);
    const RunResult r = sim.run();
    const RunSummary folded = summarize_trace(sim.trace(), sim.graph().clients());
    CHECK(folded.network == r.summary.network);
    CHECK(folded.clients == r.summary.clients);
    CHECK(folded.data_rx_total == r.summary.data_rx_total);
    CHECK(folded.data_rx_innovative_total == r.summary.data_rx_innovative_total);
  }
}

TEST_CASE("innovation flags at clients sum to n per client") {
  Simulation sim(butterfly_topology(), SimulationConfig{});
  sim.run();
  std::size_t innovative = 0;
  const auto clients = sim.graph().clients();
  for (const auto& rec : sim.trace().records()) {
    if (rec.kind == TraceKind::DataRx && rec.innovative.value_or(false) &&
        std::find(clients.begin(), clients.end(), rec.node) != clients.end()) {
      ++innovative;
    }
  }
  CHECK(innovative == 100 * clients.size());
}

TEST_CASE("PIT tables drain after quiescence under loss") {
  for (Protocol p : {Protocol::Micn, Protocol::MicnIc, Protocol::NetCodCcn, Protocol::Ndn}) {
    CAPTURE(protocol_name(p));
    SimulationConfig c;
    c.protocol = p;
    c.link.loss = 0.1;
    c.seed = 8;
    Simulation sim(butterfly_topology(), c);
    const RunResult r = sim.run();
    CHECK(r.all_decoded());
    for (std::size_t v = 0; v < sim.graph().size(); ++v) CHECK(sim.node(v).pit.empty());
  }
}

TEST_CASE("same seed, same trace") {
  SimulationConfig c;
  c.link.loss = 0.05;
  c.seed = 1234;
  Simulation a(butterfly_topology(), c), b(butterfly_topology(), c);
  a.run();
  b.run();
  std::ostringstream ta, tb;
  a.trace().write_csv(ta);
  b.trace().write_csv(tb);
  CHECK(ta.str() == tb.str());
  c.seed = 1235;
  Simulation d(butterfly_topology(), c);
  d.run();
  std::ostringstream td;
  d.trace().write_csv(td);
  CHECK(ta.str() != td.str());
}

TEST_CASE("invalid simulation configs are rejected") {
  SimulationConfig c;
  c.q = 3;
  CHECK_THROWS(Simulation(butterfly_topology(), c));
  c = SimulationConfig{};
  c.pipeline = 0;
  CHECK_THROWS_AS(Simulation(butterfly_topology(), c), std::invalid_argument);
  c = SimulationConfig{};
  c.event_ceiling = 1000;
  Simulation sim(butterfly_topology(), c);
  CHECK_THROWS_AS(sim.run(), RunawayError);
}
