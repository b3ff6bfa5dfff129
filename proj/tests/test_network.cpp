#include <doctest.h>

#include <cmath>

#include "micn/network.hpp"

using namespace micn;

namespace {

struct Rig {
  TopologyGraph graph = parse_topology("node S source\nnode U client\nlink S U\n");
  EventQueue events;
  Rng rng{5};
  TraceLog trace{{"S", "U"}, true};
  std::vector<SimTime> data_at, interest_at;
  std::size_t drains = 0;
  Network net;

  explicit Rig(LinkParams p) : net(graph, p, events, rng, trace) {
    net.set_handlers({[this](std::size_t, std::size_t, const InterestPacket&) { interest_at.push_back(events.now()); },
                      [this](std::size_t, std::size_t, const DataPacket&) { data_at.push_back(events.now()); },
                      [this](std::size_t, std::size_t) { ++drains; }});
  }

  DataPacket data() const { return DataPacket{CodedSegment{"/c", 1, 1, {1}, {0}}, false}; }
};

}  // namespace

TEST_CASE("single data packet arrives after propagation plus transmission") {
  LinkParams p;
  Rig rig(p);
  rig.net.send_data(0, 0, rig.data());
  rig.events.run_until_quiescent();
  REQUIRE(rig.data_at.size() == 1);
  CHECK(rig.data_at[0] >= 1.1);
  CHECK(rig.data_at[0] <= 1.1 + p.jitter_max + 1e-12);
  CHECK(rig.drains == 1);
  CHECK(rig.net.counters().data_tx == 1);
}

TEST_CASE("data on one face is serialized") {
  Rig rig(LinkParams{});
  rig.net.send_data(0, 0, rig.data());
  CHECK_FALSE(rig.net.data_idle(0, 0));
  CHECK_THROWS_AS(rig.net.send_data(0, 0, rig.data()), std::logic_error);
  rig.events.run_until(1.0);
  CHECK(rig.net.data_idle(0, 0));
  rig.net.send_data(0, 0, rig.data());
  rig.events.run_until_quiescent();
  REQUIRE(rig.data_at.size() == 2);
  CHECK(rig.data_at[1] - rig.data_at[0] >= 1.0 - LinkParams{}.jitter_max);
}

TEST_CASE("loss extremes") {
  LinkParams none;
  none.loss = 0.0;
  Rig a(none);
  for (int k = 0; k < 200; ++k) a.net.send_interest(0, 0, InterestPacket{"/c", 1, 1, std::uint64_t(k), {}, {}});
  a.events.run_until_quiescent();
  CHECK(a.interest_at.size() == 200);

  LinkParams all;
  all.loss = 1.0;
  Rig b(all);
  for (int k = 0; k < 200; ++k) b.net.send_interest(0, 0, InterestPacket{"/c", 1, 1, std::uint64_t(k), {}, {}});
  b.net.send_data(0, 0, b.data());
  b.events.run_until_quiescent();
  CHECK(b.interest_at.empty());
  CHECK(b.data_at.empty());
  CHECK(b.net.counters().drops == 201);
}

TEST_CASE("loss rate 0.1 within three binomial sigmas") {
  LinkParams p;
  p.loss = 0.1;
  Rig rig(p);
  const int n = 10000;
  for (int k = 0; k < n; ++k) rig.net.send_interest(0, 0, InterestPacket{"/c", 1, 1, std::uint64_t(k), {}, {}});
  rig.events.run_until_quiescent();
  const double rate = 1.0 - double(rig.interest_at.size()) / n;
  CHECK(std::abs(rate - 0.1) <= 3 * std::sqrt(0.1 * 0.9 / n));
  CHECK(rig.net.counters().interest_drops == n - rig.interest_at.size());
}
