#include <doctest.h>

#include <deque>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "micn/experiment.hpp"
#include "micn/topology.hpp"

using namespace micn;

namespace {

// u can reach a source without passing through `removed` or relaying via a client.
bool reaches_source(const TopologyGraph& g, std::size_t u, std::size_t removed,
                    const std::vector<bool>& cut_edge = {}) {
  std::vector<bool> seen(g.size(), false);
  std::deque<std::size_t> queue{u};
  seen[u] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (g.node(v).role == Role::Source) return true;
    if (v != u && g.node(v).role == Role::Client) continue;
    for (std::size_t f = 0; f < g.neighbors(v).size(); ++f) {
      const std::size_t w = g.neighbors(v)[f];
      if (w == removed || seen[w]) continue;
      if (!cut_edge.empty()) {
        bool cut = false;
        for (std::size_t e = 0; e < g.links().size(); ++e) {
          auto [a, b] = g.links()[e];
          if (cut_edge[e] && ((a == v && b == w) || (a == w && b == v))) cut = true;
        }
        if (cut) continue;
      }
      seen[w] = true;
      queue.push_back(w);
    }
  }
  return false;
}

// Fewest links whose removal cuts the client off, by trying every subset.
std::size_t brute_min_cut(const TopologyGraph& g, std::size_t client) {
  const std::size_t m = g.links().size();
  std::size_t best = m;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    const auto k = std::size_t(__builtin_popcount(mask));
    if (k >= best) continue;
    std::vector<bool> cut(m);
    for (std::size_t e = 0; e < m; ++e) cut[e] = mask >> e & 1;
    if (!reaches_source(g, client, g.size(), cut)) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("butterfly file matches the built-in graph") {
  const auto file = load_topology(std::filesystem::path(MICN_DATA_DIR) / "topologies" / "butterfly.topo");
  const auto built = butterfly_topology();
  REQUIRE(file.size() == 8);
  REQUIRE(file.size() == built.size());
  for (std::size_t v = 0; v < file.size(); ++v) {
    CHECK(file.node(v).name == built.node(v).name);
    CHECK(file.node(v).role == built.node(v).role);
  }
  CHECK(file.links() == built.links());
  CHECK(file.sources().size() == 2);
  CHECK(file.clients().size() == 2);
}

TEST_CASE("topology parsing and validation") {
  auto g = parse_topology("node S source\nnode U client\nlink S U\n");
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS(parse_topology("node S source\nnode U client\nnode X router\nnode Y router\nlink S U\nlink X Y\n"),
                  TopologyError);
  CHECK_THROWS_AS(parse_topology("node S source\nlink S Z\n"), TopologyError);
  CHECK_THROWS_AS(parse_topology("node S wizard\n"), TopologyError);
}

TEST_CASE("FIB on the butterfly") {
  const auto g = butterfly_topology();
  const auto fibs = compute_fib(g);
  auto names = [&](std::size_t v) {
    std::vector<std::string> out;
    for (std::size_t f : fibs[v]) out.push_back(g.node(g.neighbors(v)[f]).name);
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(names(g.index_of("R3")) == std::vector<std::string>{"R1", "R2"});
  CHECK(names(g.index_of("R4")) == std::vector<std::string>{"R3"});
  CHECK(names(g.index_of("U1")) == std::vector<std::string>{"R1", "R4"});
  CHECK(fibs[g.index_of("S1")].empty());
}

TEST_CASE("FIB matches a reachability oracle") {
  for (const char* name : {"butterfly", "planetlab"}) {
    const auto g = resolve_topology(name);
    const auto fibs = compute_fib(g);
    for (std::size_t v = 0; v < g.size(); ++v) {
      std::vector<std::size_t> want;
      if (g.node(v).role != Role::Source) {
        for (std::size_t f = 0; f < g.neighbors(v).size(); ++f) {
          const std::size_t u = g.neighbors(v)[f];
          if (g.node(u).role == Role::Client) continue;
          if (reaches_source(g, u, v)) want.push_back(f);
        }
      }
      auto got = fibs[v];
      std::sort(got.begin(), got.end());
      CHECK_MESSAGE(got == want, name, " node ", g.node(v).name);
    }
  }
}

TEST_CASE("FIB on a line") {
  const auto g = line_topology(2);  // S - R0 - R1 - U
  const auto fibs = compute_fib(g);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.node(v).role == Role::Source) continue;
    REQUIRE(fibs[v].size() == 1);
    CHECK(g.neighbors(v)[fibs[v][0]] == v - 1);
  }
}

TEST_CASE("max-flow") {
  const auto g = butterfly_topology();
  for (std::size_t c : g.clients()) {
    const auto mf = max_flow(g, c);
    CHECK(mf.flow == 2);
    CHECK(mf.flow == brute_min_cut(g, c));
    CHECK(mf.download_lower_bound(100) == 50.0);
    CHECK(hops_to_source(g, c) == 2u);
  }
  CHECK(max_flow(line_topology(3), 4).flow == 1);

  TopologyGraph cut_off;  // built by hand: the parser rejects disconnected graphs
  cut_off.add_link(cut_off.add_node("S", Role::Source), cut_off.add_node("R", Role::Router));
  cut_off.add_link(cut_off.add_node("U", Role::Client), cut_off.add_node("V", Role::Client));
  const auto none = max_flow(cut_off, cut_off.index_of("U"));
  CHECK(none.flow == 0);
  CHECK(std::isinf(none.download_lower_bound(100)));
  CHECK_FALSE(hops_to_source(cut_off, cut_off.index_of("U")));
}

TEST_CASE("max-flow agrees with brute-force min-cut on small graphs") {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    TopologyGraph g;
    g.add_node("S", Role::Source);
    for (int r = 0; r < 4; ++r) g.add_node("R" + std::to_string(r), Role::Router);
    g.add_node("U", Role::Client);
    g.add_node("V", Role::Client);
    std::set<std::pair<std::size_t, std::size_t>> used;
    while (used.size() < 11) {
      std::size_t a = rng() % 7, b = rng() % 7;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (used.insert({a, b}).second) g.add_link(a, b);
    }
    for (std::size_t c : g.clients()) CHECK(max_flow(g, c).flow == brute_min_cut(g, c));
  }
}

TEST_CASE("shipped 26-node overlay") {
  const auto g = resolve_topology("planetlab");
  CHECK(g.size() == 26);
  CHECK(g.sources().size() == 1);
  CHECK(g.clients().size() == 5);
  CHECK(g.with_role(Role::Router).size() == 20);
  for (std::size_t c : g.clients()) CHECK(max_flow(g, c).flow >= 2);
}
