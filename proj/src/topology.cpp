#include "micn/topology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace micn {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Source: return "source";
    case Role::Router: return "router";
    case Role::Client: return "client";
  }
  return "?";
}

TopologyError::TopologyError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

std::size_t TopologyGraph::add_node(std::string name, Role role) {
  if (find(name)) throw TopologyError(fmt::format("duplicate node '{}'", name));
  nodes_.push_back({std::move(name), role});
  adjacency_.emplace_back();
  return nodes_.size() - 1;
}

void TopologyGraph::add_link(std::size_t a, std::size_t b) {
  if (a >= size() || b >= size()) throw TopologyError("link endpoint out of range");
  if (a == b) throw TopologyError(fmt::format("self link on '{}'", nodes_[a].name));
  if (std::find(adjacency_[a].begin(), adjacency_[a].end(), b) != adjacency_[a].end()) {
    throw TopologyError(fmt::format("duplicate link {} - {}", nodes_[a].name, nodes_[b].name));
  }
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
  links_.emplace_back(a, b);
}

std::optional<std::size_t> TopologyGraph::find(std::string_view name) const {
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].name == name) return v;
  }
  return std::nullopt;
}

std::size_t TopologyGraph::index_of(std::string_view name) const {
  auto v = find(name);
  if (!v) throw TopologyError(fmt::format("unknown node '{}'", name));
  return *v;
}

std::size_t TopologyGraph::face_toward(std::size_t v, std::size_t neighbor) const {
  const auto& adj = adjacency_[v];
  auto it = std::find(adj.begin(), adj.end(), neighbor);
  if (it == adj.end()) {
    throw TopologyError(fmt::format("{} is not adjacent to {}", nodes_[v].name, nodes_[neighbor].name));
  }
  return std::size_t(it - adj.begin());
}

std::vector<std::size_t> TopologyGraph::with_role(Role r) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].role == r) out.push_back(v);
  }
  return out;
}

void TopologyGraph::validate() const {
  if (sources().empty()) throw TopologyError("topology has no source");
  if (clients().empty()) throw TopologyError("topology has no client");
  std::vector<bool> seen(size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : adjacency_[v]) {
      if (!seen[u]) {
        seen[u] = true;
        queue.push_back(u);
      }
    }
  }
  for (std::size_t v = 0; v < size(); ++v) {
    if (!seen[v]) throw TopologyError(fmt::format("topology is disconnected at '{}'", nodes_[v].name));
  }
}

TopologyGraph parse_topology(std::string_view text) {
  TopologyGraph graph;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string keyword;
    if (!(words >> keyword)) continue;
    std::string a, b, extra;
    if (!(words >> a >> b)) throw TopologyError(fmt::format("'{}' needs two arguments", keyword), lineno);
    if (words >> extra) throw TopologyError(fmt::format("unexpected token '{}'", extra), lineno);
    try {
      if (keyword == "node") {
        Role role;
        if (b == "source") role = Role::Source;
        else if (b == "router") role = Role::Router;
        else if (b == "client") role = Role::Client;
        else throw TopologyError(fmt::format("unknown role '{}'", b), lineno);
        graph.add_node(a, role);
      } else if (keyword == "link") {
        auto va = graph.find(a), vb = graph.find(b);
        if (!va) throw TopologyError(fmt::format("unknown node '{}'", a), lineno);
        if (!vb) throw TopologyError(fmt::format("unknown node '{}'", b), lineno);
        graph.add_link(*va, *vb);
      } else {
        throw TopologyError(fmt::format("unknown statement '{}'", keyword), lineno);
      }
    } catch (const TopologyError& e) {
      if (e.line()) throw;
      throw TopologyError(e.what(), lineno);
    }
  }
  try {
    graph.validate();
  } catch (const TopologyError& e) {
    throw TopologyError(e.what(), lineno);
  }
  return graph;
}

TopologyGraph load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError(fmt::format("cannot open topology file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

TopologyGraph butterfly_topology() {
  return parse_topology(R"(
node S1 source
node S2 source
node R1 router
node R2 router
node R3 router
node R4 router
node U1 client
node U2 client
link S1 R1
link S2 R2
link R1 R3
link R2 R3
link R3 R4
link R1 U1
link R2 U2
link R4 U1
link R4 U2
)");
}

TopologyGraph line_topology(std::size_t routers) {
  TopologyGraph g;
  std::size_t prev = g.add_node("S", Role::Source);
  for (std::size_t k = 0; k < routers; ++k) {
    std::size_t r = g.add_node(fmt::format("R{}", k + 1), Role::Router);
    g.add_link(prev, r);
    prev = r;
  }
  g.add_link(prev, g.add_node("U", Role::Client));
  g.validate();
  return g;
}

namespace {

// BFS from start, never entering `removed` or any client, succeeding on
// reaching a source.
bool reaches_source(const TopologyGraph& g, std::size_t start, std::size_t removed,
                    const std::vector<bool>& is_source) {
  std::vector<bool> seen(g.size(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  seen[removed] = true;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    if (is_source[v]) return true;
    for (std::size_t u : g.neighbors(v)) {
      if (seen[u] || g.node(u).role == Role::Client) continue;
      seen[u] = true;
      queue.push_back(u);
    }
  }
  return false;
}

}  // namespace

std::vector<Fib> compute_fib(const TopologyGraph& graph) { return compute_fib(graph, graph.sources()); }

std::vector<Fib> compute_fib(const TopologyGraph& graph, const std::vector<std::size_t>& sources) {
  std::vector<bool> is_source(graph.size(), false);
  for (std::size_t s : sources) is_source[s] = true;
  std::vector<Fib> fibs(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (is_source[v]) continue;
    const auto& adj = graph.neighbors(v);
    for (std::size_t face = 0; face < adj.size(); ++face) {
      std::size_t u = adj[face];
      if (is_source[u] ||
          (graph.node(u).role != Role::Client && reaches_source(graph, u, v, is_source))) {
        fibs[v].push_back(face);
      }
    }
  }
  return fibs;
}

double MaxFlowResult::download_lower_bound(std::size_t n) const {
  if (flow == 0) return std::numeric_limits<double>::infinity();
  return double(n) / double(flow);
}

MaxFlowResult max_flow(const TopologyGraph& graph, std::size_t client) {
  const std::size_t count = graph.size() + 1;
  const std::size_t super = graph.size();
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<std::vector<int>> cap(count, std::vector<int>(count, 0));
  auto usable = [&](std::size_t v) { return graph.node(v).role != Role::Client || v == client; };
  for (auto [a, b] : graph.links()) {
    if (!usable(a) || !usable(b)) continue;
    cap[a][b] += 1;
    cap[b][a] += 1;
  }
  for (std::size_t s : graph.sources()) cap[super][s] = kInf;

  // Edmonds-Karp
  std::size_t flow = 0;
  for (;;) {
    std::vector<int> parent(count, -1);
    parent[super] = int(super);
    std::deque<std::size_t> queue{super};
    while (!queue.empty() && parent[client] < 0) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t u = 0; u < count; ++u) {
        if (parent[u] < 0 && cap[v][u] > 0) {
          parent[u] = int(v);
          queue.push_back(u);
        }
      }
    }
    if (parent[client] < 0) break;
    int bottleneck = kInf;
    for (std::size_t v = client; v != super; v = std::size_t(parent[v])) {
      bottleneck = std::min(bottleneck, cap[std::size_t(parent[v])][v]);
    }
    for (std::size_t v = client; v != super; v = std::size_t(parent[v])) {
      cap[std::size_t(parent[v])][v] -= bottleneck;
      cap[v][std::size_t(parent[v])] += bottleneck;
    }
    flow += std::size_t(bottleneck);
  }
  return MaxFlowResult{flow};
}

std::optional<std::size_t> hops_to_source(const TopologyGraph& graph, std::size_t client) {
  std::vector<int> dist(graph.size(), -1);
  std::deque<std::size_t> queue{client};
  dist[client] = 0;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    if (graph.node(v).role == Role::Source) return std::size_t(dist[v]);
    for (std::size_t u : graph.neighbors(v)) {
      if (dist[u] >= 0 || (graph.node(u).role == Role::Client)) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  return std::nullopt;
}

}  // namespace micn
