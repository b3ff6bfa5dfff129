#ifndef MICN_TOPOLOGY_HPP
#define MICN_TOPOLOGY_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace micn {

enum class Role { Source, Router, Client };

std::string_view role_name(Role r);

class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Undirected graph of named nodes. Face k of a node is its k-th incident
/// link in declaration order.
class TopologyGraph {
 public:
  struct Node {
    std::string name;
    Role role;
  };

  std::size_t add_node(std::string name, Role role);
  void add_link(std::size_t a, std::size_t b);

  // Throws TopologyError if disconnected or missing a source or client.
  void validate() const;

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t v) const { return nodes_[v]; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  // Neighbor reached through each face.
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
  std::size_t face_toward(std::size_t v, std::size_t neighbor) const;
  const std::vector<std::pair<std::size_t, std::size_t>>& links() const { return links_; }

  std::vector<std::size_t> sources() const { return with_role(Role::Source); }
  std::vector<std::size_t> clients() const { return with_role(Role::Client); }
  std::vector<std::size_t> with_role(Role r) const;

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> links_;
};

// Grammar, one statement per line, '#' starts a comment:
//   node <name> <source|router|client>
//   link <a> <b>
TopologyGraph parse_topology(std::string_view text);
TopologyGraph load_topology(const std::filesystem::path& path);

// Built-in graphs matching the files shipped under data/topologies.
TopologyGraph butterfly_topology();
TopologyGraph line_topology(std::size_t routers);

/// Per-node FIB as a list of face indices. Face (v,u) is included iff u is a
/// source, or u can reach a source once v is removed. Clients do not relay,
/// so paths never pass through another client. Sources get an empty FIB.
using Fib = std::vector<std::size_t>;
std::vector<Fib> compute_fib(const TopologyGraph& graph);
std::vector<Fib> compute_fib(const TopologyGraph& graph, const std::vector<std::size_t>& sources);

struct MaxFlowResult {
  std::size_t flow = 0;  // data packets per time unit
  // n / flow; infinity when the client is cut off
  double download_lower_bound(std::size_t n) const;
};

// Unit capacity per link direction, super-source over all sources; other
// clients are not used as relays.
MaxFlowResult max_flow(const TopologyGraph& graph, std::size_t client);

// Fewest links between the client and any source (relaying as above), or
// nullopt when unreachable.
std::optional<std::size_t> hops_to_source(const TopologyGraph& graph, std::size_t client);

}  // namespace micn

#endif  // MICN_TOPOLOGY_HPP
