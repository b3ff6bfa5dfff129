#ifndef MICN_EXPERIMENT_HPP
#define MICN_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "micn/protocol.hpp"

namespace micn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string topology = "butterfly";  // file path or a name under data/topologies
  Protocol protocol = Protocol::Micn;
  std::size_t n = 100;
  unsigned q = 256;
  std::size_t pipeline = 10;
  double timeout = 10.0;
  double loss = 0.0;
  std::uint64_t seed = 1;
  std::size_t segment_size = 64;
  std::uint64_t event_ceiling = 50'000'000;
  std::string trace_path;    // empty: no trace file
  std::string summary_path;  // empty: no summary file
  bool record_trace = false;  // keep the trace in memory without a trace_path

  // Throws ConfigError.
  void validate() const;
};

// Sets one field from its textual form; keys match the CLI flag names
// (topology, protocol, n, q, pipeline, timeout, loss, seed, segment-size,
// event-ceiling, trace, summary). Throws ConfigError.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

// key = value lines, '#' comments. Throws ConfigError naming the line.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

// Accepts a path, or a bare name resolved against the shipped topology
// directory ("butterfly" -> data/topologies/butterfly.topo).
TopologyGraph resolve_topology(const std::string& spec);

SimulationConfig simulation_config(const ExperimentConfig& config);

// Shortest-path time for the first data packet of a request to come back:
// interests and data both cross h hops, data paying its transmission time.
double round_trip_offset(const TopologyGraph& graph, std::size_t client, const LinkParams& link = {});

struct RunOutput {
  RunResult result;
  std::string trace_csv;  // empty unless tracing was on
  std::string summary_csv;
};

// One simulation; writes trace and summary files when paths are set. Files
// are written to a temporary name and renamed into place.
RunOutput run_experiment(const ExperimentConfig& config);

void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

enum class SweepAxis { Pipeline, Loss };

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Pipeline;
  std::vector<double> values;
  std::vector<Protocol> protocols{Protocol::Micn};
  std::size_t seeds = 1;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
};

struct SweepRow {
  double value = 0.0;
  Protocol protocol = Protocol::Micn;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  std::optional<SimTime> download_time;  // slowest client, if all decoded
  std::optional<SimTime> mean_download_time;
  std::size_t total_data_tx = 0;
  std::size_t total_interest_tx = 0;
  std::size_t drops = 0;
};

// Seed j of every (value, protocol) cell is derive_seed(master, j), so cells
// are paired by seed.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepSpec& spec);

inline constexpr std::string_view kSweepHeader =
    "axis,value,protocol,seed,download_time,mean_download_time,total_data_tx,total_interest_tx,drops";
inline constexpr std::string_view kSweepMeanHeader =
    "axis,value,protocol,runs,download_time,total_data_tx,total_interest_tx,drops";

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);
// One row per (value, protocol): averages over seeds, download time blank if
// any run failed to decode.
void write_sweep_means_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

struct TableCell {
  std::size_t k = 0;
  std::size_t l = 0;
  std::size_t n = 0;
  unsigned q = 0;
  double p_fail = 0.0;
  std::optional<milic::MonteCarloEstimate> monte_carlo;
};

// l draws from the single subset A_k, k = 1..5, l = 1..5.
std::vector<TableCell> table1(std::size_t n = 10, unsigned q = 256);
// l draws from each of A_1..A_k for the nine (k, l) rows at q = 2 and 256.
std::vector<TableCell> table2(std::size_t n = 100, std::size_t monte_carlo_trials = 0, std::uint64_t seed = 1);

inline constexpr std::string_view kTableHeader = "table,n,q,k,l,p_fail,mc_trials,mc_estimate,mc_std_error";

void write_tables_csv(std::ostream& out, const std::vector<TableCell>& t1, const std::vector<TableCell>& t2);
void write_tables_text(std::ostream& out, const std::vector<TableCell>& t1, const std::vector<TableCell>& t2);

}  // namespace micn

#endif  // MICN_EXPERIMENT_HPP
