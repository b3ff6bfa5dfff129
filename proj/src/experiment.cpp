#include "micn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace micn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T out{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_time(*v) : std::string(); }

}  // namespace

void ExperimentConfig::validate() const {
  if (topology.empty()) throw ConfigError("topology: must be set");
  if (n < 1) throw ConfigError("n: must be at least 1");
  if (q != 2 && q != 256) throw ConfigError(fmt::format("q: unsupported field order {}", q));
  if (pipeline < 1) throw ConfigError("pipeline: must be at least 1");
  if (!(timeout > 0.0) || !std::isfinite(timeout)) throw ConfigError("timeout: must be positive");
  if (!(loss >= 0.0 && loss < 1.0)) throw ConfigError("loss: must be in [0, 1)");
  if (segment_size < 1) throw ConfigError("segment-size: must be at least 1");
  if (event_ceiling < 1) throw ConfigError("event-ceiling: must be at least 1");
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "topology") {
    c.topology = std::string(value);
  } else if (key == "protocol") {
    auto p = parse_protocol(value);
    if (!p) throw ConfigError(fmt::format("protocol: unknown '{}' (ndn, netcodccn, micn, micn-ic)", value));
    c.protocol = *p;
  } else if (key == "n") {
    c.n = parse_number<std::size_t>(key, value);
  } else if (key == "q") {
    c.q = parse_number<unsigned>(key, value);
  } else if (key == "pipeline") {
    c.pipeline = parse_number<std::size_t>(key, value);
  } else if (key == "timeout") {
    c.timeout = parse_number<double>(key, value);
  } else if (key == "loss") {
    c.loss = parse_number<double>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "segment-size" || key == "segment_size") {
    c.segment_size = parse_number<std::size_t>(key, value);
  } else if (key == "event-ceiling" || key == "event_ceiling") {
    c.event_ceiling = parse_number<std::uint64_t>(key, value);
  } else if (key == "trace") {
    c.trace_path = std::string(value);
  } else if (key == "summary") {
    c.summary_path = std::string(value);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

TopologyGraph resolve_topology(const std::string& spec) {
  namespace fs = std::filesystem;
  fs::path path(spec);
  if (!fs::exists(path) && path.extension().empty() && !path.has_parent_path()) {
    path = fs::path(MICN_DATA_DIR) / "topologies" / (spec + ".topo");
  }
  if (!fs::exists(path)) throw ConfigError(fmt::format("topology: no such file or name '{}'", spec));
  try {
    TopologyGraph g = load_topology(path);
    g.validate();
    return g;
  } catch (const TopologyError& e) {
    throw ConfigError(fmt::format("topology {}: {}", path.string(), e.what()));
  }
}

SimulationConfig simulation_config(const ExperimentConfig& c) {
  SimulationConfig s;
  s.protocol = c.protocol;
  s.n = c.n;
  s.q = c.q;
  s.pipeline = c.pipeline;
  s.timeout = c.timeout;
  s.link.loss = c.loss;
  s.seed = c.seed;
  s.segment_size = c.segment_size;
  s.trace = c.record_trace || !c.trace_path.empty();
  s.event_ceiling = c.event_ceiling;
  return s;
}

double round_trip_offset(const TopologyGraph& graph, std::size_t client, const LinkParams& link) {
  auto hops = hops_to_source(graph, client);
  if (!hops) return std::numeric_limits<double>::infinity();
  const double h = double(*hops);
  return h * (link.interest_tx + link.propagation) + h * (link.data_tx + link.propagation);
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), std::streamsize(contents.size()));
    if (!out) throw ConfigError(fmt::format("write failed for '{}'", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError(fmt::format("cannot rename onto '{}': {}", path.string(), ec.message()));
  }
}

RunOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  TopologyGraph graph = resolve_topology(config.topology);
  Simulation sim(std::move(graph), simulation_config(config));
  RunOutput out;
  out.result = sim.run();

  std::ostringstream summary;
  write_summary_csv(summary, out.result.summary);
  out.summary_csv = summary.str();
  if (sim.trace().enabled()) {
    std::ostringstream trace;
    sim.trace().write_csv(trace);
    out.trace_csv = trace.str();
  }
  if (!config.trace_path.empty()) write_file_atomically(config.trace_path, out.trace_csv);
  if (!config.summary_path.empty()) write_file_atomically(config.summary_path, out.summary_csv);
  return out;
}

std::string_view axis_name(SweepAxis axis) { return axis == SweepAxis::Pipeline ? "pipeline" : "loss"; }

std::optional<SweepAxis> parse_axis(std::string_view name) {
  if (name == "pipeline") return SweepAxis::Pipeline;
  if (name == "loss") return SweepAxis::Loss;
  return std::nullopt;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep: no values given");
  if (spec.protocols.empty()) throw ConfigError("sweep: no protocols given");
  if (spec.seeds < 1) throw ConfigError("sweep: seeds must be at least 1");

  struct Job {
    ExperimentConfig config;
    SweepRow row;
  };
  std::vector<Job> jobs;
  for (double value : spec.values) {
    for (Protocol p : spec.protocols) {
      for (std::size_t j = 0; j < spec.seeds; ++j) {
        Job job{base, {}};
        job.config.protocol = p;
        job.config.seed = derive_seed(spec.master_seed, j);
        job.config.trace_path.clear();
        job.config.summary_path.clear();
        job.config.record_trace = false;
        if (spec.axis == SweepAxis::Pipeline) {
          if (value < 1.0 || value != std::floor(value)) {
            throw ConfigError(fmt::format("sweep: pipeline value {} is not a positive integer", value));
          }
          job.config.pipeline = std::size_t(value);
        } else {
          job.config.loss = value;
        }
        job.config.validate();
        job.row.value = value;
        job.row.protocol = p;
        job.row.seed_index = j;
        job.row.seed = job.config.seed;
        jobs.push_back(std::move(job));
      }
    }
  }
  // Resolve once so a bad topology fails before any thread starts.
  resolve_topology(base.topology);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const RunResult r = run_experiment(jobs[i].config).result;
        SweepRow& row = jobs[i].row;
        row.download_time = r.summary.max_download_time();
        row.mean_download_time = r.summary.mean_download_time();
        row.total_data_tx = r.summary.network.total_data_tx;
        row.total_interest_tx = r.summary.network.total_interest_tx;
        row.drops = r.summary.network.drops;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(spec.threads, 1, jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  rows.reserve(jobs.size());
  for (auto& job : jobs) rows.push_back(job.row);
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  fmt::print(out, "{}\n", kSweepHeader);
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", axis_name(axis), r.value, protocol_name(r.protocol), r.seed,
               fmt_opt(r.download_time), fmt_opt(r.mean_download_time), r.total_data_tx, r.total_interest_tx,
               r.drops);
  }
}

void write_sweep_means_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  struct Acc {
    std::size_t runs = 0;
    double time = 0.0;
    bool all_decoded = true;
    double data = 0.0, interest = 0.0, drops = 0.0;
  };
  // Keep first-seen order of (value, protocol).
  std::vector<std::pair<double, Protocol>> order;
  std::map<std::pair<double, Protocol>, Acc> acc;
  for (const auto& r : rows) {
    auto k = std::make_pair(r.value, r.protocol);
    if (!acc.contains(k)) order.push_back(k);
    Acc& a = acc[k];
    ++a.runs;
    if (r.download_time) a.time += *r.download_time;
    else a.all_decoded = false;
    a.data += double(r.total_data_tx);
    a.interest += double(r.total_interest_tx);
    a.drops += double(r.drops);
  }
  fmt::print(out, "{}\n", kSweepMeanHeader);
  for (const auto& k : order) {
    const Acc& a = acc[k];
    const double n = double(a.runs);
    fmt::print(out, "{},{},{},{},{},{:.3f},{:.3f},{:.3f}\n", axis_name(axis), k.first, protocol_name(k.second), a.runs,
               a.all_decoded ? format_time(a.time / n) : std::string(), a.data / n, a.interest / n, a.drops / n);
  }
}

std::vector<TableCell> table1(std::size_t n, unsigned q) {
  std::vector<TableCell> cells;
  for (std::size_t k = 1; k <= 5; ++k) {
    for (std::size_t l = 1; l <= 5; ++l) {
      cells.push_back(TableCell{k, l, n, q, milic::prob_fail_single(l, k, n, q), std::nullopt});
    }
  }
  return cells;
}

std::vector<TableCell> table2(std::size_t n, std::size_t monte_carlo_trials, std::uint64_t seed) {
  static constexpr std::pair<std::size_t, std::size_t> kRows[] = {{50, 2}, {25, 4}, {33, 3}, {49, 2}, {48, 2},
                                                                  {32, 3}, {24, 4}, {47, 2}, {45, 2}};
  std::vector<TableCell> cells;
  std::uint64_t run = 0;
  for (unsigned q : {2u, 256u}) {
    for (auto [k, l] : kRows) {
      TableCell cell{k, l, n, q, milic::prob_fail_multi(l, k, n, q), std::nullopt};
      if (monte_carlo_trials > 0) {
        Rng rng(derive_seed(seed, run++));
        cell.monte_carlo = milic::prob_fail_monte_carlo(milic::RankFailureQuery{l, k, n, q, {}}, monte_carlo_trials, rng);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_tables_csv(std::ostream& out, const std::vector<TableCell>& t1, const std::vector<TableCell>& t2) {
  fmt::print(out, "{}\n", kTableHeader);
  auto rows = [&](std::string_view name, const std::vector<TableCell>& cells) {
    for (const auto& c : cells) {
      if (c.monte_carlo) {
        fmt::print(out, "{},{},{},{},{},{:.6e},{},{:.6e},{:.6e}\n", name, c.n, c.q, c.k, c.l, c.p_fail,
                   c.monte_carlo->trials, c.monte_carlo->estimate, c.monte_carlo->std_error);
      } else {
        fmt::print(out, "{},{},{},{},{},{:.6e},,,\n", name, c.n, c.q, c.k, c.l, c.p_fail);
      }
    }
  };
  rows("table1", t1);
  rows("table2", t2);
}

void write_tables_text(std::ostream& out, const std::vector<TableCell>& t1, const std::vector<TableCell>& t2) {
  if (!t1.empty()) {
    fmt::print(out, "P_F for l vectors from A_k (n={}, q={})\n", t1.front().n, t1.front().q);
    fmt::print(out, "{:>6}", "");
    for (std::size_t l = 1; l <= 5; ++l) fmt::print(out, "{:>12}", fmt::format("l={}", l));
    fmt::print(out, "\n");
    for (std::size_t k = 1; k <= 5; ++k) {
      fmt::print(out, "{:>6}", fmt::format("A_{}", k));
      for (const auto& c : t1) {
        if (c.k == k) fmt::print(out, "{:>12.3g}", c.p_fail);
      }
      fmt::print(out, "\n");
    }
    fmt::print(out, "\n");
  }
  if (!t2.empty()) {
    fmt::print(out, "P_F for l vectors from each of A_1..A_k (n={})\n", t2.front().n);
    fmt::print(out, "{:>4} {:>3} {:>5} {:>12} {:>12} {:>12}\n", "k", "l", "q", "closed", "monte-carlo", "std-err");
    for (const auto& c : t2) {
      fmt::print(out, "{:>4} {:>3} {:>5} {:>12.3g}", c.k, c.l, c.q, c.p_fail);
      if (c.monte_carlo) fmt::print(out, " {:>12.3g} {:>12.3g}", c.monte_carlo->estimate, c.monte_carlo->std_error);
      fmt::print(out, "\n");
    }
  }
}

}  // namespace micn
