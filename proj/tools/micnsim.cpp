// micnsim: run simulations, sweeps and probability tables.

#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "micn/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRunaway = 2;

// Flags that mirror ExperimentConfig keys. Values are kept as text and
// applied on top of the config file so both paths share one parser.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App& app, bool include_outputs) {
    app.add_option("-c,--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    static const char* kKeys[][2] = {
        {"topology", "topology file or shipped name (butterfly, planetlab)"},
        {"protocol", "ndn | netcodccn | micn | micn-ic"},
        {"n", "generation size"},
        {"q", "field order (2 or 256)"},
        {"pipeline", "interests in flight per client"},
        {"timeout", "interest timeout"},
        {"loss", "per-link loss probability"},
        {"seed", "rng seed"},
        {"segment-size", "payload bytes per segment"},
        {"event-ceiling", "abort after this many events"},
        {"trace", "trace CSV output path"},
        {"summary", "summary CSV output path"},
    };
    for (auto& [key, help] : kKeys) {
      const std::string k = key;
      if (!include_outputs && (k == "trace" || k == "summary")) continue;
      options.emplace_back(k, app.add_option("--" + k, values[k], help));
    }
  }

  micn::ExperimentConfig resolve() const {
    micn::ExperimentConfig c;
    if (!config_file.empty()) c = micn::load_config(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) micn::apply_setting(c, key, values.at(key));
    }
    c.validate();
    return c;
  }
};

std::vector<micn::Protocol> parse_protocols(const std::vector<std::string>& names) {
  std::vector<micn::Protocol> out;
  for (const auto& name : names) {
    auto p = micn::parse_protocol(name);
    if (!p) throw micn::ConfigError(fmt::format("unknown protocol '{}'", name));
    out.push_back(*p);
  }
  return out;
}

int cmd_run(const ConfigFlags& flags) {
  const micn::ExperimentConfig config = flags.resolve();
  const micn::RunOutput out = micn::run_experiment(config);
  if (config.summary_path.empty()) std::cout << out.summary_csv;
  for (const auto& c : out.result.summary.clients) {
    fmt::print(std::cerr, "{}: rank {}/{} download {}\n", c.client, c.rank, config.n,
               c.download_time ? micn::format_time(*c.download_time) : "-");
  }
  if (!out.result.all_decoded()) fmt::print(std::cerr, "warning: not every client decoded\n");
  return kExitOk;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& axis, const std::vector<double>& values,
              const std::vector<std::string>& protocols, std::size_t seeds, std::uint64_t master_seed,
              std::size_t threads, const std::string& out_path, const std::string& means_path) {
  const micn::ExperimentConfig base = flags.resolve();
  micn::SweepSpec spec;
  auto a = micn::parse_axis(axis);
  if (!a) throw micn::ConfigError(fmt::format("unknown sweep axis '{}' (pipeline, loss)", axis));
  spec.axis = *a;
  spec.values = values;
  spec.protocols = protocols.empty() ? std::vector<micn::Protocol>{base.protocol} : parse_protocols(protocols);
  spec.seeds = seeds;
  spec.master_seed = master_seed;
  spec.threads = threads;

  const auto rows = micn::run_sweep(base, spec);
  std::ostringstream csv;
  micn::write_sweep_csv(csv, spec.axis, rows);
  if (out_path.empty()) std::cout << csv.str();
  else micn::write_file_atomically(out_path, csv.str());
  std::ostringstream means;
  micn::write_sweep_means_csv(means, spec.axis, rows);
  if (means_path.empty()) std::cerr << means.str();
  else micn::write_file_atomically(means_path, means.str());
  return kExitOk;
}

int cmd_tables(bool csv, std::size_t trials, std::uint64_t seed) {
  const auto t1 = micn::table1();
  const auto t2 = micn::table2(100, trials, seed);
  if (csv) micn::write_tables_csv(std::cout, t1, t2);
  else micn::write_tables_text(std::cout, t1, t2);
  return kExitOk;
}

int cmd_topo_check(const std::string& topology, std::size_t n) {
  const micn::TopologyGraph g = micn::resolve_topology(topology);
  const auto fibs = micn::compute_fib(g);
  fmt::print("{} nodes, {} links\n", g.size(), g.links().size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::string faces;
    for (std::size_t f : fibs[v]) faces += fmt::format(" {}", g.node(g.neighbors(v)[f]).name);
    fmt::print("fib {} ({}):{}\n", g.node(v).name, micn::role_name(g.node(v).role), faces.empty() ? " -" : faces);
  }
  for (std::size_t c : g.clients()) {
    const auto mf = micn::max_flow(g, c);
    const auto hops = micn::hops_to_source(g, c);
    fmt::print("client {}: max-flow {} hops {} bound {:.4f} (n={}, offset {:.4f})\n", g.node(c).name, mf.flow,
               hops ? std::to_string(*hops) : "-", mf.download_lower_bound(n), n,
               micn::round_trip_offset(g, c));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-coded content distribution simulator"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "run one simulation");
  run_flags.add(*run, true);

  ConfigFlags sweep_flags;
  std::string axis = "pipeline", sweep_out, sweep_means;
  std::vector<double> values;
  std::vector<std::string> protocols;
  std::size_t seeds = 1, threads = 1;
  std::uint64_t master_seed = 1;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_flags.add(*sweep, false);
  sweep->add_option("--axis", axis, "pipeline | loss");
  sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
  sweep->add_option("--protocols", protocols, "protocols to compare")->delimiter(',');
  sweep->add_option("--seeds", seeds, "runs per cell");
  sweep->add_option("--master-seed", master_seed, "per-run seeds derive from this");
  sweep->add_option("--threads", threads, "parallel simulations");
  sweep->add_option("-o,--out", sweep_out, "per-run CSV (stdout if unset)");
  sweep->add_option("--means", sweep_means, "per-cell means CSV (stderr if unset)");

  bool csv = false;
  std::size_t trials = 0;
  std::uint64_t table_seed = 1;
  auto* tables = app.add_subcommand("tables", "print rank-failure probability tables");
  tables->add_flag("--csv", csv, "CSV instead of text");
  tables->add_option("--monte-carlo", trials, "add a Monte Carlo column with this many trials");
  tables->add_option("--seed", table_seed, "Monte Carlo seed");

  std::string topo = "butterfly";
  std::size_t topo_n = 100;
  auto* topo_check = app.add_subcommand("topo-check", "print FIBs and per-client max-flow");
  topo_check->add_option("topology", topo, "topology file or shipped name");
  topo_check->add_option("-n", topo_n, "generation size for the download bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) {
      return cmd_sweep(sweep_flags, axis, values, protocols, seeds, master_seed, threads, sweep_out, sweep_means);
    }
    if (*tables) return cmd_tables(csv, trials, table_seed);
    if (*topo_check) return cmd_topo_check(topo, topo_n);
  } catch (const micn::RunawayError& e) {
    fmt::print(std::cerr, "runaway: {}\n", e.what());
    return kExitRunaway;
  } catch (const micn::ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const micn::TopologyError& e) {
    fmt::print(std::cerr, "topology error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
