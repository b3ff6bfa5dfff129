#ifndef MICN_TRACE_HPP
#define MICN_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "micn/event_queue.hpp"

namespace micn {

enum class TraceKind { RankChange, DataTx, DataRx, InterestTx, Drop, DecodeComplete };

std::string_view trace_kind_name(TraceKind k);

// For rank-change and decode-complete rows `index` holds the new rank; for
// packet rows it holds the MILIC index (segment number for plain NDN).
struct TraceRecord {
  SimTime time;
  std::size_t node;
  TraceKind kind;
  std::optional<std::size_t> index;
  std::optional<bool> innovative;  // data-rx only
  std::optional<std::size_t> peer;
};

inline constexpr std::string_view kTraceHeader = "time,node,kind,index,innovative,peer";
inline constexpr std::string_view kClientSummaryHeader =
    "client,download_time,rank,interests_sent,data_rx,data_rx_innovative";
inline constexpr std::string_view kNetworkSummaryHeader = "total_data_tx,total_interest_tx,drops";

class TraceLog {
 public:
  TraceLog() = default;
  TraceLog(std::vector<std::string> node_names, bool enabled)
      : names_(std::move(node_names)), enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void record(const TraceRecord& r) {
    if (enabled_) records_.push_back(r);
  }
  const std::vector<TraceRecord>& records() const { return records_; }
  const std::vector<std::string>& names() const { return names_; }

  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> names_;
  bool enabled_ = false;
  std::vector<TraceRecord> records_;
};

struct ClientSummary {
  std::string client;
  std::optional<SimTime> download_time;
  std::size_t rank = 0;
  std::size_t interests_sent = 0;
  std::size_t data_rx = 0;
  std::size_t data_rx_innovative = 0;

  bool operator==(const ClientSummary&) const = default;
};

struct NetworkSummary {
  std::size_t total_data_tx = 0;
  std::size_t total_interest_tx = 0;
  std::size_t drops = 0;

  bool operator==(const NetworkSummary&) const = default;
};

struct RunSummary {
  std::vector<ClientSummary> clients;
  NetworkSummary network;
  // Data receptions at every node, and those that raised the receiver's rank.
  std::size_t data_rx_total = 0;
  std::size_t data_rx_innovative_total = 0;

  double redundant_share() const {
    return data_rx_total ? 1.0 - double(data_rx_innovative_total) / double(data_rx_total) : 0.0;
  }
  std::optional<SimTime> max_download_time() const;
  std::optional<SimTime> mean_download_time() const;
};

// Client rows, a blank line, then the network header and its single row.
void write_summary_csv(std::ostream& out, const RunSummary& summary);

// Recomputes a summary by folding over trace rows alone.
RunSummary summarize_trace(const TraceLog& trace, const std::vector<std::size_t>& clients);

std::string format_time(SimTime t);

}  // namespace micn

#endif  // MICN_TRACE_HPP
