#include "micn/trace.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace micn {

std::string_view trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::RankChange: return "rank-change";
    case TraceKind::DataTx: return "data-tx";
    case TraceKind::DataRx: return "data-rx";
    case TraceKind::InterestTx: return "interest-tx";
    case TraceKind::Drop: return "drop";
    case TraceKind::DecodeComplete: return "decode-complete";
  }
  return "?";
}

std::string format_time(SimTime t) { return fmt::format("{:.9f}", t); }

void TraceLog::write_csv(std::ostream& out) const {
  fmt::print(out, "{}\n", kTraceHeader);
  for (const auto& r : records_) {
    fmt::print(out, "{},{},{},{},{},{}\n", format_time(r.time), names_[r.node], trace_kind_name(r.kind),
               r.index ? std::to_string(*r.index) : "", r.innovative ? (*r.innovative ? "1" : "0") : "",
               r.peer ? names_[*r.peer] : "");
  }
}

std::optional<SimTime> RunSummary::max_download_time() const {
  std::optional<SimTime> out;
  for (const auto& c : clients) {
    if (!c.download_time) return std::nullopt;
    out = std::max(out.value_or(0.0), *c.download_time);
  }
  return out;
}

std::optional<SimTime> RunSummary::mean_download_time() const {
  if (clients.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& c : clients) {
    if (!c.download_time) return std::nullopt;
    sum += *c.download_time;
  }
  return sum / double(clients.size());
}

void write_summary_csv(std::ostream& out, const RunSummary& summary) {
  fmt::print(out, "{}\n", kClientSummaryHeader);
  for (const auto& c : summary.clients) {
    fmt::print(out, "{},{},{},{},{},{}\n", c.client, c.download_time ? format_time(*c.download_time) : "",
               c.rank, c.interests_sent, c.data_rx, c.data_rx_innovative);
  }
  fmt::print(out, "\n{}\n{},{},{}\n", kNetworkSummaryHeader, summary.network.total_data_tx,
             summary.network.total_interest_tx, summary.network.drops);
}

RunSummary summarize_trace(const TraceLog& trace, const std::vector<std::size_t>& clients) {
  RunSummary s;
  std::vector<std::ptrdiff_t> slot(trace.names().size(), -1);
  for (std::size_t k = 0; k < clients.size(); ++k) {
    slot[clients[k]] = std::ptrdiff_t(k);
    s.clients.push_back(ClientSummary{trace.names()[clients[k]], std::nullopt, 0, 0, 0, 0});
  }
  for (const auto& r : trace.records()) {
    ClientSummary* c = slot[r.node] >= 0 ? &s.clients[std::size_t(slot[r.node])] : nullptr;
    switch (r.kind) {
      case TraceKind::DataTx: ++s.network.total_data_tx; break;
      case TraceKind::InterestTx:
        ++s.network.total_interest_tx;
        if (c) ++c->interests_sent;
        break;
      case TraceKind::Drop: ++s.network.drops; break;
      case TraceKind::DataRx:
        ++s.data_rx_total;
        if (r.innovative.value_or(false)) ++s.data_rx_innovative_total;
        if (c) {
          ++c->data_rx;
          if (r.innovative.value_or(false)) ++c->data_rx_innovative;
        }
        break;
      case TraceKind::RankChange:
        if (c) c->rank = r.index.value_or(0);
        break;
      case TraceKind::DecodeComplete:
        if (c) c->download_time = r.time;
        break;
    }
  }
  return s;
}

}  // namespace micn
