#ifndef MICN_TABLES_HPP
#define MICN_TABLES_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "micn/event_queue.hpp"
#include "micn/rref.hpp"

namespace micn {

struct GenerationKey {
  std::string prefix;
  std::uint64_t generation = 1;
  auto operator<=>(const GenerationKey&) const = default;
};

enum class Priority { Normal, Low };

struct PitEntry {
  std::uint64_t id = 0;
  std::size_t index = 0;  // MILIC index, NDN segment, or 0 for NetCodCCN
  std::uint64_t nonce = 0;
  std::vector<std::size_t> in_faces;
  std::vector<std::size_t> out_faces;  // empty for volatile entries
  std::uint64_t arrival = 0;
  Priority priority = Priority::Normal;
  bool is_volatile = false;
  std::optional<std::uint64_t> client_id;
  // NetCodCCN: an upstream data packet has been matched to this entry.
  bool upstream_answered = false;
  std::optional<EventId> expiry;

  bool has_in_face(std::size_t f) const;
};

/// Pending interests grouped in per-(prefix, generation) sub-tables, each
/// kept in arrival order. Distinct nonces always make distinct entries.
class PitTable {
 public:
  using SubTable = std::vector<PitEntry>;
  using Predicate = std::function<bool(const GenerationKey&, const PitEntry&)>;

  // Assigns id and arrival stamp. Throws std::logic_error if the nonce is
  // already live in that sub-table.
  PitEntry& add(const GenerationKey& key, PitEntry entry);

  PitEntry* find_nonce(const GenerationKey& key, std::uint64_t nonce);
  // Forwarded (non-volatile) entry for the same index, used by NDN aggregation.
  PitEntry* find_forwarded(const GenerationKey& key, std::size_t index);
  PitEntry* find_id(std::uint64_t id, GenerationKey* key_out = nullptr);
  SubTable* sub_table(const GenerationKey& key);

  // Removes and returns the entry.
  std::optional<PitEntry> remove(std::uint64_t id);

  // Oldest entry listing `face` among its in-faces that satisfies pred;
  // normal-priority entries win over low-priority ones.
  std::optional<std::pair<GenerationKey, std::uint64_t>> oldest_for_face(std::size_t face,
                                                                         const Predicate& pred) const;

  // Marks the client's entries whose index is flagged in state (state[i-1]).
  std::size_t mark_low_priority(const GenerationKey& key, std::uint64_t client_id,
                                const std::vector<bool>& state);
  // Drops the client's low-priority entries with index < below; returns them.
  std::vector<PitEntry> erase_low_priority_below(const GenerationKey& key, std::uint64_t client_id,
                                                 std::size_t below);

  bool seen(std::uint64_t nonce) const { return seen_.contains(nonce); }
  void mark_seen(std::uint64_t nonce) { seen_.insert(nonce); }

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const std::map<GenerationKey, SubTable>& sub_tables() const { return tables_; }

 private:
  std::map<GenerationKey, SubTable> tables_;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t next_id_ = 1;
  std::uint64_t next_arrival_ = 0;
};

/// Cached content, grouped by generation: an RREF basis for coded
/// protocols, exact-match segments for plain NDN.
class ContentStore {
 public:
  ContentStore(const gf::Field& field, std::size_t n, std::size_t payload_size)
      : field_(&field), n_(n), payload_size_(payload_size) {}

  RrefBasis& coded(const GenerationKey& key);
  const RrefBasis* find_coded(const GenerationKey& key) const;
  std::size_t rank(const GenerationKey& key) const;

  bool has_segment(const GenerationKey& key, std::size_t segment) const;
  // Returns true if the segment was new.
  bool store_segment(const GenerationKey& key, std::size_t segment, Payload payload);
  const Payload* segment(const GenerationKey& key, std::size_t segment) const;
  std::size_t segment_count(const GenerationKey& key) const;

 private:
  const gf::Field* field_;
  std::size_t n_;
  std::size_t payload_size_;
  std::map<GenerationKey, RrefBasis> coded_;
  std::map<GenerationKey, std::map<std::size_t, Payload>> plain_;
};

}  // namespace micn

#endif  // MICN_TABLES_HPP
