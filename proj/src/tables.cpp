#include "micn/tables.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace micn {

bool PitEntry::has_in_face(std::size_t f) const {
  return std::find(in_faces.begin(), in_faces.end(), f) != in_faces.end();
}

PitEntry& PitTable::add(const GenerationKey& key, PitEntry entry) {
  if (find_nonce(key, entry.nonce)) {
    throw std::logic_error(fmt::format("nonce {} already pending", entry.nonce));
  }
  entry.id = next_id_++;
  entry.arrival = next_arrival_++;
  auto& table = tables_[key];
  table.push_back(std::move(entry));
  return table.back();
}

PitEntry* PitTable::find_nonce(const GenerationKey& key, std::uint64_t nonce) {
  auto it = tables_.find(key);
  if (it == tables_.end()) return nullptr;
  for (auto& e : it->second) {
    if (e.nonce == nonce) return &e;
  }
  return nullptr;
}

PitEntry* PitTable::find_forwarded(const GenerationKey& key, std::size_t index) {
  auto it = tables_.find(key);
  if (it == tables_.end()) return nullptr;
  for (auto& e : it->second) {
    if (e.index == index && !e.is_volatile) return &e;
  }
  return nullptr;
}

PitEntry* PitTable::find_id(std::uint64_t id, GenerationKey* key_out) {
  for (auto& [key, table] : tables_) {
    for (auto& e : table) {
      if (e.id == id) {
        if (key_out) *key_out = key;
        return &e;
      }
    }
  }
  return nullptr;
}

PitTable::SubTable* PitTable::sub_table(const GenerationKey& key) {
  auto it = tables_.find(key);
  return it == tables_.end() ? nullptr : &it->second;
}

std::optional<PitEntry> PitTable::remove(std::uint64_t id) {
  for (auto it = tables_.begin(); it != tables_.end(); ++it) {
    auto& table = it->second;
    auto pos = std::find_if(table.begin(), table.end(), [id](const PitEntry& e) { return e.id == id; });
    if (pos == table.end()) continue;
    PitEntry out = std::move(*pos);
    table.erase(pos);
    if (table.empty()) tables_.erase(it);
    return out;
  }
  return std::nullopt;
}

std::optional<std::pair<GenerationKey, std::uint64_t>> PitTable::oldest_for_face(
    std::size_t face, const Predicate& pred) const {
  for (Priority wanted : {Priority::Normal, Priority::Low}) {
    const PitEntry* best = nullptr;
    const GenerationKey* best_key = nullptr;
    for (const auto& [key, table] : tables_) {
      for (const auto& e : table) {
        if (e.priority != wanted || !e.has_in_face(face)) continue;
        if (best && best->arrival < e.arrival) break;  // arrival-ordered
        if (pred(key, e)) {
          best = &e;
          best_key = &key;
          break;
        }
      }
    }
    if (best) return std::make_pair(*best_key, best->id);
  }
  return std::nullopt;
}

std::size_t PitTable::mark_low_priority(const GenerationKey& key, std::uint64_t client_id,
                                        const std::vector<bool>& state) {
  auto it = tables_.find(key);
  if (it == tables_.end()) return 0;
  std::size_t marked = 0;
  for (auto& e : it->second) {
    if (e.priority == Priority::Low || e.client_id != client_id) continue;
    if (e.index >= 1 && e.index <= state.size() && state[e.index - 1]) {
      e.priority = Priority::Low;
      ++marked;
    }
  }
  return marked;
}

std::vector<PitEntry> PitTable::erase_low_priority_below(const GenerationKey& key,
                                                         std::uint64_t client_id, std::size_t below) {
  std::vector<PitEntry> removed;
  auto it = tables_.find(key);
  if (it == tables_.end()) return removed;
  auto& table = it->second;
  auto keep = std::stable_partition(table.begin(), table.end(), [&](const PitEntry& e) {
    return !(e.priority == Priority::Low && e.client_id == client_id && e.index < below);
  });
  std::move(keep, table.end(), std::back_inserter(removed));
  table.erase(keep, table.end());
  if (table.empty()) tables_.erase(it);
  return removed;
}

std::size_t PitTable::size() const {
  std::size_t total = 0;
  for (const auto& [key, table] : tables_) total += table.size();
  return total;
}

RrefBasis& ContentStore::coded(const GenerationKey& key) {
  auto it = coded_.find(key);
  if (it == coded_.end()) it = coded_.emplace(key, RrefBasis(*field_, n_, payload_size_)).first;
  return it->second;
}

const RrefBasis* ContentStore::find_coded(const GenerationKey& key) const {
  auto it = coded_.find(key);
  return it == coded_.end() ? nullptr : &it->second;
}

std::size_t ContentStore::rank(const GenerationKey& key) const {
  const RrefBasis* basis = find_coded(key);
  return basis ? basis->rank() : 0;
}

bool ContentStore::has_segment(const GenerationKey& key, std::size_t segment) const {
  auto it = plain_.find(key);
  return it != plain_.end() && it->second.contains(segment);
}

bool ContentStore::store_segment(const GenerationKey& key, std::size_t segment, Payload payload) {
  return plain_[key].emplace(segment, std::move(payload)).second;
}

const Payload* ContentStore::segment(const GenerationKey& key, std::size_t segment) const {
  auto it = plain_.find(key);
  if (it == plain_.end()) return nullptr;
  auto seg = it->second.find(segment);
  return seg == it->second.end() ? nullptr : &seg->second;
}

std::size_t ContentStore::segment_count(const GenerationKey& key) const {
  auto it = plain_.find(key);
  return it == plain_.end() ? 0 : it->second.size();
}

}  // namespace micn
