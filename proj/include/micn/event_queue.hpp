#ifndef MICN_EVENT_QUEUE_HPP
#define MICN_EVENT_QUEUE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace micn {

using SimTime = double;
using EventId = std::uint64_t;

class RunawayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time-ordered scheduler. Equal-time events run in insertion order.
class EventQueue {
 public:
  using Action = std::function<void()>;

  explicit EventQueue(std::uint64_t event_ceiling = 50'000'000) : ceiling_(event_ceiling) {}

  // Throws std::logic_error for times earlier than now().
  EventId schedule(SimTime at, Action action);
  EventId schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }
  void cancel(EventId id);

  // Runs until no live events remain; returns the final clock.
  SimTime run_until_quiescent();
  // Runs every live event with time <= t, then sets the clock to t.
  void run_until(SimTime t);

  SimTime now() const { return now_; }
  std::uint64_t executed() const { return executed_; }
  std::size_t pending() const { return live_.size(); }

 private:
  struct Event {
    SimTime time;
    EventId seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  bool step(SimTime limit);

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::unordered_set<EventId> live_;
  SimTime now_ = 0.0;
  EventId next_seq_ = 0;
  std::uint64_t executed_ = 0;
  std::uint64_t ceiling_;
};

}  // namespace micn

#endif  // MICN_EVENT_QUEUE_HPP
