#include "micn/event_queue.hpp"

#include <limits>

#include <fmt/format.h>

namespace micn {

EventId EventQueue::schedule(SimTime at, Action action) {
  if (at < now_) {
    throw std::logic_error(fmt::format("event scheduled at {} before current time {}", at, now_));
  }
  const EventId id = next_seq_++;
  live_.insert(id);
  heap_.push(Event{at, id, std::move(action)});
  return id;
}

void EventQueue::cancel(EventId id) {
  live_.erase(id);
}

bool EventQueue::step(SimTime limit) {
  while (!heap_.empty()) {
    if (heap_.top().time > limit) return false;
    Event ev = heap_.top();
    heap_.pop();
    if (live_.erase(ev.seq) == 0) continue;
    if (++executed_ > ceiling_) {
      throw RunawayError(fmt::format("event ceiling of {} exceeded at t={}", ceiling_, ev.time));
    }
    now_ = ev.time;
    ev.action();
    return true;
  }
  return false;
}

SimTime EventQueue::run_until_quiescent() {
  while (step(std::numeric_limits<SimTime>::infinity())) {
  }
  return now_;
}

void EventQueue::run_until(SimTime t) {
  while (step(t)) {
  }
  if (t > now_) now_ = t;
}

}  // namespace micn
