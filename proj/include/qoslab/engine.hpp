#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace qoslab {

// Deterministic discrete-event engine. Events dispatch in (time, seq)
// lexicographic order; seq is assigned at scheduling time, so simultaneous
// events run in the order they were scheduled.
class Engine {
 public:
  using Handler = std::function<void()>;

  void at(double time_ms, Handler fn) {
    queue_.push(Item{time_ms, next_seq_++, std::move(fn)});
  }

  double now() const { return now_; }

  // Dispatches every event with time <= end_ms.
  void run_until(double end_ms) {
    while (!queue_.empty() && queue_.top().time_ms <= end_ms) {
      Item item = queue_.top();
      queue_.pop();
      now_ = item.time_ms;
      item.fn();
    }
    now_ = end_ms;
  }

 private:
  struct Item {
    double time_ms;
    uint64_t seq;
    Handler fn;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  double now_ = 0.0;
  uint64_t next_seq_ = 0;
};

}  // namespace qoslab
