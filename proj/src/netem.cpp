#include "qoslab/netem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qoslab {

static double normalize_capacity(double kbps) {
  if (kbps <= 0.0 || std::isinf(kbps)) return kUncapped;
  return kbps;
}

ShapedLink::ShapedLink(Engine& engine, Config cfg)
    : engine_(engine), cfg_(std::move(cfg)) {
  capacity_kbps_ = normalize_capacity(cfg_.capacity_kbps);
  capacity_history_.emplace_back(-std::numeric_limits<double>::infinity(),
                                 capacity_kbps_);
}

void ShapedLink::enqueue(WirePacket pkt, Direction dir) {
  ++sent_count;
  if (queue_bytes_ + pkt.bytes > cfg_.queue_limit_bytes) {
    ++drop_count;
    if (drop_) drop_(pkt, dir);
    return;
  }
  queue_bytes_ += pkt.bytes;
  queue_.push_back(Queued{std::move(pkt), dir});
  if (!draining_) start_head();
}

void ShapedLink::start_head() {
  draining_ = true;
  head_started_ms_ = engine_.now();
  head_bits_left_ = static_cast<double>(queue_.front().pkt.bytes) * 8.0;
  const uint64_t epoch = epoch_;
  const double depart_at =
      uncapped() ? engine_.now() : engine_.now() + head_bits_left_ / capacity_kbps_;
  engine_.at(depart_at, [this, epoch] {
    if (epoch != epoch_) return;  // rescheduled by a shaping change
    finish_head();
  });
}

void ShapedLink::finish_head() {
  Queued item = std::move(queue_.front());
  queue_.pop_front();
  queue_bytes_ -= item.pkt.bytes;

  const double latency = item.dir == Direction::Forward ? cfg_.fwd_latency_ms
                                                        : cfg_.rev_latency_ms;
  double delivery = engine_.now() + latency;
  // Latency drops must not reorder the link: clamp to FIFO per direction.
  double& last = item.dir == Direction::Forward ? last_fwd_delivery_ms_
                                                : last_rev_delivery_ms_;
  delivery = std::max(delivery, last);
  last = delivery;

  engine_.at(delivery, [this, item = std::move(item)] {
    ++delivered_count;
    if (deliver_) deliver_(item.pkt, item.dir);
  });

  if (!queue_.empty()) {
    start_head();
  } else {
    draining_ = false;
  }
}

void ShapedLink::set_shaping(std::optional<double> capacity_kbps,
                             std::optional<double> latency_ms) {
  if (latency_ms) cfg_.fwd_latency_ms = *latency_ms;
  if (capacity_kbps) {
    const double new_cap = normalize_capacity(*capacity_kbps);
    if (draining_) {
      // Account for bits already serialized at the old rate, then continue
      // the head packet at the new rate.
      if (!uncapped()) {
        const double sent = (engine_.now() - head_started_ms_) * capacity_kbps_;
        head_bits_left_ = std::max(0.0, head_bits_left_ - sent);
      } else {
        head_bits_left_ = 0.0;
      }
      capacity_kbps_ = new_cap;
      head_started_ms_ = engine_.now();
      ++epoch_;
      const uint64_t epoch = epoch_;
      const double depart_at = uncapped()
                                   ? engine_.now()
                                   : engine_.now() + head_bits_left_ / capacity_kbps_;
      engine_.at(depart_at, [this, epoch] {
        if (epoch != epoch_) return;
        finish_head();
      });
    } else {
      capacity_kbps_ = new_cap;
    }
    capacity_history_.emplace_back(engine_.now(), capacity_kbps_);
  }
}

double ShapedLink::capacity_at(double t_ms) const {
  double value = capacity_history_.front().second;
  for (const auto& [t, cap] : capacity_history_) {
    if (t <= t_ms) value = cap;
    else break;
  }
  return value;
}

const char* to_string(ShapingKind kind) {
  return kind == ShapingKind::Bandwidth ? "bandwidth" : "latency";
}

std::optional<ShapingKind> shaping_from_string(const std::string& s) {
  if (s == "bandwidth") return ShapingKind::Bandwidth;
  if (s == "latency") return ShapingKind::Latency;
  return std::nullopt;
}

bool ShapingSchedule::valid() const {
  if (steps.empty() || span_s <= 0.0) return false;
  if (steps.front().start_s != 0.0) return false;
  for (size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].start_s <= steps[i - 1].start_s) return false;
  }
  return steps.back().start_s < span_s;
}

double ShapingSchedule::value_at(double t_s) const {
  const double local = std::fmod(t_s, span_s);
  double value = steps.front().value;
  for (const ShapingStep& step : steps) {
    if (step.start_s <= local) value = step.value;
    else break;
  }
  return value;
}

ShapingSchedule schedule_from_table(ShapingKind kind) {
  ShapingSchedule schedule;
  schedule.kind = kind;
  schedule.span_s = 100.0;
  if (kind == ShapingKind::Bandwidth) {
    schedule.steps = {{0.0, 1000.0},
                      {20.0, 10000.0},
                      {40.0, 100000.0},
                      {60.0, 10000.0},
                      {80.0, 1000.0}};
  } else {
    schedule.steps = {{0.0, 600.0},
                      {20.0, 100.0},
                      {40.0, 10.0},
                      {60.0, 100.0},
                      {80.0, 600.0}};
  }
  return schedule;
}

}  // namespace qoslab
