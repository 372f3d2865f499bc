#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qoslab/engine.hpp"
#include "qoslab/media.hpp"
#include "qoslab/rtcp.hpp"

namespace qoslab {

enum class Direction { Forward, Reverse };

enum class PacketClass { Media, SenderReport, DataChannel };

// Timing info carried by a modeled sender report (SR): its send time plus
// the last-receiver-report reference the destination uses to compute RTT.
struct SenderReportInfo {
  double sent_at_ms = 0.0;
  double lrr_ms = 0.0;   // send time of the last RR seen by the SR's sender
  double dlrr_ms = 0.0;  // delay since that RR arrived
  bool has_rr = false;
};

struct DataChannelInfo {
  ReceiverReport report;
  double emitted_at_ms = 0.0;    // RR emission at the receiver
  double forwarded_at_ms = 0.0;  // wrap time at the relay
};

// One packet on a shaped link. Media packets reference the frame they
// fragment; control packets carry their payload inline.
struct WirePacket {
  PacketClass cls = PacketClass::Media;
  long bytes = 0;
  Packet frag;
  std::shared_ptr<const FrameDescriptor> frame;
  long wire_frame_id = 0;     // unique per packetized frame emission
  bool relay_origin = false;  // media re-emitted by a relay transcoder
  SenderReportInfo sr;
  DataChannelInfo dc;
};

inline constexpr long kControlPacketBytes = 128;
inline constexpr double kUncapped = std::numeric_limits<double>::infinity();

// One directional bearer with a capacity cap (token-bucket serialization
// with a drop-tail FIFO queue) and per-direction added latency. Reverse
// traffic shares the serializer with forward traffic (single bearer), but
// gets the reverse latency.
class ShapedLink {
 public:
  struct Config {
    std::string name = "link";
    double capacity_kbps = kUncapped;  // <= 0 or inf means no cap
    double fwd_latency_ms = 0.0;
    double rev_latency_ms = 0.0;
    long queue_limit_bytes = 2'000'000;
  };

  using DeliverFn = std::function<void(const WirePacket&, Direction)>;
  using DropFn = std::function<void(const WirePacket&, Direction)>;

  ShapedLink(Engine& engine, Config cfg);

  void on_deliver(DeliverFn fn) { deliver_ = std::move(fn); }
  void on_drop(DropFn fn) { drop_ = std::move(fn); }

  void enqueue(WirePacket pkt, Direction dir);

  // Applies new parameters from now on, including to the queued backlog.
  void set_shaping(std::optional<double> capacity_kbps,
                   std::optional<double> latency_ms);

  double capacity_at(double t_ms) const;  // emulator truth for the oracle
  double current_capacity_kbps() const { return capacity_kbps_; }
  double fwd_latency_ms() const { return cfg_.fwd_latency_ms; }
  double rev_latency_ms() const { return cfg_.rev_latency_ms; }
  long queue_bytes() const { return queue_bytes_; }
  const std::string& name() const { return cfg_.name; }

  long sent_count = 0;       // enqueued
  long delivered_count = 0;
  long drop_count = 0;

 private:
  struct Queued {
    WirePacket pkt;
    Direction dir;
  };

  bool uncapped() const { return capacity_kbps_ == kUncapped; }
  void start_head();
  void finish_head();

  Engine& engine_;
  Config cfg_;
  double capacity_kbps_;
  std::deque<Queued> queue_;
  long queue_bytes_ = 0;
  bool draining_ = false;
  double head_started_ms_ = 0.0;
  double head_bits_left_ = 0.0;
  uint64_t epoch_ = 0;  // invalidates scheduled departures on shaping changes
  double last_fwd_delivery_ms_ = 0.0;
  double last_rev_delivery_ms_ = 0.0;
  std::vector<std::pair<double, double>> capacity_history_;
  DeliverFn deliver_;
  DropFn drop_;
};

enum class ShapingKind { Bandwidth, Latency };

const char* to_string(ShapingKind kind);
std::optional<ShapingKind> shaping_from_string(const std::string& s);

struct ShapingStep {
  double start_s = 0.0;
  double value = 0.0;  // kbps for Bandwidth, ms for Latency
};

// A timed shaping program; steps are contiguous and cover [0, span_s).
// Runs longer than span_s repeat the program cyclically.
struct ShapingSchedule {
  ShapingKind kind = ShapingKind::Bandwidth;
  std::vector<ShapingStep> steps;
  double span_s = 0.0;

  bool valid() const;
  double value_at(double t_s) const;
};

// The two built-in experiment programs:
//   Bandwidth: 1 / 10 / 100 / 10 / 1 Mbps, 20 s each.
//   Latency:   600 / 100 / 10 / 100 / 600 ms, 20 s each.
ShapingSchedule schedule_from_table(ShapingKind kind);

}  // namespace qoslab
