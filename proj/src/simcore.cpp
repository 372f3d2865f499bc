#include "qoslab/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "qoslab/engine.hpp"
#include "qoslab/media.hpp"

namespace qoslab {
namespace {

struct SplitMix64 {
  uint64_t state;
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [-1, 1]
  double pm1() { return (next() >> 11) * (2.0 / 9007199254740992.0) - 1.0; }
};

// Measurement state of the receiving end of one RTCP session.
struct SessionReceiver {
  PathId path = PathId::Direct;
  JitterState jitter;
  EstimatorState estimator;
  long next_seq = 0;
  double last_rtt_ms = 0.0;  // 0 until the first SR-based sample
  double interval_bytes = 0.0;
  double min_transit_ms = std::numeric_limits<double>::infinity();
  double last_transit_ms = 0.0;
  long sent_snapshot = 0;
  long drop_snapshot = 0;
};

// RR bookkeeping kept by the media-sending end of a session, used to stamp
// lrr/dlrr into outgoing SRs so the far end can compute RTT.
struct RrBookkeeping {
  bool has_rr = false;
  double last_rr_send_ms = 0.0;
  double last_rr_arrival_ms = 0.0;
};

struct Reassembler {
  struct Entry {
    std::shared_ptr<const FrameDescriptor> frame;
    int got = 0;
    int dropped = 0;
  };
  std::unordered_map<long, Entry> inflight;

  // Returns the frame when its last fragment has arrived.
  std::shared_ptr<const FrameDescriptor> on_fragment(const WirePacket& pkt) {
    Entry& e = inflight[pkt.wire_frame_id];
    e.frame = pkt.frame;
    ++e.got;
    if (e.got + e.dropped < pkt.frag.fragment_count) return nullptr;
    auto frame = e.dropped == 0 ? e.frame : nullptr;
    inflight.erase(pkt.wire_frame_id);
    return frame;
  }

  void on_drop(const WirePacket& pkt) {
    Entry& e = inflight[pkt.wire_frame_id];
    e.frame = pkt.frame;
    ++e.dropped;
    if (e.got + e.dropped >= pkt.frag.fragment_count) inflight.erase(pkt.wire_frame_id);
  }
};

enum class Origin { Sender, Relay };

const char* origin_name(Origin o) { return o == Origin::Sender ? "sender" : "relay"; }

struct Sim {
  const ScenarioConfig& cfg;
  Engine eng;
  EventTrace trace;
  double duration_ms;
  SplitMix64 rng;

  ShapedLink up;
  ShapedLink down;

  // Sender.
  EncoderModel enc;
  ControllerState sender_ctrl;
  std::optional<PathMetrics> latest_up;
  std::optional<PathMetrics> latest_down;
  RrBookkeeping sender_rr;  // direct or uplink session

  // Relay.
  ControllerState relay_ctrl;
  TranscoderState transcoder;
  EncodingLevel relay_target;
  RrBookkeeping relay_rr;  // downlink session
  Reassembler relay_rx;
  SessionReceiver relay_meas;  // uplink session, measured at the relay

  // Receiver.
  Reassembler recv_rx;
  SessionReceiver recv_meas;  // direct or downlink session

  long next_wire_id = 0;
  double next_sender_sr_ms = 0.0;
  double next_relay_sr_ms = 0.0;
  double next_recv_rr_ms = 0.0;
  double next_relay_rr_ms = 0.0;

  explicit Sim(const ScenarioConfig& config)
      : cfg(config),
        duration_ms(config.duration_s * 1000.0),
        rng{config.seed},
        up(eng, link_config("uplink", config.uplink, config.effective_uplink_schedule())),
        down(eng, link_config("downlink", config.downlink, config.effective_downlink_schedule())) {}

  static ShapedLink::Config link_config(const char* name, const LinkDefaults& link,
                                        const std::optional<ShapingSchedule>& schedule) {
    ShapedLink::Config c;
    c.name = name;
    c.capacity_kbps = link.capacity_kbps;
    c.fwd_latency_ms = link.fwd_latency_ms;
    c.rev_latency_ms = link.rev_latency_ms;
    c.queue_limit_bytes = link.queue_limit_bytes;
    if (schedule) {
      // Step 0 is the initial condition, applied before the run starts.
      if (schedule->kind == ShapingKind::Bandwidth) {
        c.capacity_kbps = schedule->steps.front().value;
      } else {
        c.fwd_latency_ms = schedule->steps.front().value;
      }
    }
    return c;
  }

  bool relay_topology() const { return cfg.topology != Topology::Direct; }
  bool transcoding_active() const {
    return cfg.topology == Topology::TranscodingRelay && cfg.transcoding_enabled;
  }

  void record(TraceKind kind, std::vector<std::pair<std::string, std::string>> fields) {
    trace.events.push_back(TraceEvent{eng.now(), kind, std::move(fields)});
  }

  std::string level_name(const EncodingLevel& settings) const {
    if (settings == cfg.ladder.good) return "Good";
    if (settings == cfg.ladder.mid) return "Mid";
    if (settings == cfg.ladder.poor) return "Poor";
    return "Custom";
  }

  // ---- shaping -----------------------------------------------------------

  void schedule_shaping(ShapedLink& link, const ShapingSchedule& schedule,
                        const std::string& path) {
    const double span_ms = schedule.span_s * 1000.0;
    for (double cycle_start = 0.0; cycle_start < duration_ms; cycle_start += span_ms) {
      for (size_t i = 0; i < schedule.steps.size(); ++i) {
        const double t = cycle_start + schedule.steps[i].start_s * 1000.0;
        if (t <= 0.0 || t > duration_ms) continue;
        const double value = schedule.steps[i].value;
        const ShapingKind kind = schedule.kind;
        eng.at(t, [this, &link, value, kind, path] {
          if (kind == ShapingKind::Bandwidth) {
            link.set_shaping(value, std::nullopt);
          } else {
            link.set_shaping(std::nullopt, value);
          }
          record_shaping_change(path, kind, value);
        });
      }
    }
  }

  // The level the current path conditions imply for one adapting entity,
  // assuming quiescent jitter. The relay only exists as an adapting entity
  // in TranscodingRelay, where it watches the downlink and the sender only
  // the uplink; everywhere else the sender watches the whole path.
  Level implied_level(bool for_relay) const {
    PathMetrics m;
    if (cfg.topology == Topology::TranscodingRelay) {
      const ShapedLink& link = for_relay ? down : up;
      m.bandwidth_kbps = link.current_capacity_kbps();
      m.rtt_ms = link.fwd_latency_ms() + link.rev_latency_ms();
    } else {
      m.bandwidth_kbps = std::min(up.current_capacity_kbps(), down.current_capacity_kbps());
      m.rtt_ms = up.fwd_latency_ms() + up.rev_latency_ms() + down.fwd_latency_ms() +
                 down.rev_latency_ms();
    }
    m.jitter_ms = 0.0;
    return classify(m, cfg.thresholds);
  }

  void record_shaping_change(const std::string& path, ShapingKind kind, double value) {
    const bool relay_adapts =
        cfg.topology == Topology::TranscodingRelay && path == "downlink";
    const std::string entity = relay_adapts ? "relay" : "sender";
    const Level implied = implied_level(relay_adapts);
    record(TraceKind::ShapingChange,
           {{"path", path},
            {"kind", to_string(kind)},
            {"value", format_ms(value)},
            {"entity", entity},
            {"implied", to_string(implied)}});
  }

  // ---- media -------------------------------------------------------------

  void schedule_frame() {
    const uint64_t epoch = enc.epoch;
    eng.at(enc.next_frame_at_ms, [this, epoch] {
      if (epoch != enc.epoch) return;  // superseded by a settings change
      emit_sender_frame();
    });
  }

  void emit_sender_frame() {
    FrameDescriptor frame = next_frame(enc, eng.now());
    if (cfg.size_jitter_amplitude > 0.0) {
      const double factor = 1.0 + cfg.size_jitter_amplitude * rng.pm1();
      frame.size_bytes = std::max<long>(1, std::llround(frame.size_bytes * factor));
    }
    record(TraceKind::FrameEmit,
           {{"origin", "sender"},
            {"seq", std::to_string(frame.frame_seq)},
            {"level", level_name(frame.settings)},
            {"keyframe", frame.is_keyframe ? "1" : "0"},
            {"headers", frame.carries_headers ? "1" : "0"},
            {"size", std::to_string(frame.size_bytes)}});
    send_frame(up, frame, Origin::Sender);
    schedule_frame();
  }

  void send_frame(ShapedLink& link, const FrameDescriptor& frame, Origin origin) {
    auto shared = std::make_shared<const FrameDescriptor>(frame);
    const long wire_id = next_wire_id++;
    for (const Packet& frag : packetize(frame, cfg.mtu_payload_bytes)) {
      WirePacket pkt;
      pkt.cls = PacketClass::Media;
      pkt.bytes = frag.payload_bytes;
      pkt.frag = frag;
      pkt.frag.send_time_ms = eng.now();  // leg entry timestamp
      pkt.frame = shared;
      pkt.wire_frame_id = wire_id;
      pkt.relay_origin = origin == Origin::Relay;
      enqueue_on(link, std::move(pkt), Direction::Forward);
    }
  }

  Origin packet_origin(const WirePacket& pkt) const {
    return pkt.relay_origin ? Origin::Relay : Origin::Sender;
  }

  void enqueue_on(ShapedLink& link, WirePacket pkt, Direction dir) {
    if (&link == &down && relay_topology() && eng.now() < cfg.relay_setup_delay_ms) {
      eng.at(cfg.relay_setup_delay_ms,
             [this, &link, pkt = std::move(pkt), dir] { link.enqueue(pkt, dir); });
      return;
    }
    link.enqueue(std::move(pkt), dir);
  }

  // ---- RTCP sender reports ----------------------------------------------

  void emit_sr(ShapedLink& link, const RrBookkeeping& rr, double& next_ms) {
    WirePacket pkt;
    pkt.cls = PacketClass::SenderReport;
    pkt.bytes = kControlPacketBytes;
    pkt.sr.sent_at_ms = eng.now();
    pkt.sr.has_rr = rr.has_rr;
    if (rr.has_rr) {
      pkt.sr.lrr_ms = rr.last_rr_send_ms;
      pkt.sr.dlrr_ms = eng.now() - rr.last_rr_arrival_ms;
    }
    enqueue_on(link, std::move(pkt), Direction::Forward);
    next_ms += cfg.report_period_ms;
    if (next_ms > duration_ms) return;
    eng.at(next_ms, [this, &link, &rr, &next_ms] { emit_sr(link, rr, next_ms); });
  }

  void on_sr_arrival(SessionReceiver& meas, const WirePacket& pkt) {
    // Before any RR has flowed back, fall back to the one-way transit as the
    // first RTT sample; afterwards use the standard LSR/DLSR round trip.
    if (pkt.sr.has_rr) {
      meas.last_rtt_ms = compute_rtt(eng.now(), pkt.sr.lrr_ms, pkt.sr.dlrr_ms);
    } else {
      meas.last_rtt_ms = eng.now() - pkt.sr.sent_at_ms;
    }
  }

  // ---- RTCP receiver reports ----------------------------------------------

  long session_sent(const SessionReceiver& meas) const {
    // Direct: every packet is admitted at the uplink first, so the uplink's
    // enqueue count is the full-path offered load.
    return meas.path == PathId::Download ? down.sent_count : up.sent_count;
  }
  long session_drops(const SessionReceiver& meas) const {
    return meas.path == PathId::Download ? down.drop_count
           : meas.path == PathId::Upload ? up.drop_count
                                         : up.drop_count + down.drop_count;
  }
  double session_capacity(const SessionReceiver& meas, double t_ms) const {
    switch (meas.path) {
      case PathId::Upload: return up.capacity_at(t_ms);
      case PathId::Download: return down.capacity_at(t_ms);
      case PathId::Direct:
        return std::min(up.capacity_at(t_ms), down.capacity_at(t_ms));
    }
    return 0.0;
  }

  void on_media_delivery(SessionReceiver& meas, const WirePacket& pkt) {
    const double transit = eng.now() - pkt.frag.send_time_ms;
    meas.jitter = update_jitter(meas.jitter, transit);
    meas.interval_bytes += static_cast<double>(pkt.frag.payload_bytes);
    meas.min_transit_ms = std::min(meas.min_transit_ms, transit);
    meas.last_transit_ms = transit;
  }

  void emit_rr(SessionReceiver& meas, double& next_ms) {
    const double period = cfg.report_period_ms;
    const double throughput_kbps = meas.interval_bytes * 8.0 / period;
    const double queue_delay =
        std::isfinite(meas.min_transit_ms) ? meas.last_transit_ms - meas.min_transit_ms : 0.0;
    const long sent = session_sent(meas);
    const long drops = session_drops(meas);
    const long sent_delta = sent - meas.sent_snapshot;
    const long drop_delta = drops - meas.drop_snapshot;
    const double loss = sent_delta > 0 ? static_cast<double>(drop_delta) / sent_delta : 0.0;
    const double truth = session_capacity(meas, eng.now() - meas.estimator.oracle_lag_ms);
    meas.estimator = estimate_bandwidth(meas.estimator, throughput_kbps, queue_delay, loss, truth);

    const ReceiverReport report = build_report(meas.jitter, meas.estimator, meas.last_rtt_ms,
                                               loss, meas.path, eng.now(), ++meas.next_seq);
    record(TraceKind::ReportDue,
           {{"path", to_string(report.path)},
            {"seq", std::to_string(report.seq)},
            {"bw_kbps", format_ms(report.metrics.bandwidth_kbps)},
            {"rtt_ms", format_ms(report.metrics.rtt_ms)},
            {"jitter_ms", format_ms(report.metrics.jitter_ms)},
            {"loss", format_ms(report.loss_fraction)}});

    meas.interval_bytes = 0.0;
    meas.sent_snapshot = sent;
    meas.drop_snapshot = drops;

    // Receiver reports ride the unshaped reverse control plane: they see the
    // configured reverse latency but do not compete with media for capacity.
    double delay = 0.0;
    switch (report.path) {
      case PathId::Upload: delay = up.rev_latency_ms(); break;
      case PathId::Download: delay = down.rev_latency_ms(); break;
      case PathId::Direct: delay = up.rev_latency_ms() + down.rev_latency_ms(); break;
    }
    eng.at(eng.now() + delay, [this, report] { on_rr_arrival(report); });

    next_ms += period;
    if (next_ms > duration_ms) return;
    eng.at(next_ms, [this, &meas, &next_ms] { emit_rr(meas, next_ms); });
  }

  void on_rr_arrival(const ReceiverReport& report) {
    switch (report.path) {
      case PathId::Direct: {
        sender_rr = RrBookkeeping{true, report.metrics.sampled_at_ms, eng.now()};
        record_report_delivery("sender", report);
        sender_handle_metrics(report.metrics);
        break;
      }
      case PathId::Upload: {
        sender_rr = RrBookkeeping{true, report.metrics.sampled_at_ms, eng.now()};
        record_report_delivery("sender", report);
        if (cfg.topology == Topology::ReportingRelay) {
          latest_up = report.metrics;
          sender_handle_metrics(combined_metrics());
        } else {
          sender_handle_metrics(report.metrics);
        }
        break;
      }
      case PathId::Download: {
        if (cfg.topology == Topology::Direct) {
          throw std::logic_error("simcore: download report delivered in Direct topology");
        }
        relay_rr = RrBookkeeping{true, report.metrics.sampled_at_ms, eng.now()};
        record_report_delivery("relay", report);
        if (transcoding_active()) {
          relay_handle_metrics(report.metrics);
        } else if (cfg.topology == Topology::ReportingRelay) {
          WirePacket pkt;
          pkt.cls = PacketClass::DataChannel;
          pkt.bytes = kControlPacketBytes;
          pkt.dc = DataChannelInfo{report, report.metrics.sampled_at_ms, eng.now()};
          enqueue_on(up, std::move(pkt), Direction::Reverse);
        }
        break;
      }
    }
  }

  void record_report_delivery(const char* at, const ReceiverReport& report) {
    record(TraceKind::ReportDelivery,
           {{"at", at},
            {"path", to_string(report.path)},
            {"seq", std::to_string(report.seq)},
            {"bw_kbps", format_ms(report.metrics.bandwidth_kbps)},
            {"rtt_ms", format_ms(report.metrics.rtt_ms)},
            {"jitter_ms", format_ms(report.metrics.jitter_ms)}});
  }

  PathMetrics combined_metrics() const {
    if (latest_up && latest_down) return combine(*latest_up, *latest_down);
    if (latest_up) return *latest_up;
    return *latest_down;
  }

  void sender_handle_metrics(const PathMetrics& metrics) {
    const Level from = sender_ctrl.current_level;
    const auto result = decide(sender_ctrl, metrics, cfg.thresholds, cfg.ladder, eng.now());
    if (!result) return;
    record_decision("sender", from, result->first, metrics);
    apply_settings(enc, result->second, eng.now());
    schedule_frame();
  }

  void relay_handle_metrics(const PathMetrics& metrics) {
    const Level from = relay_ctrl.current_level;
    const auto result = decide(relay_ctrl, metrics, cfg.thresholds, cfg.ladder, eng.now());
    if (!result) return;
    record_decision("relay", from, result->first, metrics);
    relay_target = result->second;
  }

  void record_decision(const char* entity, Level from, Level to, const PathMetrics& m) {
    record(TraceKind::Decision,
           {{"entity", entity},
            {"from", to_string(from)},
            {"to", to_string(to)},
            {"bw_kbps", format_ms(m.bandwidth_kbps)},
            {"rtt_ms", format_ms(m.rtt_ms)},
            {"jitter_ms", format_ms(m.jitter_ms)}});
  }

  // ---- packet routing ------------------------------------------------------

  void on_uplink_delivery(const WirePacket& pkt, Direction dir) {
    if (dir == Direction::Reverse) {
      if (pkt.cls != PacketClass::DataChannel) return;
      const double delay = eng.now() - pkt.dc.emitted_at_ms;
      record(TraceKind::DataChannelDelivery,
             {{"seq", std::to_string(pkt.dc.report.seq)},
              {"emitted_at_ms", format_ms(pkt.dc.emitted_at_ms)},
              {"forwarded_at_ms", format_ms(pkt.dc.forwarded_at_ms)},
              {"delay_ms", format_ms(delay)},
              {"bw_kbps", format_ms(pkt.dc.report.metrics.bandwidth_kbps)},
              {"rtt_ms", format_ms(pkt.dc.report.metrics.rtt_ms)},
              {"jitter_ms", format_ms(pkt.dc.report.metrics.jitter_ms)}});
      latest_down = pkt.dc.report.metrics;
      sender_handle_metrics(combined_metrics());
      return;
    }
    switch (pkt.cls) {
      case PacketClass::Media: {
        if (cfg.topology == Topology::Direct) {
          down.enqueue(pkt, Direction::Forward);  // invisible junction
          return;
        }
        on_media_delivery(relay_meas, pkt);
        if (transcoding_active()) {
          if (auto frame = relay_rx.on_fragment(pkt)) {
            record_frame_arrival("relay", Origin::Sender, *frame);
            if (auto out = transcode(*frame, relay_target, transcoder)) {
              record(TraceKind::FrameEmit,
                     {{"origin", "relay"},
                      {"seq", std::to_string(out->frame_seq)},
                      {"level", level_name(out->settings)},
                      {"keyframe", out->is_keyframe ? "1" : "0"},
                      {"headers", out->carries_headers ? "1" : "0"},
                      {"size", std::to_string(out->size_bytes)}});
              send_frame(down, *out, Origin::Relay);
            }
          }
        } else {
          if (auto frame = relay_rx.on_fragment(pkt)) {
            record_frame_arrival("relay", Origin::Sender, *frame);
          }
          WirePacket fwd = pkt;
          fwd.frag.send_time_ms = eng.now();  // downlink leg entry
          enqueue_on(down, std::move(fwd), Direction::Forward);
        }
        return;
      }
      case PacketClass::SenderReport: {
        if (cfg.topology == Topology::Direct) {
          down.enqueue(pkt, Direction::Forward);
        } else {
          on_sr_arrival(relay_meas, pkt);
        }
        return;
      }
      case PacketClass::DataChannel:
        return;
    }
  }

  void on_downlink_delivery(const WirePacket& pkt, Direction dir) {
    if (dir == Direction::Reverse) return;
    switch (pkt.cls) {
      case PacketClass::Media: {
        on_media_delivery(recv_meas, pkt);
        if (auto frame = recv_rx.on_fragment(pkt)) {
          record_frame_arrival("receiver", packet_origin(pkt), *frame);
        }
        return;
      }
      case PacketClass::SenderReport: {
        on_sr_arrival(recv_meas, pkt);
        return;
      }
      case PacketClass::DataChannel:
        return;
    }
  }

  void record_frame_arrival(const char* at, Origin origin, const FrameDescriptor& f) {
    const double latency = extract_watermark(f, eng.now());
    record(TraceKind::FrameArrival,
           {{"at", at},
            {"origin", origin_name(origin)},
            {"seq", std::to_string(f.frame_seq)},
            {"level", level_name(f.settings)},
            {"keyframe", f.is_keyframe ? "1" : "0"},
            {"headers", f.carries_headers ? "1" : "0"},
            {"size", std::to_string(f.size_bytes)},
            {"watermark_ms", format_ms(f.watermark_ms)},
            {"latency_ms", format_ms(latency)}});
  }

  void on_drop(const char* link, const WirePacket& pkt, Direction dir) {
    record(TraceKind::PacketDrop,
           {{"link", link},
            {"class", pkt.cls == PacketClass::Media          ? "media"
                      : pkt.cls == PacketClass::SenderReport ? "sender-report"
                                                             : "data-channel"},
            {"bytes", std::to_string(pkt.bytes)}});
    if (pkt.cls != PacketClass::Media || dir != Direction::Forward) return;
    if (std::string(link) == "uplink") {
      if (relay_topology()) relay_rx.on_drop(pkt);
      if (!transcoding_active()) recv_rx.on_drop(pkt);  // never forwarded
    } else {
      recv_rx.on_drop(pkt);
    }
  }

  // ---- run -----------------------------------------------------------------

  EventTrace run() {
    // Initial implied levels (before any shaping event) anchor reaction
    // detection: only changes that move the implied level produce records.
    std::vector<std::pair<std::string, std::string>> meta = {
        {"scenario", cfg.name},
        {"topology", to_string(cfg.topology)},
        {"estimator", to_string(cfg.estimator.strategy)},
        {"report_period_ms", format_ms(cfg.report_period_ms)},
        {"duration_s", format_ms(cfg.duration_s)},
        {"seed", std::to_string(cfg.seed)},
        {"shaping", to_string(cfg.shaping)},
        {"shaped_path", to_string(cfg.shaped_path)},
        {"transcoding_enabled", cfg.transcoding_enabled ? "1" : "0"},
        {"implied_sender", to_string(implied_level(false))}};
    if (cfg.topology == Topology::TranscodingRelay) {
      meta.emplace_back("implied_relay", to_string(implied_level(true)));
    }
    record(TraceKind::Meta, std::move(meta));

    up.on_deliver([this](const WirePacket& p, Direction d) { on_uplink_delivery(p, d); });
    down.on_deliver([this](const WirePacket& p, Direction d) { on_downlink_delivery(p, d); });
    up.on_drop([this](const WirePacket& p, Direction d) { on_drop("uplink", p, d); });
    down.on_drop([this](const WirePacket& p, Direction d) { on_drop("downlink", p, d); });

    if (auto sched = cfg.effective_uplink_schedule()) schedule_shaping(up, *sched, "uplink");
    if (auto sched = cfg.effective_downlink_schedule()) schedule_shaping(down, *sched, "downlink");

    // Controllers and encoder start at the nominal (Good) level.
    enc.current = cfg.ladder.good;
    enc.keyframe_weight = cfg.keyframe_weight;
    enc.next_frame_at_ms = cfg.media_start_offset_ms;
    sender_ctrl.hold_down_ms = cfg.hold_down_ms;
    relay_ctrl.hold_down_ms = cfg.hold_down_ms;
    relay_target = cfg.ladder.good;
    transcoder.target = cfg.ladder.good;
    transcoder.keyframe_weight = cfg.keyframe_weight;

    recv_meas.estimator = cfg.estimator.initial_state();
    relay_meas.estimator = cfg.estimator.initial_state();
    recv_meas.path = cfg.topology == Topology::Direct ? PathId::Direct : PathId::Download;
    relay_meas.path = PathId::Upload;

    // Sender reports start at t=0; receiver reports at t=period.
    eng.at(0.0, [this] { emit_sr(up, sender_rr, next_sender_sr_ms); });
    if (relay_topology()) {
      eng.at(0.0, [this] { emit_sr(down, relay_rr, next_relay_sr_ms); });
      next_relay_rr_ms = cfg.report_period_ms;
      eng.at(next_relay_rr_ms, [this] { emit_rr(relay_meas, next_relay_rr_ms); });
    }
    next_recv_rr_ms = cfg.report_period_ms;
    eng.at(next_recv_rr_ms, [this] { emit_rr(recv_meas, next_recv_rr_ms); });

    schedule_frame();

    eng.run_until(duration_ms);
    trace.events.push_back(TraceEvent{duration_ms, TraceKind::SimEnd, {}});
    return std::move(trace);
  }
};

}  // namespace

EventTrace run(const ScenarioConfig& config) {
  config.validate();
  Sim sim(config);
  return sim.run();
}

std::vector<double> relay_forwarding_latency(const EventTrace& trace) {
  std::vector<double> delays;
  for (const TraceEvent& ev : trace.events) {
    if (ev.kind == TraceKind::DataChannelDelivery) {
      delays.push_back(ev.num("delay_ms"));
    }
  }
  return delays;
}

}  // namespace qoslab
