#include "qoslab/rate_control.hpp"

#include <cmath>

namespace qoslab {

const char* to_string(Level level) {
  switch (level) {
    case Level::Good: return "Good";
    case Level::Mid: return "Mid";
    case Level::Poor: return "Poor";
  }
  return "?";
}

std::optional<Level> level_from_string(const std::string& s) {
  if (s == "Good" || s == "good") return Level::Good;
  if (s == "Mid" || s == "mid") return Level::Mid;
  if (s == "Poor" || s == "poor") return Level::Poor;
  return std::nullopt;
}

bool PathMetrics::valid() const {
  return std::isfinite(bandwidth_kbps) && bandwidth_kbps >= 0.0 &&
         std::isfinite(rtt_ms) && rtt_ms >= 0.0 &&
         std::isfinite(jitter_ms) && jitter_ms >= 0.0;
}

bool Thresholds::valid() const {
  return good_mid.bw_kbps > mid_poor.bw_kbps &&
         good_mid.rtt_ms < mid_poor.rtt_ms &&
         good_mid.jitter_ms < mid_poor.jitter_ms;
}

bool EncodingLevel::valid() const {
  return bitrate_kbps > 0 && framerate_fps > 0 && width_px > 0 &&
         height_px > 0 && gop_frames >= 1 && width_px % 2 == 0 &&
         height_px % 2 == 0;
}

bool EncodingLadder::valid() const {
  return good.valid() && mid.valid() && poor.valid() &&
         good.bitrate_kbps >= mid.bitrate_kbps &&
         mid.bitrate_kbps >= poor.bitrate_kbps &&
         good.framerate_fps >= mid.framerate_fps &&
         mid.framerate_fps >= poor.framerate_fps &&
         poor.width_px <= good.width_px && poor.height_px <= good.height_px;
}

Level classify(const PathMetrics& m, const Thresholds& t) {
  // Higher bandwidth is better; lower rtt/jitter is better.
  const bool all_good = m.bandwidth_kbps >= t.good_mid.bw_kbps &&
                        m.rtt_ms <= t.good_mid.rtt_ms &&
                        m.jitter_ms <= t.good_mid.jitter_ms;
  if (all_good) return Level::Good;
  const bool any_poor = m.bandwidth_kbps < t.mid_poor.bw_kbps ||
                        m.rtt_ms > t.mid_poor.rtt_ms ||
                        m.jitter_ms > t.mid_poor.jitter_ms;
  if (any_poor) return Level::Poor;
  return Level::Mid;
}

const EncodingLevel& level_params(Level level, const EncodingLadder& ladder) {
  switch (level) {
    case Level::Good: return ladder.good;
    case Level::Mid: return ladder.mid;
    case Level::Poor: return ladder.poor;
  }
  return ladder.good;
}

PathMetrics combine(const PathMetrics& u, const PathMetrics& d) {
  PathMetrics out;
  out.bandwidth_kbps = std::min(u.bandwidth_kbps, d.bandwidth_kbps);
  out.rtt_ms = std::max(u.rtt_ms, d.rtt_ms);
  out.jitter_ms = std::max(u.jitter_ms, d.jitter_ms);
  out.sampled_at_ms = std::max(u.sampled_at_ms, d.sampled_at_ms);
  return out;
}

std::optional<std::pair<Level, EncodingLevel>> decide(ControllerState& state,
                                                      const PathMetrics& metrics,
                                                      const Thresholds& thresholds,
                                                      const EncodingLadder& ladder,
                                                      double now_ms) {
  const Level target = classify(metrics, thresholds);
  if (target == state.current_level) return std::nullopt;
  if (now_ms - state.last_decision_at_ms < state.hold_down_ms) return std::nullopt;
  state.current_level = target;
  state.last_decision_at_ms = now_ms;
  return std::make_pair(target, level_params(target, ladder));
}

}  // namespace qoslab
