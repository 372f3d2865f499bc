#pragma once

#include <optional>
#include <string>
#include <utility>

namespace qoslab {

// Quality level of the path / encoding ladder. Ordered: Poor < Mid < Good.
enum class Level { Poor = 0, Mid = 1, Good = 2 };

const char* to_string(Level level);
std::optional<Level> level_from_string(const std::string& s);

inline Level min_level(Level a, Level b) { return a < b ? a : b; }

// One feedback sample: the controller inputs measured on a path.
struct PathMetrics {
  double bandwidth_kbps = 0.0;
  double rtt_ms = 0.0;
  double jitter_ms = 0.0;
  double sampled_at_ms = 0.0;

  bool valid() const;
};

struct ThresholdRow {
  double bw_kbps = 0.0;
  double rtt_ms = 0.0;
  double jitter_ms = 0.0;
};

// Classification borders. good_mid is the Good/Mid border, mid_poor the
// Mid/Poor border. Defaults match the values the experiments were run with.
struct Thresholds {
  ThresholdRow good_mid{10000.0, 90.0, 2.0};
  ThresholdRow mid_poor{5000.0, 180.0, 8.0};

  // good_mid.bw > mid_poor.bw, good_mid.rtt < mid_poor.rtt,
  // good_mid.jitter < mid_poor.jitter -- guarantees Good-all and Poor-any
  // can never hold at once.
  bool valid() const;
};

// A point on the encoding ladder.
struct EncodingLevel {
  int bitrate_kbps = 0;
  int framerate_fps = 0;
  int width_px = 0;
  int height_px = 0;
  int gop_frames = 0;

  bool valid() const;
  bool operator==(const EncodingLevel&) const = default;
};

struct EncodingLadder {
  EncodingLevel good{4000, 30, 1920, 1080, 5};
  EncodingLevel mid{2200, 15, 1920, 1080, 7};
  EncodingLevel poor{700, 5, 640, 360, 5};

  bool valid() const;
};

struct ControllerState {
  Level current_level = Level::Good;
  double last_decision_at_ms = 0.0;
  double hold_down_ms = 0.0;
};

// Maps one metrics sample to a level.
//
// Good  iff bw >= good_mid.bw AND rtt <= good_mid.rtt AND jit <= good_mid.jitter
// Poor  iff bw <  mid_poor.bw OR  rtt >  mid_poor.rtt OR  jit >  mid_poor.jitter
// Mid   otherwise.
//
// Values exactly on a good border count as Good; exactly on a poor border
// count as Mid (Poor requires strict violation).
Level classify(const PathMetrics& metrics, const Thresholds& thresholds);

const EncodingLevel& level_params(Level level, const EncodingLadder& ladder);

// Componentwise worst case of two path samples: min bandwidth, max rtt,
// max jitter. classify(combine(u, d)) == min(classify(u), classify(d)).
PathMetrics combine(const PathMetrics& upload, const PathMetrics& download);

// Runs the controller on one sample. Returns the new level and its encoder
// settings when the target level differs from the current one and the
// hold-down window has elapsed; returns nothing (and leaves the state
// untouched) otherwise.
std::optional<std::pair<Level, EncodingLevel>> decide(ControllerState& state,
                                                      const PathMetrics& metrics,
                                                      const Thresholds& thresholds,
                                                      const EncodingLadder& ladder,
                                                      double now_ms);

}  // namespace qoslab
