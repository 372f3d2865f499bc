#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qoslab/netem.hpp"
#include "qoslab/rate_control.hpp"
#include "qoslab/rtcp.hpp"

namespace qoslab {

enum class Topology { Direct, TranscodingRelay, ReportingRelay };

const char* to_string(Topology topology);
std::optional<Topology> topology_from_string(const std::string& s);

enum class ShapedPath { Uplink, Downlink, Both };

const char* to_string(ShapedPath path);
std::optional<ShapedPath> shaped_path_from_string(const std::string& s);

struct LinkDefaults {
  double capacity_kbps = 0.0;
  double fwd_latency_ms = 0.0;
  double rev_latency_ms = 0.0;
  long queue_limit_bytes = 2'000'000;
};

struct EstimatorConfig {
  EstimatorStrategy strategy = EstimatorStrategy::Oracle;
  double initial_est_kbps = 10000.0;
  double oracle_lag_ms = 100.0;
  double increase_factor = 1.08;
  double decrease_factor = 0.85;
  double queue_delay_threshold_ms = 50.0;
  double est_cap_kbps = 200000.0;
  double loss_threshold = 0.02;

  EstimatorState initial_state() const;
};

// A full experiment description. All defaults are the values the reference
// experiments used: 500 ms report period, the built-in shaping tables, and
// the bandwidth program applied to the downlink of a Direct session.
struct ScenarioConfig {
  std::string name = "default";
  Topology topology = Topology::Direct;
  EstimatorConfig estimator;
  Thresholds thresholds;
  EncodingLadder ladder;
  double report_period_ms = 500.0;
  double duration_s = 100.0;
  uint64_t seed = 1;
  double keyframe_weight = 4.0;
  long mtu_payload_bytes = 1200;
  double hold_down_ms = 0.0;
  double size_jitter_amplitude = 0.0;
  double relay_setup_delay_ms = 0.0;
  double media_start_offset_ms = 1.0;
  bool transcoding_enabled = true;

  // Baseline bearers; the testbed's 120 Mbps up / 200 Mbps down.
  LinkDefaults uplink{120000.0, 0.0, 0.0, 2'000'000};
  LinkDefaults downlink{200000.0, 0.0, 0.0, 2'000'000};

  ShapingKind shaping = ShapingKind::Bandwidth;
  ShapedPath shaped_path = ShapedPath::Downlink;

  // Explicit step programs override the built-in tables when present.
  std::optional<ShapingSchedule> uplink_schedule;
  std::optional<ShapingSchedule> downlink_schedule;

  std::string out_dir;

  // Schedules that actually drive each link after resolving shaped_path
  // against the built-in table (or the explicit overrides).
  std::optional<ShapingSchedule> effective_uplink_schedule() const;
  std::optional<ShapingSchedule> effective_downlink_schedule() const;

  void validate() const;  // throws std::invalid_argument with the key name
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON config-file surface. Unknown keys are hard errors; flags from the
// CLI are layered on top by the tool.
ScenarioConfig parse_config_text(const std::string& json_text);
ScenarioConfig parse_config_file(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

// Named presets mirroring the experiment shapes: "paper-bandwidth" and
// "paper-latency" (single runs); "paper-table4" and "paper-table6" expand
// to run matrices in the CLI.
std::optional<ScenarioConfig> preset_scenario(const std::string& name);

}  // namespace qoslab
