#include "qoslab/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qoslab {

using nlohmann::json;

const char* to_string(Topology topology) {
  switch (topology) {
    case Topology::Direct: return "direct";
    case Topology::TranscodingRelay: return "transcoding";
    case Topology::ReportingRelay: return "reporting";
  }
  return "?";
}

std::optional<Topology> topology_from_string(const std::string& s) {
  if (s == "direct") return Topology::Direct;
  if (s == "transcoding" || s == "transcoding-relay") return Topology::TranscodingRelay;
  if (s == "reporting" || s == "reporting-relay") return Topology::ReportingRelay;
  return std::nullopt;
}

const char* to_string(ShapedPath path) {
  switch (path) {
    case ShapedPath::Uplink: return "uplink";
    case ShapedPath::Downlink: return "downlink";
    case ShapedPath::Both: return "both";
  }
  return "?";
}

std::optional<ShapedPath> shaped_path_from_string(const std::string& s) {
  if (s == "uplink") return ShapedPath::Uplink;
  if (s == "downlink") return ShapedPath::Downlink;
  if (s == "both") return ShapedPath::Both;
  return std::nullopt;
}

EstimatorState EstimatorConfig::initial_state() const {
  EstimatorState st;
  st.strategy = strategy;
  st.est_kbps = initial_est_kbps;
  st.oracle_lag_ms = oracle_lag_ms;
  st.increase_factor = increase_factor;
  st.decrease_factor = decrease_factor;
  st.queue_delay_threshold_ms = queue_delay_threshold_ms;
  st.est_cap_kbps = est_cap_kbps;
  st.loss_threshold = loss_threshold;
  return st;
}

std::optional<ShapingSchedule> ScenarioConfig::effective_uplink_schedule() const {
  if (uplink_schedule) return uplink_schedule;
  if (shaped_path == ShapedPath::Uplink || shaped_path == ShapedPath::Both) {
    return schedule_from_table(shaping);
  }
  return std::nullopt;
}

std::optional<ShapingSchedule> ScenarioConfig::effective_downlink_schedule() const {
  if (downlink_schedule) return downlink_schedule;
  if (shaped_path == ShapedPath::Downlink || shaped_path == ShapedPath::Both) {
    return schedule_from_table(shaping);
  }
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  if (!thresholds.valid()) throw ConfigError("config: thresholds violate border ordering");
  if (!ladder.valid()) throw ConfigError("config: ladder violates level ordering");
  if (report_period_ms <= 0) throw ConfigError("config: report_period_ms must be > 0");
  if (duration_s <= 0) throw ConfigError("config: duration_s must be > 0");
  if (mtu_payload_bytes < 1) throw ConfigError("config: mtu_payload_bytes must be >= 1");
  if (keyframe_weight < 1.0) throw ConfigError("config: keyframe_weight must be >= 1");
  if (hold_down_ms < 0) throw ConfigError("config: hold_down_ms must be >= 0");
  if (size_jitter_amplitude < 0 || size_jitter_amplitude >= 1.0)
    throw ConfigError("config: size_jitter_amplitude must be in [0, 1)");
  const auto check_sched = [](const std::optional<ShapingSchedule>& s, const char* key) {
    if (s && !s->valid()) {
      throw ConfigError(std::string("config: ") + key + " steps must start at 0 and be increasing");
    }
  };
  check_sched(uplink_schedule, "uplink_schedule");
  check_sched(downlink_schedule, "downlink_schedule");
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config: unknown key '" + where + it.key() + "'");
    }
  }
}

double get_num(const json& obj, const std::string& key, double fallback,
               const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ConfigError("config: key '" + where + key + "' must be a number");
  }
  return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw ConfigError("config: key '" + where + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback,
              const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    throw ConfigError("config: key '" + where + key + "' must be a boolean");
  }
  return obj[key].get<bool>();
}

ThresholdRow parse_threshold_row(const json& obj, ThresholdRow fallback,
                                 const std::string& where) {
  reject_unknown_keys(obj, {"bw_kbps", "rtt_ms", "jitter_ms"}, where);
  fallback.bw_kbps = get_num(obj, "bw_kbps", fallback.bw_kbps, where);
  fallback.rtt_ms = get_num(obj, "rtt_ms", fallback.rtt_ms, where);
  fallback.jitter_ms = get_num(obj, "jitter_ms", fallback.jitter_ms, where);
  return fallback;
}

EncodingLevel parse_level(const json& obj, EncodingLevel fallback, const std::string& where) {
  reject_unknown_keys(obj, {"bitrate_kbps", "framerate_fps", "width_px", "height_px", "gop_frames"}, where);
  fallback.bitrate_kbps = static_cast<int>(get_num(obj, "bitrate_kbps", fallback.bitrate_kbps, where));
  fallback.framerate_fps = static_cast<int>(get_num(obj, "framerate_fps", fallback.framerate_fps, where));
  fallback.width_px = static_cast<int>(get_num(obj, "width_px", fallback.width_px, where));
  fallback.height_px = static_cast<int>(get_num(obj, "height_px", fallback.height_px, where));
  fallback.gop_frames = static_cast<int>(get_num(obj, "gop_frames", fallback.gop_frames, where));
  return fallback;
}

LinkDefaults parse_link(const json& obj, LinkDefaults fallback, const std::string& where) {
  reject_unknown_keys(obj, {"capacity_kbps", "fwd_latency_ms", "rev_latency_ms", "queue_limit_bytes"}, where);
  fallback.capacity_kbps = get_num(obj, "capacity_kbps", fallback.capacity_kbps, where);
  fallback.fwd_latency_ms = get_num(obj, "fwd_latency_ms", fallback.fwd_latency_ms, where);
  fallback.rev_latency_ms = get_num(obj, "rev_latency_ms", fallback.rev_latency_ms, where);
  fallback.queue_limit_bytes = static_cast<long>(get_num(obj, "queue_limit_bytes",
                                                         static_cast<double>(fallback.queue_limit_bytes), where));
  return fallback;
}

ShapingSchedule parse_schedule(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"kind", "span_s", "steps"}, where);
  ShapingSchedule schedule;
  const std::string kind = get_str(obj, "kind", "bandwidth", where);
  const auto parsed_kind = shaping_from_string(kind);
  if (!parsed_kind) throw ConfigError("config: key '" + where + "kind' must be bandwidth|latency");
  schedule.kind = *parsed_kind;
  schedule.span_s = get_num(obj, "span_s", 100.0, where);
  if (!obj.contains("steps") || !obj["steps"].is_array()) {
    throw ConfigError("config: key '" + where + "steps' must be an array");
  }
  for (const json& step : obj["steps"]) {
    reject_unknown_keys(step, {"start_s", "value"}, where + "steps.");
    if (!step.contains("start_s") || !step.contains("value")) {
      throw ConfigError("config: schedule steps need start_s and value (" + where + "steps)");
    }
    schedule.steps.push_back(ShapingStep{step["start_s"].get<double>(), step["value"].get<double>()});
  }
  return schedule;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  ScenarioConfig cfg;
  reject_unknown_keys(root,
                      {"name", "topology", "estimator", "thresholds", "ladder",
                       "report_period_ms", "duration_s", "seed", "keyframe_weight",
                       "mtu_payload_bytes", "hold_down_ms", "size_jitter_amplitude",
                       "relay_setup_delay_ms", "media_start_offset_ms",
                       "transcoding_enabled", "uplink", "downlink", "shaping",
                       "shaped_path", "uplink_schedule", "downlink_schedule", "out_dir"},
                      "");

  cfg.name = get_str(root, "name", cfg.name, "");
  if (root.contains("topology")) {
    const auto t = topology_from_string(get_str(root, "topology", "", ""));
    if (!t) throw ConfigError("config: key 'topology' must be direct|transcoding|reporting");
    cfg.topology = *t;
  }
  if (root.contains("estimator")) {
    const json& est = root["estimator"];
    reject_unknown_keys(est,
                        {"strategy", "initial_est_kbps", "oracle_lag_ms", "increase_factor",
                         "decrease_factor", "queue_delay_threshold_ms", "est_cap_kbps",
                         "loss_threshold"},
                        "estimator.");
    if (est.contains("strategy")) {
      const auto s = estimator_from_string(get_str(est, "strategy", "", "estimator."));
      if (!s) throw ConfigError("config: key 'estimator.strategy' must be oracle|delay-gradient");
      cfg.estimator.strategy = *s;
    }
    cfg.estimator.initial_est_kbps = get_num(est, "initial_est_kbps", cfg.estimator.initial_est_kbps, "estimator.");
    cfg.estimator.oracle_lag_ms = get_num(est, "oracle_lag_ms", cfg.estimator.oracle_lag_ms, "estimator.");
    cfg.estimator.increase_factor = get_num(est, "increase_factor", cfg.estimator.increase_factor, "estimator.");
    cfg.estimator.decrease_factor = get_num(est, "decrease_factor", cfg.estimator.decrease_factor, "estimator.");
    cfg.estimator.queue_delay_threshold_ms =
        get_num(est, "queue_delay_threshold_ms", cfg.estimator.queue_delay_threshold_ms, "estimator.");
    cfg.estimator.est_cap_kbps = get_num(est, "est_cap_kbps", cfg.estimator.est_cap_kbps, "estimator.");
    cfg.estimator.loss_threshold = get_num(est, "loss_threshold", cfg.estimator.loss_threshold, "estimator.");
  }
  if (root.contains("thresholds")) {
    const json& th = root["thresholds"];
    reject_unknown_keys(th, {"good_mid", "mid_poor"}, "thresholds.");
    if (th.contains("good_mid"))
      cfg.thresholds.good_mid = parse_threshold_row(th["good_mid"], cfg.thresholds.good_mid, "thresholds.good_mid.");
    if (th.contains("mid_poor"))
      cfg.thresholds.mid_poor = parse_threshold_row(th["mid_poor"], cfg.thresholds.mid_poor, "thresholds.mid_poor.");
  }
  if (root.contains("ladder")) {
    const json& ladder = root["ladder"];
    reject_unknown_keys(ladder, {"good", "mid", "poor"}, "ladder.");
    if (ladder.contains("good")) cfg.ladder.good = parse_level(ladder["good"], cfg.ladder.good, "ladder.good.");
    if (ladder.contains("mid")) cfg.ladder.mid = parse_level(ladder["mid"], cfg.ladder.mid, "ladder.mid.");
    if (ladder.contains("poor")) cfg.ladder.poor = parse_level(ladder["poor"], cfg.ladder.poor, "ladder.poor.");
  }
  cfg.report_period_ms = get_num(root, "report_period_ms", cfg.report_period_ms, "");
  cfg.duration_s = get_num(root, "duration_s", cfg.duration_s, "");
  cfg.seed = static_cast<uint64_t>(get_num(root, "seed", static_cast<double>(cfg.seed), ""));
  cfg.keyframe_weight = get_num(root, "keyframe_weight", cfg.keyframe_weight, "");
  cfg.mtu_payload_bytes = static_cast<long>(get_num(root, "mtu_payload_bytes",
                                                    static_cast<double>(cfg.mtu_payload_bytes), ""));
  cfg.hold_down_ms = get_num(root, "hold_down_ms", cfg.hold_down_ms, "");
  cfg.size_jitter_amplitude = get_num(root, "size_jitter_amplitude", cfg.size_jitter_amplitude, "");
  cfg.relay_setup_delay_ms = get_num(root, "relay_setup_delay_ms", cfg.relay_setup_delay_ms, "");
  cfg.media_start_offset_ms = get_num(root, "media_start_offset_ms", cfg.media_start_offset_ms, "");
  cfg.transcoding_enabled = get_bool(root, "transcoding_enabled", cfg.transcoding_enabled, "");
  if (root.contains("uplink")) cfg.uplink = parse_link(root["uplink"], cfg.uplink, "uplink.");
  if (root.contains("downlink")) cfg.downlink = parse_link(root["downlink"], cfg.downlink, "downlink.");
  if (root.contains("shaping")) {
    const auto s = shaping_from_string(get_str(root, "shaping", "", ""));
    if (!s) throw ConfigError("config: key 'shaping' must be bandwidth|latency");
    cfg.shaping = *s;
  }
  if (root.contains("shaped_path")) {
    const auto p = shaped_path_from_string(get_str(root, "shaped_path", "", ""));
    if (!p) throw ConfigError("config: key 'shaped_path' must be uplink|downlink|both");
    cfg.shaped_path = *p;
  }
  if (root.contains("uplink_schedule")) cfg.uplink_schedule = parse_schedule(root["uplink_schedule"], "uplink_schedule.");
  if (root.contains("downlink_schedule")) cfg.downlink_schedule = parse_schedule(root["downlink_schedule"], "downlink_schedule.");
  cfg.out_dir = get_str(root, "out_dir", cfg.out_dir, "");

  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

json schedule_to_json(const ShapingSchedule& schedule) {
  json steps = json::array();
  for (const ShapingStep& step : schedule.steps) {
    steps.push_back({{"start_s", step.start_s}, {"value", step.value}});
  }
  return {{"kind", to_string(schedule.kind)}, {"span_s", schedule.span_s}, {"steps", steps}};
}

json level_to_json(const EncodingLevel& level) {
  return {{"bitrate_kbps", level.bitrate_kbps},
          {"framerate_fps", level.framerate_fps},
          {"width_px", level.width_px},
          {"height_px", level.height_px},
          {"gop_frames", level.gop_frames}};
}

json link_to_json(const LinkDefaults& link) {
  return {{"capacity_kbps", link.capacity_kbps},
          {"fwd_latency_ms", link.fwd_latency_ms},
          {"rev_latency_ms", link.rev_latency_ms},
          {"queue_limit_bytes", link.queue_limit_bytes}};
}

}  // namespace

std::string config_to_json(const ScenarioConfig& cfg) {
  json root;
  root["name"] = cfg.name;
  root["topology"] = to_string(cfg.topology);
  root["estimator"] = {{"strategy", to_string(cfg.estimator.strategy)},
                       {"initial_est_kbps", cfg.estimator.initial_est_kbps},
                       {"oracle_lag_ms", cfg.estimator.oracle_lag_ms},
                       {"increase_factor", cfg.estimator.increase_factor},
                       {"decrease_factor", cfg.estimator.decrease_factor},
                       {"queue_delay_threshold_ms", cfg.estimator.queue_delay_threshold_ms},
                       {"est_cap_kbps", cfg.estimator.est_cap_kbps},
                       {"loss_threshold", cfg.estimator.loss_threshold}};
  root["thresholds"] = {
      {"good_mid",
       {{"bw_kbps", cfg.thresholds.good_mid.bw_kbps},
        {"rtt_ms", cfg.thresholds.good_mid.rtt_ms},
        {"jitter_ms", cfg.thresholds.good_mid.jitter_ms}}},
      {"mid_poor",
       {{"bw_kbps", cfg.thresholds.mid_poor.bw_kbps},
        {"rtt_ms", cfg.thresholds.mid_poor.rtt_ms},
        {"jitter_ms", cfg.thresholds.mid_poor.jitter_ms}}}};
  root["ladder"] = {{"good", level_to_json(cfg.ladder.good)},
                    {"mid", level_to_json(cfg.ladder.mid)},
                    {"poor", level_to_json(cfg.ladder.poor)}};
  root["report_period_ms"] = cfg.report_period_ms;
  root["duration_s"] = cfg.duration_s;
  root["seed"] = cfg.seed;
  root["keyframe_weight"] = cfg.keyframe_weight;
  root["mtu_payload_bytes"] = cfg.mtu_payload_bytes;
  root["hold_down_ms"] = cfg.hold_down_ms;
  root["size_jitter_amplitude"] = cfg.size_jitter_amplitude;
  root["relay_setup_delay_ms"] = cfg.relay_setup_delay_ms;
  root["media_start_offset_ms"] = cfg.media_start_offset_ms;
  root["transcoding_enabled"] = cfg.transcoding_enabled;
  root["uplink"] = link_to_json(cfg.uplink);
  root["downlink"] = link_to_json(cfg.downlink);
  root["shaping"] = to_string(cfg.shaping);
  root["shaped_path"] = to_string(cfg.shaped_path);
  if (cfg.uplink_schedule) root["uplink_schedule"] = schedule_to_json(*cfg.uplink_schedule);
  if (cfg.downlink_schedule) root["downlink_schedule"] = schedule_to_json(*cfg.downlink_schedule);
  root["out_dir"] = cfg.out_dir;
  return root.dump(2) + "\n";
}

std::optional<ScenarioConfig> preset_scenario(const std::string& name) {
  if (name == "paper-bandwidth") {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.shaping = ShapingKind::Bandwidth;
    cfg.shaped_path = ShapedPath::Downlink;
    return cfg;
  }
  if (name == "paper-latency") {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.shaping = ShapingKind::Latency;
    cfg.shaped_path = ShapedPath::Downlink;
    return cfg;
  }
  return std::nullopt;
}

}  // namespace qoslab
