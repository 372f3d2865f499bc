// Python surface for the simulation lab. Heavy objects cross the boundary
// as text (JSON configs in, trace/CSV text out); the small pure functions
// are exposed directly.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qoslab/media.hpp"
#include "qoslab/metrics.hpp"
#include "qoslab/simcore.hpp"

namespace py = pybind11;
using namespace qoslab;

namespace {

Level parse_level(const std::string& s) {
  const auto level = level_from_string(s);
  if (!level) throw py::value_error("unknown level '" + s + "'");
  return *level;
}

EncodingLevel ladder_row(const std::string& level) {
  return level_params(parse_level(level), EncodingLadder{});
}

py::dict level_dict(const EncodingLevel& lvl) {
  py::dict d;
  d["bitrate_kbps"] = lvl.bitrate_kbps;
  d["framerate_fps"] = lvl.framerate_fps;
  d["width_px"] = lvl.width_px;
  d["height_px"] = lvl.height_px;
  d["gop_frames"] = lvl.gop_frames;
  return d;
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["mean_reaction_s"] = s.mean_reaction_s;
  d["stddev_reaction_s"] = s.stddev_reaction_s;
  d["mean_update_s"] = s.mean_update_s;
  d["stddev_update_s"] = s.stddev_update_s;
  d["n_changes"] = s.n_changes;
  d["n_censored"] = s.n_censored;
  d["n_updates"] = s.n_updates;
  d["has_reactions"] = s.has_reactions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qoslab, m) {
  m.doc() = "Deterministic QoS-adaptation simulation lab";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MalformedReport>(m, "MalformedReport", PyExc_ValueError);

  m.def(
      "classify",
      [](double bw_kbps, double rtt_ms, double jitter_ms) {
        return std::string(
            to_string(classify({bw_kbps, rtt_ms, jitter_ms, 0.0}, Thresholds{})));
      },
      py::arg("bw_kbps"), py::arg("rtt_ms"), py::arg("jitter_ms"),
      "Map one metrics sample to 'Good'/'Mid'/'Poor' with default thresholds");

  m.def(
      "level_params", [](const std::string& level) { return level_dict(ladder_row(level)); },
      py::arg("level"), "Encoding-ladder row for a level name");

  m.def(
      "frame_size",
      [](const std::string& level, bool keyframe, double keyframe_weight) {
        return frame_size(ladder_row(level), keyframe, keyframe_weight);
      },
      py::arg("level"), py::arg("keyframe"), py::arg("keyframe_weight") = 4.0,
      "Modeled frame size in bytes at a ladder level");

  py::class_<JitterState>(m, "JitterState")
      .def(py::init<>())
      .def_readonly("jitter_ms", &JitterState::j_ms)
      .def(
          "update",
          [](JitterState& s, double transit_ms) {
            s = update_jitter(s, transit_ms);
            return s.j_ms;
          },
          py::arg("transit_ms"),
          "Fold one transit sample into the estimate; returns the new jitter");

  m.def("compute_rtt", &compute_rtt, py::arg("now_ms"), py::arg("lsr_ms"),
        py::arg("dlsr_ms"), "LSR/DLSR round-trip computation");

  m.def(
      "run_scenario",
      [](const std::string& config_json) {
        return run(parse_config_text(config_json)).to_string();
      },
      py::arg("config_json"),
      "Run one scenario described by a JSON config; returns the trace text");

  m.def(
      "reactions_csv",
      [](const std::string& trace_text) {
        return records_to_csv(detect_reactions(EventTrace::parse_string(trace_text)));
      },
      py::arg("trace_text"), "Reaction/update records of a trace as CSV text");

  m.def(
      "summarize_trace",
      [](const std::string& trace_text) {
        return summary_dict(
            summarize(detect_reactions(EventTrace::parse_string(trace_text))));
      },
      py::arg("trace_text"), "Reaction-time summary statistics of a trace");

  m.def("default_config", [] { return config_to_json(ScenarioConfig{}); },
        "JSON text of the default scenario configuration");

  m.def(
      "preset_config",
      [](const std::string& name) -> std::optional<std::string> {
        const auto preset = preset_scenario(name);
        if (!preset) return std::nullopt;
        return config_to_json(*preset);
      },
      py::arg("name"),
      "JSON text of a named preset ('paper-bandwidth', 'paper-latency'), or None");
}
