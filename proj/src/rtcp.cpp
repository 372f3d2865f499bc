#include "qoslab/rtcp.hpp"

#include <algorithm>
#include <cmath>

namespace qoslab {

const char* to_string(PathId path) {
  switch (path) {
    case PathId::Upload: return "upload";
    case PathId::Download: return "download";
    case PathId::Direct: return "direct";
  }
  return "?";
}

const char* to_string(EstimatorStrategy s) {
  return s == EstimatorStrategy::Oracle ? "oracle" : "delay-gradient";
}

std::optional<EstimatorStrategy> estimator_from_string(const std::string& s) {
  if (s == "oracle") return EstimatorStrategy::Oracle;
  if (s == "delay-gradient" || s == "delay_gradient")
    return EstimatorStrategy::DelayGradient;
  return std::nullopt;
}

JitterState update_jitter(JitterState state, double transit_ms) {
  if (!state.last_transit_ms) {
    state.last_transit_ms = transit_ms;
    return state;
  }
  const double d = std::abs(transit_ms - *state.last_transit_ms);
  state.j_ms += (d - state.j_ms) / 16.0;
  state.last_transit_ms = transit_ms;
  return state;
}

double compute_rtt(double now_ms, double lsr_ms, double dlsr_ms) {
  if (now_ms < lsr_ms + dlsr_ms) {
    throw MalformedReport("rtcp: now < lsr + dlsr (clock inconsistency)");
  }
  return now_ms - lsr_ms - dlsr_ms;
}

EstimatorState estimate_bandwidth(EstimatorState state,
                                  double measured_throughput_kbps,
                                  double queue_delay_ms,
                                  double loss_fraction,
                                  double true_capacity_kbps) {
  if (state.strategy == EstimatorStrategy::Oracle) {
    state.est_kbps = true_capacity_kbps;
    return state;
  }
  const bool congested = loss_fraction > state.loss_threshold ||
                         queue_delay_ms > state.queue_delay_threshold_ms;
  if (congested) {
    state.est_kbps = state.decrease_factor * state.est_kbps;
  } else {
    state.est_kbps = std::min(
        state.est_cap_kbps,
        std::max(state.est_kbps * state.increase_factor, measured_throughput_kbps));
  }
  return state;
}

ReceiverReport build_report(const JitterState& jitter,
                            const EstimatorState& estimator,
                            double rtt_ms,
                            double loss_fraction,
                            PathId path,
                            double now_ms,
                            long seq) {
  ReceiverReport report;
  report.metrics.bandwidth_kbps = estimator.est_kbps;
  report.metrics.rtt_ms = rtt_ms;
  report.metrics.jitter_ms = jitter.j_ms;
  report.metrics.sampled_at_ms = now_ms;
  report.path = path;
  report.seq = seq;
  report.loss_fraction = loss_fraction;
  return report;
}

}  // namespace qoslab
