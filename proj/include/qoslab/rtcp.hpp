#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "qoslab/rate_control.hpp"

namespace qoslab {

enum class PathId { Upload, Download, Direct };

const char* to_string(PathId path);

struct ReceiverReport {
  PathMetrics metrics;
  PathId path = PathId::Direct;
  long seq = 0;
  double loss_fraction = 0.0;
};

// Standard RTP interarrival jitter state, in milliseconds.
struct JitterState {
  double j_ms = 0.0;
  std::optional<double> last_transit_ms;
};

// One packet's transit time folded into the jitter estimate with gain 1/16.
// The first sample only seeds the transit reference.
JitterState update_jitter(JitterState state, double transit_ms);

struct MalformedReport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// LSR/DLSR round-trip computation. Throws MalformedReport when the
// timestamps are inconsistent (now < lsr + dlsr).
double compute_rtt(double now_ms, double lsr_ms, double dlsr_ms);

enum class EstimatorStrategy { Oracle, DelayGradient };

const char* to_string(EstimatorStrategy s);
std::optional<EstimatorStrategy> estimator_from_string(const std::string& s);

// Available-bandwidth estimator. The Oracle strategy reads emulator truth
// (lagged by oracle_lag_ms, sampled by the caller); DelayGradient is a
// GCC-like heuristic: multiplicative decrease on congestion signals, gentle
// increase otherwise.
struct EstimatorState {
  EstimatorStrategy strategy = EstimatorStrategy::Oracle;
  double est_kbps = 10000.0;  // start at the Good/Mid border
  double oracle_lag_ms = 100.0;
  double increase_factor = 1.08;
  double decrease_factor = 0.85;
  double queue_delay_threshold_ms = 50.0;
  double est_cap_kbps = 200000.0;
  double loss_threshold = 0.02;
};

EstimatorState estimate_bandwidth(EstimatorState state,
                                  double measured_throughput_kbps,
                                  double queue_delay_ms,
                                  double loss_fraction,
                                  double true_capacity_kbps);

// Fixed-period report clock; reports are due at period, 2*period, ...
struct ReportScheduler {
  double period_ms = 500.0;
  double next_due_ms = 500.0;

  bool due(double now_ms) const { return now_ms >= next_due_ms; }
  void advance() { next_due_ms += period_ms; }
};

ReceiverReport build_report(const JitterState& jitter,
                            const EstimatorState& estimator,
                            double rtt_ms,
                            double loss_fraction,
                            PathId path,
                            double now_ms,
                            long seq);

}  // namespace qoslab
