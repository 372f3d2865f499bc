#pragma once

#include <vector>

#include "qoslab/scenario.hpp"
#include "qoslab/trace.hpp"

namespace qoslab {

// Executes one scenario to completion and returns the full event trace.
// The trace is a pure function of the configuration (and seed): identical
// inputs produce byte-identical traces.
EventTrace run(const ScenarioConfig& config);

// Per-forwarded-report delay (arrival at sender minus emission at the
// receiver) observed in a ReportingRelay trace.
std::vector<double> relay_forwarding_latency(const EventTrace& trace);

}  // namespace qoslab
