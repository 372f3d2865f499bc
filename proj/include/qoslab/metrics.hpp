#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qoslab/rate_control.hpp"
#include "qoslab/trace.hpp"

namespace qoslab {

// One shaping change that implied a level change, paired with the adapting
// entity's response. A record is censored when the next shaping change for
// the same entity arrived before any decision; censored records keep their
// identity columns but have no timing, and are excluded from means.
struct ReactionRecord {
  // Run identity, copied from the trace's Meta event so a CSV row is
  // self-describing.
  std::string scenario;
  std::string topology;
  std::string estimator;
  double report_period_ms = 0.0;

  long change_idx = 0;  // ordinal of the ShapingChange event in the trace
  std::string entity;   // "sender" or "relay"
  double t_change_ms = 0.0;
  std::optional<double> t_aware_ms;     // first post-change report delivery
  std::optional<double> t_decision_ms;  // first decision after the change
  std::optional<double> reaction_ms;    // t_decision - t_change
  std::optional<double> t_received_ms;  // first new-level header keyframe
  std::optional<double> update_ms;      // t_received - t_decision
  Level level_from = Level::Good;
  Level level_to = Level::Good;
  bool censored = false;
};

struct Summary {
  double mean_reaction_s = 0.0;
  double stddev_reaction_s = 0.0;  // population formula
  double mean_update_s = 0.0;
  double stddev_update_s = 0.0;
  long n_changes = 0;   // records (shaping changes that implied a level change)
  long n_censored = 0;
  long n_updates = 0;   // uncensored records with a receiver update observed
  bool has_reactions = false;
};

// Pairs every level-implying ShapingChange with the adapting entity's first
// Decision before the next change for that entity (censored otherwise), and
// with the first fully received header-carrying keyframe at the new level.
// Throws std::runtime_error on a malformed trace (a Decision with no prior
// report delivery).
std::vector<ReactionRecord> detect_reactions(const EventTrace& trace);

Summary summarize(const std::vector<ReactionRecord>& records);

// CSV with exactly these columns:
// scenario,topology,estimator,report_period_ms,change_idx,t_change_ms,
// t_decision_ms,reaction_ms,t_received_ms,update_ms,level_from,level_to,censored
std::string records_to_csv(const std::vector<ReactionRecord>& records);
void write_csv(const std::vector<ReactionRecord>& records, const std::string& path);

// Aligned text table: one row per summary, columns for mean/stddev reaction
// and receiver update in seconds (3 decimals), or "no reactions".
std::string format_summary_table(const std::vector<std::pair<std::string, Summary>>& rows);

}  // namespace qoslab
