#include "qoslab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qoslab {

namespace {

std::string field(const TraceEvent& ev, const std::string& key) {
  const std::string* v = ev.find(key);
  if (!v) {
    throw std::runtime_error("trace event missing field '" + key + "'");
  }
  return *v;
}

Level level_field(const TraceEvent& ev, const std::string& key) {
  const auto level = level_from_string(field(ev, key));
  if (!level) {
    throw std::runtime_error("trace event has invalid level in '" + key + "'");
  }
  return *level;
}

// Report deliveries seen by an entity: direct deliveries plus, for the
// sender, data-channel forwarded reports.
bool delivered_to(const TraceEvent& ev, const std::string& entity) {
  if (ev.kind == TraceKind::ReportDelivery) return field(ev, "at") == entity;
  if (ev.kind == TraceKind::DataChannelDelivery) return entity == "sender";
  return false;
}

void stats(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  stddev = std::sqrt(var);
}

std::string opt_ms(const std::optional<double>& v) {
  return v ? format_ms(*v) : std::string();
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::vector<ReactionRecord> detect_reactions(const EventTrace& trace) {
  const std::vector<TraceEvent>& ev = trace.events;

  std::string scenario, topology, estimator;
  double period_ms = 0.0;
  std::map<std::string, Level> implied{{"sender", Level::Good}, {"relay", Level::Good}};
  if (!ev.empty() && ev.front().kind == TraceKind::Meta) {
    const TraceEvent& meta = ev.front();
    if (const auto* v = meta.find("scenario")) scenario = *v;
    if (const auto* v = meta.find("topology")) topology = *v;
    if (const auto* v = meta.find("estimator")) estimator = *v;
    if (meta.find("report_period_ms")) period_ms = meta.num("report_period_ms");
    if (const auto* v = meta.find("implied_sender")) implied["sender"] = *level_from_string(*v);
    if (const auto* v = meta.find("implied_relay")) implied["relay"] = *level_from_string(*v);
  }

  // Malformed-trace check: a decision can only follow a report delivery.
  bool any_delivery = false;
  for (const TraceEvent& e : ev) {
    if (e.kind == TraceKind::ReportDelivery || e.kind == TraceKind::DataChannelDelivery) {
      any_delivery = true;
    } else if (e.kind == TraceKind::Decision && !any_delivery) {
      throw std::runtime_error("malformed trace: decision without prior report");
    }
  }

  std::vector<ReactionRecord> records;
  long change_idx = -1;
  for (size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind != TraceKind::ShapingChange) continue;
    ++change_idx;
    const std::string entity = field(ev[i], "entity");
    const Level to_implied = level_field(ev[i], "implied");
    const Level from_implied = implied[entity];
    implied[entity] = to_implied;
    if (to_implied == from_implied) continue;  // no level change expected

    ReactionRecord rec;
    rec.scenario = scenario;
    rec.topology = topology;
    rec.estimator = estimator;
    rec.report_period_ms = period_ms;
    rec.change_idx = change_idx;
    rec.entity = entity;
    rec.t_change_ms = ev[i].time_ms;
    rec.level_from = from_implied;
    rec.level_to = to_implied;

    for (size_t j = i + 1; j < ev.size(); ++j) {
      if (!rec.t_aware_ms && delivered_to(ev[j], entity)) {
        rec.t_aware_ms = ev[j].time_ms;
      }
      if (ev[j].kind == TraceKind::ShapingChange && field(ev[j], "entity") == entity) {
        rec.censored = true;  // superseded before the entity reacted
        break;
      }
      if (ev[j].kind == TraceKind::Decision && field(ev[j], "entity") == entity) {
        rec.t_decision_ms = ev[j].time_ms;
        rec.reaction_ms = ev[j].time_ms - rec.t_change_ms;
        rec.level_from = level_field(ev[j], "from");
        rec.level_to = level_field(ev[j], "to");
        break;
      }
    }
    if (!rec.censored && rec.t_decision_ms) {
      const std::string new_level = to_string(rec.level_to);
      for (size_t j = i + 1; j < ev.size(); ++j) {
        if (ev[j].kind != TraceKind::FrameArrival) continue;
        if (ev[j].time_ms < *rec.t_decision_ms) continue;
        if (field(ev[j], "at") != "receiver") continue;
        if (field(ev[j], "headers") != "1") continue;
        if (field(ev[j], "level") != new_level) continue;
        rec.t_received_ms = ev[j].time_ms;
        rec.update_ms = ev[j].time_ms - *rec.t_decision_ms;
        break;
      }
    }
    if (!rec.censored && !rec.t_decision_ms) {
      rec.censored = true;  // run ended before the entity reacted
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Summary summarize(const std::vector<ReactionRecord>& records) {
  Summary s;
  s.n_changes = static_cast<long>(records.size());
  std::vector<double> reactions_s;
  std::vector<double> updates_s;
  for (const ReactionRecord& rec : records) {
    if (rec.censored) {
      ++s.n_censored;
      continue;
    }
    if (rec.reaction_ms) reactions_s.push_back(*rec.reaction_ms / 1000.0);
    if (rec.update_ms) updates_s.push_back(*rec.update_ms / 1000.0);
  }
  s.has_reactions = !reactions_s.empty();
  s.n_updates = static_cast<long>(updates_s.size());
  stats(reactions_s, s.mean_reaction_s, s.stddev_reaction_s);
  stats(updates_s, s.mean_update_s, s.stddev_update_s);
  return s;
}

std::string records_to_csv(const std::vector<ReactionRecord>& records) {
  std::ostringstream os;
  os << "scenario,topology,estimator,report_period_ms,change_idx,t_change_ms,"
        "t_decision_ms,reaction_ms,t_received_ms,update_ms,level_from,level_to,"
        "censored\n";
  for (const ReactionRecord& rec : records) {
    os << rec.scenario << ',' << rec.topology << ',' << rec.estimator << ','
       << format_ms(rec.report_period_ms) << ',' << rec.change_idx << ','
       << format_ms(rec.t_change_ms) << ',' << opt_ms(rec.t_decision_ms) << ','
       << opt_ms(rec.reaction_ms) << ',' << opt_ms(rec.t_received_ms) << ','
       << opt_ms(rec.update_ms) << ',' << to_string(rec.level_from) << ','
       << to_string(rec.level_to) << ',' << (rec.censored ? '1' : '0') << '\n';
  }
  return os.str();
}

void write_csv(const std::vector<ReactionRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << records_to_csv(records);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_summary_table(
    const std::vector<std::pair<std::string, Summary>>& rows) {
  size_t name_w = 8;
  for (const auto& [name, s] : rows) name_w = std::max(name_w, name.size());
  std::ostringstream os;
  os << std::string(name_w, ' ')
     << "  reaction mean (s)  reaction stddev (s)  update mean (s)  "
        "update stddev (s)  n  censored\n";
  for (const auto& [name, s] : rows) {
    os << name << std::string(name_w - name.size(), ' ') << "  ";
    if (!s.has_reactions) {
      os << "no reactions (n=" << s.n_changes << ", censored=" << s.n_censored << ")\n";
      continue;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%17s  %19s  %15s  %17s  %ld  %ld",
                  fixed3(s.mean_reaction_s).c_str(), fixed3(s.stddev_reaction_s).c_str(),
                  fixed3(s.mean_update_s).c_str(), fixed3(s.stddev_update_s).c_str(),
                  s.n_changes, s.n_censored);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace qoslab
