#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qoslab {

enum class TraceKind {
  Meta,
  ShapingChange,
  ReportDue,
  ReportDelivery,
  DataChannelDelivery,
  Decision,
  FrameEmit,
  FrameArrival,
  PacketDrop,
  SimEnd,
};

const char* to_string(TraceKind kind);

// One timestamped record. Fields are ordered key=value pairs; serialization
// is line-oriented: time_ms<TAB>kind<TAB>key=value<TAB>...
struct TraceEvent {
  double time_ms = 0.0;
  TraceKind kind = TraceKind::Meta;
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string* find(const std::string& key) const;
  double num(const std::string& key) const;  // throws if missing/non-numeric
};

struct EventTrace {
  std::vector<TraceEvent> events;

  void write(std::ostream& os) const;
  std::string to_string() const;
  static EventTrace parse(std::istream& is);
  static EventTrace parse_string(const std::string& text);
};

// Canonical millisecond formatting used everywhere a time or duration is
// serialized, so identical runs produce byte-identical files.
std::string format_ms(double value);

}  // namespace qoslab
