#include "qoslab/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qoslab {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Meta: return "Meta";
    case TraceKind::ShapingChange: return "ShapingChange";
    case TraceKind::ReportDue: return "ReportDue";
    case TraceKind::ReportDelivery: return "ReportDelivery";
    case TraceKind::DataChannelDelivery: return "DataChannelDelivery";
    case TraceKind::Decision: return "Decision";
    case TraceKind::FrameEmit: return "FrameEmit";
    case TraceKind::FrameArrival: return "FrameArrival";
    case TraceKind::PacketDrop: return "PacketDrop";
    case TraceKind::SimEnd: return "SimEnd";
  }
  return "?";
}

static TraceKind kind_from_string(const std::string& s) {
  static const std::pair<const char*, TraceKind> table[] = {
      {"Meta", TraceKind::Meta},
      {"ShapingChange", TraceKind::ShapingChange},
      {"ReportDue", TraceKind::ReportDue},
      {"ReportDelivery", TraceKind::ReportDelivery},
      {"DataChannelDelivery", TraceKind::DataChannelDelivery},
      {"Decision", TraceKind::Decision},
      {"FrameEmit", TraceKind::FrameEmit},
      {"FrameArrival", TraceKind::FrameArrival},
      {"PacketDrop", TraceKind::PacketDrop},
      {"SimEnd", TraceKind::SimEnd},
  };
  for (const auto& [name, kind] : table) {
    if (s == name) return kind;
  }
  throw std::runtime_error("trace: unknown event kind '" + s + "'");
}

std::string format_ms(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

const std::string* TraceEvent::find(const std::string& key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

double TraceEvent::num(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) {
    throw std::runtime_error(std::string("trace: missing field '") + key +
                             "' in " + to_string(kind) + " event");
  }
  return std::stod(*v);
}

void EventTrace::write(std::ostream& os) const {
  for (const TraceEvent& ev : events) {
    os << format_ms(ev.time_ms) << '\t' << qoslab::to_string(ev.kind);
    for (const auto& [k, v] : ev.fields) {
      os << '\t' << k << '=' << v;
    }
    os << '\n';
  }
}

std::string EventTrace::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

EventTrace EventTrace::parse(std::istream& is) {
  EventTrace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    TraceEvent ev;
    std::istringstream ls(line);
    std::string token;
    if (!std::getline(ls, token, '\t')) continue;
    ev.time_ms = std::stod(token);
    if (!std::getline(ls, token, '\t')) {
      throw std::runtime_error("trace: line without event kind");
    }
    ev.kind = kind_from_string(token);
    while (std::getline(ls, token, '\t')) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("trace: malformed field '" + token + "'");
      }
      ev.fields.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    trace.events.push_back(std::move(ev));
  }
  return trace;
}

EventTrace EventTrace::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

}  // namespace qoslab
