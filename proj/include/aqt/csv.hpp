#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include "aqt/interval_strategy.hpp"
#include "aqt/sim_engine.hpp"

namespace aqt::csv {

// Shortest round-trip representation, so identical doubles print identically.
inline std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string shortest = buf;
  for (int precision = 1; precision < 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) {
      shortest = buf;
      break;
    }
  }
  return shortest;
}

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << "step,total_in_system,injections,deliveries,max_queue_len\n";
  for (const auto& s : trace.steps)
    out << s.step << ',' << s.total_in_system << ',' << s.injections << ',' << s.deliveries << ','
        << s.max_queue_len << '\n';
}

// Undelivered packets leave delivered_at and system_time empty.
inline void write_packets(std::ostream& out, const Trace& trace) {
  out << "packet_id,injected_at,delivered_at,system_time,path_len\n";
  for (const auto& p : trace.packets) {
    out << p.id << ',' << p.injected_at << ',';
    if (p.delivered_at) out << *p.delivered_at;
    out << ',';
    if (auto st = p.system_time()) out << *st;
    out << ',' << p.path_len << '\n';
  }
}

inline void write_phases(std::ostream& out, const std::vector<PhaseRecord>& phases) {
  out << "phase_index,packet_count,n_i,d_i,duration,lemma1_bound\n";
  for (const auto& ph : phases) {
    if (!ph.completed) continue;
    out << ph.phase_index << ',' << ph.packet_count << ',' << ph.cd.n << ',' << ph.cd.d << ','
        << ph.duration << ',' << ph.lemma1_bound() << '\n';
  }
}

}  // namespace aqt::csv
