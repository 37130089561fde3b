#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqt/adversary.hpp"
#include "aqt/errors.hpp"
#include "aqt/network.hpp"
#include "aqt/sim_engine.hpp"
#include "aqt/strategies.hpp"

namespace aqt {

// Statistics of one routing phase. Phase 0 is the empty startup phase.
struct PhaseRecord {
  std::int64_t phase_index = 0;
  std::int64_t packet_count = 0;
  Step started_at = 1;       // first step in which the phase routes
  std::int64_t duration = 0;  // steps until its last delivery; 0 when empty
  bool completed = false;
  CongestionDilation cd;      // of the remaining paths at phase start; {0,0} when empty
  std::int64_t max_active_queue_len = 0;
  std::vector<PacketId> members;  // ascending id

  std::int64_t lemma1_bound() const { return cd.n * cd.d; }
  friend bool operator==(const PhaseRecord&, const PhaseRecord&) = default;
};

struct IntervalTrace {
  Trace trace;
  std::vector<PhaseRecord> phases;
  // Phase each packet was assigned to at injection (index by packet id).
  std::vector<std::int64_t> assigned_phase;
  friend bool operator==(const IntervalTrace&, const IntervalTrace&) = default;
};

// Interval strategy: every edge owns an active queue and a holding queue.
// The active phase is routed as a static instance under the inner discipline
// while all new injections wait in holding queues. When the last active
// packet is delivered the holding queues become the next phase.
//
// Sub-order of step t:
//   1. injections join the holding queue of their first edge;
//   2. active packets advance under the inner discipline;
//   3. with the pass-through improvement, the front holding packet of every
//      edge that no active packet still needs crosses it (one hop per step)
//      and joins the holding queue at the next edge;
//   4. if no active packet remains, the phase closes and, when holding is
//      non-empty, the holding queues (sorted by packet id) become the active
//      queues of a phase starting at t+1.
class IntervalSimulator {
 public:
  IntervalSimulator(const Network& net, Discipline inner, bool improvement)
      : net_(&net),
        inner_(inner),
        improvement_(improvement),
        active_(net.edge_count()),
        holding_(net.edge_count()),
        demand_(net.edge_count(), 0) {
    // Phase 0 holds no packets and terminates immediately.
    PhaseRecord startup;
    startup.completed = true;
    phases_.push_back(startup);
  }

  Step now() const { return now_; }
  bool empty() const { return in_system_ == 0; }
  const std::vector<Packet>& packets() const { return packets_; }
  const std::vector<PhaseRecord>& phases() const { return phases_; }
  const std::vector<std::int64_t>& assigned_phase() const { return assigned_phase_; }
  const std::vector<std::vector<PacketId>>& active_queues() const { return active_; }
  const std::vector<std::vector<PacketId>>& holding_queues() const { return holding_; }

  StepRecord step(Adversary& adversary) {
    StepRecord rec;
    rec.step = now_;
    const std::int64_t next_phase = phases_.back().phase_index + 1;
    for (auto& path : adversary.inject(now_)) {
      if (!net_->validate_path(path))
        throw ValidationError("adversary injected invalid path " + net_->describe(path));
      const auto id = static_cast<PacketId>(packets_.size());
      holding_[path.front()].push_back(id);
      packets_.push_back(Packet{id, now_, std::move(path), 0, now_, std::nullopt});
      assigned_phase_.push_back(next_phase);
      ++rec.injections;
    }

    // Idle edges are judged before anything moves, so an edge an active
    // packet crosses this step is never idle. With no phase running (startup,
    // or an idle gap) held packets wait for the next phase instead.
    std::vector<std::pair<EdgeIndex, std::size_t>> pass_picks;
    if (improvement_ && !phases_.back().completed) {
      for (EdgeIndex e = 0; e < holding_.size(); ++e)
        if (demand_[e] == 0 && !holding_[e].empty()) pass_picks.emplace_back(e, 0);
    }

    std::int64_t active_delivered = 0;
    const auto picks = detail::select_all(inner_, active_, packets_);
    rec.moves = detail::transmit(picks, active_, active_, packets_, now_, false, active_delivered);
    for (const auto& m : rec.moves) --demand_[m.edge];
    active_remaining_ -= active_delivered;

    std::int64_t pass_delivered = 0;
    if (!pass_picks.empty()) {
      for (const auto& [e, pos] : pass_picks)
        for (const auto& m : rec.moves)
          if (m.edge == e)
            throw InvariantViolation("pass-through collided with the active phase on edge '" +
                                     net_->edge(e).id + "'");
      auto extra = detail::transmit(pass_picks, holding_, holding_, packets_, now_, true, pass_delivered);
      rec.moves.insert(rec.moves.end(), extra.begin(), extra.end());
    }
    rec.deliveries = active_delivered + pass_delivered;

    auto& current = phases_.back();
    for (const auto& q : active_)
      current.max_active_queue_len = std::max<std::int64_t>(current.max_active_queue_len, q.size());

    if (active_remaining_ == 0) {
      if (!current.completed) close_phase(current);
      if (std::any_of(holding_.begin(), holding_.end(), [](const auto& q) { return !q.empty(); }))
        start_phase();
    }

    in_system_ += rec.injections - rec.deliveries;
    delivered_ += rec.deliveries;
    rec.queue_lengths.resize(active_.size());
    std::int64_t queued = 0;
    for (std::size_t e = 0; e < active_.size(); ++e) {
      const auto len = active_[e].size() + holding_[e].size();
      rec.queue_lengths[e] = static_cast<std::uint32_t>(len);
      rec.max_queue_len = std::max<std::int64_t>(rec.max_queue_len, len);
      queued += static_cast<std::int64_t>(len);
    }
    rec.total_in_system = in_system_;
    if (static_cast<std::int64_t>(packets_.size()) != queued + delivered_)
      throw InvariantViolation("conservation broken at step " + std::to_string(now_));
    ++now_;
    return rec;
  }

 private:
  void close_phase(PhaseRecord& phase) {
    phase.completed = true;
    phase.duration = now_ - phase.started_at + 1;
    if (phase.duration > phase.lemma1_bound())
      throw InvariantViolation("phase " + std::to_string(phase.phase_index) + " took " +
                               std::to_string(phase.duration) + " steps, above n*d = " +
                               std::to_string(phase.lemma1_bound()));
    if (phase.duration < phase.cd.d)
      throw InvariantViolation("phase " + std::to_string(phase.phase_index) +
                               " finished faster than its dilation");
  }

  void start_phase() {
    PhaseRecord phase;
    phase.phase_index = phases_.back().phase_index + 1;
    phase.started_at = now_ + 1;
    std::vector<PacketPath> remaining;
    for (std::size_t e = 0; e < holding_.size(); ++e) {
      auto& src = holding_[e];
      std::sort(src.begin(), src.end());
      for (const PacketId id : src) {
        Packet& p = packets_[id];
        p.arrived_in_queue_at = now_ + 1;
        phase.members.push_back(id);
        std::vector<EdgeIndex> rest(p.path.begin() + static_cast<std::ptrdiff_t>(p.hops_done), p.path.end());
        for (const EdgeIndex r : rest) ++demand_[r];
        remaining.emplace_back(std::move(rest));
      }
      active_[e] = std::move(src);
      src.clear();
      phase.max_active_queue_len = std::max<std::int64_t>(phase.max_active_queue_len, active_[e].size());
    }
    std::sort(phase.members.begin(), phase.members.end());
    phase.packet_count = static_cast<std::int64_t>(phase.members.size());
    phase.cd = congestion_dilation(remaining);
    active_remaining_ = phase.packet_count;
    phases_.push_back(std::move(phase));
  }

  const Network* net_;
  Discipline inner_;
  bool improvement_;
  std::vector<std::vector<PacketId>> active_;
  std::vector<std::vector<PacketId>> holding_;
  // Remaining active-phase crossings still needed per edge.
  std::vector<std::int64_t> demand_;
  std::vector<Packet> packets_;
  std::vector<std::int64_t> assigned_phase_;
  std::vector<PhaseRecord> phases_;
  std::int64_t active_remaining_ = 0;
  Step now_ = 1;
  std::int64_t in_system_ = 0;
  std::int64_t delivered_ = 0;
};

// Runs until max_steps, or until the system is empty and the adversary has
// nothing left to inject. Throws InvariantViolation if a phase exceeds its
// n*d bound.
inline IntervalTrace run_interval(const Network& net, Discipline inner, Adversary& adversary,
                                  Step max_steps, bool improvement) {
  if (max_steps < 1) throw ValidationError("run_interval: max_steps must be >= 1");
  IntervalSimulator sim(net, inner, improvement);
  IntervalTrace out;
  bool finished = false;
  while (sim.now() <= max_steps) {
    const Step t = sim.now();
    out.trace.steps.push_back(sim.step(adversary));
    if (sim.empty() && adversary.exhausted_after(t)) {
      finished = true;
      break;
    }
  }
  out.trace.truncated = !finished;
  out.trace.packets = detail::packet_records(sim.packets());
  out.phases = sim.phases();
  out.assigned_phase = sim.assigned_phase();
  return out;
}

}  // namespace aqt
