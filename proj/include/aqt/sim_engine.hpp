#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqt/adversary.hpp"
#include "aqt/errors.hpp"
#include "aqt/network.hpp"
#include "aqt/strategies.hpp"

namespace aqt {

struct Move {
  Step step = 0;
  EdgeIndex edge = 0;
  PacketId packet = 0;
  bool pass_through = false;  // held packet crossing an idle edge
  friend bool operator==(const Move&, const Move&) = default;
};

struct StepRecord {
  Step step = 0;
  std::int64_t total_in_system = 0;  // end of step
  std::int64_t injections = 0;
  std::int64_t deliveries = 0;
  std::int64_t max_queue_len = 0;                // end of step, over all edges
  std::vector<std::uint32_t> queue_lengths;      // end of step, per edge
  std::vector<Move> moves;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct PacketRecord {
  PacketId id = 0;
  Step injected_at = 0;
  std::optional<Step> delivered_at;
  std::size_t path_len = 0;

  // delivered_at - injected_at + 1; a packet delivered in its injection step
  // has system time 1.
  std::optional<Step> system_time() const {
    if (!delivered_at) return std::nullopt;
    return *delivered_at - injected_at + 1;
  }
  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct Trace {
  std::vector<StepRecord> steps;
  std::vector<PacketRecord> packets;
  bool truncated = false;  // cut at max_steps with work outstanding

  std::int64_t max_queue_len() const {
    std::int64_t m = 0;
    for (const auto& s : steps) m = std::max(m, s.max_queue_len);
    return m;
  }
  std::optional<Step> max_system_time() const {
    std::optional<Step> m;
    for (const auto& p : packets)
      if (auto st = p.system_time()) m = std::max(m.value_or(0), *st);
    return m;
  }
  friend bool operator==(const Trace&, const Trace&) = default;
};

namespace detail {

// One greedy selection per non-empty queue. Returns (edge, queue position).
inline std::vector<std::pair<EdgeIndex, std::size_t>> select_all(
    Discipline discipline, const std::vector<std::vector<PacketId>>& queues,
    const std::vector<Packet>& packets) {
  std::vector<std::pair<EdgeIndex, std::size_t>> picks;
  std::vector<const Packet*> view;
  for (EdgeIndex e = 0; e < queues.size(); ++e) {
    if (queues[e].empty()) continue;
    view.clear();
    for (const PacketId id : queues[e]) view.push_back(&packets[id]);
    picks.emplace_back(e, select(discipline, view));
  }
  return picks;
}

// Removes the picked packets from their queues and advances them one hop.
// Returns the moves; delivered packets get delivered_at = now, the rest are
// appended to their next edge's queue in `next_queues` with arrival now+1.
inline std::vector<Move> transmit(const std::vector<std::pair<EdgeIndex, std::size_t>>& picks,
                                  std::vector<std::vector<PacketId>>& queues,
                                  std::vector<std::vector<PacketId>>& next_queues,
                                  std::vector<Packet>& packets, Step now, bool pass_through,
                                  std::int64_t& deliveries) {
  std::vector<Move> moves;
  std::vector<PacketId> moved;
  for (const auto& [e, pos] : picks) {
    const PacketId id = queues[e][pos];
    queues[e].erase(queues[e].begin() + static_cast<std::ptrdiff_t>(pos));
    moves.push_back({now, e, id, pass_through});
    moved.push_back(id);
  }
  for (const PacketId id : moved) {
    Packet& p = packets[id];
    ++p.hops_done;
    if (p.hops_done == p.path.length()) {
      p.delivered_at = now;
      ++deliveries;
    } else {
      p.arrived_in_queue_at = now + 1;
      next_queues[p.current_edge()].push_back(id);
    }
  }
  return moves;
}

inline std::vector<PacketRecord> packet_records(const std::vector<Packet>& packets) {
  std::vector<PacketRecord> out;
  out.reserve(packets.size());
  for (const auto& p : packets) out.push_back({p.id, p.injected_at, p.delivered_at, p.path.length()});
  return out;
}

}  // namespace detail

// Synchronous store-and-forward executor. Within step t: the adversary
// injects (packets join their first edge's queue and may move in step t),
// every non-empty queue forwards one packet chosen by the discipline, and all
// forwarded packets cross simultaneously, becoming eligible at their next
// edge in step t+1.
class Simulator {
 public:
  Simulator(const Network& net, Discipline discipline)
      : net_(&net), discipline_(discipline), queues_(net.edge_count()) {}

  Step now() const { return now_; }
  bool empty() const { return in_system_ == 0; }
  const std::vector<Packet>& packets() const { return packets_; }
  const std::vector<std::vector<PacketId>>& queues() const { return queues_; }

  StepRecord step(Adversary& adversary) {
    StepRecord rec;
    rec.step = now_;
    for (auto& path : adversary.inject(now_)) {
      if (!net_->validate_path(path))
        throw ValidationError("adversary injected invalid path " + net_->describe(path));
      const auto id = static_cast<PacketId>(packets_.size());
      queues_[path.front()].push_back(id);
      packets_.push_back(Packet{id, now_, std::move(path), 0, now_, std::nullopt});
      ++rec.injections;
    }
    const auto picks = detail::select_all(discipline_, queues_, packets_);
    rec.moves = detail::transmit(picks, queues_, queues_, packets_, now_, false, rec.deliveries);

    in_system_ += rec.injections - rec.deliveries;
    delivered_ += rec.deliveries;
    rec.queue_lengths.resize(queues_.size());
    std::int64_t queued = 0;
    for (std::size_t e = 0; e < queues_.size(); ++e) {
      rec.queue_lengths[e] = static_cast<std::uint32_t>(queues_[e].size());
      rec.max_queue_len = std::max<std::int64_t>(rec.max_queue_len, queues_[e].size());
      queued += static_cast<std::int64_t>(queues_[e].size());
    }
    rec.total_in_system = in_system_;
    if (static_cast<std::int64_t>(packets_.size()) != queued + delivered_)
      throw InvariantViolation("conservation broken at step " + std::to_string(now_));
    ++now_;
    return rec;
  }

 private:
  const Network* net_;
  Discipline discipline_;
  std::vector<std::vector<PacketId>> queues_;
  std::vector<Packet> packets_;
  Step now_ = 1;
  std::int64_t in_system_ = 0;
  std::int64_t delivered_ = 0;
};

// Runs until max_steps, or until the system is empty and the adversary has
// nothing left to inject.
inline Trace run(const Network& net, Discipline discipline, Adversary& adversary, Step max_steps) {
  if (max_steps < 1) throw ValidationError("run: max_steps must be >= 1");
  Simulator sim(net, discipline);
  Trace trace;
  bool finished = false;
  while (sim.now() <= max_steps) {
    const Step t = sim.now();
    trace.steps.push_back(sim.step(adversary));
    if (sim.empty() && adversary.exhausted_after(t)) {
      finished = true;
      break;
    }
  }
  trace.truncated = !finished;
  trace.packets = detail::packet_records(sim.packets());
  return trace;
}

}  // namespace aqt
