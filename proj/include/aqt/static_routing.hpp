#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqt/adversary.hpp"
#include "aqt/errors.hpp"
#include "aqt/network.hpp"
#include "aqt/sim_engine.hpp"
#include "aqt/strategies.hpp"

namespace aqt {

// All packets present at step 1, none injected later.
struct StaticInstance {
  const Network* network = nullptr;
  std::vector<PacketPath> paths;
  CongestionDilation cd;

  static StaticInstance make(const Network& net, std::vector<PacketPath> paths) {
    for (const auto& p : paths)
      if (!net.validate_path(p)) throw ValidationError("static instance: invalid path " + net.describe(p));
    StaticInstance inst{&net, std::move(paths), {}};
    if (!inst.paths.empty()) inst.cd = congestion_dilation(inst.paths);
    return inst;
  }
};

// Packet `packet` (index into the instance) crosses its next edge `edge` in
// step `step`.
struct ScheduledMove {
  Step step = 1;
  EdgeIndex edge = 0;
  std::size_t packet = 0;
  friend bool operator==(const ScheduledMove&, const ScheduledMove&) = default;
};

using Schedule = std::vector<ScheduledMove>;

class InfeasibleSchedule : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Last step at which anything moves; 0 for an empty instance. Throws
// InfeasibleSchedule naming the first violated constraint: moves must follow
// each path in order, one hop per packet per step, one packet per edge per
// step, and every packet must reach its destination.
inline Step makespan_of(const StaticInstance& inst, const Schedule& schedule) {
  Schedule moves = schedule;
  std::stable_sort(moves.begin(), moves.end(),
                   [](const auto& a, const auto& b) { return a.step < b.step; });
  std::vector<std::size_t> hops(inst.paths.size(), 0);
  std::vector<Step> last_move(inst.paths.size(), 0);
  std::map<std::pair<Step, EdgeIndex>, std::size_t> edge_use;
  Step makespan = 0;
  for (const auto& m : moves) {
    const auto where = "step " + std::to_string(m.step) + ": ";
    if (m.step < 1) throw InfeasibleSchedule(where + "steps start at 1");
    if (m.packet >= inst.paths.size())
      throw InfeasibleSchedule(where + "unknown packet " + std::to_string(m.packet));
    const auto& path = inst.paths[m.packet];
    const auto k = hops[m.packet];
    if (k >= path.length() || path[k] != m.edge)
      throw InfeasibleSchedule(where + "packet " + std::to_string(m.packet) +
                               " does not follow its path");
    if (last_move[m.packet] >= m.step)
      throw InfeasibleSchedule(where + "packet " + std::to_string(m.packet) + " moves twice");
    if (auto [it, fresh] = edge_use.emplace(std::pair{m.step, m.edge}, m.packet); !fresh)
      throw InfeasibleSchedule(where + "edge #" + std::to_string(m.edge) + " carries packets " +
                               std::to_string(it->second) + " and " + std::to_string(m.packet));
    ++hops[m.packet];
    last_move[m.packet] = m.step;
    makespan = std::max(makespan, m.step);
  }
  for (std::size_t p = 0; p < inst.paths.size(); ++p)
    if (hops[p] != inst.paths[p].length())
      throw InfeasibleSchedule("packet " + std::to_string(p) + " never reaches its destination");
  return makespan;
}

// Static-routing time bound n*d.
inline std::int64_t lemma1_bound(std::int64_t n, std::int64_t d) {
  if (n < 1 || d < 1)
    throw DomainError("lemma1_bound: n and d must be >= 1 (got n=" + std::to_string(n) +
                      ", d=" + std::to_string(d) + ")");
  return n * d;
}

struct GreedyResult {
  Schedule schedule;
  Step makespan = 0;
};

// Routes the instance greedily with the discipline: a burst at step 1
// through the simulator, moves read back from its trace. Packet ids follow
// instance order.
inline GreedyResult greedy_schedule(const StaticInstance& inst, Discipline discipline) {
  GreedyResult out;
  if (inst.paths.empty()) return out;
  BurstAdversary burst(*inst.network, inst.paths, std::max<std::int64_t>(inst.cd.n, 1));
  const Trace trace = run(*inst.network, discipline, burst,
                          lemma1_bound(inst.cd.n, inst.cd.d) + 1);
  for (const auto& s : trace.steps)
    for (const auto& m : s.moves) out.schedule.push_back({m.step, m.edge, static_cast<std::size_t>(m.packet)});
  out.makespan = trace.steps.empty() ? 0 : trace.steps.back().step;
  if (trace.truncated || out.makespan > lemma1_bound(inst.cd.n, inst.cd.d))
    throw InvariantViolation("greedy " + std::string(to_string(discipline)) + " makespan exceeds n*d = " +
                             std::to_string(lemma1_bound(inst.cd.n, inst.cd.d)));
  return out;
}

// Minimum makespan over all feasible schedules, or nullopt if it exceeds
// `cap`. Depth-first branch and bound over per-step move sets with iterative
// deepening on the makespan. The per-state lower bound (longest remaining
// path, heaviest remaining edge load) is admissible, and states already shown
// infeasible within a budget are memoised. Exponential; meant for a handful of
// packets.
inline std::optional<Step> bruteforce_optimal_makespan(const StaticInstance& inst, Step cap) {
  const std::size_t count = inst.paths.size();
  if (count == 0) return Step{0};
  if (count > 16) throw ValidationError("bruteforce_optimal_makespan: more than 16 packets");

  using State = std::vector<std::uint8_t>;  // hops done per packet
  const std::size_t edge_slots = inst.network->edge_count();

  auto lower_bound = [&](const State& s) {
    Step lb = 0;
    std::vector<Step> load(edge_slots, 0);
    for (std::size_t p = 0; p < count; ++p) {
      const auto& path = inst.paths[p];
      lb = std::max<Step>(lb, static_cast<Step>(path.length() - s[p]));
      for (std::size_t k = s[p]; k < path.length(); ++k) lb = std::max(lb, ++load[path[k]]);
    }
    return lb;
  };

  auto key_of = [](const State& s) { return std::string(s.begin(), s.end()); };
  // Largest budget for which the state is known to be unfinishable.
  std::unordered_map<std::string, Step> failed;

  auto search = [&](auto&& self, const State& s, Step budget) -> bool {
    const Step lb = lower_bound(s);
    if (lb == 0) return true;
    if (lb > budget) return false;
    const auto key = key_of(s);
    if (auto it = failed.find(key); it != failed.end() && it->second >= budget) return false;

    std::vector<std::size_t> movable;
    for (std::size_t p = 0; p < count; ++p)
      if (s[p] < inst.paths[p].length()) movable.push_back(p);
    // Enumerate non-empty subsets of movable packets whose next edges are
    // pairwise distinct, larger subsets first.
    const std::size_t m = movable.size();
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) subsets.push_back(mask);
    std::stable_sort(subsets.begin(), subsets.end(), [](std::uint32_t a, std::uint32_t b) {
      return __builtin_popcount(a) > __builtin_popcount(b);
    });
    std::vector<char> edge_taken(edge_slots, 0);
    for (const auto mask : subsets) {
      std::fill(edge_taken.begin(), edge_taken.end(), 0);
      bool ok = true;
      State next = s;
      for (std::size_t j = 0; j < m && ok; ++j) {
        if (!(mask & (1u << j))) continue;
        const std::size_t p = movable[j];
        const EdgeIndex e = inst.paths[p][s[p]];
        if (edge_taken[e]) ok = false;
        edge_taken[e] = 1;
        ++next[p];
      }
      if (ok && self(self, next, budget - 1)) return true;
    }
    auto& known = failed[key];
    known = std::max(known, budget);
    return false;
  };

  const State start(count, 0);
  for (Step budget = lower_bound(start); budget <= cap; ++budget)
    if (search(search, start, budget)) return budget;
  return std::nullopt;
}

}  // namespace aqt
