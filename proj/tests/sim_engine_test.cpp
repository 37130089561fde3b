#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "aqt/sim_engine.hpp"
#include "oracles.hpp"

using namespace aqt;

TEST(Simulator, UnobstructedPacketAdvancesOneEdgePerStep) {
  const auto line = make_line(2);
  BurstAdversary adv(line, {PacketPath{0, 1}}, 1);
  const auto trace = run(line, Discipline::FIFO, adv, 10);
  ASSERT_EQ(trace.packets.size(), 1u);
  EXPECT_EQ(trace.packets[0].delivered_at, Step{2});
  EXPECT_EQ(trace.packets[0].system_time(), Step{2});
  EXPECT_FALSE(trace.truncated);
}

TEST(Simulator, UnitCapacitySerializesSharedEdge) {
  const auto line = make_line(1);
  BurstAdversary adv(line, {PacketPath{0}, PacketPath{0}}, 2);
  const auto trace = run(line, Discipline::FIFO, adv, 10);
  ASSERT_EQ(trace.packets.size(), 2u);
  EXPECT_EQ(trace.packets[0].delivered_at, Step{1});
  EXPECT_EQ(trace.packets[1].delivered_at, Step{2});
}

TEST(Simulator, BurstOnLineDrainsWithinBPlusD) {
  const auto line = make_line(4);
  const PacketPath full{0, 1, 2, 3};
  for (const auto d : kAllDisciplines) {
    BurstAdversary adv(line, {full, full, full, full}, 4);
    const auto trace = run(line, d, adv, 100);
    Step last = 0;
    for (const auto& p : trace.packets) last = std::max(last, *p.delivered_at);
    EXPECT_LE(last, 8) << to_string(d);
    EXPECT_EQ(last, 7) << to_string(d);  // pipeline: b + d - 1
  }
}

TEST(Simulator, EmptyAdversaryStopsAfterFirstStep) {
  const auto line = make_line(3);
  ScriptedAdversary adv({}, Rate(1, 2), 1);
  const auto trace = run(line, Discipline::FIFO, adv, 50);
  EXPECT_EQ(trace.steps.size(), 1u);
  EXPECT_TRUE(trace.packets.empty());
  EXPECT_FALSE(trace.truncated);
}

TEST(Simulator, SaturatedLineStaysBounded) {
  const auto line = make_line(4);
  SaturatingAdversary adv(line, {0, 1, 2, 3}, Rate(1, 2), 1);
  const auto trace = run(line, Discipline::FIFO, adv, 2000);
  EXPECT_TRUE(trace.truncated);
  ASSERT_EQ(trace.steps.size(), 2000u);
  std::int64_t first = 0, second = 0;
  for (std::size_t k = 0; k < 1000; ++k) first = std::max(first, trace.steps[k].max_queue_len);
  for (std::size_t k = 1000; k < 2000; ++k) second = std::max(second, trace.steps[k].max_queue_len);
  EXPECT_LE(second, first + 1);
}

TEST(Simulator, DeterministicReplay) {
  const auto line = make_line(4);
  auto once = [&] {
    SaturatingAdversary adv(line, {0, 1, 2, 3}, Rate(3, 5), 3);
    return run(line, Discipline::LIS, adv, 500);
  };
  EXPECT_EQ(once(), once());
}

TEST(Simulator, RejectsBadMaxSteps) {
  const auto line = make_line(1);
  ScriptedAdversary adv({}, Rate(1, 2), 1);
  EXPECT_THROW(run(line, Discipline::FIFO, adv, 0), ValidationError);
}

// Random scripts on random trees: unit capacity, work conservation, system
// time >= path length and FIFO order preservation per queue.
TEST(Simulator, InvariantsOnRandomScripts) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto net = make_tree(oracle::random_parents(rng, 1 + rng() % 6), rng() % 2 == 0);
    const auto paths = enumerate_paths(net);
    std::vector<InjectionEvent> events;
    for (Step t = 1; t <= 30; ++t)
      while (rng() % 4 == 0) events.push_back({t, paths[rng() % paths.size()]});
    for (const auto d : kAllDisciplines) {
      ScriptedAdversary adv(events, Rate(1, 2), 1000);
      const auto trace = run(net, d, adv, 5000);
      ASSERT_FALSE(trace.truncated);

      std::int64_t before = 0;
      // (edge, packet) -> step of entering the queue, and the departure order.
      std::map<std::pair<EdgeIndex, PacketId>, Step> entered;
      std::map<EdgeIndex, std::vector<PacketId>> departures;
      for (const auto& s : trace.steps) {
        std::set<EdgeIndex> used;
        for (const auto& m : s.moves) EXPECT_TRUE(used.insert(m.edge).second);
        if (before + s.injections > 0) {
          EXPECT_FALSE(s.moves.empty());
        }
        before = s.total_in_system;
        for (const auto& m : s.moves) departures[m.edge].push_back(m.packet);
      }
      for (const auto& p : trace.packets) {
        ASSERT_TRUE(p.delivered_at);
        EXPECT_GE(*p.system_time(), static_cast<Step>(p.path_len));
      }
      if (d != Discipline::FIFO) continue;
      // Entry step into each queue: first edge at injection, later edges one
      // step after crossing the previous one.
      std::vector<Step> last_cross(trace.packets.size(), 0);
      for (const auto& s : trace.steps) {
        for (const auto& m : s.moves) {
          const Step entry = last_cross[m.packet] ? last_cross[m.packet] + 1 : trace.packets[m.packet].injected_at;
          entered[{m.edge, m.packet}] = entry;
          last_cross[m.packet] = s.step;
        }
      }
      for (const auto& [edge, order] : departures) {
        for (std::size_t k = 1; k < order.size(); ++k) {
          const Step a = entered[{edge, order[k - 1]}];
          const Step b = entered[{edge, order[k]}];
          EXPECT_TRUE(a < b || (a == b && order[k - 1] < order[k]));
        }
      }
    }
  }
}
