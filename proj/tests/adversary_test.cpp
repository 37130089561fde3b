#include <gtest/gtest.h>

#include <random>

#include "aqt/adversary.hpp"
#include "oracles.hpp"

using namespace aqt;

namespace {

std::vector<InjectionEvent> on_edge(std::initializer_list<Step> times) {
  std::vector<InjectionEvent> out;
  for (const Step t : times) out.push_back({t, PacketPath{0}});
  return out;
}

}  // namespace

TEST(Rate, ParsesAndReduces) {
  EXPECT_EQ(Rate::parse("0.5"), Rate(1, 2));
  EXPECT_EQ(Rate::parse("1/2"), Rate(1, 2));
  EXPECT_EQ(Rate::parse(".29"), Rate(29, 100));
  EXPECT_EQ(Rate::from_double(0.29), Rate(29, 100));
  EXPECT_EQ(Rate::from_double(1.0 / 3.0), Rate(1, 3));
  EXPECT_EQ(Rate(29, 100).floor_times(100), 29);
  EXPECT_THROW(Rate::parse("1.5"), ValidationError);
  EXPECT_THROW(Rate::parse("0"), ValidationError);
  EXPECT_THROW(Rate::parse("abc"), ValidationError);
  EXPECT_THROW(Rate::from_double(1.0), ValidationError);
}

TEST(VerifyAdmissible, WindowExamples) {
  const Rate half(1, 2);
  EXPECT_FALSE(verify_admissible(on_edge({1, 2}), half, 1, 2).has_value());

  const auto w = verify_admissible(on_edge({1, 2, 3}), half, 1, 3);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, (WindowViolation{0, 1, 3, 3, 2}));

  EXPECT_FALSE(verify_admissible(std::vector<InjectionEvent>{}, half, 1, 10).has_value());
  EXPECT_THROW(verify_admissible(on_edge({5}), half, 1, 3), ValidationError);
}

TEST(ScriptedAdversary, ReplaysAdmissibleScripts) {
  const auto events = on_edge({1, 2, 4, 6});
  ScriptedAdversary adv(events, Rate(1, 2), 1);
  EXPECT_EQ(collect_events(adv, 10), events);
  EXPECT_TRUE(adv.exhausted_after(6));
  EXPECT_FALSE(adv.exhausted_after(5));
}

TEST(ScriptedAdversary, EmptyScriptInjectsNothing) {
  ScriptedAdversary adv({}, Rate(1, 2), 1);
  EXPECT_TRUE(adv.inject(1).empty());
  EXPECT_TRUE(adv.exhausted_after(1));
}

TEST(ScriptedAdversary, RejectsWithWitness) {
  try {
    ScriptedAdversary adv(on_edge({1, 2, 3}), Rate(1, 2), 1);
    FAIL() << "expected rejection";
  } catch (const InadmissibleScript& e) {
    EXPECT_EQ(e.witness(), (WindowViolation{0, 1, 3, 3, 2}));
  }
  EXPECT_THROW(ScriptedAdversary(on_edge({2, 1}), Rate(1, 2), 1), ValidationError);
}

TEST(BurstAdversary, InjectsEverythingAtStepOne) {
  const auto line = make_line(4);
  const PacketPath full{0, 1, 2, 3};
  BurstAdversary four(line, {full, full, full, full}, 4);
  EXPECT_EQ(four.inject(1).size(), 4u);
  EXPECT_TRUE(four.inject(2).empty());
  EXPECT_TRUE(four.exhausted_after(1));

  BurstAdversary one(line, {full}, 1);
  EXPECT_EQ(one.inject(1).size(), 1u);

  EXPECT_THROW(BurstAdversary(line, {full, full, full}, 2), ValidationError);
  EXPECT_THROW(BurstAdversary(line, {PacketPath{1, 0}}, 2), ValidationError);
}

TEST(SaturatingAdversary, HalfRateUnitBurst) {
  const auto line = make_line(4);
  SaturatingAdversary adv(line, {0, 1, 2, 3}, Rate(1, 2), 1);
  const auto events = collect_events(adv, 1000);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.front().time, 1);
  // Density stays at r + b/T.
  EXPECT_LE(static_cast<double>(events.size()), 0.5 * 1000 + 1);
  EXPECT_GE(static_cast<double>(events.size()), 0.5 * 1000 - 1);
  EXPECT_FALSE(verify_admissible(events, Rate(1, 2), 1, 1000).has_value());
  EXPECT_TRUE(oracle::window_admissible(events, 1, 2, 1, 1000));
}

TEST(SaturatingAdversary, LowRateRespectsCount) {
  const auto line = make_line(2);
  SaturatingAdversary adv(line, {0, 1}, Rate(1, 100), 1);
  const auto events = collect_events(adv, 1000);
  for (Step horizon : {Step{50}, Step{100}, Step{333}, Step{1000}}) {
    std::int64_t within = 0;
    for (const auto& ev : events) within += ev.time <= horizon;
    EXPECT_LE(within, 1 + horizon / 100 + 1);
  }
  EXPECT_TRUE(oracle::window_admissible(events, 1, 100, 1, 1000));
}

TEST(SaturatingAdversary, RequiresPositiveBurst) {
  const auto line = make_line(2);
  EXPECT_THROW(SaturatingAdversary(line, {0, 1}, Rate(1, 2), 0), ValidationError);
}

TEST(SaturatingAdversary, OracleCrossCheck500Steps) {
  const auto line = make_line(3);
  SaturatingAdversary adv(line, {0, 1, 2}, Rate(3, 7), 2);
  const auto events = collect_events(adv, 500);
  EXPECT_FALSE(verify_admissible(events, Rate(3, 7), 2, 500).has_value());
  EXPECT_TRUE(oracle::window_admissible(events, 3, 7, 2, 500));
}

TEST(SaturatingAdversary, DeterministicReplay) {
  const auto line = make_line(2);
  SaturatingAdversary a(line, {0, 1}, Rate(2, 5), 3);
  SaturatingAdversary b(line, {0, 1}, Rate(2, 5), 3);
  EXPECT_EQ(collect_events(a, 300), collect_events(b, 300));
}

// The verifier and the oracle agree on random multi-edge scripts, admissible
// or not.
TEST(VerifyAdmissible, AgreesWithOracleOnRandomScripts) {
  std::mt19937_64 rng(3);
  const auto line = make_line(3);
  const std::vector<PacketPath> paths{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}};
  int rejected = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::int64_t den = 2 + static_cast<std::int64_t>(rng() % 8);
    const std::int64_t num = 1 + static_cast<std::int64_t>(rng() % (den - 1));
    const std::int64_t b = 1 + static_cast<std::int64_t>(rng() % 3);
    const Step horizon = 5 + static_cast<Step>(rng() % 40);
    std::vector<InjectionEvent> events;
    for (Step t = 1; t <= horizon; ++t)
      while (rng() % 3 == 0) events.push_back({t, paths[rng() % paths.size()]});
    const Rate r(num, den);
    const bool ours = !verify_admissible(events, r, b, horizon).has_value();
    EXPECT_EQ(ours, oracle::window_admissible(events, r.numerator(), r.denominator(), b, horizon));
    rejected += !ours;
  }
  EXPECT_GT(rejected, 0);
}
