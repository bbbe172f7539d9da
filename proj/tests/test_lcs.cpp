#include <gtest/gtest.h>

#include "soccerseq/lcs_engine.hpp"

#include <numeric>

using namespace soccerseq;
using namespace soccerseq::lcs;

namespace {

Population strengths(std::initializer_list<double> s) {
  Population p;
  for (double x : s) p.push_back({"#####", 'A', x});
  return p;
}

double mean_tail(const LearningCurve& curve, std::size_t blocks) {
  double sum = 0.0;
  for (std::size_t i = curve.size() - blocks; i < curve.size(); ++i) sum += curve[i].proportion_correct;
  return sum / static_cast<double>(blocks);
}

}  // namespace

TEST(Matching, DontCareAndLength) {
  EXPECT_TRUE(matches("##CCT", "TACCT"));
  EXPECT_FALSE(matches("##CCT", "TACCA"));
  EXPECT_FALSE(matches("#CCT", "TACCT"));
  Population p{{"##CCT", 'G', 1}, {"#####", 'A', 1}, {"A####", 'C', 1}};
  EXPECT_EQ(match_set("TACCT", p), (std::vector<std::size_t>{0, 1}));
}

TEST(BucketBrigade, WinnerPaysPrevious) {
  auto p = strengths({50, 100});
  bucket_brigade_update(p, 1, 0, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(p[1].strength, 90.0);
  EXPECT_DOUBLE_EQ(p[0].strength, 60.0);
}

TEST(BucketBrigade, BidDissipatesWithoutPrevious) {
  auto p = strengths({100});
  TrainStats stats;
  bucket_brigade_update(p, 0, std::nullopt, 0.0, 0.1, &stats);
  EXPECT_DOUBLE_EQ(p[0].strength, 90.0);
  EXPECT_DOUBLE_EQ(stats.dissipated, 10.0);

  auto q = strengths({100});
  bucket_brigade_update(q, 0, std::nullopt, 1000.0, 0.1);
  EXPECT_DOUBLE_EQ(q[0].strength, 1090.0);
}

TEST(BucketBrigade, StrengthsNeverNegative) {
  auto p = strengths({0, 0});
  TrainStats stats;
  bucket_brigade_update(p, 1, 0, -5.0, 0.1, &stats);
  EXPECT_DOUBLE_EQ(p[1].strength, 0.0);
  EXPECT_EQ(stats.clamp_count, 1u);
}

TEST(Selection, RouletteProportionalToBid) {
  auto p = strengths({300, 100});
  std::mt19937_64 rng(9);
  const std::vector<std::size_t> both{0, 1};
  int first = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) first += select_winner(p, both, 0.1, rng) == 0;
  EXPECT_NEAR(first / static_cast<double>(draws), 0.75, 0.02);

  auto zero = strengths({0, 0});
  int z = 0;
  for (int i = 0; i < draws; ++i) z += select_winner(zero, both, 0.1, rng) == 0;
  EXPECT_NEAR(z / static_cast<double>(draws), 0.5, 0.02);
  EXPECT_THROW(select_winner(p, std::vector<std::size_t>{}, 0.1, rng), std::invalid_argument);
}

TEST(Covering, ReplacesWeakestWithMatchingRule) {
  auto p = strengths({10, 1, 40});
  p[0].condition = "AAAAA";
  LcsConfig cfg;
  std::mt19937_64 rng(1);
  const auto slot = cover(p, "TACCT", cfg, rng);
  EXPECT_EQ(slot, 1u);
  EXPECT_TRUE(matches(p[1].condition, "TACCT"));
  EXPECT_DOUBLE_EQ(p[1].strength, 17.0);
  EXPECT_EQ(p.size(), 3u);
}

TEST(Seeding, MotifsAndPatternsBecomeConditions) {
  MinerStats stats;
  stats.goal_motifs.push_back({"xxCCT", mining::MotifLabel::goal, mining::ConfidenceBand::p95});
  stats.patterns = {"CC", "ACGTAC", "CC"};
  const auto pool = seed_conditions(stats, 5);
  EXPECT_EQ(pool, (std::vector<std::string>{"##CCT", "###CC", "CGTAC"}));
}

TEST(Discovery, ReplacesBottomQuarter) {
  LcsConfig cfg;
  cfg.population_size = 8;
  std::mt19937_64 rng(2);
  auto p = random_population(cfg, rng);
  for (std::size_t i = 0; i < p.size(); ++i) p[i].strength = 10.0 * static_cast<double>(i + 1);
  const auto replaced = ga_discover(p, {}, cfg, rng);
  EXPECT_EQ(replaced, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.size(), 8u);
  for (auto i : replaced) {
    EXPECT_EQ(p[i].condition.size(), 5u);
    EXPECT_GE(p[i].strength, 30.0);
    EXPECT_NE(kActions.find(p[i].action), std::string_view::npos);
  }
}

TEST(Oracle, CorrectActionTable) {
  EXPECT_EQ(OracleEnvironment::correct_action("TCCCT"), 'G');
  EXPECT_EQ(OracleEnvironment::correct_action("--CCT"), 'G');
  EXPECT_EQ(OracleEnvironment::correct_action("GGGGA"), 'C');
  EXPECT_EQ(OracleEnvironment::correct_action("GGGGC"), 'A');
  EXPECT_EQ(OracleEnvironment::correct_action("AAAAG"), 'T');
  EXPECT_EQ(OracleEnvironment::correct_action("AAAA-"), 'A');
}

TEST(Train, LearnsConstantEnvironment) {
  ConstantEnvironment env('T', 50.0, 5, 3);
  LcsConfig cfg;
  cfg.max_iterations = 24000;
  const auto r = train(env, cfg);
  ASSERT_EQ(r.curve.size(), 24u);
  EXPECT_GT(mean_tail(r.curve, 3), r.curve.front().proportion_correct + 0.2);
  EXPECT_EQ(r.stats.ga_iterations, (std::vector<int>{4000, 8000, 12000, 16000, 20000, 24000}));
}

TEST(Train, BeatsRandomOnOracle) {
  OracleEnvironment env({5, 0.3, 1, 50.0, 1});
  LcsConfig cfg;
  cfg.max_iterations = 50000;
  const auto r = train(env, cfg);
  EXPECT_GT(mean_tail(r.curve, 5), 0.45);
}

TEST(Train, DeterministicForSeed) {
  LcsConfig cfg;
  cfg.max_iterations = 3000;
  OracleEnvironment e1({5, 0.3, 10, 50.0, 4}), e2({5, 0.3, 10, 50.0, 4});
  EXPECT_EQ(train(e1, cfg).population, train(e2, cfg).population);
}

TEST(MatchReplay, GoalStepEarnsWinReward) {
  std::vector<mining::AnnotatedSequence> seqs{{"p", "-AC-G", {{5, mining::MotifLabel::goal}}}};
  MatchEnvironment env(seqs, 3, 1000.0, 50.0);
  EXPECT_EQ(env.context(), "---");
  auto r = env.act('A');
  EXPECT_TRUE(r.correct);
  EXPECT_DOUBLE_EQ(r.reward, 50.0);
  EXPECT_EQ(env.context(), "--A");
  EXPECT_FALSE(env.act('T').correct);
  EXPECT_EQ(env.context(), "AC-");
  r = env.act('G');
  EXPECT_DOUBLE_EQ(r.reward, 1000.0);
  EXPECT_TRUE(r.episode_end);
  EXPECT_THROW(MatchEnvironment({{"q", "---", {}}}, 3, 1000.0, 50.0), std::invalid_argument);
}

TEST(LcsConfig, Validation) {
  LcsConfig c;
  c.reward_play = 2000.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
