#include <gtest/gtest.h>

#include "soccerseq/fca_engine.hpp"

#include <random>

using namespace soccerseq::fca;

namespace {

FuzzyState<double> vec(std::initializer_list<double> v) {
  FuzzyState<double> s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s(i++) = x;
  return s;
}

}  // namespace

TEST(FcaRules, SixteenRulesAreAccepted) {
  for (int r : kAllRules) EXPECT_NO_THROW(Rule{r}) << r;
  EXPECT_EQ(kAllRules.size(), 16u);
}

TEST(FcaRules, NonFuzzyRuleIsRejectedWithItsNumber) {
  try {
    Rule r(30);
    FAIL() << "rule 30 accepted";
  } catch (const UnknownRuleError& e) {
    EXPECT_EQ(e.rule(), 30);
  }
}

TEST(FcaRules, BoundedSumSaturates) {
  EXPECT_DOUBLE_EQ(eval_rule(254, 0.5, 0.4, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(eval_rule(250, 0.5, 0.4, 0.3), 0.8);
  EXPECT_DOUBLE_EQ(eval_rule(1, 0.1, 0.1, 0.1), 1.0 - 0.30000000000000004);
  EXPECT_DOUBLE_EQ(eval_rule(0, 0.9, 0.9, 0.9), 0.0);
  EXPECT_DOUBLE_EQ(eval_rule(255, 0.9, 0.9, 0.9), 1.0);
}

TEST(FcaRules, RuleDecoding) {
  Rule r(17);
  EXPECT_TRUE(r.complemented());
  EXPECT_EQ(r.base(), 238);
  EXPECT_FALSE(r.reads_left());
  EXPECT_TRUE(r.reads_self());
  EXPECT_TRUE(r.reads_right());
}

TEST(FcaStep, NullBoundaryZeroesMissingNeighbours) {
  // 240 reads only the left neighbour, so the first cell falls to zero.
  const auto next = step(vec({0.7, 0.3, 0.1}), uniform_rules(240, 3));
  EXPECT_DOUBLE_EQ(next(0), 0.0);
  EXPECT_DOUBLE_EQ(next(1), 0.7);
  EXPECT_DOUBLE_EQ(next(2), 0.3);
}

TEST(FcaStep, SizeMismatchThrows) {
  EXPECT_THROW(step(vec({0.1, 0.2}), uniform_rules(204, 3)), std::invalid_argument);
}

TEST(FcaStep, LinearFormAgreesWithDirectStep) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, kAllRules.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    RuleVector rules;
    FuzzyState<double> s(6);
    for (int i = 0; i < 6; ++i) {
      rules.emplace_back(kAllRules[pick(rng)]);
      s(i) = u(rng);
    }
    LinearForm<double> form(rules);
    EXPECT_LE(max_abs_diff(form(s), step(s, rules)), 1e-12);
  }
}

TEST(FcaEvolve, WorkedExampleReachesFixedPoint) {
  const auto traj = evolve(vec({0.8, 0.2, 0.2, 0.0}), make_rules({238, 254, 238, 252}), 16);
  ASSERT_EQ(traj.terminal, TerminalKind::fixed_point);
  EXPECT_EQ(traj.index, 4u);
  EXPECT_LE(max_abs_diff(traj.states[2], vec({1.0, 1.0, 0.4, 0.4})), 1e-9);
}

TEST(FcaEvolve, ComplementRuleCyclesWithPeriodTwo) {
  const auto traj = evolve(vec({0.2, 0.9}), uniform_rules(51, 2), 16);
  ASSERT_EQ(traj.terminal, TerminalKind::cycle);
  EXPECT_EQ(traj.period, 2u);
  // Representative is the lexicographically smaller cycle state.
  EXPECT_LE(max_abs_diff(attractor_of(traj), vec({0.2, 0.9})), 1e-9);
}

TEST(FcaEvolve, TruncatedWhenBudgetRunsOut) {
  const auto traj = evolve(vec({0.8, 0.2, 0.2, 0.0}), make_rules({238, 254, 238, 252}), 2);
  EXPECT_EQ(traj.terminal, TerminalKind::truncated);
  EXPECT_EQ(traj.states.size(), 3u);
}

TEST(FcaText, RoundTrip) {
  const auto rules = parse_rules("238, 254,238,252");
  EXPECT_EQ(format_rules(rules), "238,254,238,252");
  EXPECT_THROW(parse_rules("238,7"), UnknownRuleError);
  EXPECT_THROW(parse_rules("238,,1"), std::invalid_argument);
  EXPECT_THROW(parse_state("0.5,1.5"), std::invalid_argument);
  EXPECT_EQ(format_state(parse_state("0.8,0.2")), "0.80,0.20");
}
