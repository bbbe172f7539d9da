#include <gtest/gtest.h>

#include "soccerseq/match_log_io.hpp"
#include "soccerseq/sim_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace soccerseq::sim;

namespace {

FieldConfig quiet_field() {
  FieldConfig f;
  f.perception_jitter = false;
  f.cycle_count = 50;
  return f;
}

std::string serialize(const MatchLog& log) {
  std::ostringstream out;
  write_match_log(out, log);
  return out.str();
}

}  // namespace

TEST(Commands, ClampingReportsChange) {
  CommandKind dash = Dash{250.0};
  EXPECT_TRUE(clamp_arguments(dash));
  EXPECT_DOUBLE_EQ(std::get<Dash>(dash).power, kDashMax);

  CommandKind kick = Kick{-5.0, 720.0};
  EXPECT_TRUE(clamp_arguments(kick));
  EXPECT_DOUBLE_EQ(std::get<Kick>(kick).power, 0.0);
  EXPECT_DOUBLE_EQ(std::get<Kick>(kick).direction, kKickDirMax);

  CommandKind turn = Turn{std::nan("")};
  EXPECT_TRUE(clamp_arguments(turn));
  EXPECT_DOUBLE_EQ(std::get<Turn>(turn).angle, 0.0);

  CommandKind fine = Turn{45.0};
  EXPECT_FALSE(clamp_arguments(fine));
}

TEST(Commands, MovementClassification) {
  EXPECT_TRUE(is_movement(Turn{}));
  EXPECT_TRUE(is_movement(Catch{}));
  EXPECT_FALSE(is_movement(Say{"hi"}));
  EXPECT_FALSE(is_movement(SenseBody{}));
}

TEST(Angles, NormalizeAndRelative) {
  EXPECT_DOUBLE_EQ(normalize_angle(190.0), -170.0);
  EXPECT_DOUBLE_EQ(normalize_angle(-180.0), -180.0);
  EXPECT_DOUBLE_EQ(normalize_angle(180.0), -180.0);
  AgentState a;
  a.heading = 90.0;
  EXPECT_NEAR(relative_angle(a, Vec2(1.0, 0.0)), -90.0, 1e-12);
}

TEST(World, RejectsUnknownAgentAndStaleCycle) {
  World w(quiet_field());
  EXPECT_THROW(w.submit_command('z', {Turn{10}}, 0), UnknownAgentError);
  EXPECT_THROW(w.submit_command('a', {Turn{10}}, 3), StaleCommandError);
}

TEST(World, KickMovesBallAlongHeadingPlusDirection) {
  auto field = quiet_field();
  auto agents = kickoff_formation(field);
  agents[0].position = Vec2(0.0, 0.0);
  agents[0].heading = 0.0;
  BallState ball;
  ball.position = Vec2(0.5, 0.0);
  World w(field, Scenario{agents, ball});

  const auto ack = w.submit_command('a', {Kick{100.0, 30.0}}, 0);
  EXPECT_TRUE(ack.queued);
  const auto rec = w.step_cycle();

  const double rad = 30.0 * std::numbers::pi / 180.0;
  EXPECT_NEAR(w.ball().position.x(), 0.5 + 5.0 * std::cos(rad), 1e-9);
  EXPECT_NEAR(w.ball().position.y(), 5.0 * std::sin(rad), 1e-9);
  EXPECT_NEAR(w.ball().velocity.norm(), 5.0 * field.ball_decay, 1e-9);
  ASSERT_FALSE(rec.events.empty());
  EXPECT_EQ(rec.events[0].kind, EventKind::kick);
  EXPECT_TRUE(rec.events[0].effective);
}

TEST(World, KickOutOfRangeIsIneffective) {
  World w(quiet_field());
  w.submit_command('a', {Kick{100.0, 0.0}}, 0);
  const auto rec = w.step_cycle();
  EXPECT_FALSE(rec.events.at(0).effective);
  EXPECT_DOUBLE_EQ(w.ball().velocity.norm(), 0.0);
}

TEST(World, BallCrossingGoalMouthScores) {
  auto field = quiet_field();
  BallState ball;
  ball.position = Vec2(52.0, 1.0);
  ball.velocity = Vec2(2.0, 0.0);
  World w(field, Scenario{kickoff_formation(field), ball});
  const auto rec = w.step_cycle();
  EXPECT_EQ(w.score().home, 1);
  EXPECT_EQ(w.score().away, 0);
  EXPECT_TRUE(w.ball().position.isZero());
  bool goal = false;
  for (const auto& e : rec.events) goal |= e.kind == EventKind::goal && e.team == Team::home;
  EXPECT_TRUE(goal);
}

TEST(World, BallWideOfGoalStopsAtLine) {
  auto field = quiet_field();
  BallState ball;
  ball.position = Vec2(52.0, 20.0);
  ball.velocity = Vec2(2.0, 0.0);
  World w(field, Scenario{kickoff_formation(field), ball});
  w.step_cycle();
  EXPECT_EQ(w.score().home, 0);
  EXPECT_DOUBLE_EQ(w.ball().position.x(), field.length / 2);
}

TEST(World, OnlyOneMovementCommandExecuted) {
  World w(quiet_field());
  w.submit_command('a', {Turn{10}}, 0);
  w.submit_command('a', {Dash{50}}, 0);
  w.submit_command('a', {Turn{-10}}, 0);
  const auto rec = w.step_cycle();
  int movement = 0;
  for (const auto& c : rec.commands) movement += c.agent == 'a' && is_movement(c.kind);
  EXPECT_EQ(movement, 1);
}

TEST(World, InstantCommandRateLimits) {
  World w(quiet_field());
  for (int i = 0; i < kSenseBodyPerCycle; ++i) EXPECT_TRUE(w.submit_command('a', {SenseBody{}}, 0).applied);
  EXPECT_TRUE(w.submit_command('a', {SenseBody{}}, 0).rate_limited);
  EXPECT_TRUE(w.submit_command('a', {Say{"x"}}, 0).applied);
  w.step_cycle();
  EXPECT_TRUE(w.submit_command('a', {Say{"y"}}, 1).rate_limited);
  w.step_cycle();
  EXPECT_TRUE(w.submit_command('a', {Say{"z"}}, 2).applied);
}

TEST(World, PossessionPassesAndSticks) {
  auto field = quiet_field();
  auto agents = kickoff_formation(field);
  agents[0].position = Vec2(0.0, 0.0);
  agents[1].position = Vec2(10.0, 0.0);
  BallState ball;
  ball.position = Vec2(0.5, 0.0);
  World w(field, Scenario{agents, ball});
  w.step_cycle();
  EXPECT_EQ(w.possessor(), std::optional<AgentId>('a'));
  // Without a kick the holder keeps the ball even when it is out of reach.
  w.submit_command('a', {Dash{-30}}, 1);
  w.step_cycle();
  w.step_cycle();
  EXPECT_EQ(w.possessor(), std::optional<AgentId>('a'));
}

TEST(Match, SameSeedGivesIdenticalLog) {
  auto field = quiet_field();
  field.perception_jitter = true;
  field.cycle_count = 300;
  ChaserPolicy h1(field), a1(field), h2(field), a2(field);
  EXPECT_EQ(serialize(run_match(h1, a1, field)), serialize(run_match(h2, a2, field)));
  field.rng_seed = 2;
  RandomPolicy r1(5), r2(6);
  const auto log = run_match(r1, r2, field);
  EXPECT_TRUE(log.valid);
  EXPECT_EQ(log.cycles.size(), 300u);
}

TEST(MatchLogIo, RoundTrip) {
  auto field = quiet_field();
  ChaserPolicy h(field), a(field);
  const auto log = run_match(h, a, field);
  std::istringstream in(serialize(log));
  const auto back = read_match_log(in);
  EXPECT_EQ(serialize(back), serialize(log));
  EXPECT_EQ(back.events, log.events);
}

TEST(FieldConfig, Validation) {
  FieldConfig f;
  f.goal_width = 100.0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}
