#include <gtest/gtest.h>

#include "soccerseq/shooting_behavior.hpp"

using namespace soccerseq::sim;

namespace {

Perception view_with(AgentState me, Vec2 ball_at) {
  Perception p;
  p.ball.position = ball_at;
  p.agents = {me};
  return p;
}

AgentState shooter_at(Vec2 pos, double heading) {
  AgentState a;
  a.id = 'a';
  a.team = Team::home;
  a.position = pos;
  a.heading = heading;
  return a;
}

}  // namespace

TEST(Shooting, BallProximityIsInverseDistance) {
  BallState ball;
  ball.position = Vec2(4.0, 0.0);
  EXPECT_DOUBLE_EQ(ball_proximity(shooter_at({0, 0}, 0), ball), 25.0);
}

TEST(Shooting, TurnsTowardsBallOutOfView) {
  ShootingBehavior b{FieldConfig{}};
  const auto cmd = b.command_for('a', Team::home, view_with(shooter_at({0, 0}, 0), {0, 10}));
  ASSERT_TRUE(std::holds_alternative<Turn>(cmd));
  EXPECT_NEAR(std::get<Turn>(cmd).angle, 90.0, 1e-9);
  EXPECT_EQ(b.state('a').phase, ShootPhase::find_ball);
  EXPECT_EQ(b.state('a').history, "A");
}

TEST(Shooting, DashesWhenBallAheadAndFar) {
  ShootingBehavior b{FieldConfig{}};
  const auto cmd = b.command_for('a', Team::home, view_with(shooter_at({0, 0}, 0), {20, 0}));
  ASSERT_TRUE(std::holds_alternative<Dash>(cmd));
  EXPECT_EQ(b.state('a').phase, ShootPhase::approach);
  EXPECT_EQ(b.state('a').history, "C");
}

TEST(Shooting, CloseBallStartsRounding) {
  ShootingBehavior b{FieldConfig{}};
  // Proximity 25 is above the threshold of 20; the goal lies behind the agent.
  b.command_for('a', Team::home, view_with(shooter_at({0, 0}, 180), {-4, 0}));
  EXPECT_EQ(b.state('a').phase, ShootPhase::round_ball);
  EXPECT_EQ(b.state('a').history.size(), 1u);
}

TEST(Shooting, AlignedShooterKicksAtFullPower) {
  ShootingBehavior b{FieldConfig{}};
  ShooterState& s = b.state('a');
  s.phase = ShootPhase::kick;
  const auto cmd = b.command_for('a', Team::home, view_with(shooter_at({40, 0}, 0), {40.5, 0}));
  ASSERT_TRUE(std::holds_alternative<Kick>(cmd));
  EXPECT_DOUBLE_EQ(std::get<Kick>(cmd).power, 100.0);
  EXPECT_NEAR(std::get<Kick>(cmd).direction, 0.0, 1e-9);
  EXPECT_EQ(b.state('a').phase, ShootPhase::find_ball);
  EXPECT_EQ(b.state('a').history.back(), 'G');
}

TEST(Shooting, VetoReversesRoundingDirection) {
  int calls = 0;
  ShootingBehavior b{FieldConfig{}, ShootingConfig{}, [&](std::string_view) {
                       ++calls;
                       return ShotDecision::veto;
                     }};
  ShooterState& s = b.state('a');
  s.phase = ShootPhase::feedback;
  s.direction = RoundDirection::right;
  b.command_for('a', Team::home, view_with(shooter_at({0, 0}, 0), {30, 30}));
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(b.state('a').vetoes, 1);
  EXPECT_EQ(b.state('a').direction, RoundDirection::left);
}

TEST(Shooting, VetoesAreCapped) {
  ShootingConfig cfg;
  cfg.max_vetoes = 0;
  ShootingBehavior b{FieldConfig{}, cfg, [](std::string_view) { return ShotDecision::veto; }};
  b.state('a').phase = ShootPhase::feedback;
  b.command_for('a', Team::home, view_with(shooter_at({0, 0}, 0), {30, 0}));
  EXPECT_NE(b.state('a').phase, ShootPhase::round_ball);
}

TEST(Shooting, MatchProducesShots) {
  FieldConfig field;
  field.cycle_count = 1000;
  ShootingBehavior home{field};
  ChaserPolicy away{field};
  const auto log = run_match(home, away, field);
  ASSERT_TRUE(log.valid);
  int kicks = 0;
  for (const auto& e : log.events) kicks += e.kind == EventKind::kick && e.effective && e.team == Team::home;
  EXPECT_GT(kicks, 0);
}
