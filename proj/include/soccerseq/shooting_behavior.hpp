#pragma once

// Scripted shooter: find the ball, approach it, round it until ball and goal
// are both in view, face the ball, consult feedback, then kick hard at goal.
//
// The rounding and facing steps are letter macros over the action alphabet;
// each letter is one cycle's command:
//   A  turn towards the ball
//   C  dash towards the ball
//   G  kick towards the goal
//   T  orbit step (turn off the ball line, clockwise or counter-clockwise)

#include "soccerseq/sim_core.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace soccerseq::sim {

enum class ShotDecision { proceed, veto };

/// Called with the shooter's recent action letters (oldest first).
using ShotFeedback = std::function<ShotDecision(std::string_view recent_actions)>;

struct ShootingConfig {
  double proximity_threshold = 20.0;  // stop approaching once 100 / distance exceeds this
  double view_half_angle = 45.0;
  double aim_tolerance = 10.0;
  double orbit_turn = 45.0;
  double dribble_power = 30.0;
  double shot_power = 100.0;
  int max_round_loops = 3;
  int max_vetoes = 3;
  std::size_t history_length = 16;
};

inline constexpr std::string_view kRoundRightBody = "AGGGT";
inline constexpr std::string_view kRoundRightCamera = "ACCCT";
inline constexpr std::string_view kRoundLeftBody = "AAACT";
inline constexpr std::string_view kRoundLeftCamera = "TTTAC";
inline constexpr std::string_view kFaceBall = "ATACT";

enum class ShootPhase { find_ball, approach, round_ball, face_ball, feedback, kick };

const char* to_string(ShootPhase phase) noexcept;

enum class RoundDirection { right, left };

struct ShooterState {
  ShootPhase phase = ShootPhase::find_ball;
  RoundDirection direction = RoundDirection::right;
  std::string macro;
  std::size_t cursor = 0;
  int round_loops = 0;
  int vetoes = 0;
  std::string history;
};

/// 100 / distance, the stand-in for the ball's apparent size.
double ball_proximity(const AgentState& agent, const BallState& ball) noexcept;

class ShootingBehavior final : public Policy {
 public:
  explicit ShootingBehavior(FieldConfig field, ShootingConfig config = {},
                            ShotFeedback feedback = {});

  /// Next command for `agent` given what it currently sees.
  CommandKind command_for(AgentId agent, Team team, const Perception& view);

  std::vector<CommandKind> decide(const PolicyInput& input) override;

  ShooterState& state(AgentId agent) { return states_[agent]; }
  const ShootingConfig& config() const noexcept { return config_; }

 private:
  CommandKind emit_letter(char letter, ShooterState& s, const AgentState& me, const Perception& view,
                          const Vec2& goal);
  Dash dash_to_ball(const AgentState& me, const Perception& view) const;
  CommandKind approach(const AgentState& me, const Perception& view, char& letter) const;
  bool in_view(const AgentState& me, const Vec2& target) const;
  void start_round(ShooterState& s, const AgentState& me, const Perception& view, const Vec2& goal);

  FieldConfig field_;
  ShootingConfig config_;
  ShotFeedback feedback_;
  std::map<AgentId, ShooterState> states_;
};

}  // namespace soccerseq::sim
