#include "soccerseq/shooting_behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace soccerseq::sim {

const char* to_string(ShootPhase phase) noexcept {
  switch (phase) {
    case ShootPhase::find_ball: return "find_ball";
    case ShootPhase::approach: return "approach";
    case ShootPhase::round_ball: return "round_ball";
    case ShootPhase::face_ball: return "face_ball";
    case ShootPhase::feedback: return "feedback";
    case ShootPhase::kick: return "kick";
  }
  return "find_ball";
}

double ball_proximity(const AgentState& agent, const BallState& ball) noexcept {
  const double d = (ball.position - agent.position).norm();
  return d > 0 ? 100.0 / d : std::numeric_limits<double>::infinity();
}

ShootingBehavior::ShootingBehavior(FieldConfig field, ShootingConfig config, ShotFeedback feedback)
    : field_(field), config_(config), feedback_(std::move(feedback)) {}

bool ShootingBehavior::in_view(const AgentState& me, const Vec2& target) const {
  return std::abs(relative_angle(me, target)) <= config_.view_half_angle;
}

CommandKind ShootingBehavior::approach(const AgentState& me, const Perception& view,
                                       char& letter) const {
  const double to_ball = relative_angle(me, view.ball.position);
  if (std::abs(to_ball) > config_.aim_tolerance) {
    letter = 'A';
    return Turn{to_ball};
  }
  letter = 'C';
  return dash_to_ball(me, view);
}

Dash ShootingBehavior::dash_to_ball(const AgentState& me, const Perception& view) const {
  const double dist = (view.ball.position - me.position).norm();
  // Total travel of one dash is speed / (1 - decay); stop a little short.
  const double power = (dist - 0.4 * field_.kickable_distance) * (1.0 - field_.agent_decay) /
                       field_.dash_gain;
  return Dash{std::clamp(power, 0.0, kDashMax)};
}

CommandKind ShootingBehavior::emit_letter(char letter, ShooterState& s, const AgentState& me,
                                          const Perception& view, const Vec2& goal) {
  switch (letter) {
    case 'A':
      return Turn{relative_angle(me, view.ball.position)};
    case 'C':
      return dash_to_ball(me, view);
    case 'G':
      return Kick{config_.dribble_power, relative_angle(me, goal)};
    default: {
      const double sign = s.direction == RoundDirection::right ? -1.0 : 1.0;
      return Turn{sign * config_.orbit_turn};
    }
  }
}

void ShootingBehavior::start_round(ShooterState& s, const AgentState& me, const Perception& view,
                                   const Vec2& goal) {
  s.phase = ShootPhase::round_ball;
  s.cursor = 0;
  s.round_loops = 0;
  const Vec2 to_ball = view.ball.position - me.position;
  const Vec2 to_goal = goal - me.position;
  // Goal clockwise from the ball line means rounding to the right.
  const double cross = to_ball.x() * to_goal.y() - to_ball.y() * to_goal.x();
  s.direction = cross <= 0 ? RoundDirection::right : RoundDirection::left;
  s.macro = s.direction == RoundDirection::right
                ? std::string(kRoundRightBody) + std::string(kRoundRightCamera)
                : std::string(kRoundLeftBody) + std::string(kRoundLeftCamera);
}

CommandKind ShootingBehavior::command_for(AgentId agent, Team team, const Perception& view) {
  ShooterState& s = states_[agent];
  const AgentState& me = view.agent(agent);
  const Vec2 goal(team == Team::home ? field_.length / 2 : -field_.length / 2, 0.0);
  char letter = 'A';
  std::optional<CommandKind> out;

  // Phases fall through within one cycle until one of them emits a command.
  for (int guard = 0; guard < 8 && !out; ++guard) {
    switch (s.phase) {
      case ShootPhase::find_ball:
        if (!in_view(me, view.ball.position)) {
          out = Turn{relative_angle(me, view.ball.position)};
          letter = 'A';
        } else {
          s.phase = ShootPhase::approach;
        }
        break;

      case ShootPhase::approach:
        if (ball_proximity(me, view.ball) > config_.proximity_threshold) {
          start_round(s, me, view, goal);
        } else {
          out = approach(me, view, letter);
        }
        break;

      case ShootPhase::round_ball:
        if (in_view(me, view.ball.position) && in_view(me, goal)) {
          s.phase = ShootPhase::face_ball;
          s.macro = std::string(kFaceBall);
          s.cursor = 0;
          break;
        }
        if (s.cursor == s.macro.size()) {
          s.cursor = 0;
          if (++s.round_loops >= config_.max_round_loops) {
            s.phase = ShootPhase::face_ball;
            s.macro = std::string(kFaceBall);
            break;
          }
        }
        letter = s.macro[s.cursor++];
        out = emit_letter(letter, s, me, view, goal);
        break;

      case ShootPhase::face_ball:
        if (s.cursor < s.macro.size()) {
          letter = s.macro[s.cursor++];
          out = emit_letter(letter, s, me, view, goal);
        } else {
          s.phase = ShootPhase::feedback;
        }
        break;

      case ShootPhase::feedback: {
        const bool veto = feedback_ && s.vetoes < config_.max_vetoes &&
                          feedback_(s.history) == ShotDecision::veto;
        if (veto) {
          ++s.vetoes;
          const RoundDirection reversed =
              s.direction == RoundDirection::right ? RoundDirection::left : RoundDirection::right;
          s.phase = ShootPhase::round_ball;
          s.direction = reversed;
          s.cursor = 0;
          s.round_loops = 0;
          s.macro = reversed == RoundDirection::right
                        ? std::string(kRoundRightBody) + std::string(kRoundRightCamera)
                        : std::string(kRoundLeftBody) + std::string(kRoundLeftCamera);
        } else {
          s.phase = ShootPhase::kick;
        }
        break;
      }

      case ShootPhase::kick: {
        const double dist = (view.ball.position - me.position).norm();
        if (dist <= field_.kickable_distance) {
          out = Kick{config_.shot_power, relative_angle(me, goal)};
          letter = 'G';
          std::string history = std::move(s.history);
          s = ShooterState{};
          s.history = std::move(history);
        } else if (ball_proximity(me, view.ball) <= config_.proximity_threshold) {
          s.phase = ShootPhase::approach;
        } else {
          out = approach(me, view, letter);
        }
        break;
      }
    }
  }
  if (!out) out = Turn{relative_angle(me, view.ball.position)};

  s.history.push_back(letter);
  if (s.history.size() > config_.history_length)
    s.history.erase(0, s.history.size() - config_.history_length);
  return *out;
}

std::vector<CommandKind> ShootingBehavior::decide(const PolicyInput& input) {
  if (!input.latest) return {};
  return {command_for(input.self, input.team, *input.latest)};
}

}  // namespace soccerseq::sim
