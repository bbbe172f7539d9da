#pragma once

// Cycle-based 2-D soccer simulator.
//
// Field coordinates put the centre spot at the origin; x runs along the
// length towards the away goal (home attacks +x), y across the width.

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace soccerseq::sim {

using AgentId = char;
using Vec2 = Eigen::Vector2d;

enum class Team { home, away };

const char* to_string(Team team) noexcept;
Team team_from_string(const std::string& text);
inline Team opponent(Team t) noexcept { return t == Team::home ? Team::away : Team::home; }

struct FieldConfig {
  double length = 105.0;
  double width = 68.0;
  double goal_width = 14.0;
  double kickable_distance = 1.0;
  int cycle_count = 1000;
  std::uint64_t rng_seed = 1;
  int team_size = 3;

  double dash_gain = 0.01;
  double kick_gain = 0.05;
  double ball_decay = 0.94;
  double agent_decay = 0.4;
  bool perception_jitter = true;

  void validate() const;
};

struct AgentState {
  AgentId id = 'a';
  Team team = Team::home;
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // degrees, [-180, 180)
  double speed = 0.0;    // metres per cycle
};

struct BallState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

// Commands and their argument ranges.

struct Turn { double angle = 0.0; };
struct Dash { double power = 0.0; };
struct Kick { double power = 0.0; double direction = 0.0; };
struct Catch {};
struct Say { std::string message; };
struct SenseBody {};
struct ChangeView { bool high_quality = true; bool narrow = false; };

using CommandKind = std::variant<Turn, Dash, Kick, Catch, Say, SenseBody, ChangeView>;

struct Command {
  CommandKind kind;
  int issued_cycle = 0;
};

inline constexpr double kTurnMin = -180.0, kTurnMax = 180.0;
inline constexpr double kDashMin = -30.0, kDashMax = 100.0;
inline constexpr double kKickPowerMin = 0.0, kKickPowerMax = 100.0;
inline constexpr double kKickDirMin = -180.0, kKickDirMax = 180.0;
inline constexpr std::size_t kMaxSayLength = 512;
inline constexpr int kSenseBodyPerCycle = 3;
inline constexpr int kSayHearInterval = 2;

bool is_movement(const CommandKind& kind) noexcept;
const char* command_name(const CommandKind& kind) noexcept;

/// Clamps every argument into its legal range (NaN becomes 0). Returns true
/// if anything changed.
bool clamp_arguments(CommandKind& kind) noexcept;

double normalize_angle(double degrees) noexcept;

/// Angle of `target` as seen from `agent`, relative to its heading, in
/// [-180, 180).
double relative_angle(const AgentState& agent, const Vec2& target) noexcept;

// Events.

enum class EventKind { goal, possession_change, pass_completed, kick, turn, move, idle };

const char* to_string(EventKind kind) noexcept;
EventKind event_kind_from_string(const std::string& text);

struct MatchEvent {
  int cycle = 0;
  EventKind kind = EventKind::idle;
  AgentId agent = 0;     // actor, receiver of possession, or passer
  AgentId other = 0;     // pass receiver
  Team team = Team::home;  // scoring team for goals
  bool effective = true;   // false for kicks out of range

  friend bool operator==(const MatchEvent&, const MatchEvent&) = default;
};

struct ExecutedCommand {
  AgentId agent = 0;
  CommandKind kind;
};

struct CycleRecord {
  int cycle = 0;
  std::vector<AgentState> agents;
  BallState ball;
  std::optional<AgentId> possessor;  // last agent to reach the ball, until it is kicked away
  std::vector<ExecutedCommand> commands;
  std::vector<MatchEvent> events;
};

enum class Outcome { home_win, away_win, draw };
const char* to_string(Outcome outcome) noexcept;

struct Score {
  int home = 0;
  int away = 0;
};

struct MatchLog {
  FieldConfig config;
  std::vector<MatchEvent> events;
  std::vector<CycleRecord> cycles;
  Outcome outcome = Outcome::draw;
  Score score;
  bool valid = true;
  std::string abort_reason;

  std::vector<AgentState> roster() const;
};

struct Perception {
  int cycle = 0;
  BallState ball;
  std::vector<AgentState> agents;

  const AgentState& agent(AgentId id) const;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownAgentError : public SimulationError {
 public:
  explicit UnknownAgentError(AgentId id)
      : SimulationError(std::string("unknown agent id '") + id + "'") {}
};

class StaleCommandError : public SimulationError {
 public:
  StaleCommandError(int issued, int current)
      : SimulationError("command for cycle " + std::to_string(issued) +
                        " rejected; current cycle is " + std::to_string(current)) {}
};

struct Acknowledgment {
  bool clamped = false;
  bool queued = false;        // movement command waiting for end of cycle
  bool applied = false;       // instant command took effect
  bool rate_limited = false;  // instant command dropped by its frequency limit
};

struct Scenario {
  std::vector<AgentState> agents;  // must cover the full roster
  BallState ball;
};

/// Default kick-off formation: home on the left half, away on the right.
std::vector<AgentState> kickoff_formation(const FieldConfig& config);

class World {
 public:
  explicit World(FieldConfig config);
  World(FieldConfig config, Scenario scenario);

  const FieldConfig& config() const noexcept { return config_; }
  int cycle() const noexcept { return cycle_; }
  const std::vector<AgentState>& agents() const noexcept { return agents_; }
  const AgentState& agent(AgentId id) const;
  const BallState& ball() const noexcept { return ball_; }
  std::optional<AgentId> possessor() const noexcept { return possessor_; }
  const Score& score() const noexcept { return score_; }
  Vec2 goal_center(Team attacking) const;

  Acknowledgment submit_command(AgentId agent, Command command, int cycle);

  /// Resolves queued movement commands, advances physics by one cycle and
  /// returns the record of what happened.
  CycleRecord step_cycle();

  /// 0, 1 or 2 snapshots per agent for the current cycle.
  std::map<AgentId, std::vector<Perception>> deliver_perceptions();

  Perception snapshot() const;

 private:
  std::size_t index_of(AgentId id) const;
  void apply_movement(std::size_t agent_index, const CommandKind& kind, CycleRecord& record);
  void advance_ball(CycleRecord& record);
  void update_possession(CycleRecord& record);

  FieldConfig config_;
  std::vector<AgentState> agents_;
  BallState ball_;
  int cycle_ = 0;
  std::optional<AgentId> possessor_;
  std::optional<AgentId> last_possessor_;
  bool ball_released_ = false;  // an effective kick happened this cycle
  std::map<AgentId, bool> kicked_since_possession_;
  Score score_;

  std::mt19937_64 match_rng_;
  std::mt19937_64 perception_rng_;

  std::map<AgentId, std::vector<CommandKind>> pending_;
  std::map<AgentId, int> sense_body_count_;
  std::map<AgentId, int> change_view_count_;
  std::map<AgentId, int> last_say_cycle_;
  std::vector<ExecutedCommand> instant_log_;
};

struct PolicyInput {
  AgentId self = 0;
  Team team = Team::home;
  int cycle = 0;
  std::span<const Perception> perceptions;  // delivered this cycle, may be empty
  const Perception* latest = nullptr;       // most recent snapshot ever seen
};

/// Maps perceptions plus whatever the policy keeps internally to commands.
/// Returning several movement commands is allowed; the simulator executes one.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<CommandKind> decide(const PolicyInput& input) = 0;
};

class NullPolicy final : public Policy {
 public:
  std::vector<CommandKind> decide(const PolicyInput&) override { return {}; }
};

/// Issues a random barrage of commands with arguments drawn well outside the
/// legal ranges. Used to exercise clamping and the one-command rule.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  std::vector<CommandKind> decide(const PolicyInput& input) override;

 private:
  std::mt19937_64 rng_;
};

/// Turns to the ball, dashes to it and dribbles towards the opponent goal,
/// shooting once inside shooting range.
class ChaserPolicy final : public Policy {
 public:
  static constexpr double kShootingRange = 25.0;
  static constexpr double kDribblePower = 15.0;

  explicit ChaserPolicy(const FieldConfig& config) : config_(config) {}
  std::vector<CommandKind> decide(const PolicyInput& input) override;

 private:
  FieldConfig config_;
};

MatchLog run_match(Policy& home, Policy& away, const FieldConfig& config,
                   const std::optional<Scenario>& scenario = std::nullopt);

}  // namespace soccerseq::sim
