#include "soccerseq/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace soccerseq::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double clamp_value(double v, double lo, double hi, bool& changed) {
  double out = std::isnan(v) ? 0.0 : std::clamp(v, lo, hi);
  if (out != v) changed = true;
  return out;
}

Vec2 unit(double heading_deg) {
  return {std::cos(heading_deg * kDegToRad), std::sin(heading_deg * kDegToRad)};
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

}  // namespace

const char* to_string(Team team) noexcept { return team == Team::home ? "home" : "away"; }

Team team_from_string(const std::string& text) {
  if (text == "home") return Team::home;
  if (text == "away") return Team::away;
  throw std::invalid_argument("unknown team '" + text + "'");
}

void FieldConfig::validate() const {
  if (!(length > 0)) throw std::invalid_argument("field length must be positive");
  if (!(width > 0)) throw std::invalid_argument("field width must be positive");
  if (!(goal_width > 0 && goal_width < width))
    throw std::invalid_argument("goal width must lie in (0, width)");
  if (!(kickable_distance > 0)) throw std::invalid_argument("kickable distance must be positive");
  if (cycle_count <= 0) throw std::invalid_argument("cycle count must be positive");
  if (team_size < 1 || team_size > 13) throw std::invalid_argument("team size must be in [1, 13]");
  if (!(ball_decay >= 0 && ball_decay < 1)) throw std::invalid_argument("ball decay must be in [0, 1)");
  if (!(agent_decay >= 0 && agent_decay < 1))
    throw std::invalid_argument("agent decay must be in [0, 1)");
}

bool is_movement(const CommandKind& kind) noexcept {
  return std::holds_alternative<Turn>(kind) || std::holds_alternative<Dash>(kind) ||
         std::holds_alternative<Kick>(kind) || std::holds_alternative<Catch>(kind);
}

const char* command_name(const CommandKind& kind) noexcept {
  static constexpr const char* names[] = {"turn", "dash", "kick", "catch",
                                          "say", "sense_body", "change_view"};
  return names[kind.index()];
}

bool clamp_arguments(CommandKind& kind) noexcept {
  bool changed = false;
  if (auto* t = std::get_if<Turn>(&kind)) {
    t->angle = clamp_value(t->angle, kTurnMin, kTurnMax, changed);
  } else if (auto* d = std::get_if<Dash>(&kind)) {
    d->power = clamp_value(d->power, kDashMin, kDashMax, changed);
  } else if (auto* k = std::get_if<Kick>(&kind)) {
    k->power = clamp_value(k->power, kKickPowerMin, kKickPowerMax, changed);
    k->direction = clamp_value(k->direction, kKickDirMin, kKickDirMax, changed);
  } else if (auto* s = std::get_if<Say>(&kind)) {
    if (s->message.size() > kMaxSayLength) {
      s->message.resize(kMaxSayLength);
      changed = true;
    }
  }
  return changed;
}

double normalize_angle(double degrees) noexcept {
  if (!std::isfinite(degrees)) return 0.0;
  double a = std::fmod(degrees + 180.0, 360.0);
  if (a < 0) a += 360.0;
  a -= 180.0;
  // fmod can land exactly on +180 after the shift through rounding.
  return a >= 180.0 ? a - 360.0 : a;
}

double relative_angle(const AgentState& agent, const Vec2& target) noexcept {
  const Vec2 d = target - agent.position;
  if (d.squaredNorm() == 0.0) return 0.0;
  return normalize_angle(std::atan2(d.y(), d.x()) / kDegToRad - agent.heading);
}

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::goal: return "goal";
    case EventKind::possession_change: return "possession_change";
    case EventKind::pass_completed: return "pass_completed";
    case EventKind::kick: return "kick";
    case EventKind::turn: return "turn";
    case EventKind::move: return "move";
    case EventKind::idle: return "idle";
  }
  return "idle";
}

EventKind event_kind_from_string(const std::string& text) {
  for (auto k : {EventKind::goal, EventKind::possession_change, EventKind::pass_completed,
                 EventKind::kick, EventKind::turn, EventKind::move, EventKind::idle})
    if (text == to_string(k)) return k;
  throw std::invalid_argument("unknown event kind '" + text + "'");
}

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::home_win: return "home_win";
    case Outcome::away_win: return "away_win";
    case Outcome::draw: return "draw";
  }
  return "draw";
}

std::vector<AgentState> MatchLog::roster() const {
  if (cycles.empty()) return {};
  return cycles.front().agents;
}

const AgentState& Perception::agent(AgentId id) const {
  for (const auto& a : agents)
    if (a.id == id) return a;
  throw UnknownAgentError(id);
}

std::vector<AgentState> kickoff_formation(const FieldConfig& config) {
  std::vector<AgentState> agents;
  const int n = config.team_size;
  char next_id = 'a';
  for (Team team : {Team::home, Team::away}) {
    const double side = team == Team::home ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      AgentState a;
      a.id = next_id++;
      a.team = team;
      const double depth = config.length * (0.1 + 0.3 * (i + 1) / (n + 1));
      const double lateral = config.width * ((i + 1.0) / (n + 1.0) - 0.5) * 0.8;
      a.position = Vec2(side * depth, lateral);
      a.heading = team == Team::home ? 0.0 : -180.0;
      agents.push_back(a);
    }
  }
  return agents;
}

World::World(FieldConfig config) : World(config, Scenario{kickoff_formation(config), BallState{}}) {}

World::World(FieldConfig config, Scenario scenario)
    : config_(std::move(config)),
      agents_(std::move(scenario.agents)),
      ball_(scenario.ball),
      match_rng_(stream(config_.rng_seed, 1)),
      perception_rng_(stream(config_.rng_seed, 2)) {
  config_.validate();
  if (agents_.empty()) throw std::invalid_argument("scenario has no agents");
  for (auto& a : agents_) {
    a.heading = normalize_angle(a.heading);
    kicked_since_possession_[a.id] = false;
  }
  for (std::size_t i = 0; i < agents_.size(); ++i)
    for (std::size_t j = i + 1; j < agents_.size(); ++j)
      if (agents_[i].id == agents_[j].id) throw std::invalid_argument("duplicate agent id");
}

std::size_t World::index_of(AgentId id) const {
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].id == id) return i;
  throw UnknownAgentError(id);
}

const AgentState& World::agent(AgentId id) const { return agents_[index_of(id)]; }

Vec2 World::goal_center(Team attacking) const {
  return {attacking == Team::home ? config_.length / 2 : -config_.length / 2, 0.0};
}

Acknowledgment World::submit_command(AgentId agent, Command command, int cycle) {
  index_of(agent);
  if (cycle != cycle_) throw StaleCommandError(cycle, cycle_);
  command.issued_cycle = cycle;

  Acknowledgment ack;
  ack.clamped = clamp_arguments(command.kind);

  if (is_movement(command.kind)) {
    pending_[agent].push_back(std::move(command.kind));
    ack.queued = true;
    return ack;
  }

  bool allowed = true;
  if (std::holds_alternative<SenseBody>(command.kind)) {
    allowed = sense_body_count_[agent] < kSenseBodyPerCycle;
    if (allowed) ++sense_body_count_[agent];
  } else if (std::holds_alternative<ChangeView>(command.kind)) {
    allowed = change_view_count_[agent] < 1;
    if (allowed) ++change_view_count_[agent];
  } else if (std::holds_alternative<Say>(command.kind)) {
    auto it = last_say_cycle_.find(agent);
    allowed = it == last_say_cycle_.end() || cycle_ - it->second >= kSayHearInterval;
    if (allowed) last_say_cycle_[agent] = cycle_;
  }
  ack.applied = allowed;
  ack.rate_limited = !allowed;
  if (allowed) instant_log_.push_back({agent, std::move(command.kind)});
  return ack;
}

void World::apply_movement(std::size_t i, const CommandKind& kind, CycleRecord& record) {
  AgentState& a = agents_[i];
  MatchEvent ev;
  ev.cycle = cycle_;
  ev.agent = a.id;
  ev.team = a.team;
  if (const auto* t = std::get_if<Turn>(&kind)) {
    a.heading = normalize_angle(a.heading + t->angle);
    ev.kind = EventKind::turn;
  } else if (const auto* d = std::get_if<Dash>(&kind)) {
    a.speed = d->power * config_.dash_gain;
    ev.kind = EventKind::move;
  } else if (const auto* k = std::get_if<Kick>(&kind)) {
    ev.kind = EventKind::kick;
    ev.effective = (ball_.position - a.position).norm() <= config_.kickable_distance;
    if (ev.effective) {
      ball_.velocity += k->power * config_.kick_gain * unit(a.heading + k->direction);
      kicked_since_possession_[a.id] = true;
      ball_released_ = true;
    }
  } else {
    return;  // catch: accepted, no physical effect
  }
  record.events.push_back(ev);
}

void World::advance_ball(CycleRecord& record) {
  const double half_len = config_.length / 2;
  const double half_wid = config_.width / 2;
  const Vec2 from = ball_.position;
  Vec2 to = from + ball_.velocity;

  auto crosses_goal = [&](double line_x) {
    const double t = (line_x - from.x()) / (to.x() - from.x());
    const double y = from.y() + t * (to.y() - from.y());
    return std::abs(y) <= config_.goal_width / 2;
  };

  std::optional<Team> scorer;
  if (to.x() > half_len) {
    if (from.x() <= half_len && crosses_goal(half_len)) scorer = Team::home;
  } else if (to.x() < -half_len) {
    if (from.x() >= -half_len && crosses_goal(-half_len)) scorer = Team::away;
  }

  if (scorer) {
    (*scorer == Team::home ? score_.home : score_.away) += 1;
    MatchEvent ev;
    ev.cycle = cycle_;
    ev.kind = EventKind::goal;
    ev.team = *scorer;
    record.events.push_back(ev);
    ball_ = BallState{};
    possessor_.reset();
    last_possessor_.reset();
    for (auto& [id, kicked] : kicked_since_possession_) kicked = false;
    return;
  }

  if (std::abs(to.x()) > half_len) {
    to.x() = std::clamp(to.x(), -half_len, half_len);
    ball_.velocity.x() = 0;
  }
  if (std::abs(to.y()) > half_wid) {
    to.y() = std::clamp(to.y(), -half_wid, half_wid);
    ball_.velocity.y() = 0;
  }
  ball_.position = to;
  ball_.velocity *= config_.ball_decay;
}

void World::update_possession(CycleRecord& record) {
  std::optional<AgentId> nearest;
  double best = config_.kickable_distance;
  for (const auto& a : agents_) {
    const double d = (a.position - ball_.position).norm();
    if (d <= best && (!nearest || d < best)) {
      best = d;
      nearest = a.id;
    }
  }
  if (nearest && nearest != possessor_ && nearest != last_possessor_) {
    MatchEvent change;
    change.cycle = cycle_;
    change.kind = EventKind::possession_change;
    change.agent = *nearest;
    change.team = agent(*nearest).team;
    record.events.push_back(change);

    if (last_possessor_ && agent(*last_possessor_).team == change.team &&
        kicked_since_possession_[*last_possessor_]) {
      MatchEvent pass;
      pass.cycle = cycle_;
      pass.kind = EventKind::pass_completed;
      pass.agent = *last_possessor_;
      pass.other = *nearest;
      pass.team = change.team;
      record.events.push_back(pass);
    }
  }
  if (nearest) {
    if (nearest != last_possessor_) kicked_since_possession_[*nearest] = false;
    last_possessor_ = nearest;
  }
  // Possession sticks with the holder until the ball is kicked loose.
  if (nearest) {
    possessor_ = nearest;
  } else if (ball_released_) {
    possessor_.reset();
  }
}

CycleRecord World::step_cycle() {
  CycleRecord record;
  record.cycle = cycle_;
  record.commands = std::move(instant_log_);
  instant_log_.clear();
  ball_released_ = false;

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto it = pending_.find(agents_[i].id);
    if (it == pending_.end() || it->second.empty()) continue;
    auto& queued = it->second;
    std::size_t pick = 0;
    if (queued.size() > 1) {
      std::uniform_int_distribution<std::size_t> choose(0, queued.size() - 1);
      pick = choose(match_rng_);
    }
    apply_movement(i, queued[pick], record);
    record.commands.push_back({agents_[i].id, queued[pick]});
  }
  pending_.clear();

  const double half_len = config_.length / 2;
  const double half_wid = config_.width / 2;
  for (auto& a : agents_) {
    a.position += a.speed * unit(a.heading);
    a.position.x() = std::clamp(a.position.x(), -half_len, half_len);
    a.position.y() = std::clamp(a.position.y(), -half_wid, half_wid);
    a.speed *= config_.agent_decay;
  }

  advance_ball(record);
  update_possession(record);

  if (record.events.empty()) {
    MatchEvent idle;
    idle.cycle = cycle_;
    idle.kind = EventKind::idle;
    record.events.push_back(idle);
  }

  record.agents = agents_;
  record.ball = ball_;
  record.possessor = possessor_;

  sense_body_count_.clear();
  change_view_count_.clear();
  ++cycle_;
  return record;
}

Perception World::snapshot() const { return Perception{cycle_, ball_, agents_}; }

std::map<AgentId, std::vector<Perception>> World::deliver_perceptions() {
  std::map<AgentId, std::vector<Perception>> out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Perception snap = snapshot();
  for (const auto& a : agents_) {
    int count = 1;
    if (config_.perception_jitter) {
      const double r = u(perception_rng_);
      count = r < 0.1 ? 0 : (r < 0.9 ? 1 : 2);
    }
    out[a.id] = std::vector<Perception>(static_cast<std::size_t>(count), snap);
  }
  return out;
}

std::vector<CommandKind> RandomPolicy::decide(const PolicyInput&) {
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_real_distribution<double> wide(-400.0, 400.0);
  std::vector<CommandKind> out;
  const int n = count(rng_);
  for (int i = 0; i < n; ++i) {
    switch (kind(rng_)) {
      case 0: out.emplace_back(Turn{wide(rng_)}); break;
      case 1: out.emplace_back(Dash{wide(rng_)}); break;
      case 2: out.emplace_back(Kick{wide(rng_), wide(rng_)}); break;
      case 3: out.emplace_back(Catch{}); break;
      case 4: out.emplace_back(Say{std::string(static_cast<std::size_t>(std::abs(wide(rng_)) * 2), 'x')}); break;
      case 5: out.emplace_back(SenseBody{}); break;
      default: out.emplace_back(ChangeView{wide(rng_) > 0, wide(rng_) > 0}); break;
    }
  }
  return out;
}

std::vector<CommandKind> ChaserPolicy::decide(const PolicyInput& input) {
  if (!input.latest) return {};
  const Perception& p = *input.latest;
  const AgentState& me = p.agent(input.self);
  const double to_ball = relative_angle(me, p.ball.position);
  const double dist = (p.ball.position - me.position).norm();
  if (dist <= config_.kickable_distance) {
    const Vec2 goal(input.team == Team::home ? config_.length / 2 : -config_.length / 2, 0.0);
    const double power = (goal - me.position).norm() <= kShootingRange ? 100.0 : kDribblePower;
    return {Kick{power, relative_angle(me, goal)}};
  }
  if (std::abs(to_ball) > 15.0) return {Turn{to_ball}};
  return {Dash{std::min(100.0, dist * (1.0 - config_.agent_decay) / config_.dash_gain)}};
}

MatchLog run_match(Policy& home, Policy& away, const FieldConfig& config,
                   const std::optional<Scenario>& scenario) {
  World world = scenario ? World(config, *scenario) : World(config);
  MatchLog log;
  log.config = config;
  std::map<AgentId, Perception> latest;

  for (int c = 0; c < config.cycle_count; ++c) {
    auto perceptions = world.deliver_perceptions();
    try {
      for (const auto& a : world.agents()) {
        const auto& mine = perceptions[a.id];
        if (!mine.empty()) latest[a.id] = mine.back();
        PolicyInput input;
        input.self = a.id;
        input.team = a.team;
        input.cycle = c;
        input.perceptions = mine;
        auto it = latest.find(a.id);
        input.latest = it == latest.end() ? nullptr : &it->second;
        Policy& policy = a.team == Team::home ? home : away;
        for (auto& cmd : policy.decide(input)) world.submit_command(a.id, Command{std::move(cmd), c}, c);
      }
    } catch (const std::exception& e) {
      log.valid = false;
      log.abort_reason = "cycle " + std::to_string(c) + ": " + e.what();
      break;
    }
    CycleRecord record = world.step_cycle();
    log.events.insert(log.events.end(), record.events.begin(), record.events.end());
    log.cycles.push_back(std::move(record));
  }

  log.score = world.score();
  log.outcome = log.score.home > log.score.away   ? Outcome::home_win
                : log.score.away > log.score.home ? Outcome::away_win
                                                  : Outcome::draw;
  return log;
}

}  // namespace soccerseq::sim
