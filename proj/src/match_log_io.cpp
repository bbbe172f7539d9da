#include "soccerseq/match_log_io.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>

namespace soccerseq::sim {

using json = nlohmann::ordered_json;

namespace {

json config_to_json(const FieldConfig& c) {
  return json{{"length", c.length},
              {"width", c.width},
              {"goal_width", c.goal_width},
              {"kickable_distance", c.kickable_distance},
              {"cycle_count", c.cycle_count},
              {"rng_seed", c.rng_seed},
              {"team_size", c.team_size},
              {"dash_gain", c.dash_gain},
              {"kick_gain", c.kick_gain},
              {"ball_decay", c.ball_decay},
              {"agent_decay", c.agent_decay},
              {"perception_jitter", c.perception_jitter}};
}

FieldConfig config_from_json(const json& j) {
  FieldConfig c;
  c.length = j.at("length").get<double>();
  c.width = j.at("width").get<double>();
  c.goal_width = j.at("goal_width").get<double>();
  c.kickable_distance = j.at("kickable_distance").get<double>();
  c.cycle_count = j.at("cycle_count").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.team_size = j.at("team_size").get<int>();
  c.dash_gain = j.at("dash_gain").get<double>();
  c.kick_gain = j.at("kick_gain").get<double>();
  c.ball_decay = j.at("ball_decay").get<double>();
  c.agent_decay = j.at("agent_decay").get<double>();
  c.perception_jitter = j.at("perception_jitter").get<bool>();
  return c;
}

std::string id_string(AgentId id) { return std::string(1, id); }

AgentId id_from(const json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 1) throw std::runtime_error("agent id must be a single letter");
  return s[0];
}

json command_to_json(const ExecutedCommand& c) {
  json j{{"agent", id_string(c.agent)}, {"kind", command_name(c.kind)}};
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Turn>) j["args"] = json::array({k.angle});
        else if constexpr (std::is_same_v<T, Dash>) j["args"] = json::array({k.power});
        else if constexpr (std::is_same_v<T, Kick>) j["args"] = json::array({k.power, k.direction});
        else if constexpr (std::is_same_v<T, Say>) j["message"] = k.message;
        else if constexpr (std::is_same_v<T, ChangeView>) {
          j["quality"] = k.high_quality ? "high" : "low";
          j["width"] = k.narrow ? "narrow" : "normal";
        }
      },
      c.kind);
  return j;
}

ExecutedCommand command_from_json(const json& j) {
  ExecutedCommand c;
  c.agent = id_from(j.at("agent"));
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "turn") c.kind = Turn{j.at("args").at(0).get<double>()};
  else if (kind == "dash") c.kind = Dash{j.at("args").at(0).get<double>()};
  else if (kind == "kick") c.kind = Kick{j.at("args").at(0).get<double>(), j.at("args").at(1).get<double>()};
  else if (kind == "catch") c.kind = Catch{};
  else if (kind == "say") c.kind = Say{j.at("message").get<std::string>()};
  else if (kind == "sense_body") c.kind = SenseBody{};
  else if (kind == "change_view")
    c.kind = ChangeView{j.at("quality") == "high", j.at("width") == "narrow"};
  else throw std::runtime_error("unknown command kind '" + kind + "'");
  return c;
}

json event_to_json(const MatchEvent& e) {
  json j{{"kind", to_string(e.kind)}};
  switch (e.kind) {
    case EventKind::goal:
      j["team"] = to_string(e.team);
      break;
    case EventKind::possession_change:
      j["agent"] = id_string(e.agent);
      break;
    case EventKind::pass_completed:
      j["agent"] = id_string(e.agent);
      j["other"] = id_string(e.other);
      break;
    case EventKind::kick:
      j["agent"] = id_string(e.agent);
      j["effective"] = e.effective;
      break;
    case EventKind::turn:
    case EventKind::move:
      j["agent"] = id_string(e.agent);
      break;
    case EventKind::idle:
      break;
  }
  return j;
}

MatchEvent event_from_json(const json& j, int cycle, const std::vector<AgentState>& roster) {
  MatchEvent e;
  e.cycle = cycle;
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("agent")) {
    e.agent = id_from(j.at("agent"));
    for (const auto& a : roster)
      if (a.id == e.agent) e.team = a.team;
  }
  if (j.contains("other")) e.other = id_from(j.at("other"));
  if (j.contains("team")) e.team = team_from_string(j.at("team").get<std::string>());
  if (j.contains("effective")) e.effective = j.at("effective").get<bool>();
  return e;
}

}  // namespace

void write_match_log(std::ostream& out, const MatchLog& log) {
  json header{{"schema_version", kMatchLogSchemaVersion},
              {"type", "header"},
              {"seed", log.config.rng_seed},
              {"config", config_to_json(log.config)}};
  out << header.dump() << '\n';

  for (const auto& rec : log.cycles) {
    json agents = json::array();
    for (const auto& a : rec.agents)
      agents.push_back({{"id", id_string(a.id)},
                        {"team", to_string(a.team)},
                        {"x", a.position.x()},
                        {"y", a.position.y()},
                        {"heading", a.heading},
                        {"speed", a.speed}});
    json commands = json::array();
    for (const auto& c : rec.commands) commands.push_back(command_to_json(c));
    json events = json::array();
    for (const auto& e : rec.events) events.push_back(event_to_json(e));
    json line{{"cycle", rec.cycle},
              {"agents", std::move(agents)},
              {"ball",
               {{"x", rec.ball.position.x()},
                {"y", rec.ball.position.y()},
                {"vx", rec.ball.velocity.x()},
                {"vy", rec.ball.velocity.y()}}},
              {"possessor", rec.possessor ? json(id_string(*rec.possessor)) : json(nullptr)},
              {"commands", std::move(commands)},
              {"events", std::move(events)}};
    out << line.dump() << '\n';
  }

  json closing{{"type", "outcome"},
               {"outcome", to_string(log.outcome)},
               {"score", {{"home", log.score.home}, {"away", log.score.away}}},
               {"valid", log.valid}};
  if (!log.valid) closing["abort_reason"] = log.abort_reason;
  out << closing.dump() << '\n';
}

MatchLog read_match_log(std::istream& in) {
  MatchLog log;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("match log is empty");
  const json header = json::parse(line);
  if (header.value("schema_version", -1) != kMatchLogSchemaVersion)
    throw std::runtime_error("match log schema_version mismatch");
  log.config = config_from_json(header.at("config"));

  bool closed = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("type") && j.at("type") == "outcome") {
      const auto outcome = j.at("outcome").get<std::string>();
      log.outcome = outcome == "home_win"   ? Outcome::home_win
                    : outcome == "away_win" ? Outcome::away_win
                                            : Outcome::draw;
      log.score.home = j.at("score").at("home").get<int>();
      log.score.away = j.at("score").at("away").get<int>();
      log.valid = j.at("valid").get<bool>();
      log.abort_reason = j.value("abort_reason", std::string{});
      closed = true;
      break;
    }
    CycleRecord rec;
    rec.cycle = j.at("cycle").get<int>();
    for (const auto& a : j.at("agents")) {
      AgentState s;
      s.id = id_from(a.at("id"));
      s.team = team_from_string(a.at("team").get<std::string>());
      s.position = Vec2(a.at("x").get<double>(), a.at("y").get<double>());
      s.heading = a.at("heading").get<double>();
      s.speed = a.value("speed", 0.0);
      rec.agents.push_back(s);
    }
    const auto& b = j.at("ball");
    rec.ball.position = Vec2(b.at("x").get<double>(), b.at("y").get<double>());
    rec.ball.velocity = Vec2(b.at("vx").get<double>(), b.at("vy").get<double>());
    if (!j.at("possessor").is_null()) rec.possessor = id_from(j.at("possessor"));
    for (const auto& c : j.at("commands")) rec.commands.push_back(command_from_json(c));
    for (const auto& e : j.at("events")) rec.events.push_back(event_from_json(e, rec.cycle, rec.agents));
    log.events.insert(log.events.end(), rec.events.begin(), rec.events.end());
    log.cycles.push_back(std::move(rec));
  }
  if (!closed) throw std::runtime_error("match log has no outcome line");
  return log;
}

void save_match_log(const std::filesystem::path& path, const MatchLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_match_log(out, log);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

MatchLog load_match_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_match_log(in);
}

}  // namespace soccerseq::sim
