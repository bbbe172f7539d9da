#include "soccerseq/sequence_codec.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace soccerseq::codec {

using sim::AgentId;
using sim::EventKind;
using sim::MatchLog;

bool is_action_symbol(char c) noexcept { return kActionAlphabet.find(c) != std::string_view::npos; }

char encode_action(Action action) noexcept {
  switch (action) {
    case Action::turn_to_ball: return 'A';
    case Action::move_to_ball: return 'C';
    case Action::kick_to_goal: return 'G';
    case Action::pass_to_teammate: return 'T';
    case Action::idle: return kIdle;
  }
  return kIdle;
}

Action decode_symbol(char symbol) {
  switch (symbol) {
    case 'A': return Action::turn_to_ball;
    case 'C': return Action::move_to_ball;
    case 'G': return Action::kick_to_goal;
    case 'T': return Action::pass_to_teammate;
    case kIdle: return Action::idle;
    default: throw InvalidSymbolError(symbol);
  }
}

const char* to_string(Action action) noexcept {
  switch (action) {
    case Action::turn_to_ball: return "turn_to_ball";
    case Action::move_to_ball: return "move_to_ball";
    case Action::kick_to_goal: return "kick_to_goal";
    case Action::pass_to_teammate: return "pass_to_teammate";
    case Action::idle: return "idle";
  }
  return "idle";
}

std::size_t window_count(std::size_t cycles, int window_cycles) {
  const auto w = static_cast<std::size_t>(window_cycles);
  return (cycles + w - 1) / w;
}

GameSequence encode_game(const MatchLog& log, int window_cycles) {
  if (window_cycles < 1) throw std::invalid_argument("window must be at least one cycle");
  if (log.cycles.empty()) throw std::invalid_argument("match log has no cycles");

  GameSequence game;
  game.window_cycles = window_cycles;
  const std::size_t n = log.cycles.size();
  const auto w = static_cast<std::size_t>(window_cycles);
  for (std::size_t start = 0; start < n; start += w) {
    const std::size_t end = std::min(n, start + w);
    std::map<AgentId, std::size_t> held;
    for (std::size_t c = start; c < end; ++c)
      if (const auto& p = log.cycles[c].possessor) ++held[*p];
    char letter = kIdle;
    for (const auto& [id, count] : held)
      if (2 * count > end - start) letter = id;
    game.letters.push_back(letter);
  }
  return game;
}

std::vector<std::pair<int, AgentId>> detect_passes(const MatchLog& log) {
  std::map<AgentId, sim::Team> team_of;
  for (const auto& a : log.roster()) team_of[a.id] = a.team;

  std::vector<std::pair<int, AgentId>> passes;
  const auto& cycles = log.cycles;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    for (const auto& ev : cycles[c].events) {
      if (ev.kind != EventKind::kick || !ev.effective) continue;
      const AgentId kicker = ev.agent;
      for (std::size_t k = c; k < cycles.size(); ++k) {
        if (k > c && std::any_of(cycles[k].events.begin(), cycles[k].events.end(), [&](const auto& e) {
              return e.kind == EventKind::kick && e.effective && e.agent == kicker;
            }))
          break;
        if (std::any_of(cycles[k].events.begin(), cycles[k].events.end(),
                        [](const auto& e) { return e.kind == EventKind::goal; }))
          break;
        const auto& p = cycles[k].possessor;
        if (!p || *p == kicker) continue;
        if (team_of.at(*p) == team_of.at(kicker)) passes.emplace_back(static_cast<int>(c), kicker);
        break;
      }
    }
  }
  return passes;
}

PlayerSequence encode_player(const MatchLog& log, const GameSequence& game, AgentId player) {
  const auto roster = log.roster();
  if (std::none_of(roster.begin(), roster.end(), [&](const auto& a) { return a.id == player; }))
    throw sim::UnknownAgentError(player);
  const std::size_t n = log.cycles.size();
  const auto w = static_cast<std::size_t>(game.window_cycles);
  if (game.letters.size() != window_count(n, game.window_cycles))
    throw std::invalid_argument("game sequence does not match the log's window count");

  std::set<int> pass_cycles;
  for (const auto& [cycle, kicker] : detect_passes(log))
    if (kicker == player) pass_cycles.insert(cycle);

  PlayerSequence seq;
  seq.player = player;
  seq.letters.assign(game.letters.size(), kIdle);
  for (std::size_t t = 0; t < game.letters.size(); ++t) {
    if (game.letters[t] != player) continue;
    // Counts indexed by tie-break priority: G, T, C, A.
    std::array<int, 4> counts{};
    for (std::size_t c = t * w; c < std::min(n, (t + 1) * w); ++c) {
      for (const auto& ev : log.cycles[c].events) {
        if (ev.agent != player) continue;
        switch (ev.kind) {
          case EventKind::kick:
            ++counts[pass_cycles.count(static_cast<int>(c)) ? 1 : 0];
            break;
          case EventKind::move: ++counts[2]; break;
          case EventKind::turn: ++counts[3]; break;
          default: break;
        }
      }
    }
    static constexpr char kByPriority[] = {'G', 'T', 'C', 'A'};
    int best = -1;
    for (int i = 0; i < 4; ++i)
      if (counts[i] > 0 && (best < 0 || counts[i] > counts[best])) best = i;
    if (best >= 0) seq.letters[t] = kByPriority[best];
  }
  return seq;
}

std::string game_header(const std::string& match_id) { return "game:" + match_id; }

std::string player_header(AgentId player, const std::string& match_id) {
  return std::string("player:") + player + "@game:" + match_id;
}

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records) {
  out << ";schema_version=" << kSequenceSchemaVersion << '\n';
  for (const auto& r : records) out << '>' << r.header << '\n' << r.letters << '\n';
}

std::vector<FastaRecord> read_fasta(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string line;
  bool versioned = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!versioned) {
      if (line.rfind(";schema_version=", 0) != 0 ||
          std::stoi(line.substr(16)) != kSequenceSchemaVersion)
        throw std::runtime_error("sequence file schema_version missing or mismatched");
      versioned = true;
      continue;
    }
    if (line[0] == ';') continue;
    if (line[0] == '>') {
      records.push_back({line.substr(1), {}});
    } else {
      if (records.empty()) throw std::runtime_error("sequence data before the first header");
      records.back().letters += line;
    }
  }
  return records;
}

void save_fasta(const std::filesystem::path& path, const std::vector<FastaRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_fasta(out, records);
}

std::vector<FastaRecord> load_fasta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_fasta(in);
}

}  // namespace soccerseq::codec
