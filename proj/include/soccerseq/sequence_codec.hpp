#pragma once

// Match logs as DNA-style strings.
//
// A game sequence has one letter per aggregation window: the id of the agent
// that held the ball for a strict majority of the window's cycles, or '-'.
// A player sequence uses the action alphabet
//   A turn towards ball, C move towards ball, G kick towards goal,
//   T pass to team-mate, - idle / not in possession.

#include "soccerseq/sim_core.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soccerseq::codec {

enum class Action { turn_to_ball, move_to_ball, kick_to_goal, pass_to_teammate, idle };

inline constexpr std::string_view kActionAlphabet = "ACGT-";
inline constexpr char kIdle = '-';

class InvalidSymbolError : public std::invalid_argument {
 public:
  explicit InvalidSymbolError(char symbol)
      : std::invalid_argument(std::string("symbol '") + symbol + "' is outside the action alphabet") {}
};

bool is_action_symbol(char c) noexcept;
char encode_action(Action action) noexcept;
Action decode_symbol(char symbol);
const char* to_string(Action action) noexcept;

struct GameSequence {
  std::string letters;
  int window_cycles = 1;
};

struct PlayerSequence {
  sim::AgentId player = 'a';
  std::string letters;
};

std::size_t window_count(std::size_t cycles, int window_cycles);

GameSequence encode_game(const sim::MatchLog& log, int window_cycles);
PlayerSequence encode_player(const sim::MatchLog& log, const GameSequence& game, sim::AgentId player);

/// Kicks whose ball next reaches a team-mate (before the kicker kicks again)
/// are passes. Returned as (cycle, kicker) pairs.
std::vector<std::pair<int, sim::AgentId>> detect_passes(const sim::MatchLog& log);

// FASTA-like text: optional ";schema_version=N" line, then header/letters pairs.

inline constexpr int kSequenceSchemaVersion = 1;

struct FastaRecord {
  std::string header;  // without the leading '>'
  std::string letters;
};

std::string game_header(const std::string& match_id);
std::string player_header(sim::AgentId player, const std::string& match_id);

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records);
std::vector<FastaRecord> read_fasta(std::istream& in);
void save_fasta(const std::filesystem::path& path, const std::vector<FastaRecord>& records);
std::vector<FastaRecord> load_fasta(const std::filesystem::path& path);

}  // namespace soccerseq::codec
