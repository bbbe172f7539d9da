#pragma once

// MatchLog as JSON Lines: a header line (schema version, seed, field
// configuration), one line per cycle, and a closing outcome line.

#include "soccerseq/sim_core.hpp"

#include <filesystem>
#include <iosfwd>

namespace soccerseq::sim {

inline constexpr int kMatchLogSchemaVersion = 1;

void write_match_log(std::ostream& out, const MatchLog& log);
MatchLog read_match_log(std::istream& in);

void save_match_log(const std::filesystem::path& path, const MatchLog& log);
MatchLog load_match_log(const std::filesystem::path& path);

}  // namespace soccerseq::sim
