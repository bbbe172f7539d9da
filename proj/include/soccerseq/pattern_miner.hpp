#pragma once

// Repeat and motif mining over action/game sequences.

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soccerseq::mining {

struct PatternQuery {
  std::size_t min_len = 1;
  std::size_t max_len = 1;
  std::string alphabet = "ACGT-";  // empty accepts any symbol

  void validate() const;
};

/// All distinct substrings with length in [min_len, max_len], sorted.
std::set<std::string> enumerate_unique(std::string_view sequence, const PatternQuery& query);

struct Occurrences {
  std::size_t count = 0;
  std::vector<std::size_t> starts;
};

/// Overlapping occurrences of a non-empty pattern (Knuth-Morris-Pratt scan).
Occurrences count_occurrences(std::string_view sequence, std::string_view pattern);

struct TandemRun {
  std::size_t start = 0;
  std::size_t copies = 0;

  friend bool operator==(const TandemRun&, const TandemRun&) = default;
};

/// Maximal runs of two or more back-to-back copies, scanned left to right.
std::vector<TandemRun> find_tandem_repeats(std::string_view sequence, std::string_view pattern);

struct NamedSequence {
  std::string id;
  std::string letters;
};

struct PatternRow {
  std::string pattern;
  std::size_t occurrences = 0;
  std::string sequence_id;
};

struct TandemRow {
  std::string pattern;
  std::string sequence_id;
  std::size_t start = 0;
  std::size_t copies = 0;
};

struct PatternReport {
  std::vector<PatternRow> rows;
  std::vector<TandemRow> tandem_runs;
};

/// Per sequence: enumerate unique patterns, count them, locate tandem runs.
/// Rows below `min_occurrences` are dropped (always at least 1).
PatternReport mine_patterns(const std::vector<NamedSequence>& sequences, const PatternQuery& query,
                            std::size_t min_occurrences = 1);

// Goal / threat motifs. 'x' in a template matches any single symbol except '-'
// (unless idle matching is switched on).

enum class MotifLabel { goal, threat };
enum class ConfidenceBand { p95, p75, p50, below50 };

const char* to_string(MotifLabel label) noexcept;
MotifLabel motif_label_from_string(std::string_view text);
const char* to_string(ConfidenceBand band) noexcept;
ConfidenceBand band_for(double percent) noexcept;

struct Motif {
  std::string pattern;  // over the alphabet plus 'x'
  MotifLabel label = MotifLabel::goal;
  ConfidenceBand band = ConfidenceBand::below50;
};

inline constexpr char kWildcard = 'x';

bool match_motif(std::string_view window, const Motif& motif, bool wildcard_matches_idle = false);

/// True if any offset of `text` matches the motif.
bool contains_motif(std::string_view text, const Motif& motif, bool wildcard_matches_idle = false);

struct Annotation {
  std::size_t index = 0;  // position of the event in the sequence
  MotifLabel label = MotifLabel::goal;
};

struct AnnotatedSequence {
  std::string id;
  std::string letters;
  std::vector<Annotation> events;
};

/// Percentage of events carrying the motif's label whose preceding
/// `lookback` letters contain a match of the motif.
double motif_occurrence_rate(std::span<const AnnotatedSequence> corpus, const Motif& motif,
                             std::size_t lookback, bool wildcard_matches_idle = false);

struct MotifStat {
  MotifLabel label = MotifLabel::goal;
  std::string family;    // the template
  std::string instance;  // concrete pattern, or the template itself
  double rate = 0.0;
  ConfidenceBand band = ConfidenceBand::below50;
};

/// The template's own rate followed by every concrete instance seen in a
/// pre-event window, highest rate first.
std::vector<MotifStat> motif_table(std::span<const AnnotatedSequence> corpus, const Motif& motif,
                                   std::size_t lookback, bool wildcard_matches_idle = false);

inline constexpr int kMiningSchemaVersion = 1;

void write_pattern_csv(std::ostream& out, const PatternReport& report);
void write_tandem_csv(std::ostream& out, const PatternReport& report);
void write_motif_csv(std::ostream& out, const std::vector<MotifStat>& rows);

}  // namespace soccerseq::mining
