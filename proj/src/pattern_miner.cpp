#include "soccerseq/pattern_miner.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace soccerseq::mining {

void PatternQuery::validate() const {
  if (min_len < 1) throw std::invalid_argument("pattern min_len must be at least 1");
  if (min_len > max_len) throw std::invalid_argument("pattern min_len exceeds max_len");
}

namespace {

void check_alphabet(std::string_view sequence, const std::string& alphabet) {
  if (alphabet.empty()) return;
  for (char c : sequence)
    if (alphabet.find(c) == std::string::npos)
      throw std::invalid_argument(std::string("symbol '") + c + "' is not in the query alphabet");
}

std::vector<std::size_t> prefix_function(std::string_view p) {
  std::vector<std::size_t> pi(p.size(), 0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && p[i] != p[k]) k = pi[k - 1];
    if (p[i] == p[k]) ++k;
    pi[i] = k;
  }
  return pi;
}

}  // namespace

std::set<std::string> enumerate_unique(std::string_view sequence, const PatternQuery& query) {
  query.validate();
  check_alphabet(sequence, query.alphabet);
  std::set<std::string> out;
  if (sequence.size() < query.min_len) return out;
  const std::size_t top = std::min(query.max_len, sequence.size());
  for (std::size_t len = query.min_len; len <= top; ++len) {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i + len <= sequence.size(); ++i) {
      const auto sub = sequence.substr(i, len);
      if (seen.insert(sub).second) out.emplace(sub);
    }
  }
  return out;
}

Occurrences count_occurrences(std::string_view sequence, std::string_view pattern) {
  if (pattern.empty()) throw std::invalid_argument("pattern must be non-empty");
  Occurrences occ;
  if (pattern.size() > sequence.size()) return occ;
  const auto pi = prefix_function(pattern);
  std::size_t k = 0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    while (k > 0 && sequence[i] != pattern[k]) k = pi[k - 1];
    if (sequence[i] == pattern[k]) ++k;
    if (k == pattern.size()) {
      occ.starts.push_back(i + 1 - k);
      k = pi[k - 1];
    }
  }
  occ.count = occ.starts.size();
  return occ;
}

std::vector<TandemRun> find_tandem_repeats(std::string_view sequence, std::string_view pattern) {
  if (pattern.empty()) throw std::invalid_argument("pattern must be non-empty");
  std::vector<TandemRun> runs;
  const std::size_t m = pattern.size();
  std::vector<bool> copy_at(sequence.size(), false);
  for (auto s : count_occurrences(sequence, pattern).starts) copy_at[s] = true;

  std::size_t i = 0;
  while (i < sequence.size()) {
    if (!copy_at[i]) {
      ++i;
      continue;
    }
    std::size_t copies = 1;
    while (i + copies * m < sequence.size() && copy_at[i + copies * m]) ++copies;
    if (copies >= 2) {
      runs.push_back({i, copies});
      i += copies * m;
    } else {
      ++i;
    }
  }
  return runs;
}

PatternReport mine_patterns(const std::vector<NamedSequence>& sequences, const PatternQuery& query,
                            std::size_t min_occurrences) {
  min_occurrences = std::max<std::size_t>(1, min_occurrences);
  PatternReport report;
  for (const auto& seq : sequences) {
    for (const auto& pattern : enumerate_unique(seq.letters, query)) {
      const auto occ = count_occurrences(seq.letters, pattern);
      if (occ.count < min_occurrences) continue;
      report.rows.push_back({pattern, occ.count, seq.id});
      for (const auto& run : find_tandem_repeats(seq.letters, pattern))
        report.tandem_runs.push_back({pattern, seq.id, run.start, run.copies});
    }
  }
  return report;
}

const char* to_string(MotifLabel label) noexcept { return label == MotifLabel::goal ? "goal" : "threat"; }

MotifLabel motif_label_from_string(std::string_view text) {
  if (text == "goal") return MotifLabel::goal;
  if (text == "threat") return MotifLabel::threat;
  throw std::invalid_argument("unknown motif label '" + std::string(text) + "'");
}

const char* to_string(ConfidenceBand band) noexcept {
  switch (band) {
    case ConfidenceBand::p95: return "95%";
    case ConfidenceBand::p75: return "75%";
    case ConfidenceBand::p50: return "50%";
    case ConfidenceBand::below50: return "<50%";
  }
  return "<50%";
}

ConfidenceBand band_for(double percent) noexcept {
  if (percent >= 95.0) return ConfidenceBand::p95;
  if (percent >= 75.0) return ConfidenceBand::p75;
  if (percent >= 50.0) return ConfidenceBand::p50;
  return ConfidenceBand::below50;
}

bool match_motif(std::string_view window, const Motif& motif, bool wildcard_matches_idle) {
  if (motif.pattern.empty()) throw std::invalid_argument("motif template must be non-empty");
  if (window.size() != motif.pattern.size())
    throw std::invalid_argument("window length " + std::to_string(window.size()) +
                                " does not match motif length " + std::to_string(motif.pattern.size()));
  for (std::size_t i = 0; i < window.size(); ++i) {
    const char t = motif.pattern[i];
    if (t == kWildcard) {
      if (window[i] == '-' && !wildcard_matches_idle) return false;
    } else if (t != window[i]) {
      return false;
    }
  }
  return true;
}

bool contains_motif(std::string_view text, const Motif& motif, bool wildcard_matches_idle) {
  const std::size_t m = motif.pattern.size();
  for (std::size_t i = 0; i + m <= text.size(); ++i)
    if (match_motif(text.substr(i, m), motif, wildcard_matches_idle)) return true;
  return false;
}

namespace {

std::string_view preceding_window(const AnnotatedSequence& seq, const Annotation& ev,
                                  std::size_t lookback) {
  const std::size_t end = std::min(ev.index, seq.letters.size());
  const std::size_t begin = end > lookback ? end - lookback : 0;
  return std::string_view(seq.letters).substr(begin, end - begin);
}

void check_rate_inputs(std::span<const AnnotatedSequence> corpus, const Motif& motif,
                       std::size_t lookback) {
  if (corpus.empty()) throw std::invalid_argument("motif corpus is empty");
  if (motif.pattern.empty()) throw std::invalid_argument("motif template must be non-empty");
  if (lookback < motif.pattern.size())
    throw std::invalid_argument("lookback shorter than the motif");
}

}  // namespace

double motif_occurrence_rate(std::span<const AnnotatedSequence> corpus, const Motif& motif,
                             std::size_t lookback, bool wildcard_matches_idle) {
  check_rate_inputs(corpus, motif, lookback);
  std::size_t events = 0;
  std::size_t hits = 0;
  for (const auto& seq : corpus) {
    for (const auto& ev : seq.events) {
      if (ev.label != motif.label) continue;
      ++events;
      if (contains_motif(preceding_window(seq, ev, lookback), motif, wildcard_matches_idle)) ++hits;
    }
  }
  if (events == 0)
    throw std::invalid_argument(std::string("corpus has no ") + to_string(motif.label) + " annotations");
  return 100.0 * static_cast<double>(hits) / static_cast<double>(events);
}

std::vector<MotifStat> motif_table(std::span<const AnnotatedSequence> corpus, const Motif& motif,
                                   std::size_t lookback, bool wildcard_matches_idle) {
  check_rate_inputs(corpus, motif, lookback);
  std::set<std::string> instances;
  const std::size_t m = motif.pattern.size();
  for (const auto& seq : corpus)
    for (const auto& ev : seq.events) {
      if (ev.label != motif.label) continue;
      const auto window = preceding_window(seq, ev, lookback);
      for (std::size_t i = 0; i + m <= window.size(); ++i) {
        const auto sub = window.substr(i, m);
        if (match_motif(sub, motif, wildcard_matches_idle)) instances.emplace(sub);
      }
    }

  std::vector<MotifStat> rows;
  const double family_rate = motif_occurrence_rate(corpus, motif, lookback, wildcard_matches_idle);
  rows.push_back({motif.label, motif.pattern, motif.pattern, family_rate, band_for(family_rate)});
  std::vector<MotifStat> concrete;
  for (const auto& inst : instances) {
    Motif literal{inst, motif.label, ConfidenceBand::below50};
    const double rate = motif_occurrence_rate(corpus, literal, lookback, wildcard_matches_idle);
    concrete.push_back({motif.label, motif.pattern, inst, rate, band_for(rate)});
  }
  std::stable_sort(concrete.begin(), concrete.end(),
                   [](const MotifStat& a, const MotifStat& b) { return a.rate > b.rate; });
  rows.insert(rows.end(), concrete.begin(), concrete.end());
  return rows;
}

void write_pattern_csv(std::ostream& out, const PatternReport& report) {
  out << "# schema_version=" << kMiningSchemaVersion << '\n';
  out << "pattern,occurrences,sequence_id\n";
  for (const auto& r : report.rows) out << r.pattern << ',' << r.occurrences << ',' << r.sequence_id << '\n';
}

void write_tandem_csv(std::ostream& out, const PatternReport& report) {
  out << "# schema_version=" << kMiningSchemaVersion << '\n';
  out << "pattern,start,copies,sequence_id\n";
  for (const auto& r : report.tandem_runs)
    out << r.pattern << ',' << r.start << ',' << r.copies << ',' << r.sequence_id << '\n';
}

void write_motif_csv(std::ostream& out, const std::vector<MotifStat>& rows) {
  out << "# schema_version=" << kMiningSchemaVersion << '\n';
  out << "label,template,sequence,percent,band\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", r.rate);
    out << to_string(r.label) << ',' << r.family << ',' << r.instance << ',' << buf << ','
        << to_string(r.band) << '\n';
  }
}

}  // namespace soccerseq::mining
