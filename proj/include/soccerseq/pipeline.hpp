#pragma once

// Artifact-level stages: simulate -> encode -> mine -> train-fmaca ->
// train-lcs -> diagnose. Stages talk to each other only through files under
// the run's output directory.

#include "soccerseq/pattern_miner.hpp"
#include "soccerseq/sequence_codec.hpp"
#include "soccerseq/sim_core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soccerseq::pipeline {

namespace fs = std::filesystem;

inline constexpr int kRunConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kAnnotationSchemaVersion = 1;

struct SimulateSection {
  int matches = 100;
  int cycles = 1000;
  std::string home_policy = "shooter";
  std::string away_policy = "chaser";
  int team_size = 3;
  bool perception_jitter = true;
  std::string feedback_tree;  // optional tree consulted by shooters
  std::optional<std::uint64_t> seed;
};

struct EncodeSection {
  int window = 5;
  std::size_t lookback = 10;
  std::string corpus;
};

struct MineSection {
  std::size_t min_len = 2;
  std::size_t max_len = 8;
  std::size_t min_occurrences = 2;
  std::size_t lookback = 10;
  std::vector<std::string> goal_motifs{"xxCCT"};
  std::vector<std::string> threat_motifs{"CCxCC"};
  bool wildcard_matches_idle = false;
  std::string corpus;
};

struct FmacaSection {
  int k = 2;
  std::size_t window = 5;
  int population = 50;
  int generations = 40;
  double mutation_rate = 0.05;
  double crossover_rate = 0.8;
  int max_depth = 8;
  std::size_t min_node_size = 2;
  std::string corpus;
  std::optional<std::uint64_t> seed;
};

struct LcsSection {
  std::string env = "oracle";
  int iterations = 50000;
  int ga_period = 4000;
  std::size_t population = 200;
  double beta = 0.1;
  double reward_win = 1000.0;
  double reward_play = 50.0;
  int eval_block = 1000;
  std::size_t top_patterns = 20;
  std::string corpus;
  std::optional<std::uint64_t> seed;
};

struct DiagnoseSection {
  std::string rules = "random";
  std::size_t n = 10;
  int generations = 40;
  int run_steps = 10000;
  int trials = 15;
  int window = 10;
  int mi_lag = 1;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  int schema_version = kRunConfigSchemaVersion;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool verbose = false;
  SimulateSection simulate;
  EncodeSection encode;
  MineSection mine;
  FmacaSection train_fmaca;
  LcsSection train_lcs;
  DiagnoseSection diagnose;

  /// Fills every unset stage seed from the master seed.
  void resolve();
  fs::path corpus_dir(const std::string& override_path) const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses a config document; unknown keys anywhere are rejected.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const fs::path& path);
std::string run_config_to_json(const RunConfig& config);

// Corpus.

struct AnnotationRecord {
  std::string sequence_id;
  mining::MotifLabel label = mining::MotifLabel::goal;
  std::size_t index = 0;  // one past the window holding the event
  std::string window;     // the `lookback` letters before index, '-' padded
};

struct ManifestEntry {
  std::string match_id;
  std::uint64_t seed = 0;
  std::string log_path;  // relative to the manifest
  std::vector<std::string> sequence_paths;
  std::string annotations_path;
  int goals = 0;
  std::string created;
};

struct CorpusManifest {
  std::uint64_t master_seed = 0;
  int window_cycles = 0;
  std::string created;
  std::vector<ManifestEntry> entries;
};

void save_manifest(const fs::path& path, const CorpusManifest& manifest);
/// Loads and validates: unique ids, referenced files present.
CorpusManifest load_manifest(const fs::path& path);

std::vector<AnnotationRecord> annotate_match(const sim::MatchLog& log, const codec::GameSequence& game,
                                             const std::vector<codec::PlayerSequence>& players,
                                             const std::string& match_id, std::size_t lookback);

void save_annotations(const fs::path& path, const std::string& match_id, int window_cycles,
                      std::size_t lookback, const std::vector<AnnotationRecord>& records);
std::vector<AnnotationRecord> load_annotations(const fs::path& path);

/// Player sequences of the corpus with their annotations attached.
std::vector<mining::AnnotatedSequence> load_annotated_corpus(const fs::path& corpus_dir);

sim::MatchLog simulate_match(const RunConfig& config, std::uint64_t seed);

/// Runs and encodes `matches` matches (seed_i = master + i) into `dir`.
CorpusManifest build_corpus(const RunConfig& config, const fs::path& dir);

// Stages. Each reads and writes files under config.out_dir unless given an
// explicit output path.

CorpusManifest stage_simulate(const RunConfig& config);
CorpusManifest stage_encode(const RunConfig& config);
void stage_mine(const RunConfig& config);
void stage_train_fmaca(const RunConfig& config, const fs::path& out = {});
void stage_train_lcs(const RunConfig& config);
void stage_diagnose(const RunConfig& config, const fs::path& out = {});

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// All six stages in order; throws StageError naming the failing stage.
void pipeline_run(const RunConfig& config);

}  // namespace soccerseq::pipeline
