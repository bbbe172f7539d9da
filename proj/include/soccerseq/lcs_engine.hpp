#pragma once

// Strength-based learning classifier system over action-sequence contexts.
//
// Rules map a fixed-length context (the last L letters of a player sequence)
// to one action letter. Matching rules bid a fraction of their strength, the
// winner is drawn in proportion to its bid and pays it to the previous winner.

#include "soccerseq/pattern_miner.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soccerseq::lcs {

inline constexpr char kDontCare = '#';
inline constexpr std::string_view kActions = "ACGT";
inline constexpr std::string_view kContextSymbols = "ACGT-";

struct ClassifierRule {
  std::string condition;
  char action = 'A';
  double strength = 0.0;

  friend bool operator==(const ClassifierRule&, const ClassifierRule&) = default;
};

using Population = std::vector<ClassifierRule>;

struct LcsConfig {
  std::size_t population_size = 200;
  double beta = 0.1;
  std::size_t context_length = 5;
  int ga_period = 4000;
  int max_iterations = 50000;
  double reward_win = 1000.0;
  double reward_play = 50.0;
  double initial_strength = 100.0;
  double wildcard_probability = 0.33;
  double mutation_rate = 0.02;
  double seed_fraction = 0.5;  // share of GA conditions drawn from mined patterns
  int eval_block = 1000;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct CurveSample {
  int iteration = 0;
  double proportion_correct = 0.0;
};

using LearningCurve = std::vector<CurveSample>;

bool matches(std::string_view condition, std::string_view context) noexcept;

/// Indices of the rules whose condition matches `context`.
std::vector<std::size_t> match_set(std::string_view context, const Population& population);

/// Roulette over bids beta * strength; uniform when every bid is zero.
std::size_t select_winner(const Population& population, std::span<const std::size_t> candidates, double beta,
                          std::mt19937_64& rng);

struct TrainStats {
  std::vector<int> ga_iterations;
  std::size_t covering_count = 0;
  std::size_t clamp_count = 0;
  double dissipated = 0.0;
};

/// Winner pays its bid to `previous` (or the bid dissipates), then collects
/// `reward`. Strengths are clamped at zero.
void bucket_brigade_update(Population& population, std::size_t winner, std::optional<std::size_t> previous,
                           double reward, double beta, TrainStats* stats = nullptr);

/// New rule for an unmatched context; replaces the weakest rule.
std::size_t cover(Population& population, std::string_view context, const LcsConfig& config,
                  std::mt19937_64& rng);

struct MinerStats {
  std::vector<std::string> patterns;      // frequent patterns, most frequent first
  std::vector<mining::Motif> goal_motifs;

  bool empty() const noexcept { return patterns.empty() && goal_motifs.empty(); }
};

/// Condition pool built from mined patterns (left-padded with '#', or their
/// last L letters) and goal motifs ('x' written as '#').
std::vector<std::string> seed_conditions(const MinerStats& stats, std::size_t context_length);

/// Replaces the weakest quarter of the population with offspring of strong
/// parents. Offspring strength is the mean of the parents' strengths.
/// Returns the replaced indices.
std::vector<std::size_t> ga_discover(Population& population, const MinerStats& stats, const LcsConfig& config, std::mt19937_64& rng);

Population random_population(const LcsConfig& config, std::mt19937_64& rng);

struct StepResult {
  double reward = 0.0;
  bool correct = false;
  bool episode_end = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual void reset() = 0;
  virtual std::string context() const = 0;
  virtual StepResult act(char action) = 0;
};

/// Random contexts, a share of them ending in CCT. The correct action is G
/// after xxCCT and otherwise depends on the last letter only. Every correct
/// action earns the play reward.
class OracleEnvironment final : public Environment {
 public:
  struct Options {
    std::size_t context_length = 5;
    double planted_fraction = 0.3;
    int episode_length = 1;  // contexts are independent draws, so one decision per episode
    double reward_play = 50.0;
    std::uint64_t seed = 1;
  };

  explicit OracleEnvironment(Options options);

  static char correct_action(std::string_view context) noexcept;

  void reset() override;
  std::string context() const override { return context_; }
  StepResult act(char action) override;

 private:
  void draw();

  Options options_;
  std::mt19937_64 rng_;
  std::string context_;
  int step_ = 0;
};

/// The same action is correct in every context.
class ConstantEnvironment final : public Environment {
 public:
  ConstantEnvironment(char correct, double reward, std::size_t context_length, std::uint64_t seed);

  void reset() override;
  std::string context() const override { return context_; }
  StepResult act(char action) override;

 private:
  void draw();

  char correct_;
  double reward_;
  std::size_t length_;
  std::mt19937_64 rng_;
  std::string context_;
  int step_ = 0;
};

/// Replays recorded player sequences: the correct action at each position is
/// the letter the player actually produced. Idle positions are skipped.
class MatchEnvironment final : public Environment {
 public:
  MatchEnvironment(std::vector<mining::AnnotatedSequence> sequences, std::size_t context_length,
                   double reward_win, double reward_play);

  void reset() override;
  std::string context() const override;
  StepResult act(char action) override;

 private:
  bool advance_to_action();  // true when it moved on to another sequence

  std::vector<mining::AnnotatedSequence> sequences_;
  std::size_t length_;
  double reward_win_;
  double reward_play_;
  std::size_t sequence_ = 0;
  std::size_t position_ = 0;
};

struct TrainResult {
  Population population;
  LearningCurve curve;
  TrainStats stats;
};

TrainResult train(Environment& env, const LcsConfig& config, const MinerStats& stats = {});

inline constexpr int kLcsSchemaVersion = 1;

void write_population_csv(std::ostream& out, const Population& population);
void write_curve_csv(std::ostream& out, const LearningCurve& curve);

}  // namespace soccerseq::lcs
