#pragma once

// Tree-structured classifier built from fuzzy multiple-attractor CA.
//
// Each internal node owns a rule vector. A pattern is evolved to its attractor
// under that vector; attractors are grouped into k basins by k-means and each
// basin is either a class leaf or a further node. Rule vectors are found by a
// genetic algorithm maximizing basin purity.

#include "soccerseq/fca_engine.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soccerseq::fmaca {

using State = Eigen::VectorXd;
using fca::RuleVector;

struct LabeledPattern {
  State features;
  int label = 1;
};

struct GaConfig {
  int population_size = 50;
  int generations = 40;
  double mutation_rate = 0.05;
  double crossover_rate = 0.8;
  std::uint64_t rng_seed = 1;
  bool stop_when_perfect = true;

  void validate() const;
};

struct TreeConfig {
  int max_depth = 8;
  std::size_t min_node_size = 2;
  std::size_t max_steps = 64;
  double tolerance = fca::kDefaultTolerance;
};

struct Basin {
  State terminal;
  std::vector<std::int64_t> key;  // terminal quantized to the 1e-6 grid
  bool overflow = false;          // no attractor reached within max_steps
};

Basin basin_of(const State& pattern, const RuleVector& rules, std::size_t max_steps = 64,
               double tolerance = fca::kDefaultTolerance);

struct Grouping {
  std::vector<int> assignment;  // cluster per terminal, numbered by first appearance
  std::vector<State> centroids;
  int k = 0;
  bool reduced = false;  // fewer distinct terminals than requested
};

Grouping group_basins(std::span<const State> terminals, int k, std::uint64_t seed);

std::size_t nearest_centroid(std::span<const State> centroids, const State& point);

/// Sum over basins of the majority-class count, divided by the number of
/// patterns.
double purity(std::span<const int> assignment, std::span<const int> labels);

double fitness(const RuleVector& rules, std::span<const LabeledPattern> subset, int k,
               std::uint64_t seed, const TreeConfig& tree = {});

struct GaResult {
  RuleVector best;
  double best_fitness = 0.0;
  int generations_run = 0;
};

/// Called once per generation with the generation's best individual.
using GenerationObserver = std::function<void(int generation, const RuleVector& best, double fitness)>;

GaResult evolve_rules(std::span<const LabeledPattern> subset, int k, const GaConfig& ga,
                      const TreeConfig& tree = {}, const GenerationObserver& observer = {});

struct Node {
  bool leaf = true;
  int label = 0;
  bool impure = false;
  std::size_t size = 0;
  RuleVector rules;
  int k = 0;
  std::vector<State> centroids;
  std::vector<Node> children;  // children[i] owns basin i
};

struct FmacaTree {
  Node root;
  std::size_t dimension = 0;
  int num_classes = 0;

  // Metadata used by in-match feedback.
  int feature_map_version = 1;
  std::size_t window = 0;
  int goal_class = 1;
  std::map<int, std::string> class_names;
};

class TrainingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

FmacaTree build_tree(std::span<const LabeledPattern> training, int num_classes, const GaConfig& ga,
                     const TreeConfig& tree = {});

struct Classification {
  int label = 0;
  bool fallback = false;  // passed through an overflow basin
};

Classification classify(const FmacaTree& tree, const State& pattern,
                        const TreeConfig& config = {});

std::size_t depth(const Node& node);

// In-match feedback over action windows.

/// A 0.2, C 0.4, G 0.6, T 0.8, '-' 0.0; one cell per position.
State encode_window(std::string_view window);

enum class Feedback { proceed, veto };

struct FeedbackResult {
  Feedback decision = Feedback::proceed;
  bool flagged = false;  // window too short to judge
};

FeedbackResult ca_feedback(const FmacaTree& tree, std::string_view window);

/// Trains on labelled windows: label 1 = goal, 2 = threat.
FmacaTree train_feedback_tree(const std::vector<std::pair<std::string, int>>& windows,
                              std::size_t window, const GaConfig& ga, const TreeConfig& config = {});

inline constexpr int kTreeSchemaVersion = 1;

std::string tree_to_json(const FmacaTree& tree);
FmacaTree tree_from_json(std::string_view text);
void save_tree(const std::filesystem::path& path, const FmacaTree& tree);
FmacaTree load_tree(const std::filesystem::path& path);

}  // namespace soccerseq::fmaca
