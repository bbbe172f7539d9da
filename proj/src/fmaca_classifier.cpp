#include "soccerseq/fmaca_classifier.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace soccerseq::fmaca {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

fca::Rule random_rule(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fca::kAllRules.size() - 1);
  return fca::Rule(fca::kAllRules[pick(rng)]);
}

int majority_label(std::span<const LabeledPattern> subset) {
  std::map<int, std::size_t> counts;
  for (const auto& p : subset) ++counts[p.label];
  int best = 0;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts)
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  return best;
}

std::vector<State> terminals_of(const RuleVector& rules, std::span<const LabeledPattern> subset,
                                const TreeConfig& tree) {
  std::vector<State> out;
  out.reserve(subset.size());
  for (const auto& p : subset) out.push_back(basin_of(p.features, rules, tree.max_steps, tree.tolerance).terminal);
  return out;
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("GA population must be at least 2");
  if (generations < 1) throw std::invalid_argument("GA needs at least one generation");
  if (!(mutation_rate >= 0 && mutation_rate <= 1)) throw std::invalid_argument("mutation rate outside [0, 1]");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw std::invalid_argument("crossover rate outside [0, 1]");
}

Basin basin_of(const State& pattern, const RuleVector& rules, std::size_t max_steps, double tolerance) {
  if (static_cast<std::size_t>(pattern.size()) != rules.size())
    throw std::invalid_argument("pattern dimension does not match the rule vector");
  const auto traj = fca::evolve(pattern, rules, max_steps, tolerance);
  Basin b;
  b.terminal = fca::attractor_of(traj);
  b.key = fca::quantize(b.terminal);
  b.overflow = traj.terminal == fca::TerminalKind::truncated;
  return b;
}

std::size_t nearest_centroid(std::span<const State> centroids, const State& point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const double d = (centroids[i] - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Grouping group_basins(std::span<const State> terminals, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (terminals.empty()) throw std::invalid_argument("no terminals to group");

  // Distinct terminal values in order of first appearance.
  std::vector<std::size_t> distinct;
  std::set<std::vector<std::int64_t>> seen;
  for (std::size_t i = 0; i < terminals.size(); ++i)
    if (seen.insert(fca::quantize(terminals[i])).second) distinct.push_back(i);

  Grouping g;
  g.k = k;
  if (distinct.size() < static_cast<std::size_t>(k)) {
    g.k = static_cast<int>(distinct.size());
    g.reduced = true;
  }

  std::mt19937_64 rng(seed);
  std::shuffle(distinct.begin(), distinct.end(), rng);
  distinct.resize(static_cast<std::size_t>(g.k));
  std::sort(distinct.begin(), distinct.end());
  std::vector<State> centroids;
  for (auto i : distinct) centroids.push_back(terminals[i]);

  std::vector<std::size_t> assign(terminals.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < terminals.size(); ++i) {
      const auto c = nearest_centroid(centroids, terminals[i]);
      if (c != assign[i]) changed = true;
      assign[i] = c;
    }
    if (!changed) break;
    std::vector<State> sums(centroids.size(), State::Zero(terminals[0].size()));
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < terminals.size(); ++i) {
      sums[assign[i]] += terminals[i];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c)
      if (counts[c] > 0) centroids[c] = sums[c] / static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < terminals.size(); ++i) assign[i] = nearest_centroid(centroids, terminals[i]);

  // Renumber by first appearance, dropping clusters that ended up empty.
  std::map<std::size_t, int> renumber;
  for (auto a : assign)
    if (!renumber.count(a)) {
      const int next = static_cast<int>(renumber.size());
      renumber[a] = next;
      g.centroids.push_back(centroids[a]);
    }
  g.assignment.reserve(assign.size());
  for (auto a : assign) g.assignment.push_back(renumber[a]);
  g.k = static_cast<int>(g.centroids.size());
  return g;
}

double purity(std::span<const int> assignment, std::span<const int> labels) {
  if (assignment.size() != labels.size()) throw std::invalid_argument("assignment/label size mismatch");
  if (assignment.empty()) throw std::invalid_argument("purity of an empty subset");
  std::map<int, std::map<int, std::size_t>> table;
  for (std::size_t i = 0; i < labels.size(); ++i) ++table[assignment[i]][labels[i]];
  std::size_t majority = 0;
  for (const auto& [basin, counts] : table) {
    std::size_t best = 0;
    for (const auto& [label, n] : counts) best = std::max(best, n);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(labels.size());
}

double fitness(const RuleVector& rules, std::span<const LabeledPattern> subset, int k, std::uint64_t seed,
               const TreeConfig& tree) {
  if (subset.empty()) throw std::invalid_argument("fitness of an empty subset");
  const auto terminals = terminals_of(rules, subset, tree);
  const auto grouping = group_basins(terminals, k, seed);
  std::vector<int> labels;
  labels.reserve(subset.size());
  for (const auto& p : subset) labels.push_back(p.label);
  return purity(grouping.assignment, labels);
}

GaResult evolve_rules(std::span<const LabeledPattern> subset, int k, const GaConfig& ga,
                      const TreeConfig& tree, const GenerationObserver& observer) {
  ga.validate();
  if (subset.empty()) throw std::invalid_argument("cannot evolve rules for an empty subset");
  const auto n = static_cast<std::size_t>(subset.front().features.size());
  std::mt19937_64 rng(ga.rng_seed);
  const std::uint64_t kmeans_seed = mix(ga.rng_seed, 7);

  std::vector<RuleVector> population(static_cast<std::size_t>(ga.population_size));
  for (auto& individual : population) {
    individual.reserve(n);
    for (std::size_t i = 0; i < n; ++i) individual.push_back(random_rule(rng));
  }

  std::map<std::vector<int>, double> cache;
  auto score = [&](const RuleVector& rv) {
    auto key = fca::rule_numbers(rv);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double f = fitness(rv, subset, k, kmeans_seed, tree);
    cache.emplace(std::move(key), f);
    return f;
  };

  GaResult result;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int gen = 0; gen < ga.generations; ++gen) {
    std::vector<double> scores;
    scores.reserve(population.size());
    for (const auto& ind : population) scores.push_back(score(ind));

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    if (gen == 0 || scores[order[0]] > result.best_fitness) {
      result.best = population[order[0]];
      result.best_fitness = scores[order[0]];
    }
    result.generations_run = gen + 1;
    if (observer) observer(gen, population[order[0]], scores[order[0]]);
    if (ga.stop_when_perfect && result.best_fitness >= 1.0) break;
    if (gen + 1 == ga.generations) break;

    auto tournament = [&]() -> const RuleVector& {
      std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
      const auto a = pick(rng), b = pick(rng);
      return scores[a] >= scores[b] ? population[a] : population[b];
    };

    std::vector<RuleVector> next;
    next.reserve(population.size());
    next.push_back(population[order[0]]);
    if (population.size() > 2) next.push_back(population[order[1]]);
    while (next.size() < population.size()) {
      RuleVector child = tournament();
      if (n > 1 && unit(rng) < ga.crossover_rate) {
        const RuleVector& other = tournament();
        std::uniform_int_distribution<std::size_t> cut(1, n - 1);
        const auto point = cut(rng);
        std::copy(other.begin() + static_cast<std::ptrdiff_t>(point), other.end(),
                  child.begin() + static_cast<std::ptrdiff_t>(point));
      }
      for (auto& cell : child)
        if (unit(rng) < ga.mutation_rate) cell = random_rule(rng);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }
  return result;
}

namespace {

struct Builder {
  const GaConfig& ga;
  const TreeConfig& config;
  std::uint64_t node_counter = 0;

  Node partition(std::span<const LabeledPattern> subset, int depth) {
    Node node;
    node.size = subset.size();
    std::set<int> classes;
    for (const auto& p : subset) classes.insert(p.label);

    node.label = majority_label(subset);
    if (classes.size() == 1) return node;
    if (depth >= config.max_depth || subset.size() < config.min_node_size) {
      node.impure = true;
      return node;
    }

    const int k = static_cast<int>(classes.size());
    GaConfig local = ga;
    local.rng_seed = mix(ga.rng_seed, node_counter++);
    const auto evolved = evolve_rules(subset, k, local, config);
    const auto terminals = terminals_of(evolved.best, subset, config);
    const auto grouping = group_basins(terminals, k, mix(local.rng_seed, 7));

    if (grouping.k < 2) {
      node.impure = true;
      return node;
    }

    std::vector<std::vector<LabeledPattern>> members(static_cast<std::size_t>(grouping.k));
    for (std::size_t i = 0; i < subset.size(); ++i)
      members[static_cast<std::size_t>(grouping.assignment[i])].push_back(subset[i]);

    node.leaf = false;
    node.rules = evolved.best;
    node.k = grouping.k;
    node.centroids = grouping.centroids;
    for (const auto& m : members) node.children.push_back(partition(m, depth + 1));
    return node;
  }
};

}  // namespace

FmacaTree build_tree(std::span<const LabeledPattern> training, int num_classes, const GaConfig& ga,
                     const TreeConfig& config) {
  ga.validate();
  if (training.empty()) throw TrainingError("training set is empty");
  const auto dim = training.front().features.size();
  if (dim < 1) throw TrainingError("patterns need at least one feature");
  for (const auto& p : training) {
    if (p.features.size() != dim) throw TrainingError("patterns have differing dimensions");
    if (p.label < 1 || p.label > num_classes)
      throw TrainingError("label " + std::to_string(p.label) + " outside 1.." + std::to_string(num_classes));
    fca::check_state(p.features);
  }

  FmacaTree tree;
  tree.dimension = static_cast<std::size_t>(dim);
  tree.num_classes = num_classes;
  Builder builder{ga, config};
  tree.root = builder.partition(training, 0);
  return tree;
}

Classification classify(const FmacaTree& tree, const State& pattern, const TreeConfig& config) {
  if (static_cast<std::size_t>(pattern.size()) != tree.dimension)
    throw std::invalid_argument("pattern dimension does not match the tree");
  Classification out;
  const Node* node = &tree.root;
  while (!node->leaf) {
    const auto basin = basin_of(pattern, node->rules, config.max_steps, config.tolerance);
    if (basin.overflow) out.fallback = true;
    node = &node->children[nearest_centroid(node->centroids, basin.terminal)];
  }
  out.label = node->label;
  return out;
}

std::size_t depth(const Node& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, 1 + depth(c));
  return d;
}

State encode_window(std::string_view window) {
  State s(static_cast<Eigen::Index>(window.size()));
  for (std::size_t i = 0; i < window.size(); ++i) {
    double v = 0.0;
    switch (window[i]) {
      case 'A': v = 0.2; break;
      case 'C': v = 0.4; break;
      case 'G': v = 0.6; break;
      case 'T': v = 0.8; break;
      case '-': v = 0.0; break;
      default:
        throw std::invalid_argument(std::string("symbol '") + window[i] + "' cannot be encoded");
    }
    s(static_cast<Eigen::Index>(i)) = v;
  }
  return s;
}

FeedbackResult ca_feedback(const FmacaTree& tree, std::string_view window) {
  FeedbackResult out;
  if (window.size() < tree.dimension) {
    out.flagged = true;
    return out;
  }
  window = window.substr(window.size() - tree.dimension);
  const auto c = classify(tree, encode_window(window));
  out.decision = c.label == tree.goal_class ? Feedback::proceed : Feedback::veto;
  return out;
}

FmacaTree train_feedback_tree(const std::vector<std::pair<std::string, int>>& windows, std::size_t window,
                              const GaConfig& ga, const TreeConfig& config) {
  if (window < 1) throw TrainingError("feedback window must be at least 1");
  std::vector<LabeledPattern> training;
  for (const auto& [text, label] : windows) {
    if (text.size() < window) continue;
    training.push_back({encode_window(std::string_view(text).substr(text.size() - window)), label});
  }
  if (training.empty()) throw TrainingError("no training windows of length " + std::to_string(window));
  FmacaTree tree = build_tree(training, 2, ga, config);
  tree.window = window;
  tree.goal_class = 1;
  tree.class_names = {{1, "goal"}, {2, "threat"}};
  return tree;
}

}  // namespace soccerseq::fmaca
