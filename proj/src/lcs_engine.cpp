#include "soccerseq/lcs_engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace soccerseq::lcs {

namespace {

char pick(std::string_view symbols, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, symbols.size() - 1);
  return symbols[d(rng)];
}

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::string random_condition(std::size_t length, double wildcard_probability, std::mt19937_64& rng) {
  std::string c(length, kDontCare);
  for (auto& ch : c)
    if (unit(rng) >= wildcard_probability) ch = pick(kContextSymbols, rng);
  return c;
}

std::size_t weakest(const Population& population) {
  std::size_t w = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (population[i].strength < population[w].strength) w = i;
  return w;
}

std::size_t roulette(const Population& population, std::span<const std::size_t> pool, std::mt19937_64& rng) {
  double total = 0.0;
  for (auto i : pool) total += population[i].strength;
  if (total <= 0.0) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  }
  double r = unit(rng) * total;
  for (auto i : pool) {
    r -= population[i].strength;
    if (r < 0.0) return i;
  }
  return pool.back();
}

std::string fit_condition(std::string_view text, std::size_t length) {
  if (text.size() >= length) return std::string(text.substr(text.size() - length));
  return std::string(length - text.size(), kDontCare) + std::string(text);
}

bool valid_condition(std::string_view c) {
  return std::all_of(c.begin(), c.end(),
                     [](char ch) { return ch == kDontCare || kContextSymbols.find(ch) != std::string_view::npos; });
}

}  // namespace

void LcsConfig::validate() const {
  if (population_size < 1) throw std::invalid_argument("LCS population must be non-empty");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("bid fraction must lie in (0, 1)");
  if (context_length < 1) throw std::invalid_argument("context length must be at least 1");
  if (ga_period < 1) throw std::invalid_argument("GA period must be at least 1");
  if (max_iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (!(reward_win > reward_play && reward_play > 0))
    throw std::invalid_argument("rewards must satisfy reward_win > reward_play > 0");
  if (initial_strength < 0) throw std::invalid_argument("initial strength must be non-negative");
  for (double p : {wildcard_probability, mutation_rate, seed_fraction})
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("LCS probabilities must lie in [0, 1]");
  if (eval_block < 1) throw std::invalid_argument("evaluation block must be at least 1");
}

bool matches(std::string_view condition, std::string_view context) noexcept {
  if (condition.size() != context.size()) return false;
  for (std::size_t i = 0; i < condition.size(); ++i)
    if (condition[i] != kDontCare && condition[i] != context[i]) return false;
  return true;
}

std::vector<std::size_t> match_set(std::string_view context, const Population& population) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < population.size(); ++i)
    if (matches(population[i].condition, context)) out.push_back(i);
  return out;
}

std::size_t select_winner(const Population& population, std::span<const std::size_t> candidates, double beta,
                          std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("cannot select from an empty match set");
  double total = 0.0;
  for (auto i : candidates) total += beta * population[i].strength;
  if (total <= 0.0) {
    std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
    return candidates[d(rng)];
  }
  double r = unit(rng) * total;
  for (auto i : candidates) {
    r -= beta * population[i].strength;
    if (r < 0.0) return i;
  }
  return candidates.back();
}

void bucket_brigade_update(Population& population, std::size_t winner, std::optional<std::size_t> previous,
                           double reward, double beta, TrainStats* stats) {
  auto& w = population.at(winner);
  const double bid = beta * w.strength;
  w.strength -= bid;
  if (previous) {
    population.at(*previous).strength += bid;
  } else if (stats) {
    stats->dissipated += bid;
  }
  w.strength += reward;
  for (auto i : {std::optional<std::size_t>(winner), previous}) {
    if (i && population[*i].strength < 0.0) {
      population[*i].strength = 0.0;
      if (stats) ++stats->clamp_count;
    }
  }
}

std::size_t cover(Population& population, std::string_view context, const LcsConfig& config,
                  std::mt19937_64& rng) {
  if (population.empty()) throw std::invalid_argument("cannot cover into an empty population");
  double mean = 0.0;
  for (const auto& r : population) mean += r.strength;
  mean /= static_cast<double>(population.size());

  ClassifierRule rule;
  rule.condition = std::string(context);
  for (auto& ch : rule.condition)
    if (unit(rng) < config.wildcard_probability) ch = kDontCare;
  rule.action = pick(kActions, rng);
  rule.strength = mean;
  const auto slot = weakest(population);
  population[slot] = std::move(rule);
  return slot;
}

std::vector<std::string> seed_conditions(const MinerStats& stats, std::size_t context_length) {
  std::vector<std::string> out;
  auto add = [&](std::string c) {
    if (c.empty() || !valid_condition(c)) return;
    c = fit_condition(c, context_length);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  for (const auto& m : stats.goal_motifs) {
    std::string c = m.pattern;
    std::replace(c.begin(), c.end(), mining::kWildcard, kDontCare);
    add(std::move(c));
  }
  for (const auto& p : stats.patterns) add(p);
  return out;
}

std::vector<std::size_t> ga_discover(Population& population, const MinerStats& stats, const LcsConfig& config,
                                     std::mt19937_64& rng) {
  const std::size_t n = population.size();
  if (n < 2) return {};
  const std::size_t replace = std::max<std::size_t>(1, n / 4);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return population[a].strength < population[b].strength; });
  std::vector<std::size_t> replaced(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(replace));
  const std::vector<std::size_t> parents(order.begin() + static_cast<std::ptrdiff_t>(replace), order.end());
  const auto pool = seed_conditions(stats, config.context_length);
  const std::size_t L = config.context_length;

  std::vector<ClassifierRule> offspring;
  for (std::size_t slot = 0; slot < replaced.size(); ++slot) {
    const auto& a = population[roulette(population, parents, rng)];
    const auto& b = population[roulette(population, parents, rng)];

    ClassifierRule child;
    child.action = unit(rng) < 0.5 ? a.action : b.action;
    if (unit(rng) < config.mutation_rate) child.action = pick(kActions, rng);

    if (stats.empty()) {
      child.condition = random_condition(L, config.wildcard_probability, rng);
    } else if (!pool.empty() && unit(rng) < config.seed_fraction) {
      std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
      child.condition = pool[d(rng)];
    } else {
      std::uniform_int_distribution<std::size_t> cut(0, L);
      const auto point = cut(rng);
      child.condition = a.condition.substr(0, point) + b.condition.substr(point);
      for (auto& ch : child.condition)
        if (unit(rng) < config.mutation_rate) ch = unit(rng) < 0.5 ? kDontCare : pick(kContextSymbols, rng);
    }
    child.strength = 0.5 * (a.strength + b.strength);
    offspring.push_back(std::move(child));
  }
  for (std::size_t i = 0; i < replaced.size(); ++i) population[replaced[i]] = std::move(offspring[i]);
  std::sort(replaced.begin(), replaced.end());
  return replaced;
}

Population random_population(const LcsConfig& config, std::mt19937_64& rng) {
  Population pop;
  pop.reserve(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    ClassifierRule r;
    r.condition = random_condition(config.context_length, config.wildcard_probability, rng);
    r.action = pick(kActions, rng);
    r.strength = config.initial_strength;
    pop.push_back(std::move(r));
  }
  return pop;
}

OracleEnvironment::OracleEnvironment(Options options) : options_(options), rng_(options.seed) {
  if (options_.context_length < 3) throw std::invalid_argument("oracle contexts need at least 3 letters");
  if (options_.episode_length < 1) throw std::invalid_argument("episode length must be at least 1");
  draw();
}

char OracleEnvironment::correct_action(std::string_view context) noexcept {
  if (context.size() >= 3 && context.substr(context.size() - 3) == "CCT") return 'G';
  switch (context.empty() ? '-' : context.back()) {
    case 'A': return 'C';
    case 'C': return 'A';
    case 'G': return 'T';
    default: return 'A';
  }
}

void OracleEnvironment::draw() {
  context_.assign(options_.context_length, '-');
  if (unit(rng_) < options_.planted_fraction) {
    for (std::size_t i = 0; i + 3 < context_.size(); ++i) context_[i] = pick(kActions, rng_);
    context_.replace(context_.size() - 3, 3, "CCT");
  } else {
    for (auto& ch : context_) ch = pick(kContextSymbols, rng_);
  }
}

void OracleEnvironment::reset() {
  step_ = 0;
  draw();
}

StepResult OracleEnvironment::act(char action) {
  StepResult r;
  const char want = correct_action(context_);
  r.correct = action == want;
  if (r.correct) r.reward = options_.reward_play;
  r.episode_end = ++step_ >= options_.episode_length;
  if (r.episode_end) step_ = 0;
  draw();
  return r;
}

ConstantEnvironment::ConstantEnvironment(char correct, double reward, std::size_t context_length,
                                         std::uint64_t seed)
    : correct_(correct), reward_(reward), length_(context_length), rng_(seed) {
  draw();
}

void ConstantEnvironment::draw() {
  context_.assign(length_, '-');
  for (auto& ch : context_) ch = pick(kContextSymbols, rng_);
}

void ConstantEnvironment::reset() {
  step_ = 0;
  draw();
}

StepResult ConstantEnvironment::act(char action) {
  StepResult r;
  r.correct = action == correct_;
  if (r.correct) r.reward = reward_;
  r.episode_end = ++step_ >= 10;
  if (r.episode_end) step_ = 0;
  draw();
  return r;
}

MatchEnvironment::MatchEnvironment(std::vector<mining::AnnotatedSequence> sequences, std::size_t context_length,
                                   double reward_win, double reward_play)
    : sequences_(std::move(sequences)), length_(context_length), reward_win_(reward_win), reward_play_(reward_play) {
  const bool any = std::any_of(sequences_.begin(), sequences_.end(), [](const auto& s) {
    return std::any_of(s.letters.begin(), s.letters.end(),
                       [](char c) { return kActions.find(c) != std::string_view::npos; });
  });
  if (!any) throw std::invalid_argument("match environment has no action letters to replay");
  reset();
}

bool MatchEnvironment::advance_to_action() {
  bool wrapped = false;
  while (true) {
    const auto& letters = sequences_[sequence_].letters;
    while (position_ < letters.size() && kActions.find(letters[position_]) == std::string_view::npos) ++position_;
    if (position_ < letters.size()) return wrapped;
    sequence_ = (sequence_ + 1) % sequences_.size();
    position_ = 0;
    wrapped = true;
  }
}

void MatchEnvironment::reset() {
  sequence_ = 0;
  position_ = 0;
  advance_to_action();
}

std::string MatchEnvironment::context() const {
  const auto& letters = sequences_[sequence_].letters;
  std::string c(length_, '-');
  for (std::size_t i = 0; i < length_ && i < position_; ++i) c[length_ - 1 - i] = letters[position_ - 1 - i];
  return c;
}

StepResult MatchEnvironment::act(char action) {
  const auto& seq = sequences_[sequence_];
  StepResult r;
  r.correct = action == seq.letters[position_];
  if (r.correct) {
    const bool scoring = std::any_of(seq.events.begin(), seq.events.end(), [&](const mining::Annotation& a) {
      return a.label == mining::MotifLabel::goal && a.index == position_ + 1;
    });
    r.reward = scoring ? reward_win_ : reward_play_;
  }
  ++position_;
  r.episode_end = advance_to_action();
  return r;
}

TrainResult train(Environment& env, const LcsConfig& config, const MinerStats& stats) {
  config.validate();
  std::mt19937_64 rng(config.rng_seed);
  TrainResult result;
  Population& pop = result.population;
  pop = random_population(config, rng);
  env.reset();

  std::optional<std::size_t> previous;
  std::size_t block_correct = 0;
  int block_size = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::string ctx = env.context();
    if (ctx.size() != config.context_length) throw std::runtime_error("environment context has the wrong length");
    auto m = match_set(ctx, pop);
    if (m.empty()) {
      const auto slot = cover(pop, ctx, config, rng);
      ++result.stats.covering_count;
      if (previous == slot) previous.reset();
      m.push_back(slot);
    }
    const auto winner = select_winner(pop, m, config.beta, rng);
    const auto outcome = env.act(pop[winner].action);
    bucket_brigade_update(pop, winner, previous, outcome.reward, config.beta, &result.stats);
    previous = outcome.episode_end ? std::nullopt : std::optional<std::size_t>(winner);

    if (outcome.correct) ++block_correct;
    if (++block_size == config.eval_block) {
      result.curve.push_back({it, static_cast<double>(block_correct) / block_size});
      block_correct = 0;
      block_size = 0;
    }
    if (it % config.ga_period == 0) {
      const auto replaced = ga_discover(pop, stats, config, rng);
      result.stats.ga_iterations.push_back(it);
      if (previous && std::binary_search(replaced.begin(), replaced.end(), *previous)) previous.reset();
    }
  }
  return result;
}

void write_population_csv(std::ostream& out, const Population& population) {
  out << "# schema_version=" << kLcsSchemaVersion << '\n';
  out << "condition,action,strength\n";
  for (const auto& r : population) out << r.condition << ',' << r.action << ',' << r.strength << '\n';
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
  out << "# schema_version=" << kLcsSchemaVersion << '\n';
  out << "iteration,proportion_correct\n";
  for (const auto& s : curve) out << s.iteration << ',' << s.proportion_correct << '\n';
}

}  // namespace soccerseq::lcs
