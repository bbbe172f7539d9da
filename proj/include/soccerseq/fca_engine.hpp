#pragma once

// Fuzzy cellular automata over a 1-D null-boundary lattice.
//
// Cell states live in [0, 1]. Every supported rule is a bounded-sum OR of a
// subset of {left, self, right}, optionally complemented:
//
//   or(a, b) = min(1, a + b)      not(a) = 1 - a
//
// which gives the sixteen rules 0, 170, 204, 238, 240, 250, 252, 254 and their
// complements 255 - r.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soccerseq::fca {

template <typename Scalar = double>
using FuzzyState = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DependencyMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

class UnknownRuleError : public std::invalid_argument {
 public:
  explicit UnknownRuleError(int rule)
      : std::invalid_argument("rule " + std::to_string(rule) +
                              " is not one of the 16 fuzzy rules"),
        rule_(rule) {}
  int rule() const noexcept { return rule_; }

 private:
  int rule_;
};

inline constexpr std::array<int, 8> kBaseRules{0, 170, 204, 238, 240, 250, 252, 254};
inline constexpr std::array<int, 16> kAllRules{0,   170, 204, 238, 240, 250, 252, 254,
                                               255, 85,  51,  17,  15,  5,   3,   1};

inline constexpr int kLeftBit = 240;
inline constexpr int kSelfBit = 204;
inline constexpr int kRightBit = 170;

constexpr bool is_base_rule(int rule) noexcept {
  for (int r : kBaseRules)
    if (r == rule) return true;
  return false;
}

constexpr bool is_fuzzy_rule(int rule) noexcept {
  return is_base_rule(rule) || is_base_rule(255 - rule);
}

constexpr int complement(int rule) noexcept { return 255 - rule; }

/// A validated rule number together with its decoded neighbourhood.
class Rule {
 public:
  constexpr Rule() = default;
  explicit Rule(int number) : number_(number) {
    if (!is_fuzzy_rule(number)) throw UnknownRuleError(number);
    const int base = is_base_rule(number) ? number : 255 - number;
    complemented_ = base != number;
    left_ = (base & kLeftBit) == kLeftBit;
    self_ = (base & kSelfBit) == kSelfBit;
    right_ = (base & kRightBit) == kRightBit;
  }

  int number() const noexcept { return number_; }
  int base() const noexcept { return complemented_ ? 255 - number_ : number_; }
  bool complemented() const noexcept { return complemented_; }
  bool reads_left() const noexcept { return left_; }
  bool reads_self() const noexcept { return self_; }
  bool reads_right() const noexcept { return right_; }

  template <typename Scalar>
  Scalar apply(Scalar left, Scalar self, Scalar right) const noexcept {
    Scalar sum{0};
    if (left_) sum += left;
    if (self_) sum += self;
    if (right_) sum += right;
    const Scalar bounded = std::min(Scalar{1}, sum);
    return complemented_ ? Scalar{1} - bounded : bounded;
  }

  friend bool operator==(const Rule& a, const Rule& b) noexcept {
    return a.number_ == b.number_;
  }

 private:
  int number_ = 204;
  bool complemented_ = false;
  bool left_ = false;
  bool self_ = true;
  bool right_ = false;
};

using RuleVector = std::vector<Rule>;

inline RuleVector make_rules(const std::vector<int>& numbers) {
  RuleVector out;
  out.reserve(numbers.size());
  for (int n : numbers) out.emplace_back(n);
  return out;
}

inline std::vector<int> rule_numbers(const RuleVector& rules) {
  std::vector<int> out;
  out.reserve(rules.size());
  for (const auto& r : rules) out.push_back(r.number());
  return out;
}

inline RuleVector uniform_rules(int number, std::size_t n) {
  return RuleVector(n, Rule(number));
}

/// Next state of one cell. Missing neighbours at the lattice ends are passed
/// as 0 by the caller (null boundary).
template <typename Scalar>
Scalar eval_rule(int rule, Scalar left, Scalar self, Scalar right) {
  return Rule(rule).apply(left, self, right);
}

template <typename Derived>
void check_state(const Eigen::MatrixBase<Derived>& state) {
  using Scalar = typename Derived::Scalar;
  if (state.size() < 1) throw std::invalid_argument("fuzzy state must have at least one cell");
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const Scalar v = state(i);
    if (!(v >= Scalar{0} && v <= Scalar{1}))
      throw std::invalid_argument("fuzzy state cell " + std::to_string(i) + " outside [0, 1]");
  }
}

/// One synchronous update with null boundary.
template <typename Derived>
FuzzyState<typename Derived::Scalar> step(const Eigen::MatrixBase<Derived>& state,
                                          const RuleVector& rules) {
  using Scalar = typename Derived::Scalar;
  const auto n = state.size();
  if (static_cast<std::size_t>(n) != rules.size())
    throw std::invalid_argument("state has " + std::to_string(n) + " cells but rule vector has " +
                                std::to_string(rules.size()));
  FuzzyState<Scalar> next(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar left = i > 0 ? state(i - 1) : Scalar{0};
    const Scalar right = i + 1 < n ? state(i + 1) : Scalar{0};
    next(i) = rules[static_cast<std::size_t>(i)].apply(left, state(i), right);
  }
  return next;
}

/// Row i marks the cells rule i reads. Complemented rules share the row of
/// their base rule; neighbours beyond the lattice are dropped.
inline DependencyMatrix dependency_matrix(const RuleVector& rules) {
  const auto n = static_cast<Eigen::Index>(rules.size());
  DependencyMatrix t = DependencyMatrix::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Rule& r = rules[static_cast<std::size_t>(i)];
    if (r.reads_left() && i > 0) t(i, i - 1) = true;
    if (r.reads_self()) t(i, i) = true;
    if (r.reads_right() && i + 1 < n) t(i, i + 1) = true;
  }
  return t;
}

/// Matrix form of `step`: next = min(1, T q), complemented where the rule is.
template <typename Scalar>
class LinearForm {
 public:
  explicit LinearForm(const RuleVector& rules)
      : deps_(dependency_matrix(rules).template cast<Scalar>()),
        complemented_(static_cast<Eigen::Index>(rules.size())) {
    for (std::size_t i = 0; i < rules.size(); ++i)
      complemented_(static_cast<Eigen::Index>(i)) = rules[i].complemented();
  }

  template <typename Derived>
  FuzzyState<Scalar> operator()(const Eigen::MatrixBase<Derived>& state) const {
    const FuzzyState<Scalar> bounded = (deps_ * state).cwiseMin(Scalar{1});
    return complemented_.select(Scalar{1} - bounded.array(), bounded.array()).matrix();
  }

 private:
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> deps_;
  Eigen::Array<bool, Eigen::Dynamic, 1> complemented_;
};

enum class TerminalKind { fixed_point, cycle, truncated };

template <typename Scalar = double>
struct Trajectory {
  std::vector<FuzzyState<Scalar>> states;
  TerminalKind terminal = TerminalKind::truncated;
  // fixed_point: index of the state that maps onto itself.
  // cycle: first state of the cycle and its period.
  std::size_t index = 0;
  std::size_t period = 0;

  const FuzzyState<Scalar>& last() const { return states.back(); }
};

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kQuantum = 1e-6;

template <typename Derived>
std::vector<std::int64_t> quantize(const Eigen::MatrixBase<Derived>& state, double quantum = kQuantum) {
  std::vector<std::int64_t> key(static_cast<std::size_t>(state.size()));
  for (Eigen::Index i = 0; i < state.size(); ++i)
    key[static_cast<std::size_t>(i)] = std::llround(static_cast<double>(state(i)) / quantum);
  return key;
}

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return static_cast<double>((a - b).cwiseAbs().maxCoeff());
}

/// Iterates `step` until the state stops moving, revisits an earlier state, or
/// `max_steps` updates have been applied.
template <typename Derived>
Trajectory<typename Derived::Scalar> evolve(const Eigen::MatrixBase<Derived>& initial,
                                            const RuleVector& rules, std::size_t max_steps,
                                            double tolerance = kDefaultTolerance) {
  using Scalar = typename Derived::Scalar;
  if (max_steps < 1) throw std::invalid_argument("evolve needs max_steps >= 1");
  if (static_cast<std::size_t>(initial.size()) != rules.size())
    throw std::invalid_argument("state/rule size mismatch");

  Trajectory<Scalar> traj;
  traj.states.reserve(std::min<std::size_t>(max_steps + 1, 1024));
  traj.states.emplace_back(initial);

  std::map<std::vector<std::int64_t>, std::size_t> seen;
  seen.emplace(quantize(initial), 0);

  for (std::size_t t = 0; t < max_steps; ++t) {
    FuzzyState<Scalar> next = step(traj.states.back(), rules);
    if (max_abs_diff(next, traj.states.back()) <= tolerance) {
      traj.terminal = TerminalKind::fixed_point;
      traj.index = t;
      return traj;
    }
    if (auto it = seen.find(quantize(next)); it != seen.end() &&
        max_abs_diff(next, traj.states[it->second]) <= tolerance) {
      traj.terminal = TerminalKind::cycle;
      traj.index = it->second;
      traj.period = t + 1 - it->second;
      return traj;
    }
    seen.emplace(quantize(next), t + 1);
    traj.states.push_back(std::move(next));
  }
  traj.terminal = TerminalKind::truncated;
  traj.index = traj.states.size() - 1;
  return traj;
}

/// Representative state of the trajectory's attractor: the fixed point, the
/// lexicographically smallest (quantized) state of a cycle, or the last state
/// reached when truncated.
template <typename Scalar>
FuzzyState<Scalar> attractor_of(const Trajectory<Scalar>& traj) {
  switch (traj.terminal) {
    case TerminalKind::fixed_point:
      return traj.states[traj.index];
    case TerminalKind::cycle: {
      std::size_t best = traj.index;
      auto best_key = quantize(traj.states[best]);
      for (std::size_t i = traj.index + 1; i < traj.index + traj.period; ++i) {
        auto key = quantize(traj.states[i]);
        if (key < best_key) {
          best_key = std::move(key);
          best = i;
        }
      }
      return traj.states[best];
    }
    case TerminalKind::truncated:
      break;
  }
  return traj.states.back();
}

// Text forms used on the command line: "238,254,238,252" and "0.8,0.2,0.2,0".

RuleVector parse_rules(std::string_view text);
FuzzyState<double> parse_state(std::string_view text);
std::string format_rules(const RuleVector& rules);
std::string format_state(const FuzzyState<double>& state, int precision = 2);

}  // namespace soccerseq::fca
