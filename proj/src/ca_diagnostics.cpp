#include "soccerseq/ca_diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace soccerseq::diag {

namespace {

// Entropy in bits of a histogram. Counts are summed in ascending order so that
// equal multisets of counts give bit-identical results.
template <std::size_t N>
double entropy_of_counts(std::array<std::size_t, N> counts) {
  std::sort(counts.begin(), counts.end());
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), stream};
  return std::mt19937_64(seq);
}

fca::FuzzyState<double> random_state(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  fca::FuzzyState<double> s(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = u(rng);
  return s;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

// First row index of the moving-window statistics, after the transient.
Eigen::Index first_window_row(Eigen::Index rows, int w) {
  if (rows >= 2 * static_cast<Eigen::Index>(w)) return w;
  return std::max<Eigen::Index>(0, rows - w);
}

}  // namespace

void DiagnosticsConfig::validate() const {
  if (window < 2) throw std::invalid_argument("diagnostics window must be at least 2");
  if (run_steps < window) throw std::invalid_argument("run_steps must be at least the window");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(binarize_threshold > 0 && binarize_threshold < 1))
    throw std::invalid_argument("binarize threshold must lie in (0, 1)");
  if (mi_lag < 1) throw std::invalid_argument("mi lag must be at least 1");
}

Bits binarize(const fca::FuzzyState<double>& state, double threshold) {
  return (state.array() >= threshold).cast<std::uint8_t>().matrix();
}

double series_entropy(const Eigen::Ref<const Bits>& series) {
  std::array<std::size_t, 2> counts{0, 0};
  for (Eigen::Index i = 0; i < series.size(); ++i) ++counts[series(i) ? 1 : 0];
  return entropy_of_counts(counts);
}

double site_entropy(const BitHistory& window) {
  if (window.rows() == 0 || window.cols() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index c = 0; c < window.cols(); ++c) sum += series_entropy(window.col(c));
  return sum / static_cast<double>(window.cols());
}

double mutual_information(const Bits& p1, const Bits& p2) {
  if (p1.size() != p2.size()) throw std::invalid_argument("mutual information needs equal-length patterns");
  std::array<std::size_t, 4> joint{0, 0, 0, 0};
  for (Eigen::Index i = 0; i < p1.size(); ++i) ++joint[(p1(i) ? 2 : 0) + (p2(i) ? 1 : 0)];
  const double h1 = entropy_of_counts(std::array<std::size_t, 2>{joint[0] + joint[1], joint[2] + joint[3]});
  const double h2 = entropy_of_counts(std::array<std::size_t, 2>{joint[0] + joint[2], joint[1] + joint[3]});
  const double floor = std::min(h1, h2);
  if (floor <= 0.0) return 0.0;
  const double h12 = entropy_of_counts(joint);
  return std::clamp((h1 + h2 - h12) / floor, 0.0, 1.0);
}

BitHistory run_binarized(const fca::FuzzyState<double>& initial, const fca::RuleVector& rules, int steps,
                         double threshold) {
  if (static_cast<std::size_t>(initial.size()) != rules.size())
    throw std::invalid_argument("state/rule size mismatch");
  BitHistory hist(steps + 1, initial.size());
  fca::FuzzyState<double> state = initial;
  hist.row(0) = binarize(state, threshold).transpose();
  for (int t = 1; t <= steps; ++t) {
    state = fca::step(state, rules);
    hist.row(t) = binarize(state, threshold).transpose();
  }
  return hist;
}

EntropyReport measure_entropy(const fca::RuleVector& rules, const DiagnosticsConfig& config) {
  config.validate();
  if (rules.empty()) throw std::invalid_argument("empty rule vector");
  const int w = config.window;
  std::vector<double> table(static_cast<std::size_t>(w) + 1);
  for (int c = 0; c <= w; ++c)
    table[static_cast<std::size_t>(c)] =
        entropy_of_counts(std::array<std::size_t, 2>{static_cast<std::size_t>(w - c), static_cast<std::size_t>(c)});

  EntropyReport report;
  for (int trial = 0; trial < config.trials; ++trial) {
    auto rng = trial_rng(config.rng_seed, trial, 1);
    const auto hist = run_binarized(random_state(rules.size(), rng), rules, config.run_steps,
                                    config.binarize_threshold);
    const Eigen::Index start = first_window_row(hist.rows(), w);
    Eigen::VectorXi ones = hist.middleRows(start, w).cast<int>().colwise().sum().transpose();
    double total = 0.0;
    std::size_t windows = 0;
    for (Eigen::Index t = start;; ++t) {
      double row = 0.0;
      for (Eigen::Index c = 0; c < ones.size(); ++c) row += table[static_cast<std::size_t>(ones(c))];
      total += row / static_cast<double>(ones.size());
      ++windows;
      if (t + w >= hist.rows()) break;
      ones += hist.row(t + w).cast<int>().transpose();
      ones -= hist.row(t).cast<int>().transpose();
    }
    report.per_trial.push_back(total / static_cast<double>(windows));
  }
  report.mean_entropy = mean_of(report.per_trial);
  double var = 0.0;
  for (double v : report.per_trial) var += (v - report.mean_entropy) * (v - report.mean_entropy);
  report.std_dev = std::sqrt(var / static_cast<double>(report.per_trial.size()));
  return report;
}

MiReport measure_mi(const fca::RuleVector& rules, const DiagnosticsConfig& config) {
  config.validate();
  if (rules.empty()) throw std::invalid_argument("empty rule vector");
  MiReport report;
  for (int trial = 0; trial < config.trials; ++trial) {
    auto rng = trial_rng(config.rng_seed, trial, 2);
    auto initial = random_state(rules.size(), rng);
    // A start that binarizes to a constant pattern carries no information.
    for (int attempt = 0; attempt < 100 && rules.size() > 1; ++attempt) {
      const Bits b = binarize(initial, config.binarize_threshold);
      if (b.minCoeff() != b.maxCoeff()) break;
      initial = random_state(rules.size(), rng);
    }
    const auto hist = run_binarized(initial, rules, config.run_steps, config.binarize_threshold);
    const Eigen::Index start = first_window_row(hist.rows(), config.window);
    double total = 0.0;
    std::size_t samples = 0;
    for (Eigen::Index t = start; t + config.mi_lag < hist.rows(); ++t) {
      total += mutual_information(hist.row(t).transpose(), hist.row(t + config.mi_lag).transpose());
      ++samples;
    }
    report.per_trial.push_back(samples ? total / static_cast<double>(samples) : 0.0);
  }
  report.mean_mi = mean_of(report.per_trial);
  return report;
}

GenerationRow diagnose_rules(int generation, const fca::RuleVector& rules, const DiagnosticsConfig& config) {
  const auto e = measure_entropy(rules, config);
  const auto m = measure_mi(rules, config);
  return {generation, rules.size(), e.mean_entropy, e.std_dev, m.mean_mi};
}

void write_diag_csv(std::ostream& out, const std::vector<GenerationRow>& rows) {
  out << "# schema_version=" << kDiagnosticsSchemaVersion << '\n';
  out << "generation,n,mean_entropy,std_entropy,mean_mi\n";
  const auto old_precision = out.precision(10);
  for (const auto& r : rows)
    out << r.generation << ',' << r.n << ',' << r.mean_entropy << ',' << r.std_entropy << ',' << r.mean_mi << '\n';
  out.precision(old_precision);
}

}  // namespace soccerseq::diag
