#pragma once

// Entropy and mutual information of FCA dynamics on binarized states.

#include "soccerseq/fca_engine.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace soccerseq::diag {

using Bits = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;
/// One row per time step, one column per cell.
using BitHistory = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kEdgeOfChaosEntropy = 0.84;  // reference only

struct DiagnosticsConfig {
  int window = 10;
  int run_steps = 10000;
  int trials = 15;
  double binarize_threshold = 0.5;
  int mi_lag = 1;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct EntropyReport {
  double mean_entropy = 0.0;
  double std_dev = 0.0;
  std::vector<double> per_trial;
};

struct MiReport {
  double mean_mi = 0.0;
  std::vector<double> per_trial;
};

/// Cells at or above the threshold become 1.
Bits binarize(const fca::FuzzyState<double>& state, double threshold = 0.5);

/// Shannon entropy (bits) of a single 0/1 series.
double series_entropy(const Eigen::Ref<const Bits>& series);

/// Per-cell temporal entropy over the rows of `window`, averaged over cells.
double site_entropy(const BitHistory& window);

double mutual_information(const Bits& p1, const Bits& p2);

/// Binarized trajectory of `steps` updates, including the initial state.
BitHistory run_binarized(const fca::FuzzyState<double>& initial, const fca::RuleVector& rules, int steps,
                         double threshold);

EntropyReport measure_entropy(const fca::RuleVector& rules, const DiagnosticsConfig& config);
MiReport measure_mi(const fca::RuleVector& rules, const DiagnosticsConfig& config);

struct GenerationRow {
  int generation = 0;
  std::size_t n = 0;
  double mean_entropy = 0.0;
  double std_entropy = 0.0;
  double mean_mi = 0.0;
};

GenerationRow diagnose_rules(int generation, const fca::RuleVector& rules, const DiagnosticsConfig& config);

inline constexpr int kDiagnosticsSchemaVersion = 1;

void write_diag_csv(std::ostream& out, const std::vector<GenerationRow>& rows);

}  // namespace soccerseq::diag
