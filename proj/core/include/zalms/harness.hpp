#ifndef ZALMS_HARNESS_HPP
#define ZALMS_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zalms/filters.hpp"
#include "zalms/metrics.hpp"
#include "zalms/signals.hpp"
#include "zalms/systems.hpp"
#include "zalms/theory.hpp"

namespace zalms {

/// Bad experiment configuration (unknown preset, malformed config file,
/// inconsistent fields).  The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmEntry {
  std::string name;
  AlgorithmParams params;
};

/// A labelled unknown system; most experiments have exactly one, the
/// sparsity-sweep preset carries one per shape value.
struct SystemVariant {
  std::string label;  // empty for single-system experiments
  SystemSpec spec;
};

struct ExperimentConfig {
  std::vector<SystemVariant> systems;
  InputSpec input;
  NoiseSpec noise;
  std::vector<AlgorithmEntry> algorithms;
  std::size_t iterations = 0;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  std::vector<std::size_t> regenerate_at;  // strictly increasing, < iterations
  std::size_t record_every = 1;
  double convergence_db = -35.0;  // target level for convergence iterations
  double tail_fraction = 0.1;     // steady-state estimation window
  std::string output_dir;         // empty: run without writing files
};

struct CurveEntry {
  std::string name;  // algorithm name, suffixed @label for system variants
  LearningCurve curve;
  std::vector<double> nmsd;  // msd normalized by ||h||^2, averaged
  std::size_t diverged = 0;  // excluded trials
  std::vector<std::uint64_t> stream_checksums;  // per trial, consumed (x, d)
};

struct TheoryEntry {
  std::string name;
  std::optional<TheoryPrediction> prediction;  // empty: out of range
  std::string note;                            // reason when empty
};

struct ExperimentReport {
  std::vector<CurveEntry> curves;
  std::vector<TheoryEntry> theory;
  std::vector<std::pair<std::string, std::optional<std::uint64_t>>> convergence_iters;
  std::vector<std::string> files;
  std::uint64_t config_hash = 0;
  std::size_t trials = 0;
};

/// Runs the configured Monte Carlo experiment.  Per trial, seeds for the
/// system, input and noise streams are derived deterministically from
/// (base_seed, trial); every algorithm inside a trial consumes the identical
/// realizations.  The system is redrawn at each regenerate_at point.  Trials
/// whose filter overflows are excluded from the averages and counted.
/// `threads` = 0 uses the hardware concurrency; results are byte-identical
/// to a serial run regardless.  Writes CSV into output_dir unless empty.
ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

/// Paper-experiment presets:
///   exp1_white, exp1_ar, exp2, exp3, exp4, exp5, exp6_mu, exp6_rho,
///   exp7_a, exp7_b.
/// Unknown names raise config_error.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct TheoryComparisonRow {
  std::string name;
  double sim_mse = 0.0;
  double pred_mse = 0.0;
  double ratio = 0.0;          // sim / pred
  bool out_of_range = false;   // no prediction at this point
  bool outside_band = false;   // ratio outside [0.7, 1.4]
};

/// Simulated steady-state MSE (tail mean of the e^2 curve) against the
/// closed form, one row per algorithm entry the theory applies to
/// (un-normalized DWZA-LMS / LMS on a white-driven GGD system).
std::vector<TheoryComparisonRow> compare_theory(const ExperimentConfig& cfg,
                                                const ExperimentReport& report);

/// Flat key=value configuration file (single-system experiments).
/// Unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical text form of a config; its FNV-1a hash goes into the CSV header.
std::string write_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Writes curves.csv, summary.csv and (when predictions exist) theory.csv
/// into `dir`; returns the paths, which are also appended to report.files.
std::vector<std::string> emit_csv(const ExperimentConfig& cfg,
                                  ExperimentReport& report,
                                  const std::string& dir);

}  // namespace zalms

#endif  // ZALMS_HARNESS_HPP
