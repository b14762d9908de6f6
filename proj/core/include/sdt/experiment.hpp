#pragma once

// Multi-seed land-cover experiments: sample, split, train and evaluate every
// (dataset, approach, seed) combination and write the result tables.
//
// Config file: one `key = value` per line, `#` starts a comment.
//
//   scenes            comma-separated SSC1 paths; dataset name = file stem
//   d                 window size (odd), default 3
//   P                 instances per class, default 100
//   approaches        comma-separated, default
//                     single_pixel,flattened,averaged,hs2_rcc8,hs2_rcc5
//                     (hs2_full is also accepted)
//   seeds             "1..10" or a comma-separated list, default 1..10
//   train_fraction    default 0.8
//   gammas            comma-separated ratios, default 0.6,0.7,0.8,0.9,1
//   comparators       comma-separated ASCII symbols, default <=,>=
//   thresholds        all-midpoints | quantiles(<q>), default quantiles(20)
//   min_samples_leaf  default 4
//   min_info_gain     default 0.01
//   max_leaf_entropy  default 0.3
//   max_depth         default none
//   r0                center | corner | [(x1,y1),(x2,y2)], default center
//   workers           concurrent runs, default 1
//   learner_workers   threads per split search, default 1
//   use_cache         true | false, default true
//   output            output directory, default results

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/data.hpp"
#include "sdt/learner.hpp"
#include "sdt/metrics.hpp"
#include "sdt/tree.hpp"

namespace sdt {

/// Raised for invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Approach { SinglePixel, Flattened, Averaged, HS2Rcc8, HS2Rcc5, HS2Full };

std::string_view approach_name(Approach a) noexcept;  // "single_pixel", "hs2_rcc8", ...
Approach parse_approach(std::string_view name);       // throws ConfigError
bool is_spatial(Approach a) noexcept;

struct ExperimentConfig {
  std::vector<std::string> scenes;
  int d = 3;
  std::size_t P = 100;
  std::vector<Approach> approaches = {Approach::SinglePixel, Approach::Flattened, Approach::Averaged,
                                      Approach::HS2Rcc8, Approach::HS2Rcc5};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double train_fraction = 0.8;
  LearnerConfig learner;  // fragment is overridden per approach
  std::size_t workers = 1;
  std::string output = "results";

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  std::string to_text() const;
};

struct RunResult {
  std::string dataset;
  Approach approach = Approach::SinglePixel;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  ConfusionMatrix confusion;
  std::string tree_text;  // SDT v1, empty on failure
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::int64_t nodes = 0;
  std::int64_t candidates = 0;
  std::chrono::nanoseconds train_time{0};
  std::chrono::nanoseconds search_time{0};
};

struct NamedDataset {
  std::string name;
  WindowedDataset data;  // windowed, not yet balanced
};

/// One run on an already windowed dataset. The sample and the split depend
/// only on (dataset, seed), never on the approach.
RunResult run_once(const NamedDataset& ds, Approach approach, std::uint64_t seed, const ExperimentConfig& cfg);

/// Every combination in config order: dataset, then seed, then approach.
/// Runs execute on cfg.workers threads; the result order does not depend on
/// completion order. Failed runs are recorded and the rest continue.
std::vector<RunResult> run_experiment(const std::vector<NamedDataset>& datasets, const ExperimentConfig& cfg);

/// Loads and windows every scene of the config.
std::vector<NamedDataset> load_datasets(const ExperimentConfig& cfg);

/// dataset,approach,seed,kappa,accuracy,sens_macro,spec_macro,prec_macro
/// Percentages with two decimals; undefined values and failed runs are empty.
std::string results_csv(const std::vector<RunResult>& runs);
/// dataset,approach,seed,class,sensitivity,specificity,precision
std::string per_class_csv(const std::vector<RunResult>& runs);
/// dataset,approach,seed,status,n_train,n_test,nodes,candidates,train_ms,search_ms,error
std::string telemetry_csv(const std::vector<RunResult>& runs);

/// Mean search time of `spatial` runs over mean search time of matching
/// `baseline` runs of the same dataset; 0 when either is missing.
double search_time_ratio(const std::vector<RunResult>& runs, std::string_view dataset, Approach spatial,
                         Approach baseline = Approach::SinglePixel);

/// Writes results.csv, per_class.csv, telemetry.csv and
/// trees/<dataset>_<approach>_<seed>.sdt under `dir`.
void write_outputs(const std::string& dir, const std::vector<RunResult>& runs);

}  // namespace sdt
