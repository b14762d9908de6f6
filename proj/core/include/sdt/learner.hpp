#pragma once

// Greedy entropy-based induction of spatial decision trees.

#include <chrono>
#include <functional>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdt/logic.hpp"
#include "sdt/model.hpp"
#include "sdt/stats.hpp"
#include "sdt/tree.hpp"

namespace sdt {

struct ThresholdPolicy {
  enum class Kind { AllMidpoints, Quantiles };
  Kind kind = Kind::Quantiles;
  int q = 20;

  static ThresholdPolicy all_midpoints() { return {Kind::AllMidpoints, 0}; }
  static ThresholdPolicy quantiles(int q) { return {Kind::Quantiles, q}; }

  std::string name() const;  // "all-midpoints" or "quantiles(20)"
  static ThresholdPolicy parse(std::string_view text);

  friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

struct LearnerConfig {
  Fragment fragment = Fragment::RCC8;
  std::vector<Comparator> comparators = {Comparator::Le, Comparator::Ge};
  std::vector<Gamma> gammas = {Gamma(3, 5), Gamma(7, 10), Gamma(4, 5), Gamma(9, 10), Gamma::one()};
  ThresholdPolicy threshold_policy;
  std::int64_t min_samples_leaf = 4;
  double min_info_gain = 0.01;
  double max_leaf_entropy = 0.3;
  std::optional<int> max_depth;
  R0Policy r0 = CenterPixel{};
  std::uint64_t seed = 0;  // kept for provenance; induction itself is deterministic
  std::size_t workers = 1;
  bool use_cache = true;
  std::size_t cache_budget_bytes = std::size_t{256} << 20;

  /// Throws InvalidArgument on violated invariants.
  void validate() const;
  /// Comparators in canonical order and gammas ascending, both deduplicated.
  LearnerConfig normalized() const;
};

struct SplitScore {
  Decision decision;
  double gain = 0.0;
  std::int64_t n_yes = 0;
  std::int64_t n_no = 0;
};

/// Candidate thresholds for one attribute from the pooled pixel values of
/// every instance in `ds`. All-midpoints: (u_i + u_{i+1}) / 2 over sorted
/// distinct values. Quantiles(q): type-7 sample quantiles at j/(q+1),
/// j = 1..q, deduplicated. Ascending.
std::vector<double> thresholds(const AnchoredDataset& ds, std::size_t attr, const ThresholdPolicy& policy);

/// Every candidate in canonical order: operator (fragment order, then
/// propositional), attribute, threshold, comparator, gamma.
std::vector<Decision> candidate_decisions(const AnchoredDataset& ds, const LearnerConfig& cfg);

double info_split(const AnchoredDataset& ds, const Decision& d);
double info_gain(const AnchoredDataset& ds, const Decision& d);

/// Per-instance, per-attribute k-th order statistics of every rectangle for
/// every configured gamma. Built once by preprocess and reused at all nodes.
class OrderStatCache;

struct PreparedDataset {
  AnchoredDataset data;
  std::shared_ptr<const OrderStatCache> cache;  // null when disabled or over budget
};

PreparedDataset preprocess(const AnchoredDataset& ds, const LearnerConfig& cfg);

struct SearchStats {
  std::int64_t candidates = 0;
};

std::optional<SplitScore> find_best_decision(const AnchoredDataset& ds, const LearnerConfig& cfg,
                                             const OrderStatCache* cache = nullptr, SearchStats* stats = nullptr);

struct LearnStats {
  std::int64_t candidates = 0;
  std::int64_t nodes = 0;
  std::chrono::nanoseconds search_time{0};
  bool cache_used = false;
};

SpatialDecisionTree learn(const PreparedDataset& prepared, const LearnerConfig& cfg, LearnStats* stats = nullptr);
SpatialDecisionTree learn(const AnchoredDataset& ds, const LearnerConfig& cfg, LearnStats* stats = nullptr);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace sdt
