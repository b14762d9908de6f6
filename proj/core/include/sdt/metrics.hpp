#pragma once

// Confusion matrices and the reported metrics, all in percent.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdt {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0) : n_(n_classes), cells_(n_classes * n_classes, 0) {}
  ConfusionMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  std::size_t n_classes() const noexcept { return n_; }
  std::int64_t operator()(std::size_t truth, std::size_t pred) const noexcept { return cells_[truth * n_ + pred]; }
  void add(std::size_t truth, std::size_t pred, std::int64_t n = 1);
  std::int64_t total() const noexcept;

  /// Element-wise sum; both matrices must have the same size.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::int64_t> cells_;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                          std::size_t n_classes);

/// 100 * trace / total. Throws on an empty matrix.
double accuracy(const ConfusionMatrix& m);
/// Cohen's kappa times 100; when p_e = 1 it is 100 if p_o = 1 and 0 otherwise.
double kappa(const ConfusionMatrix& m);

struct ClassMetrics {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
};

/// One-vs-rest ratios; a ratio with a zero denominator is absent.
ClassMetrics per_class_metrics(const ConfusionMatrix& m, std::size_t c);
/// Mean of the defined per-class values of each ratio.
ClassMetrics macro_metrics(const ConfusionMatrix& m);

/// Two decimals; absent values render as the empty string.
std::string format_percent(std::optional<double> v);

}  // namespace sdt
