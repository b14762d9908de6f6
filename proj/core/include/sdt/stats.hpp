#pragma once

// Class histograms and the entropy quantities used to score splits.

#include <cstdint>
#include <string_view>
#include <vector>

namespace sdt {

class ClassCounts {
 public:
  ClassCounts() = default;
  explicit ClassCounts(std::size_t n_classes) : counts_(n_classes, 0) {}
  explicit ClassCounts(std::vector<std::int64_t> counts);

  std::size_t n_classes() const noexcept { return counts_.size(); }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t operator[](std::size_t c) const noexcept { return counts_[c]; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

  void add(std::size_t c, std::int64_t n = 1);
  /// Class with the largest count; ties go to the lowest index.
  std::size_t majority() const noexcept;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Base-2 entropy. Terms are summed in ascending count order so the result
/// does not depend on class numbering. Throws when total is 0.
double entropy(const ClassCounts& c);

/// Info(parent) - weighted entropy of the two parts, where parent = e + u.
/// Empty parts contribute 0. Every scorer in the library goes through this
/// function so equal partitions give bitwise equal gains.
double split_gain(const ClassCounts& e, const ClassCounts& u);

/// Weighted entropy of a two-way partition.
double split_info(const ClassCounts& e, const ClassCounts& u);

enum class StopReason : std::uint8_t { None, Pure, TooSmall, MaxDepth, NoSplit };

std::string_view stop_reason_name(StopReason r) noexcept;  // "pure", "too_small", ...
StopReason parse_stop_reason(std::string_view text);

}  // namespace sdt
