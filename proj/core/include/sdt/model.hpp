#pragma once

// Spatial instances, anchored datasets, gamma-relaxed evaluation of decisions
// on rectangles, the reference-set update and dataset splitting.

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdt/geometry.hpp"
#include "sdt/logic.hpp"
#include "sdt/stats.hpp"

namespace sdt {

/// A multi-channel image with a class label. Values are stored as
/// [attribute][row][col]; axis 0 of the grid runs along columns (extent =
/// cols) and axis 1 along rows (extent = rows).
class SpatialInstance {
 public:
  SpatialInstance(std::size_t n_attributes, int rows, int cols, std::vector<double> values,
                  std::size_t label);

  std::size_t n_attributes() const noexcept { return n_attributes_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  GridBounds bounds() const { return GridBounds{cols_, rows_}; }
  std::size_t label() const noexcept { return label_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// 0-based row and column.
  double at(std::size_t attr, int row, int col) const noexcept {
    return values_[(attr * static_cast<std::size_t>(rows_) + static_cast<std::size_t>(row)) *
                       static_cast<std::size_t>(cols_) +
                   static_cast<std::size_t>(col)];
  }
  /// Pixel at 1-based grid coordinates (x along axis 0, y along axis 1).
  double pixel(std::size_t attr, int x, int y) const noexcept { return at(attr, y - 1, x - 1); }

 private:
  std::size_t n_attributes_;
  int rows_;
  int cols_;
  std::vector<double> values_;
  std::size_t label_;
};

using InstancePtr = std::shared_ptr<const SpatialInstance>;

struct AnchoredInstance {
  InstancePtr instance;
  std::vector<HyperRectangle> refs;  // sorted, deduplicated
};

class AnchoredDataset {
 public:
  AnchoredDataset() = default;
  AnchoredDataset(std::size_t n_attributes, std::vector<std::string> classes);

  std::size_t n_attributes() const noexcept { return n_attributes_; }
  std::size_t n_classes() const noexcept { return classes_.size(); }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const AnchoredInstance& operator[](std::size_t i) const noexcept { return items_[i]; }
  const std::vector<AnchoredInstance>& items() const noexcept { return items_; }

  /// Validates schema, bounds uniformity and refs before appending.
  void push_back(AnchoredInstance item);

  /// Grid shared by all items; throws on an empty dataset.
  GridBounds bounds() const;
  ClassCounts class_counts() const;

 private:
  std::size_t n_attributes_ = 0;
  std::vector<std::string> classes_;
  std::vector<AnchoredInstance> items_;
};

// ---------------------------------------------------------------------------
// Initial reference rectangle

struct CenterPixel {};
struct CornerPixel {};
using R0Policy = std::variant<CenterPixel, CornerPixel, HyperRectangle>;

/// Center: unit rectangle over pixel ((cols+1)/2, (rows+1)/2) in 1-based
/// coordinates (the exact centre for odd sizes). Corner: pixel (1,1).
HyperRectangle resolve_r0(const R0Policy& policy, const GridBounds& bounds);

std::string r0_policy_name(const R0Policy& policy);  // "center", "corner", "[(x1,y1),(x2,y2)]"
R0Policy parse_r0_policy(std::string_view text);

/// Anchors every instance to {r0}.
AnchoredDataset anchor(const std::vector<InstancePtr>& instances, std::size_t n_attributes,
                       std::vector<std::string> classes, const R0Policy& policy);

// ---------------------------------------------------------------------------
// Evaluation

/// Number of pixels of `r` whose value satisfies `A cmp a`.
std::int64_t satisfying_count(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr,
                              Comparator cmp, double a);

/// Exact fraction count / |r|.
Ratio satisfying_fraction(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr,
                          Comparator cmp, double a);

bool gamma_satisfies(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr, Comparator cmp,
                     double a, const Gamma& gamma);

/// Propositional: refs on which the literal holds. Modal: every rectangle
/// reachable from some ref through a tuple of the operator on which the
/// literal holds. Sorted in canonical order, no duplicates.
std::vector<HyperRectangle> new_refs(const AnchoredInstance& anchored, const Decision& d);

/// (S_e, S_u): instances with non-empty new refs re-anchored to them, and
/// the rest with their original refs. Input order is preserved.
std::pair<AnchoredDataset, AnchoredDataset> split(const AnchoredDataset& ds, const Decision& d);

}  // namespace sdt
