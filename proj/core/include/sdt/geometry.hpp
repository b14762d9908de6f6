#pragma once

// Points, intervals and hyperrectangles on a finite discrete grid, and the
// thirteen Allen relations that relate them axis by axis.
//
// Pixels live at integer coordinates 1..N on an axis of extent N; interval
// endpoints live in 1..N+1 and membership is half-open (lo <= z < hi), so the
// unit interval covering pixel z is [z, z+1].

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/error.hpp"

namespace sdt {

/// Maximum number of axes a hyperrectangle may have.
inline constexpr std::size_t kMaxAxes = 4;

/// Fixed-capacity sequence with one slot per axis.
template <class T>
class AxisArray {
 public:
  AxisArray() = default;
  AxisArray(std::initializer_list<T> items) { assign(items.begin(), items.end()); }
  explicit AxisArray(std::span<const T> items) { assign(items.begin(), items.end()); }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T* begin() const noexcept { return data_.data(); }
  const T* end() const noexcept { return data_.data() + size_; }
  T* begin() noexcept { return data_.data(); }
  T* end() noexcept { return data_.data() + size_; }

  void push_back(const T& v) {
    if (size_ == kMaxAxes) throw InvalidArgument("too many axes");
    data_[size_++] = v;
  }

  friend bool operator==(const AxisArray& a, const AxisArray& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
  friend auto operator<=>(const AxisArray& a, const AxisArray& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  template <class It>
  void assign(It first, It last) {
    for (; first != last; ++first) push_back(*first);
  }

  std::array<T, kMaxAxes> data_{};
  std::uint8_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Allen relations

/// The thirteen Allen relations in Halpern-Shoham naming. `Ai` etc. are the
/// inverses (written with a bar in the literature); `Eq` is equality.
enum class Allen : std::uint8_t { A, L, B, E, D, O, Ai, Li, Bi, Ei, Di, Oi, Eq };

inline constexpr std::size_t kAllenCount = 13;

inline constexpr std::array<Allen, kAllenCount> kAllenRelations = {
    Allen::A,  Allen::L,  Allen::B,  Allen::E,  Allen::D,  Allen::O,  Allen::Ai,
    Allen::Li, Allen::Bi, Allen::Ei, Allen::Di, Allen::Oi, Allen::Eq};

constexpr Allen inverse(Allen r) noexcept {
  const auto v = static_cast<std::uint8_t>(r);
  if (r == Allen::Eq) return r;
  return static_cast<Allen>(v < 6 ? v + 6 : v - 6);
}

/// ASCII name: "A", "Ai", ..., "=".
std::string_view ascii_name(Allen r) noexcept;
/// Display symbol using a combining macron for inverses: "A", "Ā", ..., "=".
std::string_view display_symbol(Allen r) noexcept;
std::optional<Allen> parse_allen(std::string_view text) noexcept;

// ---------------------------------------------------------------------------
// Intervals

struct Interval {
  int lo = 1;
  int hi = 2;

  constexpr int length() const noexcept { return hi - lo; }
  constexpr bool contains_pixel(int z) const noexcept { return lo <= z && z < hi; }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
  friend constexpr auto operator<=>(const Interval&, const Interval&) = default;
};

/// True iff `a rel b` under the Halpern-Shoham reading of Allen's relations.
bool allen_holds(Allen rel, Interval a, Interval b) noexcept;

/// The unique relation that holds between `a` and `b`.
Allen classify_intervals(Interval a, Interval b) noexcept;

/// Every interval `b` on an axis of the given extent with `rel(a, b)`, in
/// lexicographic (lo, hi) order.
std::vector<Interval> related_intervals(Allen rel, Interval a, int extent);

/// Number of intervals on an axis of the given extent: extent*(extent+1)/2.
constexpr std::size_t interval_count(int extent) noexcept {
  return static_cast<std::size_t>(extent) * static_cast<std::size_t>(extent + 1) / 2;
}

/// Position of `iv` in the lexicographic order of all intervals on the axis.
std::size_t interval_index(Interval iv, int extent) noexcept;

// ---------------------------------------------------------------------------
// Hyperrectangles

class HyperRectangle {
 public:
  HyperRectangle() = default;
  HyperRectangle(std::initializer_list<Interval> axes) : axes_(axes) {}
  explicit HyperRectangle(std::span<const Interval> axes) : axes_(axes) {}

  std::size_t dims() const noexcept { return axes_.size(); }
  const Interval& axis(std::size_t i) const noexcept { return axes_[i]; }
  const Interval* begin() const noexcept { return axes_.begin(); }
  const Interval* end() const noexcept { return axes_.end(); }

  /// Number of pixels covered under half-open membership.
  std::int64_t pixel_count() const noexcept;

  /// Unit rectangle covering the pixel at the given 1-based coordinates.
  static HyperRectangle unit(std::span<const int> pixel);

  friend bool operator==(const HyperRectangle&, const HyperRectangle&) = default;
  /// Lexicographic on the flattened endpoints (lo1, hi1, lo2, hi2, ...).
  friend auto operator<=>(const HyperRectangle& a, const HyperRectangle& b) {
    return a.axes_ <=> b.axes_;
  }

 private:
  AxisArray<Interval> axes_;
};

/// "[(x1,y1),(x2,y2)]"
std::string to_string(const HyperRectangle& r);

class GridBounds {
 public:
  explicit GridBounds(std::vector<int> extents);
  GridBounds(std::initializer_list<int> extents) : GridBounds(std::vector<int>(extents)) {}

  std::size_t dims() const noexcept { return extents_.size(); }
  int extent(std::size_t axis) const noexcept { return extents_[axis]; }
  std::span<const int> extents() const noexcept { return extents_; }

  /// Product over axes of extent*(extent+1)/2.
  std::size_t rectangle_count() const noexcept;

  bool contains(const HyperRectangle& r) const noexcept;
  /// Throws InvalidArgument unless `r` has matching dimension and lies inside.
  void require(const HyperRectangle& r) const;

  friend bool operator==(const GridBounds&, const GridBounds&) = default;

 private:
  std::vector<int> extents_;
};

/// Position of `r` in the canonical enumeration order of `bounds`.
std::size_t rectangle_index(const GridBounds& bounds, const HyperRectangle& r);

// ---------------------------------------------------------------------------
// Relation tuples

class RelationTuple {
 public:
  RelationTuple() = default;
  RelationTuple(std::initializer_list<Allen> rels) : rels_(rels) {}
  explicit RelationTuple(std::span<const Allen> rels) : rels_(rels) {}

  static RelationTuple equality(std::size_t dims);

  std::size_t dims() const noexcept { return rels_.size(); }
  Allen operator[](std::size_t i) const noexcept { return rels_[i]; }
  const Allen* begin() const noexcept { return rels_.begin(); }
  const Allen* end() const noexcept { return rels_.end(); }

  bool is_equality() const noexcept;
  RelationTuple inverse() const;

  /// "(A,=)"
  std::string name() const;
  /// "(Ā,=)"
  std::string display() const;

  friend bool operator==(const RelationTuple&, const RelationTuple&) = default;
  friend auto operator<=>(const RelationTuple& a, const RelationTuple& b) {
    return a.rels_ <=> b.rels_;
  }

 private:
  AxisArray<Allen> rels_;
};

/// Parses "(X1,...,Xk)" with ASCII relation names.
std::optional<RelationTuple> parse_relation_tuple(std::string_view text);

/// All 13^k tuples (equality included) in lexicographic enum order.
std::vector<RelationTuple> all_relation_tuples(std::size_t dims);

RelationTuple classify_pair(const HyperRectangle& r, const HyperRectangle& s);
bool tuple_holds(const RelationTuple& t, const HyperRectangle& r, const HyperRectangle& s);

/// Every hyperrectangle of `bounds`, each once, lexicographic by endpoints.
std::vector<HyperRectangle> enumerate_rectangles(const GridBounds& bounds);

/// Exactly { s | tuple_holds(t, r, s) } in canonical order, generated per axis
/// so the cost is proportional to the output.
std::vector<HyperRectangle> enumerate_related(const HyperRectangle& r, const RelationTuple& t,
                                              const GridBounds& bounds);

}  // namespace sdt
