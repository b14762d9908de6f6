#pragma once

// Bitset view of the rectangles of a 2-D grid, used by the learner to compute
// accessible sets for every operator without materializing rectangles.

#include <array>
#include <cstdint>
#include <vector>

#include "sdt/geometry.hpp"
#include "sdt/logic.hpp"

namespace sdt::detail {

/// Subset of the rectangles of a grid: one row of bits over axis-1 intervals
/// for each axis-0 interval. Bit (i0, i1) is rectangle index i0 * n1 + i1.
class RectSet {
 public:
  RectSet() = default;
  RectSet(std::size_t n0, std::size_t n1)
      : n0_(n0), n1_(n1), words_((n1 + 63) / 64), bits_(n0 * words_, 0) {}

  std::size_t words() const noexcept { return words_; }
  void clear() noexcept { std::fill(bits_.begin(), bits_.end(), 0); }
  std::uint64_t* row(std::size_t i0) noexcept { return bits_.data() + i0 * words_; }
  const std::uint64_t* row(std::size_t i0) const noexcept { return bits_.data() + i0 * words_; }

  void set(std::size_t index) noexcept {
    const std::size_t i0 = index / n1_, i1 = index % n1_;
    row(i0)[i1 / 64] |= std::uint64_t{1} << (i1 % 64);
  }
  bool test(std::size_t index) const noexcept {
    const std::size_t i0 = index / n1_, i1 = index % n1_;
    return (row(i0)[i1 / 64] >> (i1 % 64)) & 1U;
  }
  bool empty() const noexcept {
    for (std::uint64_t w : bits_) {
      if (w) return false;
    }
    return true;
  }

  /// Calls f(index) for every member in ascending index order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i0 = 0; i0 < n0_; ++i0) {
      const std::uint64_t* r = row(i0);
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t bits = r[w];
        while (bits) {
          const int b = __builtin_ctzll(bits);
          f(i0 * n1_ + w * 64 + static_cast<std::size_t>(b));
          bits &= bits - 1;
        }
      }
    }
  }

 private:
  std::size_t n0_ = 0, n1_ = 0, words_ = 0;
  std::vector<std::uint64_t> bits_;
};

class RectangleIndex {
 public:
  explicit RectangleIndex(const GridBounds& bounds);

  const GridBounds& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept { return n0_ * n1_; }
  std::size_t n0() const noexcept { return n0_; }
  std::size_t n1() const noexcept { return n1_; }

  const HyperRectangle& rect(std::size_t index) const noexcept { return rects_[index]; }
  std::size_t index_of(const HyperRectangle& r) const { return rectangle_index(bounds_, r); }
  RectSet make_set() const { return RectSet(n0_, n1_); }

  /// Rectangles reachable from any of `refs` through any tuple of `op`.
  void accessible(const std::vector<HyperRectangle>& refs, const OperatorSpec& op, RectSet& out) const;

 private:
  GridBounds bounds_;
  std::size_t n0_, n1_, words1_;
  std::vector<HyperRectangle> rects_;
  // related0_[rel][i0]: axis-0 interval positions; mask1_[rel][i1]: bits over axis-1 positions.
  std::array<std::vector<std::vector<std::uint32_t>>, kAllenCount> related0_;
  std::array<std::vector<std::vector<std::uint64_t>>, kAllenCount> mask1_;
};

}  // namespace sdt::detail
