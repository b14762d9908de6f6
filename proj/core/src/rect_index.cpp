#include "rect_index.hpp"

#include <algorithm>

namespace sdt::detail {

namespace {

std::vector<Interval> axis_intervals(int extent) {
  std::vector<Interval> out;
  for (int lo = 1; lo <= extent; ++lo) {
    for (int hi = lo + 1; hi <= extent + 1; ++hi) out.push_back({lo, hi});
  }
  return out;
}

}  // namespace

RectangleIndex::RectangleIndex(const GridBounds& bounds)
    : bounds_(bounds),
      n0_(interval_count(bounds.extent(0))),
      n1_(bounds.dims() == 2 ? interval_count(bounds.extent(1)) : 0),
      words1_((n1_ + 63) / 64) {
  if (bounds.dims() != 2) throw InvalidArgument("rectangle index supports 2-D grids only");
  rects_ = enumerate_rectangles(bounds);
  const auto iv0 = axis_intervals(bounds.extent(0));
  const auto iv1 = axis_intervals(bounds.extent(1));
  for (Allen rel : kAllenRelations) {
    auto& rel0 = related0_[static_cast<std::size_t>(rel)];
    rel0.resize(n0_);
    for (std::size_t i = 0; i < n0_; ++i) {
      for (const Interval& b : related_intervals(rel, iv0[i], bounds.extent(0))) {
        rel0[i].push_back(static_cast<std::uint32_t>(interval_index(b, bounds.extent(0))));
      }
    }
    auto& m1 = mask1_[static_cast<std::size_t>(rel)];
    m1.assign(n1_, std::vector<std::uint64_t>(words1_, 0));
    for (std::size_t i = 0; i < n1_; ++i) {
      for (const Interval& b : related_intervals(rel, iv1[i], bounds.extent(1))) {
        const std::size_t j = interval_index(b, bounds.extent(1));
        m1[i][j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }
}

void RectangleIndex::accessible(const std::vector<HyperRectangle>& refs, const OperatorSpec& op,
                                RectSet& out) const {
  out.clear();
  std::array<std::vector<std::uint64_t>, kAllenCount> by_first;
  std::array<bool, kAllenCount> used{};
  for (auto& v : by_first) v.assign(words1_, 0);
  for (const HyperRectangle& r : refs) {
    const std::size_t i0 = interval_index(r.axis(0), bounds_.extent(0));
    const std::size_t i1 = interval_index(r.axis(1), bounds_.extent(1));
    used.fill(false);
    for (const RelationTuple& t : op.tuples) {
      const auto x0 = static_cast<std::size_t>(t[0]);
      const auto& m = mask1_[static_cast<std::size_t>(t[1])][i1];
      if (!used[x0]) {
        std::copy(m.begin(), m.end(), by_first[x0].begin());
        used[x0] = true;
      } else {
        for (std::size_t w = 0; w < words1_; ++w) by_first[x0][w] |= m[w];
      }
    }
    for (std::size_t x0 = 0; x0 < kAllenCount; ++x0) {
      if (!used[x0]) continue;
      const auto& mask = by_first[x0];
      for (std::uint32_t j0 : related0_[x0][i0]) {
        std::uint64_t* row = out.row(j0);
        for (std::size_t w = 0; w < words1_; ++w) row[w] |= mask[w];
      }
    }
  }
}

}  // namespace sdt::detail
