#include "sdt/geometry.hpp"

#include <fmt/format.h>

namespace sdt {

namespace {

constexpr std::array<std::string_view, kAllenCount> kAsciiNames = {
    "A", "L", "B", "E", "D", "O", "Ai", "Li", "Bi", "Ei", "Di", "Oi", "="};

constexpr std::array<std::string_view, kAllenCount> kDisplay = {
    "A",       "L",       "B",       "E",       "D",       "O", "Ā",
    "L̄", "B̄", "Ē", "D̄", "Ō", "="};

struct Range {
  int lo_min, lo_max, hi_min, hi_max;
};

// Endpoint ranges of every b with rel(a, b); hi is additionally bounded below
// by lo + 1 when enumerating.
Range related_range(Allen rel, Interval a, int extent) noexcept {
  const int x = a.lo;
  const int y = a.hi;
  const int top = extent + 1;
  switch (rel) {
    case Allen::A:  return {y, y, y + 1, top};
    case Allen::L:  return {y + 1, extent, 1, top};
    case Allen::B:  return {x, x, x + 1, y - 1};
    case Allen::E:  return {x + 1, y - 1, y, y};
    case Allen::D:  return {x + 1, y - 2, 1, y - 1};
    case Allen::O:  return {x + 1, y - 1, y + 1, top};
    case Allen::Ai: return {1, x - 1, x, x};
    case Allen::Li: return {1, x - 2, 1, x - 1};
    case Allen::Bi: return {x, x, y + 1, top};
    case Allen::Ei: return {1, x - 1, y, y};
    case Allen::Di: return {1, x - 1, y + 1, top};
    case Allen::Oi: return {1, x - 1, x + 1, y - 1};
    case Allen::Eq: return {x, x, y, y};
  }
  return {1, 0, 1, 0};
}

}  // namespace

std::string_view ascii_name(Allen r) noexcept { return kAsciiNames[static_cast<std::size_t>(r)]; }

std::string_view display_symbol(Allen r) noexcept { return kDisplay[static_cast<std::size_t>(r)]; }

std::optional<Allen> parse_allen(std::string_view text) noexcept {
  for (Allen r : kAllenRelations) {
    if (ascii_name(r) == text) return r;
  }
  return std::nullopt;
}

bool allen_holds(Allen rel, Interval a, Interval b) noexcept {
  const int x = a.lo, y = a.hi, xp = b.lo, yp = b.hi;
  switch (rel) {
    case Allen::A:  return y == xp;
    case Allen::L:  return y < xp;
    case Allen::B:  return x == xp && yp < y;
    case Allen::E:  return y == yp && x < xp;
    case Allen::D:  return x < xp && yp < y;
    case Allen::O:  return x < xp && xp < y && y < yp;
    case Allen::Ai: return allen_holds(Allen::A, b, a);
    case Allen::Li: return allen_holds(Allen::L, b, a);
    case Allen::Bi: return allen_holds(Allen::B, b, a);
    case Allen::Ei: return allen_holds(Allen::E, b, a);
    case Allen::Di: return allen_holds(Allen::D, b, a);
    case Allen::Oi: return allen_holds(Allen::O, b, a);
    case Allen::Eq: return a == b;
  }
  return false;
}

Allen classify_intervals(Interval a, Interval b) noexcept {
  for (Allen r : kAllenRelations) {
    if (allen_holds(r, a, b)) return r;
  }
  return Allen::Eq;  // unreachable for valid intervals
}

std::vector<Interval> related_intervals(Allen rel, Interval a, int extent) {
  const Range range = related_range(rel, a, extent);
  std::vector<Interval> out;
  for (int lo = std::max(range.lo_min, 1); lo <= range.lo_max; ++lo) {
    for (int hi = std::max(range.hi_min, lo + 1); hi <= std::min(range.hi_max, extent + 1); ++hi) {
      out.push_back({lo, hi});
    }
  }
  return out;
}

std::size_t interval_index(Interval iv, int extent) noexcept {
  const auto n1 = static_cast<std::size_t>(extent + 1);
  const auto before = static_cast<std::size_t>(iv.lo - 1);
  // Intervals starting at l contribute (n1 - l) entries.
  return before * n1 - before * (before + 1) / 2 + static_cast<std::size_t>(iv.hi - iv.lo - 1);
}

// ---------------------------------------------------------------------------

std::int64_t HyperRectangle::pixel_count() const noexcept {
  std::int64_t n = 1;
  for (const Interval& iv : axes_) n *= iv.length();
  return n;
}

HyperRectangle HyperRectangle::unit(std::span<const int> pixel) {
  HyperRectangle r;
  for (int z : pixel) r.axes_.push_back({z, z + 1});
  return r;
}

std::string to_string(const HyperRectangle& r) {
  std::string out = "[";
  for (std::size_t i = 0; i < r.dims(); ++i) {
    if (i) out += ',';
    out += fmt::format("({},{})", r.axis(i).lo, r.axis(i).hi);
  }
  out += ']';
  return out;
}

GridBounds::GridBounds(std::vector<int> extents) : extents_(std::move(extents)) {
  if (extents_.empty() || extents_.size() > kMaxAxes) {
    throw InvalidArgument(fmt::format("grid must have 1..{} axes, got {}", kMaxAxes, extents_.size()));
  }
  for (int e : extents_) {
    if (e < 1) throw InvalidArgument(fmt::format("grid extent must be >= 1, got {}", e));
  }
}

std::size_t GridBounds::rectangle_count() const noexcept {
  std::size_t n = 1;
  for (int e : extents_) n *= interval_count(e);
  return n;
}

bool GridBounds::contains(const HyperRectangle& r) const noexcept {
  if (r.dims() != dims()) return false;
  for (std::size_t i = 0; i < dims(); ++i) {
    const Interval iv = r.axis(i);
    if (!(1 <= iv.lo && iv.lo < iv.hi && iv.hi <= extents_[i] + 1)) return false;
  }
  return true;
}

void GridBounds::require(const HyperRectangle& r) const {
  if (r.dims() != dims()) {
    throw InvalidArgument(fmt::format("rectangle has {} axes, grid has {}", r.dims(), dims()));
  }
  if (!contains(r)) throw InvalidArgument("rectangle " + to_string(r) + " lies outside the grid");
}

std::size_t rectangle_index(const GridBounds& bounds, const HyperRectangle& r) {
  bounds.require(r);
  std::size_t index = 0;
  for (std::size_t i = 0; i < bounds.dims(); ++i) {
    index = index * interval_count(bounds.extent(i)) + interval_index(r.axis(i), bounds.extent(i));
  }
  return index;
}

// ---------------------------------------------------------------------------

RelationTuple RelationTuple::equality(std::size_t dims) {
  RelationTuple t;
  for (std::size_t i = 0; i < dims; ++i) t.rels_.push_back(Allen::Eq);
  return t;
}

bool RelationTuple::is_equality() const noexcept {
  return std::all_of(begin(), end(), [](Allen r) { return r == Allen::Eq; });
}

RelationTuple RelationTuple::inverse() const {
  RelationTuple t;
  for (Allen r : *this) t.rels_.push_back(sdt::inverse(r));
  return t;
}

std::string RelationTuple::name() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dims(); ++i) {
    if (i) out += ',';
    out += ascii_name(rels_[i]);
  }
  return out + ")";
}

std::string RelationTuple::display() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dims(); ++i) {
    if (i) out += ',';
    out += display_symbol(rels_[i]);
  }
  return out + ")";
}

std::optional<RelationTuple> parse_relation_tuple(std::string_view text) {
  if (text.size() < 3 || text.front() != '(' || text.back() != ')') return std::nullopt;
  text = text.substr(1, text.size() - 2);
  std::vector<Allen> rels;
  while (true) {
    const auto comma = text.find(',');
    const auto rel = parse_allen(text.substr(0, comma));
    if (!rel) return std::nullopt;
    rels.push_back(*rel);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (rels.size() > kMaxAxes) return std::nullopt;
  return RelationTuple(std::span<const Allen>(rels));
}

std::vector<RelationTuple> all_relation_tuples(std::size_t dims) {
  if (dims == 0 || dims > kMaxAxes) throw InvalidArgument("relation tuples need 1..4 axes");
  std::vector<RelationTuple> out;
  std::vector<Allen> current(dims, Allen::A);
  std::vector<std::size_t> digit(dims, 0);
  while (true) {
    for (std::size_t i = 0; i < dims; ++i) current[i] = kAllenRelations[digit[i]];
    out.emplace_back(std::span<const Allen>(current));
    std::size_t i = dims;
    while (i > 0) {
      --i;
      if (++digit[i] < kAllenCount) break;
      digit[i] = 0;
      if (i == 0) return out;
    }
  }
}

RelationTuple classify_pair(const HyperRectangle& r, const HyperRectangle& s) {
  if (r.dims() != s.dims()) {
    throw InvalidArgument(fmt::format("dimension mismatch: {} vs {}", r.dims(), s.dims()));
  }
  std::vector<Allen> rels;
  for (std::size_t i = 0; i < r.dims(); ++i) rels.push_back(classify_intervals(r.axis(i), s.axis(i)));
  return RelationTuple(std::span<const Allen>(rels));
}

bool tuple_holds(const RelationTuple& t, const HyperRectangle& r, const HyperRectangle& s) {
  if (t.dims() != r.dims() || r.dims() != s.dims()) {
    throw InvalidArgument(
        fmt::format("dimension mismatch: tuple {}, rectangles {} and {}", t.dims(), r.dims(), s.dims()));
  }
  for (std::size_t i = 0; i < t.dims(); ++i) {
    if (!allen_holds(t[i], r.axis(i), s.axis(i))) return false;
  }
  return true;
}

namespace {

std::vector<HyperRectangle> cartesian(const std::vector<std::vector<Interval>>& per_axis) {
  std::vector<HyperRectangle> out;
  for (const auto& axis : per_axis) {
    if (axis.empty()) return out;
  }
  const std::size_t k = per_axis.size();
  std::vector<std::size_t> digit(k, 0);
  std::vector<Interval> current(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) current[i] = per_axis[i][digit[i]];
    out.emplace_back(std::span<const Interval>(current));
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++digit[i] < per_axis[i].size()) break;
      digit[i] = 0;
      if (i == 0) return out;
    }
  }
}

}  // namespace

std::vector<HyperRectangle> enumerate_rectangles(const GridBounds& bounds) {
  std::vector<std::vector<Interval>> per_axis;
  for (int extent : bounds.extents()) {
    std::vector<Interval> axis;
    for (int lo = 1; lo <= extent; ++lo) {
      for (int hi = lo + 1; hi <= extent + 1; ++hi) axis.push_back({lo, hi});
    }
    per_axis.push_back(std::move(axis));
  }
  return cartesian(per_axis);
}

std::vector<HyperRectangle> enumerate_related(const HyperRectangle& r, const RelationTuple& t,
                                              const GridBounds& bounds) {
  bounds.require(r);
  if (t.dims() != r.dims()) throw InvalidArgument("relation tuple dimension mismatch");
  std::vector<std::vector<Interval>> per_axis;
  for (std::size_t i = 0; i < r.dims(); ++i) {
    per_axis.push_back(related_intervals(t[i], r.axis(i), bounds.extent(i)));
  }
  return cartesian(per_axis);
}

}  // namespace sdt
