#include "sdt/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sdt/error.hpp"

namespace sdt {

ClassCounts::ClassCounts(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
  for (std::int64_t c : counts_) {
    if (c < 0) throw InvalidArgument("class counts must be non-negative");
    total_ += c;
  }
}

void ClassCounts::add(std::size_t c, std::int64_t n) {
  if (c >= counts_.size()) throw InvalidArgument("class index out of range");
  counts_[c] += n;
  total_ += n;
}

std::size_t ClassCounts::majority() const noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts_.size(); ++c) {
    if (counts_[c] > counts_[best]) best = c;
  }
  return best;
}

namespace {

double entropy_of(std::vector<std::int64_t> counts, std::int64_t total) {
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // avoid -0
}

}  // namespace

double entropy(const ClassCounts& c) {
  if (c.total() <= 0) throw InvalidArgument("entropy of an empty class histogram");
  return entropy_of(c.counts(), c.total());
}

double split_info(const ClassCounts& e, const ClassCounts& u) {
  const double n = static_cast<double>(e.total() + u.total());
  double info = 0.0;
  if (e.total() > 0) info += static_cast<double>(e.total()) / n * entropy(e);
  if (u.total() > 0) info += static_cast<double>(u.total()) / n * entropy(u);
  return info;
}

double split_gain(const ClassCounts& e, const ClassCounts& u) {
  if (e.n_classes() != u.n_classes()) throw InvalidArgument("class count mismatch");
  std::vector<std::int64_t> parent(e.counts());
  for (std::size_t c = 0; c < parent.size(); ++c) parent[c] += u[c];
  return entropy_of(std::move(parent), e.total() + u.total()) - split_info(e, u);
}

namespace {
constexpr std::array<std::string_view, 5> kStopNames = {"none", "pure", "too_small", "max_depth", "no_split"};
}

std::string_view stop_reason_name(StopReason r) noexcept { return kStopNames[static_cast<std::size_t>(r)]; }

StopReason parse_stop_reason(std::string_view text) {
  for (std::size_t i = 0; i < kStopNames.size(); ++i) {
    if (kStopNames[i] == text) return static_cast<StopReason>(i);
  }
  throw ParseError("unknown stop reason '" + std::string(text) + "'");
}

}  // namespace sdt
