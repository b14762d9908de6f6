#include "sdt/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace sdt {

SpatialInstance::SpatialInstance(std::size_t n_attributes, int rows, int cols, std::vector<double> values,
                                 std::size_t label)
    : n_attributes_(n_attributes), rows_(rows), cols_(cols), values_(std::move(values)), label_(label) {
  if (n_attributes_ == 0) throw InvalidArgument("instance needs at least one attribute");
  if (rows_ < 1 || cols_ < 1) throw InvalidArgument("instance image must be at least 1x1");
  const std::size_t expected = n_attributes_ * static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  if (values_.size() != expected) {
    throw InvalidArgument(fmt::format("instance tensor has {} values, expected {}", values_.size(), expected));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("instance values must be finite");
  }
}

AnchoredDataset::AnchoredDataset(std::size_t n_attributes, std::vector<std::string> classes)
    : n_attributes_(n_attributes), classes_(std::move(classes)) {}

void AnchoredDataset::push_back(AnchoredInstance item) {
  if (!item.instance) throw InvalidArgument("null instance");
  const SpatialInstance& inst = *item.instance;
  if (inst.n_attributes() != n_attributes_) {
    throw InvalidArgument(
        fmt::format("instance has {} attributes, dataset has {}", inst.n_attributes(), n_attributes_));
  }
  if (inst.label() >= classes_.size()) throw InvalidArgument("instance label out of range");
  if (!items_.empty()) {
    const SpatialInstance& first = *items_.front().instance;
    if (first.rows() != inst.rows() || first.cols() != inst.cols()) {
      throw InvalidArgument("instances in a dataset must share their image size");
    }
  }
  const GridBounds b = inst.bounds();
  for (const HyperRectangle& r : item.refs) b.require(r);
  if (!std::is_sorted(item.refs.begin(), item.refs.end()) ||
      std::adjacent_find(item.refs.begin(), item.refs.end()) != item.refs.end()) {
    std::sort(item.refs.begin(), item.refs.end());
    item.refs.erase(std::unique(item.refs.begin(), item.refs.end()), item.refs.end());
  }
  items_.push_back(std::move(item));
}

GridBounds AnchoredDataset::bounds() const {
  if (items_.empty()) throw InvalidArgument("empty dataset has no grid");
  return items_.front().instance->bounds();
}

ClassCounts AnchoredDataset::class_counts() const {
  ClassCounts c(classes_.size());
  for (const auto& item : items_) c.add(item.instance->label());
  return c;
}

// ---------------------------------------------------------------------------

HyperRectangle resolve_r0(const R0Policy& policy, const GridBounds& bounds) {
  if (bounds.dims() != 2) throw InvalidArgument("r0 policies are defined for 2-D grids");
  if (std::holds_alternative<CenterPixel>(policy)) {
    const int x = (bounds.extent(0) + 1) / 2;
    const int y = (bounds.extent(1) + 1) / 2;
    return HyperRectangle{{x, x + 1}, {y, y + 1}};
  }
  if (std::holds_alternative<CornerPixel>(policy)) return HyperRectangle{{1, 2}, {1, 2}};
  const auto& r = std::get<HyperRectangle>(policy);
  bounds.require(r);
  return r;
}

std::string r0_policy_name(const R0Policy& policy) {
  if (std::holds_alternative<CenterPixel>(policy)) return "center";
  if (std::holds_alternative<CornerPixel>(policy)) return "corner";
  return to_string(std::get<HyperRectangle>(policy));
}

R0Policy parse_r0_policy(std::string_view text) {
  if (text == "center") return CenterPixel{};
  if (text == "corner") return CornerPixel{};
  // [(x1,y1),(x2,y2)]
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  int a = 0, b = 0, c = 0, d = 0;
  char tail = 0;
  if (std::sscanf(compact.c_str(), "[(%d,%d),(%d,%d)]%c", &a, &b, &c, &d, &tail) != 4) {
    throw ParseError("bad r0 '" + std::string(text) + "': expected center, corner or [(x1,y1),(x2,y2)]");
  }
  if (a >= b || c >= d || a < 1 || c < 1) throw ParseError("bad r0 '" + std::string(text) + "': empty interval");
  return HyperRectangle{{a, b}, {c, d}};
}

AnchoredDataset anchor(const std::vector<InstancePtr>& instances, std::size_t n_attributes,
                       std::vector<std::string> classes, const R0Policy& policy) {
  AnchoredDataset ds(n_attributes, std::move(classes));
  for (const InstancePtr& inst : instances) {
    ds.push_back({inst, {resolve_r0(policy, inst->bounds())}});
  }
  return ds;
}

// ---------------------------------------------------------------------------

std::int64_t satisfying_count(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr,
                              Comparator cmp, double a) {
  if (attr >= inst.n_attributes()) {
    throw InvalidArgument(fmt::format("attribute {} out of range ({} attributes)", attr, inst.n_attributes()));
  }
  inst.bounds().require(r);
  std::int64_t count = 0;
  for (int y = r.axis(1).lo; y < r.axis(1).hi; ++y) {
    for (int x = r.axis(0).lo; x < r.axis(0).hi; ++x) {
      if (compare(inst.pixel(attr, x, y), cmp, a)) ++count;
    }
  }
  return count;
}

Ratio satisfying_fraction(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr,
                          Comparator cmp, double a) {
  return Ratio(satisfying_count(inst, r, attr, cmp, a), r.pixel_count());
}

bool gamma_satisfies(const SpatialInstance& inst, const HyperRectangle& r, std::size_t attr, Comparator cmp,
                     double a, const Gamma& gamma) {
  return gamma.satisfied(satisfying_count(inst, r, attr, cmp, a), r.pixel_count());
}

std::vector<HyperRectangle> new_refs(const AnchoredInstance& anchored, const Decision& d) {
  const SpatialInstance& inst = *anchored.instance;
  auto holds = [&](const HyperRectangle& s) {
    return gamma_satisfies(inst, s, d.attribute, d.cmp, d.threshold, d.gamma);
  };
  std::vector<HyperRectangle> out;
  if (!d.is_modal()) {
    for (const HyperRectangle& r : anchored.refs) {
      if (holds(r)) out.push_back(r);
    }
    return out;
  }
  const GridBounds bounds = inst.bounds();
  std::vector<char> seen(bounds.rectangle_count(), 0);
  for (const HyperRectangle& r : anchored.refs) {
    for (const RelationTuple& t : expand_operator(*d.op)) {
      for (const HyperRectangle& s : enumerate_related(r, t, bounds)) {
        char& mark = seen[rectangle_index(bounds, s)];
        if (mark) continue;
        mark = 1;
        if (holds(s)) out.push_back(s);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<AnchoredDataset, AnchoredDataset> split(const AnchoredDataset& ds, const Decision& d) {
  AnchoredDataset yes(ds.n_attributes(), ds.classes());
  AnchoredDataset no(ds.n_attributes(), ds.classes());
  for (const AnchoredInstance& item : ds.items()) {
    auto refs = new_refs(item, d);
    if (refs.empty()) {
      no.push_back(item);
    } else {
      yes.push_back({item.instance, std::move(refs)});
    }
  }
  return {std::move(yes), std::move(no)};
}

}  // namespace sdt
