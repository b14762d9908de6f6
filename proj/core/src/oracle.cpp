#include "sdt/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace sdt::oracle {

namespace {

using Pixel = std::pair<int, int>;

std::set<Pixel> pixels_of(const HyperRectangle& r) {
  std::set<Pixel> out;
  for (int x = r.axis(0).lo; x < r.axis(0).hi; ++x) {
    for (int y = r.axis(1).lo; y < r.axis(1).hi; ++y) out.insert({x, y});
  }
  return out;
}

bool subset(const std::set<Pixel>& a, const std::set<Pixel>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool touches_outside(const std::set<Pixel>& part, const std::set<Pixel>& whole) {
  for (const auto& [x, y] : part) {
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (!whole.contains({x + dx, y + dy})) return true;
      }
    }
  }
  return false;
}

}  // namespace

Rcc8 rcc8_classify(const HyperRectangle& r, const HyperRectangle& s) {
  if (r.dims() != 2 || s.dims() != 2) throw InvalidArgument("rcc8_classify needs 2-D rectangles");
  const auto pr = pixels_of(r);
  const auto ps = pixels_of(s);
  if (pr == ps) return Rcc8::EQ;
  bool shared = false;
  bool contact = false;
  for (const auto& [x, y] : pr) {
    if (ps.contains({x, y})) shared = true;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (ps.contains({x + dx, y + dy})) contact = true;
      }
    }
  }
  if (!shared) return contact ? Rcc8::EC : Rcc8::DC;
  if (subset(pr, ps)) return touches_outside(pr, ps) ? Rcc8::TPP : Rcc8::NTPP;
  if (subset(ps, pr)) return touches_outside(ps, pr) ? Rcc8::TPPi : Rcc8::NTPPi;
  return Rcc8::PO;
}

std::vector<HyperRectangle> accessible(const std::vector<HyperRectangle>& refs, const OperatorSpec* op,
                                       const GridBounds& bounds) {
  if (!op) {
    std::vector<HyperRectangle> out = refs;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<HyperRectangle> out;
  for (const HyperRectangle& s : enumerate_rectangles(bounds)) {
    bool hit = false;
    for (const HyperRectangle& r : refs) {
      for (const RelationTuple& t : op->tuples) {
        if (tuple_holds(t, r, s)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) out.push_back(s);
  }
  return out;
}

namespace {

bool holds_somewhere(const SpatialInstance& inst, const std::vector<HyperRectangle>& rects, const Decision& d) {
  for (const HyperRectangle& r : rects) {
    std::int64_t count = 0;
    for (int x = r.axis(0).lo; x < r.axis(0).hi; ++x) {
      for (int y = r.axis(1).lo; y < r.axis(1).hi; ++y) {
        if (compare(inst.pixel(d.attribute, x, y), d.cmp, d.threshold)) ++count;
      }
    }
    if (d.gamma.satisfied(count, r.pixel_count())) return true;
  }
  return false;
}

}  // namespace

std::optional<SplitScore> brute_force_best_decision(const AnchoredDataset& ds, const LearnerConfig& config) {
  if (ds.empty()) throw InvalidArgument("brute_force_best_decision on an empty dataset");
  const LearnerConfig cfg = config.normalized();
  const GridBounds bounds = ds.bounds();

  // Accessible sets per (operator name, instance).
  std::vector<OperatorRef> ops = operator_set(cfg.fragment);
  ops.push_back(nullptr);
  std::vector<std::vector<std::vector<HyperRectangle>>> acc(ops.size());
  for (std::size_t o = 0; o < ops.size(); ++o) {
    for (const AnchoredInstance& item : ds.items()) acc[o].push_back(accessible(item.refs, ops[o].get(), bounds));
  }
  auto op_pos = [&](const OperatorRef& op) {
    for (std::size_t o = 0; o < ops.size(); ++o) {
      if ((!op && !ops[o]) || (op && ops[o] && op->name == ops[o]->name)) return o;
    }
    throw std::logic_error("candidate operator not in fragment");
  };

  std::optional<SplitScore> best;
  for (const Decision& d : candidate_decisions(ds, cfg)) {
    const std::size_t o = op_pos(d.op);
    ClassCounts yes(ds.n_classes()), no(ds.n_classes());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const SpatialInstance& inst = *ds[i].instance;
      if (holds_somewhere(inst, acc[o][i], d)) {
        yes.add(inst.label());
      } else {
        no.add(inst.label());
      }
    }
    if (yes.total() < cfg.min_samples_leaf || no.total() < cfg.min_samples_leaf) continue;
    const double gain = split_gain(yes, no);
    if (!best || gain > best->gain) best = SplitScore{d, gain, yes.total(), no.total()};
  }
  if (!best || best->gain < cfg.min_info_gain) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------

namespace {

struct C45 {
  const LearnerConfig& cfg;

  std::unique_ptr<Node> grow(const std::vector<InstancePtr>& items, std::size_t n_classes, std::size_t n_attr,
                             int depth) {
    ClassCounts counts(n_classes);
    for (const auto& inst : items) counts.add(inst->label());
    const std::size_t label = counts.majority();
    if (entropy(counts) <= cfg.max_leaf_entropy) return Node::leaf(label, counts, StopReason::Pure);
    if (counts.total() < 2 * cfg.min_samples_leaf) return Node::leaf(label, counts, StopReason::TooSmall);
    if (cfg.max_depth && depth >= *cfg.max_depth) return Node::leaf(label, counts, StopReason::MaxDepth);

    std::optional<Decision> best;
    double best_gain = 0.0;
    for (std::size_t a = 0; a < n_attr; ++a) {
      for (double t : pooled_thresholds(items, a)) {
        for (Comparator c : cfg.comparators) {
          // On a single pixel every gamma in (0, 1] behaves identically, so
          // the smallest one is the earliest candidate.
          ClassCounts yes(n_classes), no(n_classes);
          for (const auto& inst : items) {
            if (compare(inst->at(a, 0, 0), c, t)) {
              yes.add(inst->label());
            } else {
              no.add(inst->label());
            }
          }
          if (yes.total() < cfg.min_samples_leaf || no.total() < cfg.min_samples_leaf) continue;
          const double gain = split_gain(yes, no);
          if (!best || gain > best_gain) {
            best = Decision{nullptr, a, c, t, cfg.gammas.front()};
            best_gain = gain;
          }
        }
      }
    }
    if (!best || best_gain < cfg.min_info_gain) return Node::leaf(label, counts, StopReason::NoSplit);
    std::vector<InstancePtr> yes_items, no_items;
    for (const auto& inst : items) {
      (compare(inst->at(best->attribute, 0, 0), best->cmp, best->threshold) ? yes_items : no_items).push_back(inst);
    }
    auto y = grow(yes_items, n_classes, n_attr, depth + 1);
    auto n = grow(no_items, n_classes, n_attr, depth + 1);
    return Node::internal(*best, counts, best_gain, std::move(y), std::move(n));
  }

  std::vector<double> pooled_thresholds(const std::vector<InstancePtr>& items, std::size_t a) const {
    std::vector<double> v;
    for (const auto& inst : items) v.push_back(inst->at(a, 0, 0));
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    if (cfg.threshold_policy.kind == ThresholdPolicy::Kind::AllMidpoints) {
      v.erase(std::unique(v.begin(), v.end()), v.end());
      for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back((v[i] + v[i + 1]) / 2.0);
      return out;
    }
    const int q = cfg.threshold_policy.q;
    const auto n = static_cast<double>(v.size());
    for (int j = 1; j <= q; ++j) {
      const double p = static_cast<double>(j) / static_cast<double>(q + 1);
      const double h = (n - 1.0) * p;
      const auto lo = static_cast<std::size_t>(h);
      const double frac = h - static_cast<double>(lo);
      out.push_back(frac > 0.0 && lo + 1 < v.size() ? v[lo] + frac * (v[lo + 1] - v[lo]) : v[lo]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

}  // namespace

SpatialDecisionTree reference_c45(const AnchoredDataset& ds, const LearnerConfig& config) {
  const LearnerConfig cfg = config.normalized();
  if (ds.empty()) throw InvalidArgument("reference_c45 on an empty dataset");
  std::vector<InstancePtr> items;
  for (const AnchoredInstance& it : ds.items()) {
    if (it.instance->rows() != 1 || it.instance->cols() != 1) throw InvalidArgument("reference_c45 needs 1x1 instances");
    items.push_back(it.instance);
  }
  C45 c45{cfg};
  auto root = c45.grow(items, ds.n_classes(), ds.n_attributes(), 0);
  return SpatialDecisionTree(std::move(root), ds.classes(), ds.n_attributes(), cfg.r0);
}

// ---------------------------------------------------------------------------

namespace {

HyperRectangle rect(int x1, int x2, int y1, int y2) { return HyperRectangle{{x1, x2}, {y1, y2}}; }

bool strictly_inside(const HyperRectangle& inner, const HyperRectangle& outer) {
  return outer.axis(0).lo < inner.axis(0).lo && inner.axis(0).hi < outer.axis(0).hi &&
         outer.axis(1).lo < inner.axis(1).lo && inner.axis(1).hi < outer.axis(1).hi;
}

bool inside(const HyperRectangle& inner, const HyperRectangle& outer) {
  return outer.axis(0).lo <= inner.axis(0).lo && inner.axis(0).hi <= outer.axis(0).hi &&
         outer.axis(1).lo <= inner.axis(1).lo && inner.axis(1).hi <= outer.axis(1).hi;
}

bool overlaps(const HyperRectangle& a, const HyperRectangle& b) {
  return a.axis(0).lo < b.axis(0).hi && b.axis(0).lo < a.axis(0).hi && a.axis(1).lo < b.axis(1).hi &&
         b.axis(1).lo < a.axis(1).hi;
}

HyperRectangle centre_pixel(int size) {
  const int c = (size + 1) / 2;
  return rect(c, c + 1, c, c + 1);
}

enum class Kind { Positive, CentreInside, CentreOnBorder };

// Sizes >= 8 keep the bar away from the centre pixel; smaller grids have
// no room for that and use a unit bar.
std::vector<Plant> configurations(int size, Kind kind) {
  const HyperRectangle c = centre_pixel(size);
  const bool roomy = size >= 8;
  const int len = roomy ? size / 2 : 1;
  const int hi = size >= 6 ? size - 2 : size - 1;
  const int lo = kind == Kind::CentreOnBorder ? 3 : std::max(3, size - 3);
  std::vector<HyperRectangle> reds, bars;
  for (int w = lo; w <= hi; ++w) {
    for (int h = lo; h <= hi; ++h) {
      for (int x = 1; x + w <= size + 1; ++x) {
        for (int y = 1; y + h <= size + 1; ++y) {
          const HyperRectangle r = rect(x, x + w, y, y + h);
          if (inside(c, r)) reds.push_back(r);
        }
      }
    }
  }
  for (int x = 1; x <= size + 1; ++x) {
    for (int y = 1; y <= size + 1; ++y) {
      if (x + len <= size + 1 && y + 1 <= size + 1) bars.push_back(rect(x, x + len, y, y + 1));
      if (len > 1 && x + 1 <= size + 1 && y + len <= size + 1) bars.push_back(rect(x, x + 1, y, y + len));
    }
  }
  std::vector<Plant> out;
  for (const auto& r : reds) {
    const bool c_strict = strictly_inside(c, r);
    if ((kind == Kind::CentreOnBorder) == c_strict) continue;
    for (const auto& g : bars) {
      if (roomy && overlaps(g, c)) continue;
      const bool ok = kind == Kind::Positive ? strictly_inside(g, r) : !overlaps(g, r);
      if (ok) out.push_back({r, g});
    }
  }
  return out;
}

}  // namespace

ContainmentTask generate_containment_task(std::size_t n, int size, std::uint64_t seed) {
  if (size < 4) throw InvalidArgument("containment task needs size >= 4");
  if (n < 2) throw InvalidArgument("containment task needs n >= 2");
  const std::vector<Plant> configs[3] = {configurations(size, Kind::Positive),
                                         configurations(size, Kind::CentreInside),
                                         configurations(size, Kind::CentreOnBorder)};
  Rng rng(seed);
  ContainmentTask task;
  task.data.n_attributes = 2;
  task.data.d = size;
  task.data.classes = {"negative", "positive"};
  task.data.seed = seed;
  const auto plane = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    const std::size_t which = positive ? 0 : ((i / 2) % 2 == 0 ? 1 : 2);
    const auto& pool = configs[which];
    const Plant plant = pool[rng.uniform_index(pool.size())];
    std::vector<double> values(2 * plane);
    for (int row = 0; row < size; ++row) {
      for (int col = 0; col < size; ++col) {
        const std::size_t p = static_cast<std::size_t>(row) * static_cast<std::size_t>(size) + static_cast<std::size_t>(col);
        values[p] = static_cast<double>(rng.uniform_int(0, 100));
        values[plane + p] = static_cast<double>(rng.uniform_int(100, 200));
      }
    }
    auto paint = [&](const HyperRectangle& r, std::size_t attr, double v) {
      for (int x = r.axis(0).lo; x < r.axis(0).hi; ++x) {
        for (int y = r.axis(1).lo; y < r.axis(1).hi; ++y) {
          values[attr * plane + static_cast<std::size_t>(y - 1) * static_cast<std::size_t>(size) +
                 static_cast<std::size_t>(x - 1)] = v;
        }
      }
    };
    paint(plant.red, 0, kRedValue);
    paint(plant.bar, 1, kBarValue);
    task.data.instances.push_back(
        std::make_shared<const SpatialInstance>(2, size, size, std::move(values), positive ? 1 : 0));
    task.plants.push_back(plant);
  }
  return task;
}

bool has_containment(const SpatialInstance& inst, double t0, double t1) {
  const GridBounds bounds = inst.bounds();
  const int size_x = bounds.extent(0);
  const int size_y = bounds.extent(1);
  const HyperRectangle c = rect((size_x + 1) / 2, (size_x + 1) / 2 + 1, (size_y + 1) / 2, (size_y + 1) / 2 + 1);
  auto all = [&](const HyperRectangle& r, std::size_t attr, Comparator cmp, double t) {
    for (int x = r.axis(0).lo; x < r.axis(0).hi; ++x) {
      for (int y = r.axis(1).lo; y < r.axis(1).hi; ++y) {
        if (!compare(inst.pixel(attr, x, y), cmp, t)) return false;
      }
    }
    return true;
  };
  const auto rects = enumerate_rectangles(bounds);
  std::vector<HyperRectangle> bars;
  for (const auto& g : rects) {
    if (all(g, 1, Comparator::Le, t1)) bars.push_back(g);
  }
  for (const auto& r : rects) {
    if (!strictly_inside(c, r) || !all(r, 0, Comparator::Ge, t0)) continue;
    for (const auto& g : bars) {
      if (strictly_inside(g, r)) return true;
    }
  }
  return false;
}

bool verify_plant(const SpatialInstance& inst, const Plant& plant) {
  const int size = inst.rows();
  const HyperRectangle c = centre_pixel(size);
  const bool positive = strictly_inside(c, plant.red) && strictly_inside(plant.bar, plant.red);
  return positive == (inst.label() == 1) && has_containment(inst) == positive;
}

Scene toy_scene(int rows, int cols, std::size_t n_attributes, std::size_t n_classes, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || n_attributes < 1 || n_classes < 1) throw InvalidArgument("toy_scene needs positive sizes");
  Rng rng(seed);
  Scene s;
  s.n_attributes = n_attributes;
  s.rows = rows;
  s.cols = cols;
  const auto plane = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  s.values.resize(n_attributes * plane);
  s.mask.resize(plane);
  for (std::size_t k = 1; k <= n_classes; ++k) s.class_names.push_back(fmt::format("class_{}", k));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t p = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
      // Vertical class bands with a checkered texture inside odd bands.
      const auto band = static_cast<std::size_t>(c) * n_classes / static_cast<std::size_t>(cols);
      const bool textured = band % 2 == 1 && (r + c) % 2 == 0;
      s.mask[p] = rng.uniform_index(10) == 0 ? 0 : static_cast<std::int32_t>(band + 1);
      for (std::size_t a = 0; a < n_attributes; ++a) {
        const double base = 50.0 * static_cast<double>(band % 2) + 10.0 * static_cast<double>(a);
        const double tex = textured ? 60.0 : 0.0;
        s.values[a * plane + p] = static_cast<float>(base + tex + static_cast<double>(rng.uniform_int(0, 40)));
      }
    }
  }
  return s;
}

}  // namespace sdt::oracle
