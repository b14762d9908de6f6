#include "sdt/learner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "rect_index.hpp"

namespace sdt {

using detail::RectangleIndex;
using detail::RectSet;

std::string ThresholdPolicy::name() const {
  if (kind == Kind::AllMidpoints) return "all-midpoints";
  return fmt::format("quantiles({})", q);
}

ThresholdPolicy ThresholdPolicy::parse(std::string_view text) {
  if (text == "all-midpoints") return all_midpoints();
  if (text.starts_with("quantiles(") && text.ends_with(")")) {
    const std::string inner(text.substr(10, text.size() - 11));
    char* end = nullptr;
    const long q = std::strtol(inner.c_str(), &end, 10);
    if (!inner.empty() && *end == '\0' && q >= 1 && q <= 100000) return quantiles(static_cast<int>(q));
  }
  throw ParseError("bad threshold policy '" + std::string(text) + "': expected all-midpoints or quantiles(<q>)");
}

void LearnerConfig::validate() const {
  if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
  if (comparators.empty()) throw InvalidArgument("at least one comparator is required");
  if (gammas.empty()) throw InvalidArgument("at least one gamma is required");
  if (threshold_policy.kind == ThresholdPolicy::Kind::Quantiles && threshold_policy.q < 1) {
    throw InvalidArgument("quantiles(q) needs q >= 1");
  }
  if (max_depth && *max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  if (!std::isfinite(min_info_gain) || !std::isfinite(max_leaf_entropy)) {
    throw InvalidArgument("gain and entropy limits must be finite");
  }
}

LearnerConfig LearnerConfig::normalized() const {
  LearnerConfig out = *this;
  out.comparators.clear();
  for (Comparator c : kComparators) {
    if (std::find(comparators.begin(), comparators.end(), c) != comparators.end()) out.comparators.push_back(c);
  }
  std::sort(out.gammas.begin(), out.gammas.end());
  out.gammas.erase(std::unique(out.gammas.begin(), out.gammas.end()), out.gammas.end());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> thresholds(const AnchoredDataset& ds, std::size_t attr, const ThresholdPolicy& policy) {
  if (attr >= ds.n_attributes()) throw InvalidArgument("attribute out of range");
  std::vector<double> pooled;
  for (const AnchoredInstance& item : ds.items()) {
    const SpatialInstance& inst = *item.instance;
    const std::size_t plane = static_cast<std::size_t>(inst.rows()) * static_cast<std::size_t>(inst.cols());
    const auto first = inst.values().begin() + static_cast<std::ptrdiff_t>(attr * plane);
    pooled.insert(pooled.end(), first, first + static_cast<std::ptrdiff_t>(plane));
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> out;
  if (pooled.empty()) return out;
  if (policy.kind == ThresholdPolicy::Kind::AllMidpoints) {
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) out.push_back((pooled[i] + pooled[i + 1]) / 2.0);
    return out;
  }
  const std::size_t n = pooled.size();
  for (int j = 1; j <= policy.q; ++j) {
    const double p = static_cast<double>(j) / static_cast<double>(policy.q + 1);
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    double v = pooled[lo];
    if (lo + 1 < n && frac > 0.0) v = pooled[lo] + frac * (pooled[lo + 1] - pooled[lo]);
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Decision> candidate_decisions(const AnchoredDataset& ds, const LearnerConfig& config) {
  const LearnerConfig cfg = config.normalized();
  std::vector<OperatorRef> ops = operator_set(cfg.fragment);
  ops.push_back(nullptr);
  std::vector<std::vector<double>> thr;
  for (std::size_t a = 0; a < ds.n_attributes(); ++a) thr.push_back(thresholds(ds, a, cfg.threshold_policy));
  std::vector<Decision> out;
  for (const OperatorRef& op : ops) {
    for (std::size_t a = 0; a < ds.n_attributes(); ++a) {
      for (double t : thr[a]) {
        for (Comparator c : cfg.comparators) {
          for (const Gamma& g : cfg.gammas) out.push_back(Decision{op, a, c, t, g});
        }
      }
    }
  }
  return out;
}

double info_split(const AnchoredDataset& ds, const Decision& d) {
  if (ds.empty()) throw InvalidArgument("info_split of an empty dataset");
  const auto [yes, no] = split(ds, d);
  return split_info(yes.class_counts(), no.class_counts());
}

double info_gain(const AnchoredDataset& ds, const Decision& d) {
  if (ds.empty()) throw InvalidArgument("info_gain of an empty dataset");
  const auto [yes, no] = split(ds, d);
  return split_gain(yes.class_counts(), no.class_counts());
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Order statistics

namespace {

// For every rectangle (canonical order) and gamma: the k-th smallest and the
// k-th largest pixel value with k = ceil(gamma * |rect|). Layout [rect][gamma].
void compute_order_stats(const SpatialInstance& inst, std::size_t attr, const RectangleIndex& index,
                         const std::vector<Gamma>& gammas, double* small, double* large) {
  std::vector<double> buf;
  const std::size_t g_count = gammas.size();
  for (std::size_t r = 0; r < index.size(); ++r) {
    const HyperRectangle& rect = index.rect(r);
    buf.clear();
    for (int y = rect.axis(1).lo; y < rect.axis(1).hi; ++y) {
      for (int x = rect.axis(0).lo; x < rect.axis(0).hi; ++x) buf.push_back(inst.pixel(attr, x, y));
    }
    std::sort(buf.begin(), buf.end());
    const auto n = static_cast<std::int64_t>(buf.size());
    for (std::size_t g = 0; g < g_count; ++g) {
      const std::int64_t k = gammas[g].min_count(n);
      small[r * g_count + g] = buf[static_cast<std::size_t>(k - 1)];
      large[r * g_count + g] = buf[static_cast<std::size_t>(n - k)];
    }
  }
}

}  // namespace

class OrderStatCache {
 public:
  OrderStatCache(const AnchoredDataset& ds, const std::vector<Gamma>& gammas, std::size_t workers)
      : bounds_(ds.bounds()), gammas_(gammas), n_attr_(ds.n_attributes()) {
    const RectangleIndex index(bounds_);
    n_rect_ = index.size();
    std::vector<const SpatialInstance*> unique;
    for (const AnchoredInstance& item : ds.items()) {
      if (slot_.emplace(item.instance.get(), unique.size()).second) unique.push_back(item.instance.get());
    }
    const std::size_t per = block();
    small_.resize(unique.size() * n_attr_ * per);
    large_.resize(unique.size() * n_attr_ * per);
    parallel_for(unique.size() * n_attr_, workers, [&](std::size_t task) {
      const std::size_t s = task / n_attr_, a = task % n_attr_;
      compute_order_stats(*unique[s], a, index, gammas_, small_.data() + task * per, large_.data() + task * per);
    });
  }

  static std::size_t bytes_needed(const AnchoredDataset& ds, std::size_t n_gammas) {
    const std::size_t rects = ds.bounds().rectangle_count();
    return ds.size() * ds.n_attributes() * rects * n_gammas * 2 * sizeof(double);
  }

  bool compatible(const GridBounds& bounds, const std::vector<Gamma>& gammas) const {
    return bounds == bounds_ && gammas == gammas_;
  }

  /// Pointers to the [rect][gamma] tables, or null when the instance is unknown.
  std::pair<const double*, const double*> lookup(const SpatialInstance* inst, std::size_t attr) const {
    const auto it = slot_.find(inst);
    if (it == slot_.end()) return {nullptr, nullptr};
    const std::size_t off = (it->second * n_attr_ + attr) * block();
    return {small_.data() + off, large_.data() + off};
  }

 private:
  std::size_t block() const { return n_rect_ * gammas_.size(); }

  GridBounds bounds_;
  std::vector<Gamma> gammas_;
  std::size_t n_attr_;
  std::size_t n_rect_ = 0;
  std::unordered_map<const SpatialInstance*, std::size_t> slot_;
  std::vector<double> small_;
  std::vector<double> large_;
};

PreparedDataset preprocess(const AnchoredDataset& ds, const LearnerConfig& config) {
  const LearnerConfig cfg = config.normalized();
  PreparedDataset out{ds, nullptr};
  if (!cfg.use_cache || ds.empty()) return out;
  if (OrderStatCache::bytes_needed(ds, cfg.gammas.size()) > cfg.cache_budget_bytes) return out;
  out.cache = std::make_shared<const OrderStatCache>(ds, cfg.gammas, cfg.workers);
  return out;
}

// ---------------------------------------------------------------------------
// Split search

namespace {

struct CandidateKey {
  std::size_t op = 0, attr = 0, threshold = 0, cmp = 0, gamma = 0;
  auto operator<=>(const CandidateKey&) const = default;
};

struct Best {
  bool found = false;
  double gain = 0.0;
  CandidateKey key;
  double threshold = 0.0;
  std::int64_t n_yes = 0, n_no = 0;

  void offer(double g, const CandidateKey& k, double t, std::int64_t yes, std::int64_t no) {
    if (!found || g > gain || (g == gain && k < key)) {
      found = true;
      gain = g;
      key = k;
      threshold = t;
      n_yes = yes;
      n_no = no;
    }
  }
  void merge(const Best& other) {
    if (other.found) offer(other.gain, other.key, other.threshold, other.n_yes, other.n_no);
  }
};

std::size_t comparator_pos(Comparator c) { return static_cast<std::size_t>(c); }

struct SearchContext {
  const AnchoredDataset& ds;
  const LearnerConfig& cfg;  // normalized
  const RectangleIndex& index;
  const OrderStatCache* cache;
  std::vector<OperatorRef> ops;           // fragment operators followed by null (propositional)
  std::vector<RectSet> access;            // [op][instance]
  std::vector<std::size_t> labels;
  std::size_t n_classes;
};

void build_access(SearchContext& ctx) {
  const std::size_t m = ctx.ds.size();
  ctx.access.assign(ctx.ops.size() * m, ctx.index.make_set());
  parallel_for(ctx.ops.size(), ctx.cfg.workers, [&](std::size_t o) {
    for (std::size_t i = 0; i < m; ++i) {
      RectSet& set = ctx.access[o * m + i];
      const auto& refs = ctx.ds[i].refs;
      if (ctx.ops[o]) {
        ctx.index.accessible(refs, *ctx.ops[o], set);
      } else {
        for (const HyperRectangle& r : refs) set.set(ctx.index.index_of(r));
      }
    }
  });
}

// Scores one attribute across all operators; writes one Best per operator.
void search_attribute(const SearchContext& ctx, std::size_t attr, std::vector<Best>& out_blocks,
                      std::int64_t& evaluated) {
  const auto& cfg = ctx.cfg;
  const std::size_t m = ctx.ds.size();
  const std::size_t G = cfg.gammas.size();
  const std::size_t R = ctx.index.size();
  const std::size_t L = ctx.n_classes;
  const std::vector<double> thr = thresholds(ctx.ds, attr, cfg.threshold_policy);
  if (thr.empty()) return;

  bool need_order = false, need_eq = false;
  for (Comparator c : cfg.comparators) {
    if (c == Comparator::Eq || c == Comparator::Ne) {
      need_eq = true;
    } else {
      need_order = true;
    }
  }

  // Per-instance [rect][gamma] tables, from the cache when possible.
  std::vector<const double*> small(m), large(m);
  std::vector<double> local_small, local_large;
  if (need_order) {
    const bool use_cache = ctx.cache && ctx.cache->compatible(ctx.index.bounds(), cfg.gammas);
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < m; ++i) {
      if (use_cache) {
        std::tie(small[i], large[i]) = ctx.cache->lookup(ctx.ds[i].instance.get(), attr);
      }
      if (!small[i]) missing.push_back(i);
    }
    local_small.resize(missing.size() * R * G);
    local_large.resize(missing.size() * R * G);
    for (std::size_t j = 0; j < missing.size(); ++j) {
      const std::size_t i = missing[j];
      compute_order_stats(*ctx.ds[i].instance, attr, ctx.index, cfg.gammas, local_small.data() + j * R * G,
                          local_large.data() + j * R * G);
      small[i] = local_small.data() + j * R * G;
      large[i] = local_large.data() + j * R * G;
    }
  }

  ClassCounts total(L);
  for (std::size_t i = 0; i < m; ++i) total.add(ctx.labels[i]);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> crit_small(G * m), crit_large(G * m);
  std::vector<std::size_t> order(m);
  std::vector<std::int64_t> prefix(L);

  auto score = [&](Best& best, const CandidateKey& key, double t, const std::vector<std::int64_t>& yes_counts) {
    std::vector<std::int64_t> no_counts(L);
    std::int64_t n_yes = 0;
    for (std::size_t c = 0; c < L; ++c) {
      no_counts[c] = total[c] - yes_counts[c];
      n_yes += yes_counts[c];
    }
    const std::int64_t n_no = total.total() - n_yes;
    if (n_yes < cfg.min_samples_leaf || n_no < cfg.min_samples_leaf) return;
    const double gain = split_gain(ClassCounts(yes_counts), ClassCounts(std::move(no_counts)));
    best.offer(gain, key, t, n_yes, n_no);
  };

  for (std::size_t o = 0; o < ctx.ops.size(); ++o) {
    Best best;
    const RectSet* acc = &ctx.access[o * m];

    if (need_order) {
      for (std::size_t i = 0; i < m; ++i) {
        double* cs = &crit_small[i * G];
        double* cl = &crit_large[i * G];
        std::fill(cs, cs + G, inf);
        std::fill(cl, cl + G, -inf);
        const double* s_tab = small[i];
        const double* l_tab = large[i];
        acc[i].for_each([&](std::size_t r) {
          for (std::size_t g = 0; g < G; ++g) {
            cs[g] = std::min(cs[g], s_tab[r * G + g]);
            cl[g] = std::max(cl[g], l_tab[r * G + g]);
          }
        });
      }
    }

    for (std::size_t g = 0; g < G; ++g) {
      for (Comparator cmp : cfg.comparators) {
        if (cmp == Comparator::Eq || cmp == Comparator::Ne) continue;
        const bool lower = cmp == Comparator::Lt || cmp == Comparator::Le;
        const std::vector<double>& crit = lower ? crit_small : crit_large;
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return crit[a * G + g] < crit[b * G + g]; });
        std::fill(prefix.begin(), prefix.end(), 0);
        std::size_t p = 0;
        for (std::size_t j = 0; j < thr.size(); ++j) {
          const double t = thr[j];
          // prefix holds the instances with crit < t (strict) or crit <= t.
          const bool strict = cmp == Comparator::Lt || cmp == Comparator::Ge;
          while (p < m) {
            const double c = crit[order[p] * G + g];
            if (strict ? !(c < t) : !(c <= t)) break;
            ++prefix[ctx.labels[order[p]]];
            ++p;
          }
          const CandidateKey key{o, attr, j, comparator_pos(cmp), g};
          if (lower) {
            score(best, key, t, prefix);
          } else {
            std::vector<std::int64_t> yes(L);
            for (std::size_t c = 0; c < L; ++c) yes[c] = total[c] - prefix[c];
            score(best, key, t, yes);
          }
        }
      }
    }

    if (need_eq) {
      std::vector<std::int64_t> yes(L);
      for (Comparator cmp : cfg.comparators) {
        if (cmp != Comparator::Eq && cmp != Comparator::Ne) continue;
        for (std::size_t g = 0; g < G; ++g) {
          for (std::size_t j = 0; j < thr.size(); ++j) {
            std::fill(yes.begin(), yes.end(), 0);
            for (std::size_t i = 0; i < m; ++i) {
              const SpatialInstance& inst = *ctx.ds[i].instance;
              bool hit = false;
              acc[i].for_each([&](std::size_t r) {
                if (hit) return;
                const HyperRectangle& rect = ctx.index.rect(r);
                std::int64_t count = 0;
                for (int y = rect.axis(1).lo; y < rect.axis(1).hi; ++y) {
                  for (int x = rect.axis(0).lo; x < rect.axis(0).hi; ++x) {
                    if (compare(inst.pixel(attr, x, y), cmp, thr[j])) ++count;
                  }
                }
                hit = cfg.gammas[g].satisfied(count, rect.pixel_count());
              });
              if (hit) ++yes[ctx.labels[i]];
            }
            score(best, CandidateKey{o, attr, j, comparator_pos(cmp), g}, thr[j], yes);
          }
        }
      }
    }

    evaluated += static_cast<std::int64_t>(thr.size() * cfg.comparators.size() * G);
    out_blocks[o] = best;
  }
}

std::optional<SplitScore> search(const AnchoredDataset& ds, const LearnerConfig& cfg, const RectangleIndex& index,
                                 const OrderStatCache* cache, SearchStats* stats) {
  if (ds.empty()) throw InvalidArgument("find_best_decision on an empty dataset");
  SearchContext ctx{ds, cfg, index, cache, operator_set(cfg.fragment), {}, {}, ds.n_classes()};
  ctx.ops.push_back(nullptr);
  for (const AnchoredInstance& item : ds.items()) ctx.labels.push_back(item.instance->label());
  build_access(ctx);

  const std::size_t n_attr = ds.n_attributes();
  const std::size_t n_ops = ctx.ops.size();
  std::vector<Best> blocks(n_ops * n_attr);
  std::vector<std::int64_t> evaluated(n_attr, 0);
  parallel_for(n_attr, cfg.workers, [&](std::size_t a) {
    std::vector<Best> per_op(n_ops);
    search_attribute(ctx, a, per_op, evaluated[a]);
    for (std::size_t o = 0; o < n_ops; ++o) blocks[o * n_attr + a] = per_op[o];
  });

  Best best;
  for (const Best& b : blocks) best.merge(b);
  if (stats) stats->candidates += std::accumulate(evaluated.begin(), evaluated.end(), std::int64_t{0});
  if (!best.found || best.gain < cfg.min_info_gain) return std::nullopt;
  Decision d{ctx.ops[best.key.op], best.key.attr, kComparators[best.key.cmp], best.threshold,
             cfg.gammas[best.key.gamma]};
  return SplitScore{std::move(d), best.gain, best.n_yes, best.n_no};
}

}  // namespace

std::optional<SplitScore> find_best_decision(const AnchoredDataset& ds, const LearnerConfig& config,
                                             const OrderStatCache* cache, SearchStats* stats) {
  config.validate();
  const LearnerConfig cfg = config.normalized();
  if (ds.empty()) throw InvalidArgument("find_best_decision on an empty dataset");
  const RectangleIndex index(ds.bounds());
  return search(ds, cfg, index, cache, stats);
}

// ---------------------------------------------------------------------------

namespace {

struct Grower {
  const LearnerConfig& cfg;
  const RectangleIndex& index;
  const OrderStatCache* cache;
  LearnStats& stats;

  std::unique_ptr<Node> grow(const AnchoredDataset& ds, int depth) {
    ++stats.nodes;
    ClassCounts counts = ds.class_counts();
    const std::size_t label = counts.majority();
    if (entropy(counts) <= cfg.max_leaf_entropy) return Node::leaf(label, std::move(counts), StopReason::Pure);
    if (counts.total() < 2 * cfg.min_samples_leaf) {
      return Node::leaf(label, std::move(counts), StopReason::TooSmall);
    }
    if (cfg.max_depth && depth >= *cfg.max_depth) {
      return Node::leaf(label, std::move(counts), StopReason::MaxDepth);
    }
    SearchStats search_stats;
    const auto start = std::chrono::steady_clock::now();
    auto best = search(ds, cfg, index, cache, &search_stats);
    stats.search_time += std::chrono::steady_clock::now() - start;
    stats.candidates += search_stats.candidates;
    if (!best) return Node::leaf(label, std::move(counts), StopReason::NoSplit);

    auto [yes, no] = split(ds, best->decision);
    if (static_cast<std::int64_t>(yes.size()) != best->n_yes || static_cast<std::int64_t>(no.size()) != best->n_no) {
      throw std::logic_error(fmt::format("split of '{}' disagrees with the search ({} / {} vs {} / {})",
                                         to_text(best->decision), yes.size(), no.size(), best->n_yes,
                                         best->n_no));
    }
    auto yes_node = grow(yes, depth + 1);
    auto no_node = grow(no, depth + 1);
    return Node::internal(std::move(best->decision), std::move(counts), best->gain, std::move(yes_node),
                          std::move(no_node));
  }
};

}  // namespace

SpatialDecisionTree learn(const PreparedDataset& prepared, const LearnerConfig& config, LearnStats* stats) {
  config.validate();
  const LearnerConfig cfg = config.normalized();
  const AnchoredDataset& ds = prepared.data;
  if (ds.empty()) throw InvalidArgument("cannot learn from an empty dataset");
  const RectangleIndex index(ds.bounds());
  LearnStats local;
  LearnStats& st = stats ? *stats : local;
  st.cache_used = prepared.cache != nullptr;
  Grower grower{cfg, index, prepared.cache.get(), st};
  auto root = grower.grow(ds, 0);
  return SpatialDecisionTree(std::move(root), ds.classes(), ds.n_attributes(), cfg.r0);
}

SpatialDecisionTree learn(const AnchoredDataset& ds, const LearnerConfig& cfg, LearnStats* stats) {
  return learn(preprocess(ds, cfg), cfg, stats);
}

}  // namespace sdt
