#pragma once

// Slow, independent reference implementations and synthetic task
// generators. Used by the test suites to cross-check the fast paths.

#include <cstdint>
#include <optional>
#include <vector>

#include "sdt/data.hpp"
#include "sdt/geometry.hpp"
#include "sdt/learner.hpp"
#include "sdt/logic.hpp"
#include "sdt/tree.hpp"

namespace sdt::oracle {

/// RCC8 relation of `r` to `s` (2-D), computed from pixel sets: two
/// regions are connected when they share a pixel or two of their pixels
/// are 8-neighbours; a part is tangential when one of its pixels has an
/// 8-neighbour outside the whole.
Rcc8 rcc8_classify(const HyperRectangle& r, const HyperRectangle& s);

/// Rectangles reachable from `refs` through `op` (or `refs` itself when op
/// is null), by filtering every rectangle with tuple_holds.
std::vector<HyperRectangle> accessible(const std::vector<HyperRectangle>& refs, const OperatorSpec* op,
                                       const GridBounds& bounds);

/// Exhaustive search over candidate_decisions with direct pixel counting.
/// Ties keep the earliest candidate.
std::optional<SplitScore> brute_force_best_decision(const AnchoredDataset& ds, const LearnerConfig& cfg);

/// Plain axis-aligned C4.5-style tree over 1x1 instances with the same
/// thresholds, gammas, comparators and stopping rules as the learner.
SpatialDecisionTree reference_c45(const AnchoredDataset& ds, const LearnerConfig& cfg);

// ---------------------------------------------------------------------------
// Synthetic containment task
//
// Channel 0 holds a block R of value 200 over a background of 0..100;
// channel 1 holds a 1 x L bar G of value 0 over a background of 100..200
// (L = size/2 from size 8 on, else 1).
// An instance is positive iff the centre pixel and G both lie strictly
// inside R.

inline constexpr double kRedValue = 200.0;
inline constexpr double kBarValue = 0.0;

struct Plant {
  HyperRectangle red;
  HyperRectangle bar;
};

struct ContainmentTask {
  WindowedDataset data;
  std::vector<Plant> plants;  // parallel to data.instances
};

/// n >= 2 instances of size x size (size >= 4). Even indices are positive;
/// odd indices alternate between the two negative shapes.
ContainmentTask generate_containment_task(std::size_t n, int size, std::uint64_t seed);

/// Whether some rectangle with every channel-0 pixel >= t0 strictly
/// contains both the centre pixel and a rectangle with every channel-1
/// pixel <= t1. Brute force over all rectangle pairs.
bool has_containment(const SpatialInstance& inst, double t0 = kRedValue, double t1 = kBarValue);

/// Checks that the planted geometry matches the label.
bool verify_plant(const SpatialInstance& inst, const Plant& plant);

/// Small labelled scene with spatially coherent class regions, for tools
/// and end-to-end tests.
Scene toy_scene(int rows, int cols, std::size_t n_attributes, std::size_t n_classes, std::uint64_t seed);

}  // namespace sdt::oracle
