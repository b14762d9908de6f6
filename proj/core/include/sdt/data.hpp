#pragma once

// Scenes, windowed datasets, their binary formats, sampling and the tabular
// baseline transforms.
//
// SSC1 scene file:
//   "SSC1\n"
//   "attrs=<n> rows=<r> cols=<c> classes=<l>\n"
//   float32 LE tensor [attr][row][col]
//   int32 LE mask [row][col]       (0 = unlabeled, 1..l = class)
//   l class names, one per line
//
// SWD1 windowed dataset file:
//   "SWD1\n"
//   "n=<m> attrs=<n> d=<d> classes=<l>\n"
//   per instance: int32 LE label (0-based class index), float32 LE tensor [attr][row][col]
//   l class names, one per line

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/model.hpp"
#include "sdt/random.hpp"

namespace sdt {

struct Scene {
  std::size_t n_attributes = 0;
  int rows = 0;
  int cols = 0;
  std::vector<float> values;        // [attr][row][col]
  std::vector<std::int32_t> mask;   // [row][col]
  std::vector<std::string> class_names;

  float at(std::size_t attr, int row, int col) const noexcept {
    return values[(attr * static_cast<std::size_t>(rows) + static_cast<std::size_t>(row)) *
                      static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(col)];
  }
  std::int32_t label(int row, int col) const noexcept {
    return mask[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col)];
  }

  /// Throws DataError if shapes, labels or values are inconsistent.
  void validate() const;
};

struct WindowOrigin {
  std::string scene;
  int row = 0;  // 0-based centre pixel in the scene
  int col = 0;
};

struct WindowedDataset {
  std::size_t n_attributes = 0;
  int d = 0;
  std::vector<std::string> classes;
  std::vector<InstancePtr> instances;
  std::vector<WindowOrigin> origins;  // parallel to instances; may be empty
  std::uint64_t seed = 0;             // seed of the last sampling step, 0 if none

  std::size_t size() const noexcept { return instances.size(); }
  std::vector<std::size_t> labels() const;
  std::vector<std::size_t> class_histogram() const;

  /// Anchors every instance to {r0} for learning.
  AnchoredDataset anchored(const R0Policy& policy = CenterPixel{}) const;
};

void write_scene(std::ostream& out, const Scene& scene);
Scene read_scene(std::istream& in);
void save_scene(const std::string& path, const Scene& scene);
Scene load_scene(const std::string& path);

void write_dataset(std::ostream& out, const WindowedDataset& ds);
WindowedDataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const WindowedDataset& ds);
WindowedDataset load_dataset(const std::string& path);

/// Builds a scene from CSV lines "row,col,label,a1,...,an" with 0-based
/// coordinates; every pixel must appear exactly once. A first line that does
/// not start with a digit is treated as a header. Class names default to
/// "class_<k>" for k = 1..max label.
Scene scene_from_csv(std::string_view text, std::vector<std::string> class_names = {});

/// One d x d instance per labeled pixel whose whole window lies inside the
/// scene, in row-major order of the centres. d must be odd.
WindowedDataset extract_windows(const Scene& scene, int d, std::string scene_id = "");

/// Drops classes with fewer than P instances and samples exactly P of each
/// remaining class without replacement. Labels are renumbered in the order
/// of the surviving classes; instances keep their original relative order.
WindowedDataset balance_sample(const WindowedDataset& ds, std::size_t P, Rng& rng);

/// Stratified split: round(n_c * fraction) instances of each class (clamped
/// to [1, n_c - 1]) go to training. Original order is kept in both parts.
std::pair<WindowedDataset, WindowedDataset> train_test_split(const WindowedDataset& ds, double train_fraction,
                                                             Rng& rng);

enum class BaselineMode { SinglePixel, Flattened, Averaged };

std::string_view baseline_name(BaselineMode mode) noexcept;  // "single_pixel", ...

/// 1x1 instances: the centre pixel, every pixel of the window in row-major
/// order (pixel-major, attribute-minor), or the per-attribute window mean.
/// The centre of an even window is pixel ((d+1)/2, (d+1)/2), 1-based.
WindowedDataset baseline_transform(const WindowedDataset& ds, BaselineMode mode);

}  // namespace sdt
