#include "sdt/data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace sdt {

namespace {

using Kind = DataError::Kind;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void write_le(std::ostream& out, const T* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const T v = byteswap_if_needed(data[i]);
      out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
  }
}

template <class T>
void read_le(std::istream& in, T* data, std::size_t n, std::string_view what) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(T)) {
    throw DataError(Kind::SizeMismatch,
                    fmt::format("truncated {}: expected {} bytes, got {}", what, n * sizeof(T), in.gcount()));
  }
  for (std::size_t i = 0; i < n; ++i) data[i] = byteswap_if_needed(data[i]);
}

std::string read_line(std::istream& in, std::string_view what, Kind kind) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(kind, fmt::format("missing {}", what));
  return line;
}

void expect_magic(std::istream& in, std::string_view magic) {
  const std::string line = read_line(in, "magic", Kind::MalformedHeader);
  if (line != magic) throw DataError(Kind::MalformedHeader, fmt::format("bad magic '{}', expected '{}'", line, magic));
}

// Parses "k1=v1 k2=v2 ..." requiring exactly the given keys in order.
std::vector<std::int64_t> parse_header(const std::string& line, std::initializer_list<std::string_view> keys) {
  std::vector<std::int64_t> out;
  std::string_view rest = line;
  for (std::string_view key : keys) {
    if (!rest.starts_with(key) || rest.size() <= key.size() || rest[key.size()] != '=') {
      throw DataError(Kind::MalformedHeader, fmt::format("bad header '{}': expected '{}='", line, key));
    }
    rest.remove_prefix(key.size() + 1);
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc() || v < 0) {
      throw DataError(Kind::MalformedHeader, fmt::format("bad header '{}': '{}' is not a count", line, key));
    }
    rest.remove_prefix(static_cast<std::size_t>(p - rest.data()));
    out.push_back(v);
    if (!rest.empty()) {
      if (rest.front() != ' ') throw DataError(Kind::MalformedHeader, fmt::format("bad header '{}'", line));
      rest.remove_prefix(1);
    }
  }
  if (!rest.empty()) throw DataError(Kind::MalformedHeader, fmt::format("bad header '{}': trailing text", line));
  return out;
}

std::vector<std::string> read_class_names(std::istream& in, std::size_t l) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < l; ++c) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(Kind::SizeMismatch, fmt::format("missing class name {}", c + 1));
    names.push_back(line);
  }
  char extra = 0;
  if (in.get(extra)) throw DataError(Kind::SizeMismatch, "trailing bytes after class names");
  return names;
}

void write_class_names(std::ostream& out, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n.find('\n') != std::string::npos) throw InvalidArgument("class names must not contain newlines");
    out << n << '\n';
  }
}

void check_finite(const float* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) throw DataError(Kind::NonFinite, fmt::format("non-finite value at offset {}", i));
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(Kind::Io, "cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(Kind::Io, "cannot open '" + path + "'");
  return f;
}

}  // namespace

void Scene::validate() const {
  if (n_attributes == 0 || rows < 1 || cols < 1) throw DataError(Kind::MalformedHeader, "scene must be non-empty");
  const std::size_t plane = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (values.size() != n_attributes * plane) throw DataError(Kind::SizeMismatch, "scene tensor size mismatch");
  if (mask.size() != plane) throw DataError(Kind::SizeMismatch, "scene mask size mismatch");
  check_finite(values.data(), values.size());
  for (std::int32_t m : mask) {
    if (m < 0 || static_cast<std::size_t>(m) > class_names.size()) {
      throw DataError(Kind::InvalidValue, fmt::format("mask label {} outside 0..{}", m, class_names.size()));
    }
  }
}

void write_scene(std::ostream& out, const Scene& scene) {
  scene.validate();
  out << "SSC1\n"
      << fmt::format("attrs={} rows={} cols={} classes={}\n", scene.n_attributes, scene.rows, scene.cols,
                     scene.class_names.size());
  write_le(out, scene.values.data(), scene.values.size());
  write_le(out, scene.mask.data(), scene.mask.size());
  write_class_names(out, scene.class_names);
  if (!out) throw DataError(Kind::Io, "failed writing scene");
}

Scene read_scene(std::istream& in) {
  expect_magic(in, "SSC1");
  const auto h = parse_header(read_line(in, "header", Kind::MalformedHeader), {"attrs", "rows", "cols", "classes"});
  if (h[0] == 0 || h[1] == 0 || h[2] == 0) throw DataError(Kind::MalformedHeader, "scene dimensions must be positive");
  if (h[0] > (1 << 20) || h[1] > (1 << 16) || h[2] > (1 << 16)) {
    throw DataError(Kind::MalformedHeader, "scene dimensions are implausibly large");
  }
  Scene s;
  s.n_attributes = static_cast<std::size_t>(h[0]);
  s.rows = static_cast<int>(h[1]);
  s.cols = static_cast<int>(h[2]);
  const std::size_t plane = static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
  s.values.resize(s.n_attributes * plane);
  read_le(in, s.values.data(), s.values.size(), "scene tensor");
  s.mask.resize(plane);
  read_le(in, s.mask.data(), s.mask.size(), "scene mask");
  s.class_names = read_class_names(in, static_cast<std::size_t>(h[3]));
  s.validate();
  return s;
}

void save_scene(const std::string& path, const Scene& scene) {
  auto f = open_out(path);
  write_scene(f, scene);
}

Scene load_scene(const std::string& path) {
  auto f = open_in(path);
  try {
    return read_scene(f);
  } catch (const DataError& e) {
    throw DataError(e.kind(), path + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const WindowedDataset& ds) {
  out << "SWD1\n"
      << fmt::format("n={} attrs={} d={} classes={}\n", ds.size(), ds.n_attributes, ds.d, ds.classes.size());
  std::vector<float> buf;
  for (const InstancePtr& inst : ds.instances) {
    if (inst->n_attributes() != ds.n_attributes || inst->rows() != ds.d || inst->cols() != ds.d) {
      throw InvalidArgument("instance shape differs from the dataset schema");
    }
    const auto label = static_cast<std::int32_t>(inst->label());
    write_le(out, &label, 1);
    buf.resize(inst->values().size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      buf[i] = static_cast<float>(inst->values()[i]);
      if (static_cast<double>(buf[i]) != inst->values()[i]) {
        throw DataError(Kind::InvalidValue, "value is not representable as float32");
      }
    }
    write_le(out, buf.data(), buf.size());
  }
  write_class_names(out, ds.classes);
  if (!out) throw DataError(Kind::Io, "failed writing dataset");
}

WindowedDataset read_dataset(std::istream& in) {
  expect_magic(in, "SWD1");
  const auto h = parse_header(read_line(in, "header", Kind::MalformedHeader), {"n", "attrs", "d", "classes"});
  if (h[1] == 0 || h[2] == 0 || h[1] > (1 << 20) || h[2] > (1 << 12)) {
    throw DataError(Kind::MalformedHeader, "dataset dimensions out of range");
  }
  WindowedDataset ds;
  ds.n_attributes = static_cast<std::size_t>(h[1]);
  ds.d = static_cast<int>(h[2]);
  const std::size_t per = ds.n_attributes * static_cast<std::size_t>(ds.d) * static_cast<std::size_t>(ds.d);
  std::vector<float> buf(per);
  std::vector<std::int32_t> labels;
  std::vector<std::vector<double>> tensors;
  for (std::int64_t i = 0; i < h[0]; ++i) {
    std::int32_t label = 0;
    read_le(in, &label, 1, "instance label");
    read_le(in, buf.data(), per, "instance tensor");
    check_finite(buf.data(), per);
    if (label < 0 || label >= h[3]) {
      throw DataError(Kind::InvalidValue, fmt::format("instance {} has label {} outside 0..{}", i, label, h[3] - 1));
    }
    labels.push_back(label);
    tensors.emplace_back(buf.begin(), buf.end());
  }
  ds.classes = read_class_names(in, static_cast<std::size_t>(h[3]));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ds.instances.push_back(std::make_shared<const SpatialInstance>(ds.n_attributes, ds.d, ds.d, std::move(tensors[i]),
                                                                   static_cast<std::size_t>(labels[i])));
  }
  return ds;
}

void save_dataset(const std::string& path, const WindowedDataset& ds) {
  auto f = open_out(path);
  write_dataset(f, ds);
}

WindowedDataset load_dataset(const std::string& path) {
  auto f = open_in(path);
  try {
    return read_dataset(f);
  } catch (const DataError& e) {
    throw DataError(e.kind(), path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

Scene scene_from_csv(std::string_view text, std::vector<std::string> class_names) {
  struct Row {
    int row, col, label;
    std::vector<float> attrs;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t n_attr = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (rows.empty() && line_no == 1 && !std::isdigit(static_cast<unsigned char>(line.front()))) continue;
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (fields.size() < 4) throw DataError(Kind::MalformedHeader, fmt::format("line {}: expected row,col,label,attrs...", line_no));
    auto to_int = [&](std::string_view f) {
      int v = 0;
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size()) {
        throw DataError(Kind::InvalidValue, fmt::format("line {}: bad integer '{}'", line_no, f));
      }
      return v;
    };
    Row r{to_int(fields[0]), to_int(fields[1]), to_int(fields[2]), {}};
    if (r.row < 0 || r.col < 0 || r.label < 0) {
      throw DataError(Kind::InvalidValue, fmt::format("line {}: negative coordinate or label", line_no));
    }
    for (std::size_t i = 3; i < fields.size(); ++i) {
      double v = 0;
      const auto f = fields[i];
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size()) {
        throw DataError(Kind::InvalidValue, fmt::format("line {}: bad value '{}'", line_no, f));
      }
      if (!std::isfinite(v)) throw DataError(Kind::NonFinite, fmt::format("line {}: non-finite value", line_no));
      r.attrs.push_back(static_cast<float>(v));
    }
    if (n_attr == 0) n_attr = r.attrs.size();
    if (r.attrs.size() != n_attr) {
      throw DataError(Kind::SizeMismatch, fmt::format("line {}: expected {} attributes", line_no, n_attr));
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError(Kind::SizeMismatch, "CSV has no pixels");
  Scene s;
  s.n_attributes = n_attr;
  int max_label = 0;
  for (const Row& r : rows) {
    s.rows = std::max(s.rows, r.row + 1);
    s.cols = std::max(s.cols, r.col + 1);
    max_label = std::max(max_label, r.label);
  }
  const std::size_t plane = static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
  auto index = [&](const Row& r) {
    return static_cast<std::size_t>(r.row) * static_cast<std::size_t>(s.cols) + static_cast<std::size_t>(r.col);
  };
  std::vector<char> seen(plane, 0);
  for (const Row& r : rows) {
    if (seen[index(r)]) throw DataError(Kind::InvalidValue, fmt::format("pixel ({},{}) listed twice", r.row, r.col));
    seen[index(r)] = 1;
  }
  if (rows.size() != plane) {
    throw DataError(Kind::SizeMismatch, fmt::format("CSV covers {} pixels of a {}x{} grid", rows.size(), s.rows, s.cols));
  }
  s.values.assign(n_attr * plane, 0.0F);
  s.mask.assign(plane, 0);
  for (const Row& r : rows) {
    const std::size_t p = index(r);
    s.mask[p] = r.label;
    for (std::size_t a = 0; a < n_attr; ++a) s.values[a * plane + p] = r.attrs[a];
  }
  if (class_names.empty()) {
    for (int c = 1; c <= max_label; ++c) class_names.push_back(fmt::format("class_{}", c));
  }
  s.class_names = std::move(class_names);
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> WindowedDataset::labels() const {
  std::vector<std::size_t> out;
  for (const auto& inst : instances) out.push_back(inst->label());
  return out;
}

std::vector<std::size_t> WindowedDataset::class_histogram() const {
  std::vector<std::size_t> out(classes.size(), 0);
  for (const auto& inst : instances) ++out[inst->label()];
  return out;
}

AnchoredDataset WindowedDataset::anchored(const R0Policy& policy) const {
  return anchor(instances, n_attributes, classes, policy);
}

WindowedDataset extract_windows(const Scene& scene, int d, std::string scene_id) {
  if (d < 1 || d % 2 == 0) throw InvalidArgument(fmt::format("window size must be odd and positive, got {}", d));
  scene.validate();
  WindowedDataset ds;
  ds.n_attributes = scene.n_attributes;
  ds.d = d;
  ds.classes = scene.class_names;
  const int h = d / 2;
  for (int row = h; row + h < scene.rows; ++row) {
    for (int col = h; col + h < scene.cols; ++col) {
      const std::int32_t label = scene.label(row, col);
      if (label == 0) continue;
      std::vector<double> values;
      values.reserve(scene.n_attributes * static_cast<std::size_t>(d * d));
      for (std::size_t a = 0; a < scene.n_attributes; ++a) {
        for (int r = row - h; r <= row + h; ++r) {
          for (int c = col - h; c <= col + h; ++c) values.push_back(scene.at(a, r, c));
        }
      }
      ds.instances.push_back(std::make_shared<const SpatialInstance>(scene.n_attributes, d, d, std::move(values),
                                                                     static_cast<std::size_t>(label - 1)));
      ds.origins.push_back({scene_id, row, col});
    }
  }
  return ds;
}

namespace {

WindowedDataset subset(const WindowedDataset& ds, const std::vector<std::size_t>& idx,
                       const std::vector<std::size_t>& relabel, std::vector<std::string> classes) {
  WindowedDataset out;
  out.n_attributes = ds.n_attributes;
  out.d = ds.d;
  out.classes = std::move(classes);
  out.seed = ds.seed;
  for (std::size_t i : idx) {
    const SpatialInstance& src = *ds.instances[i];
    const std::size_t label = relabel.empty() ? src.label() : relabel[src.label()];
    if (label == src.label()) {
      out.instances.push_back(ds.instances[i]);
    } else {
      out.instances.push_back(
          std::make_shared<const SpatialInstance>(src.n_attributes(), src.rows(), src.cols(), src.values(), label));
    }
    if (!ds.origins.empty()) out.origins.push_back(ds.origins[i]);
  }
  return out;
}

// Partial Fisher-Yates: the first k entries become a uniform sample.
void sample_prefix(std::vector<std::size_t>& v, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace

WindowedDataset balance_sample(const WindowedDataset& ds, std::size_t P, Rng& rng) {
  if (P < 1) throw InvalidArgument("P must be >= 1");
  std::vector<std::vector<std::size_t>> by_class(ds.classes.size());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.instances[i]->label()].push_back(i);
  std::vector<std::size_t> relabel(ds.classes.size(), 0);
  std::vector<std::string> kept;
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < P) continue;
    relabel[c] = kept.size();
    kept.push_back(ds.classes[c]);
    sample_prefix(by_class[c], P, rng);
    chosen.insert(chosen.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(P));
  }
  if (kept.empty()) throw InvalidArgument(fmt::format("no class has at least P={} instances", P));
  std::sort(chosen.begin(), chosen.end());
  return subset(ds, chosen, relabel, std::move(kept));
}

std::pair<WindowedDataset, WindowedDataset> train_test_split(const WindowedDataset& ds, double train_fraction,
                                                             Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train fraction must lie in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(ds.classes.size());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.instances[i]->label()].push_back(i);
  std::vector<std::size_t> train, test;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw InvalidArgument(fmt::format("class '{}' has {} instance(s); a split needs at least 2", ds.classes[c], idx.size()));
    }
    const auto n = static_cast<double>(idx.size());
    auto k = static_cast<std::size_t>(std::llround(n * train_fraction));
    k = std::clamp<std::size_t>(k, 1, idx.size() - 1);
    sample_prefix(idx, k, rng);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset(ds, train, {}, ds.classes), subset(ds, test, {}, ds.classes)};
}

std::string_view baseline_name(BaselineMode mode) noexcept {
  switch (mode) {
    case BaselineMode::SinglePixel: return "single_pixel";
    case BaselineMode::Flattened: return "flattened";
    case BaselineMode::Averaged: return "averaged";
  }
  return "";
}

WindowedDataset baseline_transform(const WindowedDataset& ds, BaselineMode mode) {
  WindowedDataset out;
  out.d = 1;
  out.classes = ds.classes;
  out.origins = ds.origins;
  out.seed = ds.seed;
  const std::size_t n = ds.n_attributes;
  const int d = ds.d;
  const std::size_t pixels = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  out.n_attributes = mode == BaselineMode::Flattened ? n * pixels : n;
  const int centre = (d + 1) / 2 - 1;
  for (const InstancePtr& inst : ds.instances) {
    std::vector<double> v;
    v.reserve(out.n_attributes);
    switch (mode) {
      case BaselineMode::SinglePixel:
        for (std::size_t a = 0; a < n; ++a) v.push_back(inst->at(a, centre, centre));
        break;
      case BaselineMode::Flattened:
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) {
            for (std::size_t a = 0; a < n; ++a) v.push_back(inst->at(a, r, c));
          }
        }
        break;
      case BaselineMode::Averaged:
        for (std::size_t a = 0; a < n; ++a) {
          double sum = 0.0;
          for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) sum += inst->at(a, r, c);
          }
          v.push_back(sum / static_cast<double>(pixels));
        }
        break;
    }
    out.instances.push_back(std::make_shared<const SpatialInstance>(out.n_attributes, 1, 1, std::move(v), inst->label()));
  }
  return out;
}

}  // namespace sdt
