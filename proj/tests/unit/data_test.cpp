#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>

#include "sdt/data.hpp"
#include "sdt/error.hpp"
#include "sdt/oracle.hpp"
#include "test_support.hpp"

namespace sdt {
namespace {

Scene tiny_scene() {
  Scene s;
  s.n_attributes = 1;
  s.rows = 2;
  s.cols = 2;
  s.values = {1.5f, -2.0f, 3.25f, 1e6f};
  s.mask = {0, 1, 2, 1};
  s.class_names = {"grass", "road"};
  return s;
}

// Scene where every pixel is labelled with class 1 and pixel (r, c) of
// attribute a holds 100a + 10r + c.
Scene coded_scene(int rows, int cols, std::size_t n_attr) {
  Scene s;
  s.n_attributes = n_attr;
  s.rows = rows;
  s.cols = cols;
  for (std::size_t a = 0; a < n_attr; ++a) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) s.values.push_back(static_cast<float>(100 * a + 10 * r + c));
    }
  }
  s.mask.assign(static_cast<std::size_t>(rows * cols), 1);
  s.class_names = {"only"};
  return s;
}

DataError::Kind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected DataError";
  return DataError::Kind::Io;
}

bool same_scene(const Scene& a, const Scene& b) {
  return a.n_attributes == b.n_attributes && a.rows == b.rows && a.cols == b.cols && a.mask == b.mask &&
         a.class_names == b.class_names && a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0;
}

TEST(SceneFormat, RoundTripBitExact) {
  const Scene s = tiny_scene();
  std::stringstream buf;
  write_scene(buf, s);
  const std::string bytes = buf.str();
  EXPECT_TRUE(bytes.starts_with("SSC1\nattrs=1 rows=2 cols=2 classes=2\n"));
  EXPECT_EQ(bytes.size(), 5 + 32 + 16 + 16 + 11U);
  std::stringstream in(bytes);
  EXPECT_TRUE(same_scene(read_scene(in), s));

  const auto path = std::filesystem::temp_directory_path() / "sdt_scene_roundtrip.ssc";
  save_scene(path.string(), s);
  EXPECT_TRUE(same_scene(load_scene(path.string()), s));
  std::filesystem::remove(path);
}

TEST(SceneFormat, Errors) {
  std::stringstream buf;
  write_scene(buf, tiny_scene());
  const std::string bytes = buf.str();
  auto read = [](std::string text) {
    return [text] {
      std::stringstream in(text);
      (void)read_scene(in);
    };
  };
  EXPECT_EQ(kind_of(read(bytes.substr(0, 50))), DataError::Kind::SizeMismatch);
  EXPECT_EQ(kind_of(read("SSC2\n" + bytes.substr(5))), DataError::Kind::MalformedHeader);
  EXPECT_EQ(kind_of(read("SSC1\nrows=2 attrs=1 cols=2 classes=2\n")), DataError::Kind::MalformedHeader);
  EXPECT_EQ(kind_of(read(bytes + "extra")), DataError::Kind::SizeMismatch);

  std::string nan_bytes = bytes;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan_bytes.data() + 37, &nan, sizeof nan);
  EXPECT_EQ(kind_of(read(nan_bytes)), DataError::Kind::NonFinite);

  std::string bad_label = bytes;
  const std::int32_t seven = 7;
  std::memcpy(bad_label.data() + 37 + 16, &seven, sizeof seven);
  EXPECT_EQ(kind_of(read(bad_label)), DataError::Kind::InvalidValue);

  EXPECT_EQ(kind_of([] { (void)load_scene("/nonexistent/x.ssc"); }), DataError::Kind::Io);
}

TEST(DatasetFormat, RoundTripBitExact) {
  auto ds = testing::random_windows(4, 7, 3, 2, 3, 1000);
  std::stringstream buf;
  write_dataset(buf, ds);
  EXPECT_TRUE(buf.str().starts_with("SWD1\nn=7 attrs=2 d=3 classes=3\n"));
  const auto back = read_dataset(buf);
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(back.classes, ds.classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.instances[i]->values(), ds.instances[i]->values());
    EXPECT_EQ(back.instances[i]->label(), ds.instances[i]->label());
  }
  std::stringstream again;
  write_dataset(again, back);
  EXPECT_EQ(again.str(), buf.str());

  std::stringstream truncated(buf.str().substr(0, buf.str().size() - 40));
  EXPECT_EQ(kind_of([&] { (void)read_dataset(truncated); }), DataError::Kind::SizeMismatch);

  ds.instances[0] = testing::make_instance(3, 3, {std::vector<double>(9, 0.1), std::vector<double>(9, 0.0)});
  std::stringstream lossy;
  EXPECT_EQ(kind_of([&] { write_dataset(lossy, ds); }), DataError::Kind::InvalidValue);
}

TEST(SceneCsv, Parse) {
  const Scene s = scene_from_csv("row,col,label,a1,a2\n0,0,1,1,2\n0,1,0,3,4\n1,1,2,7,8\n1,0,1,5,6\n");
  EXPECT_EQ(s.rows, 2);
  EXPECT_EQ(s.cols, 2);
  EXPECT_EQ(s.n_attributes, 2U);
  EXPECT_EQ(s.class_names, (std::vector<std::string>{"class_1", "class_2"}));
  EXPECT_EQ(s.at(1, 1, 0), 6.0f);
  EXPECT_EQ(s.label(1, 1), 2);
  EXPECT_EQ(scene_from_csv("0,0,1,4\n", {"x"}).class_names, (std::vector<std::string>{"x"}));
  EXPECT_EQ(kind_of([] { (void)scene_from_csv("0,0,1,1\n0,0,1,1\n"); }), DataError::Kind::InvalidValue);
  EXPECT_EQ(kind_of([] { (void)scene_from_csv("0,0,1,1\n1,1,1,1\n"); }), DataError::Kind::SizeMismatch);
  EXPECT_EQ(kind_of([] { (void)scene_from_csv("0,0,1,x\n"); }), DataError::Kind::InvalidValue);
  EXPECT_EQ(kind_of([] { (void)scene_from_csv("0,0,1,1\n1,0,1\n"); }), DataError::Kind::MalformedHeader);
}

TEST(Windows, Counts) {
  auto s = coded_scene(3, 3, 1);
  EXPECT_EQ(extract_windows(s, 1).size(), 9U);
  const auto one = extract_windows(s, 3, "toy");
  ASSERT_EQ(one.size(), 1U);
  EXPECT_EQ(one.origins[0].row, 1);
  EXPECT_EQ(one.origins[0].scene, "toy");
  s.mask[4] = 0;
  EXPECT_TRUE(extract_windows(s, 3).size() == 0);
  EXPECT_THROW(extract_windows(s, 2), InvalidArgument);
}

TEST(Windows, ContentAndOrder) {
  const auto s = coded_scene(4, 5, 2);
  const auto ds = extract_windows(s, 3);
  ASSERT_EQ(ds.size(), 6U);  // centres rows 1..2, cols 1..3
  EXPECT_EQ(ds.origins[1].row, 1);
  EXPECT_EQ(ds.origins[1].col, 2);
  EXPECT_EQ(ds.origins[3].row, 2);
  const auto& w = *ds.instances[4];  // centre (2, 2)
  EXPECT_EQ(w.at(0, 0, 0), 11);
  EXPECT_EQ(w.at(0, 1, 1), 22);
  EXPECT_EQ(w.at(1, 2, 2), 133);
  EXPECT_EQ(w.label(), 0U);
}

TEST(Balance, FlatHistogram) {
  const auto scene = oracle::toy_scene(20, 24, 2, 4, 5);
  const auto ds = extract_windows(scene, 3);
  const auto hist = ds.class_histogram();
  const std::size_t P = 30;
  Rng rng(1);
  const auto bal = balance_sample(ds, P, rng);
  std::size_t survivors = 0;
  for (auto h : hist) survivors += h >= P ? 1 : 0;
  EXPECT_EQ(bal.classes.size(), survivors);
  EXPECT_EQ(bal.class_histogram(), std::vector<std::size_t>(survivors, P));
  for (std::size_t i = 1; i < bal.origins.size(); ++i) {
    const auto& a = bal.origins[i - 1];
    const auto& b = bal.origins[i];
    EXPECT_TRUE(a.row < b.row || (a.row == b.row && a.col < b.col));
  }
  Rng rng2(1);
  const auto again = balance_sample(ds, P, rng2);
  for (std::size_t i = 0; i < bal.size(); ++i) EXPECT_EQ(bal.origins[i].col, again.origins[i].col);

  Rng rng3(1);
  EXPECT_THROW(balance_sample(ds, 100000, rng3), InvalidArgument);
}

TEST(Balance, DropsSmallClassesAndRelabels) {
  WindowedDataset ds;
  ds.n_attributes = 1;
  ds.d = 1;
  ds.classes = {"a", "b", "c"};
  for (std::size_t label : {0, 2, 2, 0, 2, 1, 0}) {
    ds.instances.push_back(testing::make_instance(1, 1, {{static_cast<double>(label)}}, label));
  }
  Rng rng(9);
  const auto bal = balance_sample(ds, 2, rng);
  EXPECT_EQ(bal.classes, (std::vector<std::string>{"a", "c"}));
  for (const auto& inst : bal.instances) EXPECT_EQ(inst->label(), inst->values()[0] == 2 ? 1U : 0U);
}

TEST(Split, StratifiedCounts) {
  auto ds = testing::random_windows(1, 30, 3, 1, 3, 5, false);
  Rng rng(5);
  const auto [train, test] = train_test_split(ds, 0.8, rng);
  EXPECT_EQ(train.class_histogram(), (std::vector<std::size_t>{8, 8, 8}));
  EXPECT_EQ(test.class_histogram(), (std::vector<std::size_t>{2, 2, 2}));
  Rng rng2(5);
  const auto [train2, test2] = train_test_split(ds, 0.8, rng2);
  ASSERT_EQ(train2.size(), train.size());
  for (std::size_t i = 0; i < train.size(); ++i) EXPECT_EQ(train2.instances[i], train.instances[i]);
  Rng rng3(6);
  const auto train3 = train_test_split(ds, 0.8, rng3).first;
  bool differs = false;
  for (std::size_t i = 0; i < train.size(); ++i) differs |= train3.instances[i] != train.instances[i];
  EXPECT_TRUE(differs);

  Rng rng4(1);
  EXPECT_THROW(train_test_split(ds, 1.0, rng4), InvalidArgument);
  ds.instances.resize(4);  // labels 0,1,2,0: classes 1 and 2 have one instance
  EXPECT_THROW(train_test_split(ds, 0.8, rng4), InvalidArgument);
}

TEST(Baselines, Shapes) {
  const auto s = coded_scene(5, 5, 2);
  const auto ds = extract_windows(s, 3);
  const auto single = baseline_transform(ds, BaselineMode::SinglePixel);
  const auto flat = baseline_transform(ds, BaselineMode::Flattened);
  const auto avg = baseline_transform(ds, BaselineMode::Averaged);
  for (const auto* b : {&single, &flat, &avg}) {
    ASSERT_EQ(b->size(), ds.size());
    EXPECT_EQ(b->d, 1);
    EXPECT_EQ(b->labels(), ds.labels());
  }
  EXPECT_EQ(single.n_attributes, 2U);
  EXPECT_EQ(flat.n_attributes, 18U);
  EXPECT_EQ(avg.n_attributes, 2U);
  // Window centred at (1, 1).
  EXPECT_EQ(single.instances[0]->values(), (std::vector<double>{11, 111}));
  const auto& fv = flat.instances[0]->values();
  EXPECT_EQ(fv[0], 0);
  EXPECT_EQ(fv[1], 100);
  EXPECT_EQ(fv[2], 1);
  EXPECT_EQ(fv[17], 122);
  EXPECT_EQ(avg.instances[0]->values(), (std::vector<double>{11, 111}));
  EXPECT_EQ(baseline_name(BaselineMode::Flattened), "flattened");
}

TEST(Baselines, IdentityCases) {
  const auto s = coded_scene(4, 4, 3);
  const auto d1 = extract_windows(s, 1);
  const auto single = baseline_transform(d1, BaselineMode::SinglePixel);
  for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_EQ(single.instances[i]->values(), d1.instances[i]->values());

  WindowedDataset constant;
  constant.n_attributes = 2;
  constant.d = 3;
  constant.classes = {"a"};
  constant.instances.push_back(
      testing::make_instance(3, 3, {std::vector<double>(9, 4.0), std::vector<double>(9, -1.5)}));
  EXPECT_EQ(baseline_transform(constant, BaselineMode::Averaged).instances[0]->values(),
            baseline_transform(constant, BaselineMode::SinglePixel).instances[0]->values());
}

}  // namespace
}  // namespace sdt
