// sdt: command-line front end.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 run failure.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sdt/data.hpp"
#include "sdt/experiment.hpp"
#include "sdt/learner.hpp"
#include "sdt/metrics.hpp"
#include "sdt/oracle.hpp"
#include "sdt/tree.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kDataError = 2;
constexpr int kRunFailure = 3;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw sdt::DataError(sdt::DataError::Kind::Io, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw sdt::DataError(sdt::DataError::Kind::Io, "cannot write '" + path + "'");
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct LearnerOptions {
  std::string fragment = "HS2_RCC8";
  std::string gammas = "0.6,0.7,0.8,0.9,1";
  std::string comparators = "<=,>=";
  std::string thresholds = "quantiles(20)";
  std::int64_t min_samples_leaf = 4;
  double min_info_gain = 0.01;
  double max_leaf_entropy = 0.3;
  int max_depth = -1;
  std::string r0 = "center";
  std::size_t workers = 1;

  void add_to(CLI::App& app) {
    app.add_option("--fragment", fragment, "HS2_FULL, HS2_RCC8, HS2_RCC5 or PROPOSITIONAL")->capture_default_str();
    app.add_option("--gammas", gammas, "comma-separated ratios in (0, 1]")->capture_default_str();
    app.add_option("--comparators", comparators, "comma-separated: <,<=,=,!=,>=,>")->capture_default_str();
    app.add_option("--thresholds", thresholds, "all-midpoints or quantiles(<q>)")->capture_default_str();
    app.add_option("--min-samples-leaf", min_samples_leaf)->capture_default_str();
    app.add_option("--min-info-gain", min_info_gain)->capture_default_str();
    app.add_option("--max-leaf-entropy", max_leaf_entropy)->capture_default_str();
    app.add_option("--max-depth", max_depth, "negative for unlimited")->capture_default_str();
    app.add_option("--r0", r0, "center, corner or [(x1,y1),(x2,y2)]")->capture_default_str();
    app.add_option("--workers", workers, "threads for the split search")->capture_default_str();
  }

  sdt::LearnerConfig build() const {
    const auto text = fmt::format(
        "gammas = {}\ncomparators = {}\nthresholds = {}\nmin_samples_leaf = {}\nmin_info_gain = {}\n"
        "max_leaf_entropy = {}\nmax_depth = {}\nr0 = {}\nlearner_workers = {}\n",
        gammas, comparators, thresholds, min_samples_leaf, min_info_gain, max_leaf_entropy,
        max_depth < 0 ? std::string("none") : std::to_string(max_depth), r0, workers);
    sdt::LearnerConfig cfg = sdt::ExperimentConfig::parse(text).learner;
    const auto frag = sdt::parse_fragment(fragment);
    if (!frag) throw sdt::ConfigError("unknown fragment '" + fragment + "'");
    cfg.fragment = *frag;
    return cfg;
  }
};

int cmd_convert(const std::string& input, const std::string& output, const std::string& classes) {
  sdt::Scene scene;
  if (input.ends_with(".csv")) {
    scene = sdt::scene_from_csv(read_text(input), split_names(classes));
  } else {
    scene = sdt::load_scene(input);
    if (!classes.empty()) {
      scene.class_names = split_names(classes);
      scene.validate();
    }
  }
  sdt::save_scene(output, scene);
  std::cout << fmt::format("{}: {} attributes, {}x{} pixels, {} classes\n", output, scene.n_attributes, scene.rows,
                           scene.cols, scene.class_names.size());
  return kOk;
}

int cmd_window(const std::string& input, int d, std::size_t P, std::uint64_t seed, const std::string& output) {
  const sdt::Scene scene = sdt::load_scene(input);
  sdt::WindowedDataset ds = sdt::extract_windows(scene, d, std::filesystem::path(input).stem().string());
  if (P > 0) {
    sdt::Rng rng(sdt::derive_seeds(seed).sampling);
    ds = sdt::balance_sample(ds, P, rng);
    ds.seed = seed;
  }
  sdt::save_dataset(output, ds);
  std::cout << fmt::format("{}: {} instances of {}x{}x{}, {} classes\n", output, ds.size(), ds.n_attributes, d, d,
                           ds.classes.size());
  return kOk;
}

int cmd_synth(std::size_t n, int size, std::uint64_t seed, const std::string& output, const std::string& scene_out,
              int rows, int cols) {
  if (!scene_out.empty()) {
    sdt::save_scene(scene_out, sdt::oracle::toy_scene(rows, cols, 3, 4, seed));
    std::cout << fmt::format("{}: toy scene {}x{}\n", scene_out, rows, cols);
  }
  if (!output.empty()) {
    const auto task = sdt::oracle::generate_containment_task(n, size, seed);
    sdt::save_dataset(output, task.data);
    std::cout << fmt::format("{}: {} containment instances of {}x{}\n", output, n, size, size);
  }
  return kOk;
}

int cmd_train(const std::string& input, const LearnerOptions& opts, const std::string& baseline,
              const std::string& output) {
  const sdt::LearnerConfig cfg = opts.build();
  sdt::WindowedDataset ds = sdt::load_dataset(input);
  if (!baseline.empty()) {
    const sdt::Approach a = sdt::parse_approach(baseline);
    if (sdt::is_spatial(a)) throw sdt::ConfigError("--baseline expects single_pixel, flattened or averaged");
    ds = sdt::baseline_transform(ds, a == sdt::Approach::Flattened  ? sdt::BaselineMode::Flattened
                                     : a == sdt::Approach::Averaged ? sdt::BaselineMode::Averaged
                                                                    : sdt::BaselineMode::SinglePixel);
  }
  sdt::LearnStats stats;
  const auto tree = sdt::learn(ds.anchored(cfg.r0), cfg, &stats);
  write_text(output, sdt::write_tree(tree));
  std::cerr << fmt::format("{} nodes, {} leaves, depth {}, {} candidates\n", tree.node_count(), tree.leaf_count(),
                           tree.depth(), stats.candidates);
  return kOk;
}

int cmd_evaluate(const std::string& tree_path, const std::string& input, const std::string& baseline) {
  const auto tree = sdt::load_tree(tree_path);
  sdt::WindowedDataset ds = sdt::load_dataset(input);
  if (!baseline.empty()) {
    const sdt::Approach a = sdt::parse_approach(baseline);
    ds = sdt::baseline_transform(ds, a == sdt::Approach::Flattened  ? sdt::BaselineMode::Flattened
                                     : a == sdt::Approach::Averaged ? sdt::BaselineMode::Averaged
                                                                    : sdt::BaselineMode::SinglePixel);
  }
  if (ds.n_attributes != tree.n_attributes()) {
    throw sdt::DataError(sdt::DataError::Kind::SizeMismatch,
                         fmt::format("tree expects {} attributes, dataset has {}", tree.n_attributes(), ds.n_attributes));
  }
  sdt::ConfusionMatrix m(tree.classes().size());
  for (const auto& inst : ds.instances) {
    if (inst->label() >= m.n_classes()) throw sdt::DataError(sdt::DataError::Kind::InvalidValue, "label outside tree classes");
    m.add(inst->label(), sdt::classify(tree, *inst));
  }
  const auto macro = sdt::macro_metrics(m);
  std::cout << fmt::format("instances {}\naccuracy {}\nkappa {}\nsens_macro {}\nspec_macro {}\nprec_macro {}\n",
                           m.total(), sdt::format_percent(sdt::accuracy(m)), sdt::format_percent(sdt::kappa(m)),
                           sdt::format_percent(macro.sensitivity), sdt::format_percent(macro.specificity),
                           sdt::format_percent(macro.precision));
  return kOk;
}

int cmd_experiment(const std::string& config_path, const std::string& output, std::size_t workers) {
  sdt::ExperimentConfig cfg = sdt::ExperimentConfig::load(config_path);
  if (!output.empty()) cfg.output = output;
  if (workers > 0) cfg.workers = workers;
  if (cfg.scenes.empty()) throw sdt::ConfigError("config lists no scenes");
  const auto datasets = sdt::load_datasets(cfg);
  const auto runs = sdt::run_experiment(datasets, cfg);
  sdt::write_outputs(cfg.output, runs);
  std::size_t failed = 0;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++failed;
      std::cerr << fmt::format("run {} {} seed {} failed: {}\n", r.dataset, sdt::approach_name(r.approach), r.seed,
                               r.error);
    }
  }
  std::cout << fmt::format("{} runs, {} failed; results in {}\n", runs.size(), failed, cfg.output);
  for (const auto& ds : datasets) {
    for (auto a : cfg.approaches) {
      if (!sdt::is_spatial(a)) continue;
      const double ratio = sdt::search_time_ratio(runs, ds.name, a);
      if (ratio > 0) std::cout << fmt::format("{} {}: search time {:.1f}x single_pixel\n", ds.name, sdt::approach_name(a), ratio);
    }
  }
  return failed > 0 ? kRunFailure : kOk;
}

int cmd_export(const std::string& tree_path, const std::string& format, const std::string& output) {
  const auto fmt_kind = sdt::parse_render_format(format);
  write_text(output, sdt::render(sdt::load_tree(tree_path), fmt_kind));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial decision trees over hyperrectangle logics"};
  app.require_subcommand(1);

  std::string input, output, classes, config, format = "text", baseline, scene_out;
  int d = 3, size = 8, rows = 24, cols = 24;
  std::size_t P = 0, n = 200, workers = 0;
  std::uint64_t seed = 1;
  LearnerOptions lopts;

  auto* convert = app.add_subcommand("convert", "Validate a scene (SSC1 or CSV) and write it as SSC1");
  convert->add_option("input", input, "scene file (.ssc) or CSV row,col,label,attrs...")->required();
  convert->add_option("-o,--output", output, "output SSC1 file")->required();
  convert->add_option("--classes", classes, "comma-separated class names");

  auto* window = app.add_subcommand("window", "Extract d x d windows from a scene, optionally balanced");
  window->add_option("input", input, "SSC1 scene")->required();
  window->add_option("-d", d, "odd window size")->capture_default_str();
  window->add_option("-P", P, "instances per class; 0 keeps all")->capture_default_str();
  window->add_option("--seed", seed)->capture_default_str();
  window->add_option("-o,--output", output, "output SWD1 file")->required();

  auto* synth = app.add_subcommand("synth", "Generate the containment task and/or a toy scene");
  synth->add_option("-n", n)->capture_default_str();
  synth->add_option("--size", size)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("-o,--output", output, "SWD1 containment dataset");
  synth->add_option("--scene", scene_out, "SSC1 toy scene");
  synth->add_option("--rows", rows)->capture_default_str();
  synth->add_option("--cols", cols)->capture_default_str();

  auto* train = app.add_subcommand("train", "Learn a tree from an SWD1 dataset");
  train->add_option("input", input, "SWD1 dataset")->required();
  train->add_option("-o,--output", output, "tree file; '-' for stdout")->required();
  train->add_option("--baseline", baseline, "single_pixel, flattened or averaged transform first");
  lopts.add_to(*train);

  auto* evaluate = app.add_subcommand("evaluate", "Classify an SWD1 dataset and print metrics");
  evaluate->add_option("tree", config, "tree file")->required();
  evaluate->add_option("input", input, "SWD1 dataset")->required();
  evaluate->add_option("--baseline", baseline, "transform applied before classification");

  auto* experiment = app.add_subcommand("experiment", "Run a multi-seed experiment from a config file");
  experiment->add_option("config", config, "key = value config")->required();
  experiment->add_option("-o,--output", output, "output directory (overrides the config)");
  experiment->add_option("--workers", workers, "concurrent runs (overrides the config)");

  auto* export_tree = app.add_subcommand("export-tree", "Render a tree as text, dot or rules");
  export_tree->add_option("tree", input, "tree file")->required();
  export_tree->add_option("-f,--format", format, "text, dot or rules")->capture_default_str();
  export_tree->add_option("-o,--output", output, "output file; stdout by default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*convert) return cmd_convert(input, output, classes);
    if (*window) return cmd_window(input, d, P, seed, output);
    if (*synth) return cmd_synth(n, size, seed, output, scene_out, rows, cols);
    if (*train) return cmd_train(input, lopts, baseline, output);
    if (*evaluate) return cmd_evaluate(config, input, baseline);
    if (*experiment) return cmd_experiment(config, output, workers);
    if (*export_tree) return cmd_export(input, format, output);
  } catch (const sdt::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const sdt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kDataError;
  } catch (const sdt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sdt::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}
