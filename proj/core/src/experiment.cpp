#include "sdt/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sdt {

namespace {

constexpr std::array<std::pair<Approach, std::string_view>, 6> kApproachNames = {{
    {Approach::SinglePixel, "single_pixel"},
    {Approach::Flattened, "flattened"},
    {Approach::Averaged, "averaged"},
    {Approach::HS2Rcc8, "hs2_rcc8"},
    {Approach::HS2Rcc5, "hs2_rcc5"},
    {Approach::HS2Full, "hs2_full"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, v));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::vector<std::uint64_t> parse_seeds(std::string_view v) {
  std::vector<std::uint64_t> out;
  if (const auto dots = v.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_number<std::uint64_t>("seeds", trim(v.substr(0, dots)));
    const auto hi = parse_number<std::uint64_t>("seeds", trim(v.substr(dots + 2)));
    if (hi < lo || hi - lo > 100000) throw ConfigError(fmt::format("seeds: bad range '{}'", v));
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (auto item : split_list(v)) out.push_back(parse_number<std::uint64_t>("seeds", item));
  return out;
}

Fragment fragment_of(Approach a) {
  switch (a) {
    case Approach::HS2Rcc8: return Fragment::RCC8;
    case Approach::HS2Rcc5: return Fragment::RCC5;
    case Approach::HS2Full: return Fragment::HS2Full;
    default: return Fragment::Propositional;
  }
}

BaselineMode baseline_of(Approach a) {
  switch (a) {
    case Approach::Flattened: return BaselineMode::Flattened;
    case Approach::Averaged: return BaselineMode::Averaged;
    default: return BaselineMode::SinglePixel;
  }
}

double ms(std::chrono::nanoseconds t) { return std::chrono::duration<double, std::milli>(t).count(); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string_view approach_name(Approach a) noexcept {
  for (const auto& [value, name] : kApproachNames) {
    if (value == a) return name;
  }
  return "";
}

Approach parse_approach(std::string_view name) {
  for (const auto& [value, n] : kApproachNames) {
    if (n == name) return value;
  }
  throw ConfigError(fmt::format("unknown approach '{}'", name));
}

bool is_spatial(Approach a) noexcept { return fragment_of(a) != Fragment::Propositional; }

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view v = trim(line.substr(eq + 1));
    try {
      if (key == "scenes") {
        cfg.scenes.clear();
        for (auto s : split_list(v)) cfg.scenes.emplace_back(s);
      } else if (key == "d") {
        cfg.d = parse_number<int>(key, v);
      } else if (key == "P") {
        cfg.P = parse_number<std::size_t>(key, v);
      } else if (key == "approaches") {
        cfg.approaches.clear();
        for (auto s : split_list(v)) cfg.approaches.push_back(parse_approach(s));
      } else if (key == "seeds") {
        cfg.seeds = parse_seeds(v);
      } else if (key == "train_fraction") {
        cfg.train_fraction = parse_number<double>(key, v);
      } else if (key == "gammas") {
        cfg.learner.gammas.clear();
        for (auto s : split_list(v)) {
          auto g = Gamma::parse(s);
          if (!g) throw ConfigError(fmt::format("gammas: '{}' is not in (0, 1]", s));
          cfg.learner.gammas.push_back(*g);
        }
      } else if (key == "comparators") {
        cfg.learner.comparators.clear();
        for (auto s : split_list(v)) {
          auto c = parse_comparator(s);
          if (!c) throw ConfigError(fmt::format("comparators: unknown comparator '{}'", s));
          cfg.learner.comparators.push_back(*c);
        }
      } else if (key == "thresholds") {
        cfg.learner.threshold_policy = ThresholdPolicy::parse(v);
      } else if (key == "min_samples_leaf") {
        cfg.learner.min_samples_leaf = parse_number<std::int64_t>(key, v);
      } else if (key == "min_info_gain") {
        cfg.learner.min_info_gain = parse_number<double>(key, v);
      } else if (key == "max_leaf_entropy") {
        cfg.learner.max_leaf_entropy = parse_number<double>(key, v);
      } else if (key == "max_depth") {
        if (v == "none") {
          cfg.learner.max_depth.reset();
        } else {
          cfg.learner.max_depth = parse_number<int>(key, v);
        }
      } else if (key == "r0") {
        cfg.learner.r0 = parse_r0_policy(v);
      } else if (key == "workers") {
        cfg.workers = parse_number<std::size_t>(key, v);
      } else if (key == "learner_workers") {
        cfg.learner.workers = parse_number<std::size_t>(key, v);
      } else if (key == "use_cache") {
        cfg.learner.use_cache = parse_bool(key, v);
      } else if (key == "output") {
        cfg.output = std::string(v);
      } else {
        throw ConfigError(fmt::format("unknown key '{}'", key));
      }
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    } catch (const Error& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()));
    }
  }
  if (cfg.d < 1 || cfg.d % 2 == 0) throw ConfigError(fmt::format("d must be odd and positive, got {}", cfg.d));
  if (cfg.P < 2) throw ConfigError("P must be >= 2");
  if (cfg.approaches.empty()) throw ConfigError("no approaches configured");
  if (cfg.seeds.empty()) throw ConfigError("no seeds configured");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  try {
    cfg.learner.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::to_text() const {
  std::vector<std::string> names, gammas, comps;
  for (Approach a : approaches) names.emplace_back(approach_name(a));
  for (const Gamma& g : learner.gammas) gammas.push_back(g.to_string());
  for (Comparator c : learner.comparators) comps.emplace_back(ascii_symbol(c));
  std::vector<std::string> seed_text;
  for (auto s : seeds) seed_text.push_back(std::to_string(s));
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  line("scenes", fmt::format("{}", fmt::join(scenes, ",")));
  line("d", std::to_string(d));
  line("P", std::to_string(P));
  line("approaches", fmt::format("{}", fmt::join(names, ",")));
  line("seeds", fmt::format("{}", fmt::join(seed_text, ",")));
  line("train_fraction", fmt::format("{}", train_fraction));
  line("gammas", fmt::format("{}", fmt::join(gammas, ",")));
  line("comparators", fmt::format("{}", fmt::join(comps, ",")));
  line("thresholds", learner.threshold_policy.name());
  line("min_samples_leaf", std::to_string(learner.min_samples_leaf));
  line("min_info_gain", fmt::format("{}", learner.min_info_gain));
  line("max_leaf_entropy", fmt::format("{}", learner.max_leaf_entropy));
  line("max_depth", learner.max_depth ? std::to_string(*learner.max_depth) : "none");
  line("r0", r0_policy_name(learner.r0));
  line("workers", std::to_string(workers));
  line("learner_workers", std::to_string(learner.workers));
  line("use_cache", learner.use_cache ? "true" : "false");
  line("output", output);
  return out;
}

// ---------------------------------------------------------------------------

RunResult run_once(const NamedDataset& ds, Approach approach, std::uint64_t seed, const ExperimentConfig& cfg) {
  RunResult res;
  res.dataset = ds.name;
  res.approach = approach;
  res.seed = seed;
  try {
    const SeedStreams streams = derive_seeds(seed);
    Rng sampling(streams.sampling);
    WindowedDataset balanced = balance_sample(ds.data, cfg.P, sampling);
    balanced.seed = seed;
    Rng splitting(streams.splitting);
    auto [train, test] = train_test_split(balanced, cfg.train_fraction, splitting);
    if (!is_spatial(approach)) {
      train = baseline_transform(train, baseline_of(approach));
      test = baseline_transform(test, baseline_of(approach));
    }
    LearnerConfig lc = cfg.learner;
    lc.fragment = fragment_of(approach);
    lc.seed = seed;
    res.n_train = train.size();
    res.n_test = test.size();

    const auto start = std::chrono::steady_clock::now();
    LearnStats stats;
    const SpatialDecisionTree tree = learn(train.anchored(lc.r0), lc, &stats);
    res.train_time = std::chrono::steady_clock::now() - start;
    res.search_time = stats.search_time;
    res.nodes = stats.nodes;
    res.candidates = stats.candidates;

    res.confusion = ConfusionMatrix(test.classes.size());
    for (const InstancePtr& inst : test.instances) res.confusion.add(inst->label(), classify(tree, *inst));
    res.tree_text = write_tree(tree);
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

std::vector<RunResult> run_experiment(const std::vector<NamedDataset>& datasets, const ExperimentConfig& cfg) {
  struct Job {
    std::size_t dataset;
    std::uint64_t seed;
    Approach approach;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (auto seed : cfg.seeds) {
      for (Approach a : cfg.approaches) jobs.push_back({d, seed, a});
    }
  }
  std::vector<RunResult> out(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t j) {
    out[j] = run_once(datasets[jobs[j].dataset], jobs[j].approach, jobs[j].seed, cfg);
  });
  return out;
}

std::vector<NamedDataset> load_datasets(const ExperimentConfig& cfg) {
  std::vector<NamedDataset> out;
  for (const std::string& path : cfg.scenes) {
    const std::string name = std::filesystem::path(path).stem().string();
    const Scene scene = load_scene(path);
    out.push_back({name, extract_windows(scene, cfg.d, name)});
  }
  return out;
}

std::string results_csv(const std::vector<RunResult>& runs) {
  std::string out = "dataset,approach,seed,kappa,accuracy,sens_macro,spec_macro,prec_macro\n";
  for (const RunResult& r : runs) {
    out += fmt::format("{},{},{}", csv_field(r.dataset), approach_name(r.approach), r.seed);
    if (r.ok && r.confusion.total() > 0) {
      const ClassMetrics macro = macro_metrics(r.confusion);
      out += fmt::format(",{},{},{},{},{}\n", format_percent(kappa(r.confusion)), format_percent(accuracy(r.confusion)),
                         format_percent(macro.sensitivity), format_percent(macro.specificity),
                         format_percent(macro.precision));
    } else {
      out += ",,,,,\n";
    }
  }
  return out;
}

std::string per_class_csv(const std::vector<RunResult>& runs) {
  std::string out = "dataset,approach,seed,class,sensitivity,specificity,precision\n";
  for (const RunResult& r : runs) {
    if (!r.ok) continue;
    // Class names after balancing live in the tree header.
    const SpatialDecisionTree tree = read_tree(r.tree_text);
    for (std::size_t c = 0; c < r.confusion.n_classes(); ++c) {
      const ClassMetrics m = per_class_metrics(r.confusion, c);
      out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.dataset), approach_name(r.approach), r.seed,
                         csv_field(tree.classes()[c]), format_percent(m.sensitivity),
                         format_percent(m.specificity), format_percent(m.precision));
    }
  }
  return out;
}

std::string telemetry_csv(const std::vector<RunResult>& runs) {
  std::string out = "dataset,approach,seed,status,n_train,n_test,nodes,candidates,train_ms,search_ms,error\n";
  for (const RunResult& r : runs) {
    out += fmt::format("{},{},{},{},{},{},{},{},{:.3f},{:.3f},{}\n", csv_field(r.dataset), approach_name(r.approach),
                       r.seed, r.ok ? "ok" : "failed", r.n_train, r.n_test, r.nodes, r.candidates, ms(r.train_time),
                       ms(r.search_time), csv_field(r.error));
  }
  return out;
}

double search_time_ratio(const std::vector<RunResult>& runs, std::string_view dataset, Approach spatial,
                         Approach baseline) {
  double num = 0.0, den = 0.0;
  std::size_t n_num = 0, n_den = 0;
  for (const RunResult& r : runs) {
    if (!r.ok || r.dataset != dataset) continue;
    if (r.approach == spatial) {
      num += ms(r.search_time);
      ++n_num;
    } else if (r.approach == baseline) {
      den += ms(r.search_time);
      ++n_den;
    }
  }
  if (n_num == 0 || n_den == 0 || den <= 0.0) return 0.0;
  return (num / static_cast<double>(n_num)) / (den / static_cast<double>(n_den));
}

void write_outputs(const std::string& dir, const std::vector<RunResult>& runs) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "trees", ec);
  if (ec) throw DataError(DataError::Kind::Io, fmt::format("cannot create '{}': {}", dir, ec.message()));
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw DataError(DataError::Kind::Io, "cannot write '" + p.string() + "'");
  };
  write(fs::path(dir) / "results.csv", results_csv(runs));
  write(fs::path(dir) / "per_class.csv", per_class_csv(runs));
  write(fs::path(dir) / "telemetry.csv", telemetry_csv(runs));
  for (const RunResult& r : runs) {
    if (!r.ok) continue;
    write(fs::path(dir) / "trees" / fmt::format("{}_{}_{}.sdt", r.dataset, approach_name(r.approach), r.seed),
          r.tree_text);
  }
}

}  // namespace sdt
