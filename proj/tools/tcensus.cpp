// Command-line front end: transform, select-blocks, train, detect, eval-sim,
// eval-roc, selftest, synth.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tcensus/oracle.hpp"
#include "tcensus/synthetic.hpp"
#include "tcensus/tcensus.hpp"

namespace fs = std::filesystem;
using namespace tcensus;

namespace {

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  RunConfig cfg = path.empty() ? RunConfig{} : config_from_json(read_json(path));
  if (seed) cfg.seed = *seed;
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

fs::path summary_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".summary.json");
  return p;
}

int cmd_transform(const std::string& image, const std::string& prefix) {
  const GrayImage img = load_image(image);
  const CodeImagePair pair = utct_images(img);
  const CtImage ct = ct_image(img);
  // Border pixels carry no label; write them as 0 so the files stay in 0..58 / 0..255.
  const auto clean = [](Raster<std::uint8_t> r) {
    for (int y = 0; y < r.height(); ++y) {
      for (int x = 0; x < r.width(); ++x) {
        if (x == 0 || y == 0 || x == r.width() - 1 || y == r.height() - 1) r.at(x, y) = 0;
      }
    }
    return r;
  };
  write_pgm(prefix + ".i1.pgm", clean(pair.i1));
  write_pgm(prefix + ".i2.pgm", clean(pair.i2));
  write_pgm(prefix + ".ct.pgm", clean(ct.codes));
  return 0;
}

int cmd_select_blocks(const std::string& manifest, const std::string& config, const std::string& out,
                      std::optional<std::uint64_t> seed) {
  const RunConfig cfg = load_config(config, seed);
  const DatasetManifest m = load_manifest(manifest);
  const LabeledWindows data = training_windows(m, cfg);
  const BlockSelection sel =
      select_local_optimal_blocks(data.windows, data.labels, cfg.grid_layout(), cfg.block_selection());
  write_json(out, layout_to_json(sel.layout));
  std::size_t counts[kAllVariants.size()] = {};
  for (const auto& b : sel.layout.blocks) ++counts[static_cast<std::size_t>(b.variant)];
  for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
    std::cerr << to_string(kAllVariants[v]) << ": " << counts[v] << "\n";
  }
  return 0;
}

int cmd_train(const std::string& manifest, const std::string& config, const std::string& layout_path,
              const std::string& out, std::optional<std::uint64_t> seed) {
  const RunConfig cfg = load_config(config, seed);
  const DatasetManifest m = load_manifest(manifest);
  const BlockLayout layout = layout_path.empty() ? cfg.grid_layout() : layout_from_json(read_json(layout_path));
  if (layout.window_width != cfg.window_width || layout.window_height != cfg.window_height) {
    throw Error(ErrorCode::InvalidConfig, "layout window size differs from the config");
  }
  const auto positives = prepare_positives(load_images(m.resolve(m.positives)), cfg, cfg.train_positives, cfg.seed);
  const auto negatives = load_images(m.resolve(m.negatives));
  const BootstrapResult res = bootstrap_train(positives, negatives, layout, cfg.bootstrap());
  write_json(out, model_to_json(res.model));
  std::cerr << "positives " << res.model.info.positives << ", negatives " << res.model.info.negatives
            << " (mined " << res.mined.size() << "), epochs " << res.model.info.epochs << "\n";
  return 0;
}

void draw_box(std::vector<std::uint8_t>& px, int w, int h, const Rect& r) {
  const auto put = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < w && y < h) px[static_cast<std::size_t>(y) * w + x] = 255;
  };
  for (int x = r.left; x < r.right(); ++x) {
    put(x, r.top);
    put(x, r.bottom() - 1);
  }
  for (int y = r.top; y < r.bottom(); ++y) {
    put(r.left, y);
    put(r.right() - 1, y);
  }
}

int cmd_detect(const std::string& model_path, const std::vector<std::string>& images, const std::string& config,
               const std::string& out, const std::string& annotate) {
  const LinearModel model = model_from_json(read_json(model_path));
  const RunConfig cfg = load_config(config, std::nullopt);
  std::vector<ImageDetections> results;
  for (const std::string& path : images) {
    const GrayImage img = load_image(path);
    results.push_back({path, detect(img, model, cfg.detect())});
    if (!annotate.empty()) {
      fs::create_directories(annotate);
      std::vector<std::uint8_t> px(img.data().begin(), img.data().end());
      for (const auto& d : results.back().detections) draw_box(px, img.width(), img.height(), d.box);
      write_pgm(fs::path(annotate) / (fs::path(path).stem().string() + ".det.pgm"),
                GrayImage(img.width(), img.height(), std::move(px)));
    }
  }
  if (!out.empty()) write_json(out, detections_to_json(results));
  std::cout << detections_to_lines(results);
  return 0;
}

int cmd_eval_sim(const std::string& manifest, const std::string& config, const std::string& descriptor,
                 const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config, seed);
  if (!descriptor.empty()) cfg.descriptor = parse_descriptor(descriptor);
  const EvalWindows w = similarity_windows(load_manifest(manifest), cfg);
  const Report r = similarity_report(w.positives, w.negatives, cfg.grid_layout(), {.normalize = cfg.normalize});
  write_file_atomic(out, r.csv);
  write_json(summary_path(out), r.summary);
  std::cout << r.summary.dump() << "\n";
  return 0;
}

int cmd_eval_roc(const std::string& model_path, const std::string& manifest, const std::string& config,
                 const std::string& out, std::optional<std::uint64_t> seed) {
  const LinearModel model = model_from_json(read_json(model_path));
  RunConfig cfg = load_config(config, seed);
  cfg.window_width = model.layout.window_width;
  cfg.window_height = model.layout.window_height;
  const EvalWindows w = roc_windows(load_manifest(manifest), cfg);
  const Report r = roc_report(model, w.positives, w.negatives);
  write_file_atomic(out, r.csv);
  write_json(summary_path(out), r.summary);
  std::cout << r.summary.dump() << "\n";
  return 0;
}

bool check(const char* name, bool ok) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  return ok;
}

int cmd_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  bool all = true;

  bool codes_ok = true;
  std::uniform_int_distribution<int> dim(3, 24);
  for (int trial = 0; trial < 300 && codes_ok; ++trial) {
    const int w = dim(rng);
    const int h = dim(rng);
    std::uniform_int_distribution<int> u(0, trial % 2 ? 255 : 3);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
    for (auto& p : px) p = static_cast<std::uint8_t>(u(rng));
    const GrayImage img(w, h, std::move(px));
    const auto pair = utct_images(img);
    const auto ct = ct_image(img);
    for (int y = 1; y < h - 1; ++y) {
      for (int x = 1; x < w - 1; ++x) {
        codes_ok = codes_ok && pair.i1.at(x, y) == oracle::utct(img, x, y, 1) &&
                   pair.i2.at(x, y) == oracle::utct(img, x, y, 2) && ct.codes.at(x, y) == oracle::census_code(img, x, y);
      }
    }
  }
  all &= check("census codes match the per-pixel oracle", codes_ok);

  int uniform = 0;
  for (int c = 0; c < 256; ++c) uniform += oracle::transitions(oracle::bits_of(c)) <= 2;
  all &= check("58 uniform codes", uniform == 58 && kUniformLut.uniform_count() == 58);

  bool score_ok = true;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const BlockLayout layout = make_grid_layout({16, 24, 8, 8, trial % 2 ? 8 : 4, trial % 2 ? 8 : 4});
    LinearModel model{layout, false, std::vector<double>(layout.dimension()), n(rng), {}};
    for (auto& w : model.weights) w = n(rng);
    std::uniform_int_distribution<int> u(0, 255);
    std::vector<std::uint8_t> px(30 * 32);
    for (auto& p : px) p = static_cast<std::uint8_t>(u(rng));
    const auto labels = compute_labels(GrayImage(30, 32, std::move(px)), Descriptor::TCentrist);
    const ScanScorer scorer(model, labels);
    for (int y = 0; y < scorer.origins_y(); ++y) {
      for (int x = 0; x < scorer.origins_x(); ++x) {
        const double naive = naive_window_score(model, labels, x, y);
        score_ok = score_ok && std::abs(scorer.score(x, y) - naive) <= 1e-6 * std::max(1.0, std::abs(naive));
      }
    }
  }
  all &= check("fast window scores match feature dot products", score_ok);
  return all ? 0 : 1;
}

int cmd_synth(const std::string& dir, std::uint64_t seed, std::size_t positives, std::size_t negatives,
              std::size_t test_positives, std::size_t test_negatives, int scenes) {
  const synthetic::Config cfg;
  const auto data = synthetic::make_dataset(cfg, {positives, negatives, test_positives, test_negatives}, seed);
  synthetic::write_dataset(dir, data, seed);
  if (scenes > 0) {
    std::mt19937_64 rng(seed + 1);
    nlohmann::json targets = nlohmann::json::array();
    fs::create_directories(fs::path(dir) / "scenes");
    for (int s = 0; s < scenes; ++s) {
      const auto scene = synthetic::make_scene(cfg, 200, 240, std::pow(PyramidConfig{}.factor, s % 7), rng);
      char name[32];
      std::snprintf(name, sizeof name, "scene%03d.pgm", s);
      write_pgm(fs::path(dir) / "scenes" / name, scene.image);
      targets.push_back({{"image", std::string("scenes/") + name},
                         {"left", scene.target.left},
                         {"top", scene.target.top},
                         {"width", scene.target.width},
                         {"height", scene.target.height}});
    }
    write_json(fs::path(dir) / "scenes.json", targets);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"T-CENTRIST pedestrian detection toolkit"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the configured random seed");

  std::string image, prefix, manifest, config, out, layout, model, descriptor, annotate;
  std::vector<std::string> images;

  auto* transform = app.add_subcommand("transform", "Write UTCT label images and the census code image");
  transform->add_option("image", image)->required();
  transform->add_option("--out-prefix", prefix)->required();

  auto* select = app.add_subcommand("select-blocks", "Choose the best block structure per grid position");
  select->add_option("manifest", manifest)->required();
  select->add_option("config", config)->required();
  select->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "Two-round SVM training with hard-negative mining");
  train->add_option("manifest", manifest)->required();
  train->add_option("config", config)->required();
  train->add_option("--layout", layout);
  train->add_option("--out", out)->required();

  auto* det = app.add_subcommand("detect", "Multi-scale detection");
  det->add_option("model", model)->required();
  det->add_option("images", images)->required();
  det->add_option("--config", config);
  det->add_option("--out", out);
  det->add_option("--annotate", annotate, "Directory for images with drawn boxes");

  auto* sim = app.add_subcommand("eval-sim", "Similarity-score (Diff_s) report");
  sim->add_option("manifest", manifest)->required();
  sim->add_option("config", config)->required();
  sim->add_option("--descriptor", descriptor)->check(CLI::IsMember({"tcentrist", "centrist"}));
  sim->add_option("--out", out)->required();

  auto* rocc = app.add_subcommand("eval-roc", "Per-window classification ROC");
  rocc->add_option("model", model)->required();
  rocc->add_option("manifest", manifest)->required();
  rocc->add_option("--config", config);
  rocc->add_option("--out", out)->required();

  auto* self = app.add_subcommand("selftest", "Check the fast paths against the reference implementations");

  std::size_t n_pos = 200, n_neg = 40, n_tpos = 200, n_tneg = 20;
  int scenes = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic silhouette dataset");
  synth->add_option("dir", out)->required();
  synth->add_option("--positives", n_pos);
  synth->add_option("--negatives", n_neg);
  synth->add_option("--test-positives", n_tpos);
  synth->add_option("--test-negatives", n_tneg);
  synth->add_option("--scenes", scenes);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*transform) return cmd_transform(image, prefix);
    if (*select) return cmd_select_blocks(manifest, config, out, seed);
    if (*train) return cmd_train(manifest, config, layout, out, seed);
    if (*det) return cmd_detect(model, images, config, out, annotate);
    if (*sim) return cmd_eval_sim(manifest, config, descriptor, out, seed);
    if (*rocc) return cmd_eval_roc(model, manifest, config, out, seed);
    if (*self) return cmd_selftest(seed.value_or(1));
    if (*synth) return cmd_synth(out, seed.value_or(1), n_pos, n_neg, n_tpos, n_tneg, scenes);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
