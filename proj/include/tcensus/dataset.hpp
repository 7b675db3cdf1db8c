#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcensus/block_selection.hpp"
#include "tcensus/bootstrap.hpp"
#include "tcensus/detector.hpp"
#include "tcensus/error.hpp"
#include "tcensus/io.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/sampling.hpp"

namespace tcensus {

/// Everything a pipeline run needs besides the data.
struct RunConfig {
  int window_width = 36;
  int window_height = 72;
  int block_width = 12;
  int block_height = 12;
  int block_stride = 6;
  std::vector<BlockVariant> candidates{kAllVariants.begin(), kAllVariants.end()};
  double holdout_fraction = 0.2;
  Descriptor descriptor = Descriptor::TCentrist;
  bool normalize = false;
  double svm_c = 1.0;
  double svm_tolerance = 1e-6;
  int svm_max_epochs = 2000;
  std::uint64_t seed = 42;
  double pyramid_factor = 1.0905077326652577;
  int pyramid_max_level = -1;
  int scan_stride = 4;
  double detection_threshold = 0.0;
  double nms_iou = 0.5;
  double mining_threshold = 0.0;
  std::size_t hard_negative_cap = 5000;
  std::size_t train_positives = 2000;
  std::size_t train_negatives = 5000;
  bool mirror = true;
  std::size_t test_negative_windows = 1000;
  std::size_t sim_positives = 2000;
  std::size_t sim_negatives = 2000;

  void validate() const {
    const auto positive = [](bool ok, const char* what) {
      if (!ok) throw Error(ErrorCode::InvalidConfig, std::string("config: ") + what);
    };
    positive(window_width >= 3 && window_height >= 3, "window must be at least 3x3");
    positive(block_width >= 3 && block_height >= 3, "blocks must be at least 3x3");
    positive(block_width <= window_width && block_height <= window_height, "blocks must fit the window");
    positive(block_stride >= 1, "block_stride must be positive");
    positive(!candidates.empty(), "at least one candidate structure");
    positive(holdout_fraction > 0.0 && holdout_fraction < 1.0, "holdout_fraction in (0, 1)");
    positive(svm_c > 0.0, "svm_c must be positive");
    positive(svm_tolerance > 0.0, "svm_tolerance must be positive");
    positive(svm_max_epochs >= 1, "svm_max_epochs must be positive");
    positive(pyramid_factor > 1.0, "pyramid_factor must exceed 1");
    positive(scan_stride >= 1, "scan_stride must be positive");
    positive(nms_iou >= 0.0 && nms_iou < 1.0, "nms_iou in [0, 1)");
    positive(train_positives >= 1 && train_negatives >= 1, "training counts must be positive");
    positive(test_negative_windows >= 1, "test_negative_windows must be positive");
    positive(sim_positives >= 2 && sim_negatives >= 2, "similarity sample counts must be at least 2");
  }

  GridSpec grid() const {
    return {window_width, window_height, block_width, block_height, block_stride, block_stride};
  }

  BlockLayout grid_layout() const { return make_grid_layout(grid(), descriptor); }

  SvmConfig svm() const { return {svm_c, svm_tolerance, svm_max_epochs, seed, 1.0}; }

  PyramidConfig pyramid() const { return {pyramid_factor, 0, pyramid_max_level}; }

  BootstrapConfig bootstrap() const {
    BootstrapConfig b;
    b.svm = svm();
    b.extract.normalize = normalize;
    b.negative_windows = train_negatives;
    b.sampling_seed = seed;
    b.hard_negative_cap = hard_negative_cap;
    b.mining_threshold = mining_threshold;
    b.pyramid = pyramid();
    b.scan_stride = scan_stride;
    return b;
  }

  BlockSelectionConfig block_selection() const {
    BlockSelectionConfig s;
    s.candidates = candidates;
    s.holdout_fraction = holdout_fraction;
    s.split_seed = seed;
    s.svm = svm();
    s.extract.normalize = normalize;
    return s;
  }

  DetectConfig detect() const {
    return {pyramid(), {scan_stride, detection_threshold, ScoringPath::Fast}, nms_iou};
  }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const BlockVariant v : c.candidates) candidates.push_back(std::string(to_string(v)));
  return {{"window_width", c.window_width},
          {"window_height", c.window_height},
          {"block_width", c.block_width},
          {"block_height", c.block_height},
          {"block_stride", c.block_stride},
          {"candidates", std::move(candidates)},
          {"holdout_fraction", c.holdout_fraction},
          {"descriptor", std::string(to_string(c.descriptor))},
          {"normalize", c.normalize},
          {"svm_c", c.svm_c},
          {"svm_tolerance", c.svm_tolerance},
          {"svm_max_epochs", c.svm_max_epochs},
          {"seed", c.seed},
          {"pyramid_factor", c.pyramid_factor},
          {"pyramid_max_level", c.pyramid_max_level},
          {"scan_stride", c.scan_stride},
          {"detection_threshold", c.detection_threshold},
          {"nms_iou", c.nms_iou},
          {"mining_threshold", c.mining_threshold},
          {"hard_negative_cap", c.hard_negative_cap},
          {"train_positives", c.train_positives},
          {"train_negatives", c.train_negatives},
          {"mirror", c.mirror},
          {"test_negative_windows", c.test_negative_windows},
          {"sim_positives", c.sim_positives},
          {"sim_negatives", c.sim_negatives}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  RunConfig c;
  const nlohmann::json known = config_to_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("window_width", c.window_width);
    get("window_height", c.window_height);
    get("block_width", c.block_width);
    get("block_height", c.block_height);
    get("block_stride", c.block_stride);
    if (j.contains("candidates")) {
      c.candidates.clear();
      for (const auto& v : j.at("candidates")) c.candidates.push_back(parse_variant(v.get<std::string>()));
    }
    get("holdout_fraction", c.holdout_fraction);
    if (j.contains("descriptor")) c.descriptor = parse_descriptor(j.at("descriptor").get<std::string>());
    get("normalize", c.normalize);
    get("svm_c", c.svm_c);
    get("svm_tolerance", c.svm_tolerance);
    get("svm_max_epochs", c.svm_max_epochs);
    get("seed", c.seed);
    get("pyramid_factor", c.pyramid_factor);
    get("pyramid_max_level", c.pyramid_max_level);
    get("scan_stride", c.scan_stride);
    get("detection_threshold", c.detection_threshold);
    get("nms_iou", c.nms_iou);
    get("mining_threshold", c.mining_threshold);
    get("hard_negative_cap", c.hard_negative_cap);
    get("train_positives", c.train_positives);
    get("train_negatives", c.train_negatives);
    get("mirror", c.mirror);
    get("test_negative_windows", c.test_negative_windows);
    get("sim_positives", c.sim_positives);
    get("sim_negatives", c.sim_negatives);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

/// Where a dataset lives. Directory entries are relative to `root`.
struct DatasetManifest {
  std::filesystem::path root;
  std::filesystem::path positives;
  std::filesystem::path negatives;
  std::filesystem::path test_positives;
  std::filesystem::path test_negatives;
  std::uint64_t seed = 42;

  std::filesystem::path resolve(const std::filesystem::path& p) const { return p.empty() ? p : root / p; }
};

/// A relative "root" is resolved against the manifest's own directory.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DecodeError, "manifest " + path.string() + ": " + e.what());
  }
  try {
    DatasetManifest m;
    const std::filesystem::path base = path.parent_path();
    const std::filesystem::path root = j.value("root", std::string("."));
    m.root = root.is_absolute() ? root : base / root;
    m.positives = j.at("positives").get<std::string>();
    m.negatives = j.at("negatives").get<std::string>();
    m.test_positives = j.value("test_positives", std::string());
    m.test_negatives = j.value("test_negatives", std::string());
    m.seed = j.value("seed", std::uint64_t{42});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "manifest " + path.string() + ": " + e.what());
  }
}

inline std::vector<GrayImage> load_images(const std::filesystem::path& dir) {
  std::vector<GrayImage> out;
  for (const auto& p : list_images(dir)) out.push_back(load_image(p));
  return out;
}

/// Positive crops fitted to the window (resize to cover, center crop), optionally
/// followed by their mirror images, then subsampled to `limit` with a seeded draw.
inline std::vector<GrayImage> prepare_positives(std::vector<GrayImage> crops, const RunConfig& cfg,
                                                std::size_t limit, std::uint64_t seed) {
  std::vector<GrayImage> out;
  for (const GrayImage& c : crops) {
    GrayImage fitted = fit_to_window(c, cfg.window_width, cfg.window_height);
    if (cfg.mirror) {
      GrayImage flipped = mirror_horizontal(fitted);
      out.push_back(std::move(fitted));
      out.push_back(std::move(flipped));
    } else {
      out.push_back(std::move(fitted));
    }
  }
  if (out.size() > limit) {
    std::vector<std::size_t> idx(out.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
    std::vector<GrayImage> kept;
    kept.reserve(limit);
    for (const std::size_t i : idx) kept.push_back(std::move(out[i]));
    out = std::move(kept);
  }
  return out;
}

inline WindowSample sample_negatives(const std::vector<GrayImage>& images, std::size_t count,
                                     int window_width, int window_height, std::uint64_t seed) {
  return sample_windows(images, count, window_width, window_height, seed);
}

inline WindowSample sample_negatives(const DatasetManifest& manifest, std::size_t count,
                                     int window_width, int window_height, std::uint64_t seed) {
  return sample_windows(load_images(manifest.resolve(manifest.negatives)), count, window_width,
                        window_height, seed);
}

namespace detail {

inline std::vector<GrayImage> require_images(const std::filesystem::path& dir, const char* what) {
  auto images = load_images(dir);
  if (images.empty()) throw Error(ErrorCode::InvalidConfig, std::string("no ") + what + " images in " + dir.string());
  return images;
}

}  // namespace detail

struct LabeledWindows {
  std::vector<GrayImage> windows;
  std::vector<int> labels;
};

/// Prepared training positives followed by sampled training negatives.
inline LabeledWindows training_windows(const DatasetManifest& m, const RunConfig& cfg) {
  LabeledWindows out;
  out.windows = prepare_positives(detail::require_images(m.resolve(m.positives), "positive"), cfg,
                                  cfg.train_positives, cfg.seed);
  out.labels.assign(out.windows.size(), 1);
  for (auto& n : sample_windows(detail::require_images(m.resolve(m.negatives), "negative"), cfg.train_negatives,
                                cfg.window_width, cfg.window_height, cfg.seed)
                     .windows) {
    out.windows.push_back(std::move(n));
    out.labels.push_back(-1);
  }
  return out;
}

struct EvalWindows {
  std::vector<GrayImage> positives;
  std::vector<GrayImage> negatives;
};

/// Similarity-analysis windows: the test split when the manifest has one, else the training split.
/// Positives are not mirrored.
inline EvalWindows similarity_windows(const DatasetManifest& m, RunConfig cfg) {
  cfg.mirror = false;
  const auto pos_dir = m.resolve(m.test_positives.empty() ? m.positives : m.test_positives);
  const auto neg_dir = m.resolve(m.test_negatives.empty() ? m.negatives : m.test_negatives);
  return {prepare_positives(detail::require_images(pos_dir, "positive"), cfg, cfg.sim_positives, cfg.seed),
          sample_windows(detail::require_images(neg_dir, "negative"), cfg.sim_negatives, cfg.window_width,
                         cfg.window_height, cfg.seed)
              .windows};
}

/// ROC test windows: every test positive (fitted, not mirrored) and
/// test_negative_windows samples from the test negative images.
inline EvalWindows roc_windows(const DatasetManifest& m, RunConfig cfg) {
  if (m.test_positives.empty() || m.test_negatives.empty()) {
    throw Error(ErrorCode::InvalidConfig, "manifest has no test split");
  }
  cfg.mirror = false;
  return {prepare_positives(detail::require_images(m.resolve(m.test_positives), "test positive"), cfg,
                            std::numeric_limits<std::size_t>::max(), cfg.seed),
          sample_windows(detail::require_images(m.resolve(m.test_negatives), "test negative"),
                         cfg.test_negative_windows, cfg.window_width, cfg.window_height, cfg.seed)
              .windows};
}

}  // namespace tcensus
