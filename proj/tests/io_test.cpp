#include <gtest/gtest.h>

#include <png.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include <unistd.h>

#include "tcensus/dataset.hpp"
#include "tcensus/io.hpp"
#include "tcensus/serialization.hpp"
#include "tcensus/synthetic.hpp"
#include "test_util.hpp"

namespace tcensus {
namespace {

namespace fs = std::filesystem;
using testing::constant_image;
using testing::image_1_to_9;
using testing::random_image;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("tcensus_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string encode_png(int width, int height, std::uint32_t format, const std::vector<std::uint8_t>& px) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  png_alloc_size_t size = 0;
  EXPECT_TRUE(png_image_write_to_memory(&image, nullptr, &size, 0, px.data(), 0, nullptr));
  std::string out(size, '\0');
  EXPECT_TRUE(png_image_write_to_memory(&image, out.data(), &size, 0, px.data(), 0, nullptr));
  out.resize(size);
  return out;
}

TEST(Luminance, IntegerRule) {
  EXPECT_EQ(luminance(255, 0, 0), 76);
  EXPECT_EQ(luminance(0, 255, 0), 150);
  EXPECT_EQ(luminance(0, 0, 255), 29);
  EXPECT_EQ(luminance(255, 255, 255), 255);
  for (int r = 0; r < 256; r += 15) {
    for (int g = 0; g < 256; g += 17) {
      for (int b = 0; b < 256; b += 51) {
        EXPECT_EQ(luminance(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)),
                  static_cast<int>(std::floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5 + 1e-9)));
      }
    }
  }
}

TEST(DecodeImage, P5Bytes) {
  std::string pgm = "P5\n3 3\n255\n";
  for (char c = 1; c <= 9; ++c) pgm.push_back(c);
  EXPECT_EQ(decode_image(pgm), image_1_to_9());
}

TEST(DecodeImage, P2WithComments) {
  EXPECT_EQ(decode_image("P2\n# a comment\n3 3\n255\n1 2 3\n4 5 6\n7 8 9\n"), image_1_to_9());
}

TEST(DecodeImage, P6UsesLuminance) {
  std::string ppm = "P6\n1 1\n255\n";
  ppm += std::string("\xff\x00\x00", 3);
  EXPECT_EQ(decode_image(ppm).at(0, 0), 76);
}

TEST(DecodeImage, GrayPngMatchesPgm) {
  const std::vector<std::uint8_t> px{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(decode_image(encode_png(3, 3, PNG_FORMAT_GRAY, px)), image_1_to_9());
}

TEST(DecodeImage, RgbPng) {
  const std::vector<std::uint8_t> px{255, 0, 0, 0, 255, 0};
  const GrayImage img = decode_image(encode_png(2, 1, PNG_FORMAT_RGB, px));
  EXPECT_EQ(img.at(0, 0), 76);
  EXPECT_EQ(img.at(1, 0), 150);
}

void expect_code(const std::string& bytes, ErrorCode code) {
  try {
    (void)decode_image(bytes);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(DecodeImage, Errors) {
  expect_code("P5\n3 3\n65535\n", ErrorCode::UnsupportedFormat);
  expect_code("P5\n3 3\n255\n\x01\x02", ErrorCode::DecodeError);
  expect_code("P5\n3\n", ErrorCode::DecodeError);
  expect_code("GIF89a", ErrorCode::UnsupportedFormat);
  expect_code(std::string("\x89PNG\r\n\x1a\n", 8) + "garbage", ErrorCode::DecodeError);
  EXPECT_THROW((void)load_image("/nonexistent/file.pgm"), Error);
}

TEST(Pgm, WriteLoadRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(1);
  const GrayImage img = random_image(17, 9, rng);
  write_pgm(dir.path() / "a.pgm", img);
  EXPECT_EQ(load_image(dir.path() / "a.pgm"), img);
  EXPECT_FALSE(fs::exists(dir.path() / "a.pgm.tmp"));
}

TEST(ListImages, SortedAndFiltered) {
  TempDir dir;
  for (const char* name : {"b.pgm", "a.PNG", "c.txt", "d.pgm"}) write_file_atomic(dir.path() / name, "x");
  const auto files = list_images(dir.path());
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "a.PNG");
  EXPECT_EQ(files[2].filename(), "d.pgm");
  EXPECT_THROW((void)list_images(dir.path() / "missing"), Error);
}

TEST(HexBlob, BitExactRoundTrip) {
  const std::vector<double> v{0.0, -0.0, 1.0, -1.5, std::numeric_limits<double>::denorm_min(),
                              std::numeric_limits<double>::max(), 0.1, std::numeric_limits<double>::infinity()};
  const auto hex = encode_f64le_hex(v);
  EXPECT_EQ(hex.substr(0, 32), "0000000000000000" "0000000000000080");
  const auto back = decode_f64le_hex(hex);
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(v[i]));
  EXPECT_EQ(encode_f64le_hex(std::vector<double>{1.0}), "000000000000f03f");
  EXPECT_THROW((void)decode_f64le_hex("abc"), Error);
  EXPECT_THROW((void)decode_f64le_hex("zz00000000000000"), Error);
}

LinearModel random_model(std::mt19937_64& rng) {
  BlockLayout layout = make_grid_layout(GridSpec{});
  layout.blocks[20] = make_structure(layout.blocks[20].rects.front(), BlockVariant::ExtendUp);
  layout.blocks[7] = make_structure(layout.blocks[7].rects.front(), BlockVariant::ExtendRight);
  std::normal_distribution<double> n(0.0, 1.0);
  LinearModel m{layout, true, std::vector<double>(layout.dimension()), n(rng), {}};
  for (auto& w : m.weights) w = n(rng) * 1e-3;
  m.info = {42, 0.37, 2, 123, 10, 20, 5};
  return m;
}

TEST(ModelJson, RoundTripIsBitExact) {
  std::mt19937_64 rng(2);
  const LinearModel m = random_model(rng);
  const std::string text = model_to_json(m).dump();
  const LinearModel back = model_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, m);
  EXPECT_EQ(model_to_json(back).dump(), text);
  const GrayImage img = random_image(36, 72, rng);
  const auto f = extract_window(img, m.layout, {.normalize = true});
  EXPECT_EQ(back.score(f), m.score(f));
}

TEST(ModelJson, RejectsBadDocuments) {
  std::mt19937_64 rng(3);
  auto j = model_to_json(random_model(rng));
  auto wrong_version = j;
  wrong_version["version"] = 99;
  EXPECT_THROW((void)model_from_json(wrong_version), Error);
  auto short_weights = j;
  short_weights["weights_f64le"] = "000000000000f03f";
  EXPECT_THROW((void)model_from_json(short_weights), Error);
  auto missing = j;
  missing.erase("training");
  EXPECT_THROW((void)model_from_json(missing), Error);
  EXPECT_THROW((void)model_from_json(layout_to_json(make_grid_layout(GridSpec{}))), Error);
}

TEST(LayoutJson, RoundTrip) {
  BlockLayout layout = make_grid_layout({24, 48, 8, 8, 4, 4}, Descriptor::Centrist);
  layout.blocks[9] = make_structure(layout.blocks[9].rects.front(), BlockVariant::ExtendDown);
  EXPECT_EQ(layout_from_json(layout_to_json(layout)), layout);
  auto j = layout_to_json(layout);
  j["blocks"][0]["rects"][0]["left"] = 40;
  EXPECT_THROW((void)layout_from_json(j), Error);
}

TEST(Detections, JsonAndLines) {
  const std::vector<ImageDetections> r{{"a.pgm", {{{1, 2, 72, 36}, 0.5, 0}}}, {"b.pgm", {}}};
  const auto j = detections_to_json(r);
  ASSERT_EQ(j["detections"].size(), 1u);
  EXPECT_EQ(j["detections"][0]["top"], 1);
  EXPECT_EQ(j["detections"][0]["left"], 2);
  EXPECT_EQ(detections_to_lines(r), "a.pgm 2 1 36 72 0.5 0\n");
}

TEST(RunConfig, JsonRoundTripAndValidation) {
  RunConfig c;
  c.svm_c = 0.1;
  c.candidates = {BlockVariant::Base, BlockVariant::ExtendLeft};
  c.descriptor = Descriptor::Centrist;
  c.seed = 1234567890123ULL;
  const auto j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)).dump(), j.dump());
  EXPECT_EQ(config_from_json(nlohmann::json::object()).window_width, 36);
  EXPECT_THROW((void)config_from_json({{"no_such_key", 1}}), Error);
  EXPECT_THROW((void)config_from_json({{"svm_c", -1.0}}), Error);
  EXPECT_THROW((void)config_from_json({{"scan_stride", 0}}), Error);
}

TEST(Manifest, ResolvesRelativeRoot) {
  TempDir dir;
  fs::create_directories(dir.path() / "data");
  write_file_atomic(dir.path() / "m.json", R"({"root": "data", "positives": "pos", "negatives": "neg", "seed": 9})");
  const auto m = load_manifest(dir.path() / "m.json");
  EXPECT_EQ(m.resolve(m.positives), dir.path() / "data" / "pos");
  EXPECT_EQ(m.seed, 9u);
  EXPECT_TRUE(m.test_positives.empty());
  write_file_atomic(dir.path() / "bad.json", R"({"root": "data"})");
  EXPECT_THROW((void)load_manifest(dir.path() / "bad.json"), Error);
  write_file_atomic(dir.path() / "worse.json", "{");
  EXPECT_THROW((void)load_manifest(dir.path() / "worse.json"), Error);
}

TEST(SampleNegatives, Examples) {
  std::mt19937_64 rng(4);
  const std::vector<GrayImage> one{random_image(36, 72, rng)};
  EXPECT_TRUE(sample_negatives(one, 0, 36, 72, 1).windows.empty());
  const auto three = sample_negatives(one, 3, 36, 72, 1);
  ASSERT_EQ(three.windows.size(), 3u);
  for (const auto& w : three.windows) EXPECT_EQ(w, one[0]);

  const std::vector<GrayImage> many{random_image(80, 100, rng), random_image(10, 10, rng), random_image(50, 90, rng)};
  const auto a = sample_negatives(many, 25, 36, 72, 7);
  const auto b = sample_negatives(many, 25, 36, 72, 7);
  EXPECT_EQ(a.windows, b.windows);
  EXPECT_EQ(a.skipped, std::vector<std::size_t>{1});
  try {
    (void)sample_negatives(std::vector<GrayImage>{random_image(10, 10, rng)}, 1, 36, 72, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ImageTooSmall);
  }
}

TEST(SampleNegatives, FromManifest) {
  TempDir dir;
  const auto data = synthetic::make_dataset({}, {4, 3, 2, 2}, 5);
  synthetic::write_dataset(dir.path(), data, 5);
  const auto m = load_manifest(dir.path() / "manifest.json");
  const auto s = sample_negatives(m, 6, 36, 72, 3);
  EXPECT_EQ(s.windows, sample_negatives(data.negatives, 6, 36, 72, 3).windows);
  EXPECT_EQ(load_images(m.resolve(m.positives)), data.positives);
}

TEST(PreparePositives, FitMirrorAndLimit) {
  std::mt19937_64 rng(6);
  RunConfig cfg;
  const std::vector<GrayImage> crops{random_image(36, 72, rng), random_image(64, 128, rng), random_image(50, 60, rng)};
  const auto all = prepare_positives(crops, cfg, 100, 1);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all[0], crops[0]);
  EXPECT_EQ(all[1], mirror_horizontal(crops[0]));
  for (const auto& p : all) {
    EXPECT_EQ(p.width(), 36);
    EXPECT_EQ(p.height(), 72);
  }
  const auto some = prepare_positives(crops, cfg, 4, 1);
  EXPECT_EQ(some.size(), 4u);
  EXPECT_EQ(some, prepare_positives(crops, cfg, 4, 1));
  cfg.mirror = false;
  EXPECT_EQ(prepare_positives(crops, cfg, 100, 1).size(), 3u);
}

TEST(ImageOps, CropMirrorResize) {
  const GrayImage img = image_1_to_9();
  EXPECT_EQ(crop(img, 1, 1, 2, 2), GrayImage(2, 2, {5, 6, 8, 9}));
  EXPECT_EQ(mirror_horizontal(img), GrayImage(3, 3, {3, 2, 1, 6, 5, 4, 9, 8, 7}));
  EXPECT_THROW((void)crop(img, 2, 2, 2, 2), Error);
  EXPECT_EQ(resize_bilinear(img, 3, 3), img);
  EXPECT_EQ(resize_bilinear(constant_image(10, 10, 77), 4, 7), constant_image(4, 7, 77));
  // Halving averages 2x2 neighborhoods.
  EXPECT_EQ(resize_bilinear(GrayImage(2, 2, {10, 20, 30, 40}), 1, 1).at(0, 0), 25);
}

}  // namespace
}  // namespace tcensus
