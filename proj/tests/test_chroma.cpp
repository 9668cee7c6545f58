#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "ecovid/chroma.hpp"
#include "ecovid/error.hpp"
#include "ecovid/io.hpp"
#include "ecovid/kernels.hpp"
#include "ecovid/rng.hpp"
#include "synthetic_corpus.hpp"

using namespace ecovid;
using namespace std::string_literals;
using namespace ecovid::chroma;
namespace fs = std::filesystem;

namespace {

Frame solid(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f{w, h, {}};
  for (std::size_t i = 0; i < w * h; ++i) f.pixels.insert(f.pixels.end(), {r, g, b});
  return f;
}

std::vector<Point3> random_points(Rng& rng, std::size_t n) {
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = {rng.uniform(0, 255), rng.uniform(0, 255), rng.uniform(0, 255)};
  return pts;
}

// Textbook HSV in degrees / unit interval, as the oracle.
Hsv oracle_hsv(double r, double g, double b) {
  r /= 255, g /= 255, b /= 255;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b}), d = mx - mn;
  double h = 0;
  if (d > 0) {
    if (mx == r) h = 60 * std::fmod((g - b) / d, 6.0);
    else if (mx == g) h = 60 * ((b - r) / d + 2);
    else h = 60 * ((r - g) / d + 4);
  }
  if (h < 0) h += 360;
  return {h / 2, mx > 0 ? d / mx * 255 : 0, mx * 255};
}

}  // namespace

TEST_CASE("decode_ppm: single pixel, comments, errors") {
  const std::string one = std::string("P6\n1 1\n255\n") + "\xFF\x00\x00"s;
  const auto f = decode_ppm(one);
  CHECK(f.width == 1);
  CHECK(f.height == 1);
  CHECK(f.pixels == std::vector<std::uint8_t>{255, 0, 0});
  const std::string commented = std::string("P6\n# made by hand\n1 # width\n1\n255\n") + "\xFF\x00\x00"s;
  CHECK(decode_ppm(commented).pixels == f.pixels);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n255 0 0\n"), FormatError);
  CHECK_THROWS_AS(decode_ppm("P6\n2 2\n255\n\x01\x02"), FormatError);
  CHECK_THROWS_AS(decode_ppm("P6\n1 1\n65535\n\x01\x02\x03\x04\x05\x06"), FormatError);
  const auto g = solid(3, 2, 1, 2, 3);
  CHECK(decode_ppm(encode_ppm(g)).pixels == g.pixels);
}

TEST_CASE("rgb_to_hsv: examples and oracle") {
  auto eq = [](Hsv a, double h, double s, double v) {
    CHECK(a.h == doctest::Approx(h));
    CHECK(a.s == doctest::Approx(s));
    CHECK(a.v == doctest::Approx(v));
  };
  eq(rgb_to_hsv(255, 0, 0), 0, 255, 255);
  eq(rgb_to_hsv(128, 128, 128), 0, 0, 128);
  eq(rgb_to_hsv(0, 255, 0), 60, 255, 255);
  eq(rgb_to_hsv(0, 0, 255), 120, 255, 255);
  for (int r = 0; r < 256; r += 17)
    for (int g = 0; g < 256; g += 15)
      for (int b = 0; b < 256; b += 51) {
        const auto got = rgb_to_hsv(r, g, b);
        const auto want = oracle_hsv(r, g, b);
        REQUIRE(got.h == doctest::Approx(want.h).epsilon(1e-9));
        REQUIRE(got.s == doctest::Approx(want.s).epsilon(1e-9));
        REQUIRE(got.v == double(std::max({r, g, b})));
        REQUIRE((got.s == 0) == (r == g && g == b));
        REQUIRE(got.h >= 0);
        REQUIRE(got.h < 180);
      }
}

TEST_CASE("rgb_to_gray") {
  CHECK(rgb_to_gray(255, 255, 255) == doctest::Approx(255));
  CHECK(rgb_to_gray(0, 0, 0) == 0);
  CHECK(rgb_to_gray(255, 0, 0) == doctest::Approx(76.245));
}

TEST_CASE("colour model round trips") {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Point3 p = {double(rng.uniform_index(256)), double(rng.uniform_index(256)), double(rng.uniform_index(256))};
    for (auto m : {ColorModel::Rgb, ColorModel::Hsv, ColorModel::Lab}) {
      const auto back = from_model(to_model(p, m), m);
      for (int c = 0; c < 3; ++c) REQUIRE(back[c] == doctest::Approx(p[c]).epsilon(1e-6));
    }
  }
  const auto white = rgb_to_lab({255, 255, 255});
  CHECK(white[0] == doctest::Approx(100).epsilon(1e-6));
  CHECK(parse_color_model("lab") == ColorModel::Lab);
}

TEST_CASE("kmeans: identical pixels, k=1 mean, two blobs") {
  std::vector<Point3> same(20, Point3{10, 20, 30});
  auto r = kmeans(same, {1, 1});
  CHECK(r.centroids[0] == Point3{10, 20, 30});
  CHECK(r.wcss == 0);

  Rng rng(3);
  const auto pts = random_points(rng, 101);
  Point3 mean{0, 0, 0};
  for (const auto& p : pts)
    for (int c = 0; c < 3; ++c) mean[c] += p[c] / 101.0;
  const auto one = kmeans(pts, {1, 9});
  for (int c = 0; c < 3; ++c) CHECK(one.centroids[0][c] == doctest::Approx(mean[c]).epsilon(1e-12));

  std::vector<Point3> blobs(50, Point3{0, 0, 0});
  blobs.insert(blobs.end(), 50, Point3{255, 255, 255});
  const auto res = kmeans_palette(blobs, {2, 4});
  REQUIRE(res.palette.size() == 2);
  std::vector<Point3> got{res.palette[0].rgb, res.palette[1].rgb};
  std::sort(got.begin(), got.end());
  CHECK(got[0] == Point3{0, 0, 0});
  CHECK(got[1] == Point3{255, 255, 255});
  CHECK(res.palette[0].weight == 0.5);
  CHECK(res.palette[1].weight == 0.5);
}

TEST_CASE("kmeans: k larger than n is reduced") {
  std::vector<Point3> pts{{0, 0, 0}, {100, 100, 100}};
  const auto r = kmeans(pts, {5, 1});
  CHECK(r.k_requested == 5);
  CHECK(r.k_used == 2);
  CHECK(r.wcss == 0);
}

TEST_CASE("kmeans: WCSS non-increasing, weights sum to 1, deterministic") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(rng, 20 + rng.uniform_index(200));
    KMeansOptions o{1 + rng.uniform_index(6), rng.next()};
    const auto r = kmeans(pts, o);
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i) REQUIRE(r.wcss_history[i] <= r.wcss_history[i - 1]);
    double w = 0;
    for (double x : r.weights) w += x;
    REQUIRE(w == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.wcss >= 0);
    const auto again = kmeans(pts, o);
    REQUIRE(again.centroids == r.centroids);
    o.parallel = !o.parallel;
    REQUIRE(kmeans(pts, o).centroids == r.centroids);
  }
}

TEST_CASE("merge_palette collapses near-duplicates and drops empty clusters") {
  const auto p = merge_palette({{10, 10, 10}, {10.5, 10, 10}, {200, 0, 0}, {50, 50, 50}}, {0.3, 0.3, 0.4, 0.0});
  REQUIRE(p.size() == 2);
  CHECK(p[0].weight == doctest::Approx(0.6));
  CHECK(p[1].weight == doctest::Approx(0.4));
}

TEST_CASE("kernels: serial and OpenMP agree bit for bit") {
  Rng rng(15);
  std::vector<std::vector<std::uint8_t>> frames(9);
  for (auto& f : frames) {
    f.resize(3 * (1 + rng.uniform_index(500)));
    for (auto& b : f) b = static_cast<std::uint8_t>(rng.uniform_index(256));
  }
  const auto a = kernels::serial::frame_sums(frames);
  const auto b = kernels::omp::frame_sums(frames);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].hue == b[i].hue);
    CHECK(a[i].saturation == b[i].saturation);
    CHECK(a[i].intensity == b[i].intensity);
    CHECK(a[i].hue_sin == b[i].hue_sin);
    CHECK(a[i].count == b[i].count);
  }
  const auto pts = random_points(rng, 5000);
  const auto cents = random_points(rng, 7);
  std::vector<std::size_t> la(pts.size(), std::numeric_limits<std::size_t>::max()), lb = la;
  CHECK(kernels::serial::assign(pts, cents, la) == kernels::omp::assign(pts, cents, lb));
  CHECK(la == lb);
}

TEST_CASE("assign keeps the current label on exact ties") {
  std::vector<Point3> pts{{5, 0, 0}};
  std::vector<Point3> cents{{0, 0, 0}, {10, 0, 0}};
  std::vector<std::size_t> labels{1};
  CHECK(kernels::serial::assign(pts, cents, labels) == 0);
  CHECK(labels[0] == 1);
  labels[0] = std::numeric_limits<std::size_t>::max();
  kernels::serial::assign(pts, cents, labels);
  CHECK(labels[0] == 0);
}

TEST_CASE("video_color_summary: solid colour, black/white, stride, order") {
  const auto dir = fixtures::scratch_dir("chroma_video");
  io::write_file(dir / "red" / "a.ppm", encode_ppm(solid(4, 4, 255, 0, 0)));
  io::write_file(dir / "red" / "b.ppm", encode_ppm(solid(4, 4, 255, 0, 0)));
  SummaryOptions o;
  o.kmeans.k = 3;
  o.stride = 1;
  const auto red = video_color_summary(dir / "red", o);
  CHECK(red.mean_hue == 0);
  CHECK(red.mean_saturation == 255);
  CHECK(red.mean_intensity == doctest::Approx(76.245));
  REQUIRE(red.palette.size() == 1);
  CHECK(red.palette[0].rgb == Point3{255, 0, 0});
  CHECK(red.palette[0].weight == 1.0);

  io::write_file(dir / "bw" / "0.ppm", encode_ppm(solid(4, 4, 0, 0, 0)));
  io::write_file(dir / "bw" / "1.ppm", encode_ppm(solid(4, 4, 255, 255, 255)));
  o.kmeans.k = 2;
  const auto bw = video_color_summary(dir / "bw", o);
  CHECK(bw.mean_intensity == doctest::Approx(127.5));
  REQUIRE(bw.palette.size() == 2);
  CHECK(bw.palette[0].weight == 0.5);

  // same frames under different names: identical summary
  io::write_file(dir / "wb" / "x.ppm", encode_ppm(solid(4, 4, 255, 255, 255)));
  io::write_file(dir / "wb" / "y.ppm", encode_ppm(solid(4, 4, 0, 0, 0)));
  const auto wb = video_color_summary(dir / "wb", o);
  CHECK(wb.mean_intensity == bw.mean_intensity);
  CHECK(wb.palette[0].rgb == bw.palette[0].rgb);

  auto s2 = o;
  s2.stride = 2;
  const auto red2 = video_color_summary(dir / "red", s2);
  CHECK(red2.mean_hue == doctest::Approx(red.mean_hue).epsilon(1e-12));
  CHECK(red2.mean_saturation == doctest::Approx(red.mean_saturation).epsilon(1e-12));
  CHECK(red2.mean_intensity == doctest::Approx(red.mean_intensity).epsilon(1e-12));

  fs::create_directories(dir / "empty");
  CHECK_THROWS_AS(video_color_summary(dir / "empty", o), EmptyVideoError);
  io::write_file(dir / "bad" / "a.ppm", "P3 nope");
  CHECK_THROWS_AS(video_color_summary(dir / "bad", o), FormatError);
  fs::remove_all(dir);
}

TEST_CASE("circular hue mean wraps around red") {
  // hues 2 and 178 (8-bit) average to red under the circular mean
  Frame f{2, 1, {}};
  const auto a = hsv_to_rgb({2, 255, 255});
  const auto b = hsv_to_rgb({178, 255, 255});
  for (const auto& p : {a, b})
    for (double c : p) f.pixels.push_back(static_cast<std::uint8_t>(std::lround(c)));
  SummaryOptions o;
  o.stride = 1;
  o.kmeans.k = 1;
  o.hue_mean = HueMean::Circular;
  const auto s = summarize_frames({f}, o);
  CHECK((s.mean_hue < 3 || s.mean_hue > 177));
  o.hue_mean = HueMean::Arithmetic;
  CHECK(summarize_frames({f}, o).mean_hue == doctest::Approx(90).epsilon(0.02));
}

TEST_CASE("palette CSV and SVG") {
  Palette p{{{255, 0, 0}, 0.75}, {{0, 0, 255}, 0.25}};
  CHECK(palette_csv_rows("v<1>", p) == "v<1>,1,255,0,0,0.75\nv<1>,2,0,0,255,0.25\n");
  const auto svg = palette_svg({{"v<1>", p}});
  CHECK(svg.find("v&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("#ff0000") != std::string::npos);
}
