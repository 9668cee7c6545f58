#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecovid::chroma {

/// Row-major 8-bit RGB image; pixels.size() == 3 * width * height.
struct Frame {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

using Point3 = std::array<double, 3>;

/// Binary PPM (P6, maxval 255). Header comments are skipped.
/// Throws FormatError on a wrong magic, bad header or truncated payload.
Frame decode_ppm(std::string_view bytes);
std::string encode_ppm(const Frame& frame);
Frame read_ppm(const std::filesystem::path& path);

/// 8-bit HSV: h in [0,180) (degrees / 2), s and v in [0,255].
struct Hsv {
  double h = 0;
  double s = 0;
  double v = 0;
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
Point3 hsv_to_rgb(const Point3& hsv);
/// Rec.601 luma 0.299 r + 0.587 g + 0.114 b.
double rgb_to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b);
/// sRGB (D65) <-> CIELAB.
Point3 rgb_to_lab(const Point3& rgb);
Point3 lab_to_rgb(const Point3& lab);

enum class ColorModel { Rgb, Hsv, Lab };
ColorModel parse_color_model(std::string_view name);
Point3 to_model(const Point3& rgb, ColorModel model);
Point3 from_model(const Point3& p, ColorModel model);  // clamped to [0,255]

struct KMeansOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-4;
  bool parallel = true;  // OpenMP assignment step; results are identical either way
};

struct KMeansResult {
  std::vector<Point3> centroids;  // k_used entries, in the clustered space
  std::vector<double> weights;    // cluster size / n
  std::vector<std::size_t> labels;
  double wcss = 0;
  std::vector<double> wcss_history;  // one entry per assignment step
  std::size_t iterations = 0;
  std::size_t k_requested = 0;
  std::size_t k_used = 0;  // min(k, n)
  bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are reseeded to
/// the point farthest from its centroid. On distance ties a point keeps its
/// current cluster, which makes the WCSS sequence non-increasing.
/// Throws ParameterError when points are empty or k == 0.
KMeansResult kmeans(std::span<const Point3> points, const KMeansOptions& options);

struct PaletteEntry {
  Point3 rgb{};
  double weight = 0;
};
using Palette = std::vector<PaletteEntry>;

struct PaletteResult {
  Palette palette;  // descending weight, duplicates merged, zero weights dropped
  KMeansResult clustering;
};

/// Clusters RGB pixels in `model` space and converts centroids back to RGB.
PaletteResult kmeans_palette(std::span<const Point3> rgb_pixels, const KMeansOptions& options,
                             ColorModel model = ColorModel::Rgb);

/// Merges entries whose RGB centroids lie within `radius` (L2), summing the
/// weights, then sorts by descending weight.
Palette merge_palette(const std::vector<Point3>& rgb_centroids, const std::vector<double>& weights,
                      double radius = 1.0);

enum class HueMean { Arithmetic, Circular };

struct SummaryOptions {
  KMeansOptions kmeans;
  ColorModel model = ColorModel::Rgb;
  std::size_t stride = 4;
  HueMean hue_mean = HueMean::Arithmetic;
  bool parallel = true;
};

struct ColorSummary {
  double mean_hue = 0;
  double mean_saturation = 0;
  double mean_intensity = 0;
  Palette palette;
  std::size_t frame_count = 0;
  std::size_t pixel_count = 0;
  std::size_t k_used = 0;
  bool k_reduced = false;
  double wcss = 0;
};

/// *.ppm files in `dir`, sorted lexicographically by file name.
std::vector<std::filesystem::path> frame_files(const std::filesystem::path& dir);

/// Pixels at (x, y) with x % stride == 0 and y % stride == 0.
std::vector<std::uint8_t> subsample(const Frame& frame, std::size_t stride);

/// Means over all sampled pixels of all frames plus the k-means palette of
/// the pooled pixels. Frames are put in a canonical content order first, so
/// the result does not depend on how the files are named.
/// Throws EmptyVideoError when the directory holds no frames.
ColorSummary summarize_frames(std::vector<Frame> frames, const SummaryOptions& options);
ColorSummary video_color_summary(const std::filesystem::path& frames_dir, const SummaryOptions& options);

/// CSV rows "video_id,rank,r,g,b,weight" (rank is 1-based).
std::string palette_csv_rows(const std::string& video_id, const Palette& palette);
inline constexpr std::string_view kPaletteCsvHeader = "video_id,rank,r,g,b,weight\n";

/// One horizontal strip per video, rect widths proportional to weight.
std::string palette_svg(const std::vector<std::pair<std::string, Palette>>& palettes);

}  // namespace ecovid::chroma
