#include "ecovid/chroma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"
#include "ecovid/kernels.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::chroma {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

class PpmHeaderReader {
 public:
  explicit PpmHeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t next_number(const char* what) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (std::size_t{1} << 31)) throw FormatError(std::string("PPM ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw FormatError(std::string("PPM header: expected ") + what);
    return value;
  }

  /// Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("PPM header: missing whitespace before raster");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  const double v = c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
  return v * 255.0;
}

constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) { return t > kDelta ? t * t * t : 3 * kDelta * kDelta * (t - 4.0 / 29.0); }

// Linear sRGB to XYZ (D65); the inverse is derived from it so round trips are exact.
const Eigen::Matrix3d& rgb_to_xyz() {
  static const Eigen::Matrix3d m = (Eigen::Matrix3d() << 0.4124564, 0.3575761, 0.1804375,  //
                                    0.2126729, 0.7151522, 0.0721750,                        //
                                    0.0193339, 0.1191920, 0.9503041)
                                       .finished();
  return m;
}

Point3 clamp_rgb(Point3 p) {
  for (auto& c : p) c = std::clamp(c, 0.0, 255.0);
  return p;
}

std::vector<Point3> kmeanspp_seed(std::span<const Point3> points, std::size_t k, Rng& rng) {
  std::vector<Point3> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.uniform_index(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = kernels::squared_distance(points[i], centroids[0]);
  while (centroids.size() < k) {
    double total = 0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total <= 0) {
      pick = rng.uniform_index(points.size());
    } else {
      const double target = rng.uniform01() * total;
      double acc = 0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0) {
          pick = i;
          break;
        }
      }
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], kernels::squared_distance(points[i], centroids.back()));
  }
  return centroids;
}

double wcss_of(std::span<const Point3> points, std::span<const Point3> centroids,
               std::span<const std::size_t> labels) {
  double total = 0;
  for (std::size_t i = 0; i < points.size(); ++i) total += kernels::squared_distance(points[i], centroids[labels[i]]);
  return total;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Frame decode_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("not a binary PPM (expected magic P6)");
  PpmHeaderReader header(bytes);
  Frame f;
  f.width = header.next_number("width");
  f.height = header.next_number("height");
  const auto maxval = header.next_number("maxval");
  if (f.width == 0 || f.height == 0) throw FormatError("PPM has zero width or height");
  if (maxval != 255) throw FormatError("PPM maxval must be 255, got " + std::to_string(maxval));
  const auto offset = header.raster_offset();
  const auto need = f.width * f.height * 3;
  if (bytes.size() < offset || bytes.size() - offset < need)
    throw FormatError("PPM payload truncated: need " + std::to_string(need) + " bytes");
  f.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + offset),
                  reinterpret_cast<const std::uint8_t*>(bytes.data() + offset + need));
  return f;
}

std::string encode_ppm(const Frame& frame) {
  std::string out = "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
  return out;
}

Frame read_ppm(const fs::path& path) {
  try {
    return decode_ppm(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.filename().string() + ": " + e.what());
  }
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8, g = g8, b = b8;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx == 0 ? 0 : 255.0 * delta / mx;
  if (delta == 0) return out;
  double h;
  if (mx == r) {
    h = 60.0 * (g - b) / delta;
  } else if (mx == g) {
    h = 120.0 + 60.0 * (b - r) / delta;
  } else {
    h = 240.0 + 60.0 * (r - g) / delta;
  }
  if (h < 0) h += 360.0;
  out.h = h / 2.0;
  if (out.h >= 180.0) out.h -= 180.0;
  return out;
}

Point3 hsv_to_rgb(const Point3& hsv) {
  const double h = std::fmod(std::fmod(hsv[0] * 2.0, 360.0) + 360.0, 360.0);
  const double s = std::clamp(hsv[1] / 255.0, 0.0, 1.0);
  const double v = std::clamp(hsv[2], 0.0, 255.0);
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  return clamp_rgb({r + m, g + m, b + m});
}

double rgb_to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

Point3 rgb_to_lab(const Point3& rgb) {
  const double r = srgb_to_linear(rgb[0]), g = srgb_to_linear(rgb[1]), b = srgb_to_linear(rgb[2]);
  const Eigen::Vector3d xyz = rgb_to_xyz() * Eigen::Vector3d(r, g, b);
  const double x = xyz(0), y = xyz(1), z = xyz(2);
  const double fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Point3 lab_to_rgb(const Point3& lab) {
  const double fy = (lab[0] + 16.0) / 116.0;
  const double fx = fy + lab[1] / 500.0;
  const double fz = fy - lab[2] / 200.0;
  const double x = kXn * lab_f_inv(fx), y = kYn * lab_f_inv(fy), z = kZn * lab_f_inv(fz);
  static const Eigen::Matrix3d inverse = rgb_to_xyz().inverse();
  const Eigen::Vector3d rgb = inverse * Eigen::Vector3d(x, y, z);
  return clamp_rgb({linear_to_srgb(rgb(0)), linear_to_srgb(rgb(1)), linear_to_srgb(rgb(2))});
}

ColorModel parse_color_model(std::string_view name) {
  if (name == "rgb") return ColorModel::Rgb;
  if (name == "hsv") return ColorModel::Hsv;
  if (name == "lab") return ColorModel::Lab;
  throw ParameterError("unknown color model '" + std::string(name) + "' (expected rgb, hsv or lab)");
}

Point3 to_model(const Point3& rgb, ColorModel model) {
  switch (model) {
    case ColorModel::Rgb: return rgb;
    case ColorModel::Hsv: {
      const auto h = rgb_to_hsv(static_cast<std::uint8_t>(std::lround(rgb[0])),
                                static_cast<std::uint8_t>(std::lround(rgb[1])),
                                static_cast<std::uint8_t>(std::lround(rgb[2])));
      return {h.h, h.s, h.v};
    }
    case ColorModel::Lab: return rgb_to_lab(rgb);
  }
  return rgb;
}

Point3 from_model(const Point3& p, ColorModel model) {
  switch (model) {
    case ColorModel::Rgb: return clamp_rgb(p);
    case ColorModel::Hsv: return hsv_to_rgb(p);
    case ColorModel::Lab: return lab_to_rgb(p);
  }
  return p;
}

KMeansResult kmeans(std::span<const Point3> points, const KMeansOptions& options) {
  if (points.empty()) throw ParameterError("kmeans needs at least one point");
  if (options.k == 0) throw ParameterError("kmeans needs k >= 1");
  const auto assign = options.parallel ? kernels::omp::assign : kernels::serial::assign;

  KMeansResult res;
  res.k_requested = options.k;
  res.k_used = std::min(options.k, points.size());
  const std::size_t k = res.k_used;

  Rng rng(options.seed);
  res.centroids = kmeanspp_seed(points, k, rng);
  res.labels.assign(points.size(), kUnassigned);
  assign(points, res.centroids, res.labels);
  res.wcss_history.push_back(wcss_of(points, res.centroids, res.labels));

  std::vector<Point3> sums(k);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    std::fill(sums.begin(), sums.end(), Point3{0, 0, 0});
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& s = sums[res.labels[i]];
      for (int d = 0; d < 3; ++d) s[d] += points[i][d];
      ++counts[res.labels[i]];
    }
    std::vector<Point3> next(k);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int d = 0; d < 3; ++d) next[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    // Reseed empty clusters at the point farthest from its (updated) centroid.
    std::vector<bool> taken(points.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double far_d = -1;
      std::size_t far_i = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (taken[i] || counts[res.labels[i]] == 0) continue;
        const double d = kernels::squared_distance(points[i], next[res.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      next[c] = far_d > 0 ? points[far_i] : res.centroids[c];
      taken[far_i] = true;
    }
    double shift = 0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(kernels::squared_distance(next[c], res.centroids[c])));
    res.centroids = std::move(next);
    assign(points, res.centroids, res.labels);
    res.wcss_history.push_back(wcss_of(points, res.centroids, res.labels));
    res.iterations = it + 1;
    if (shift < options.tol) {
      res.converged = true;
      break;
    }
  }

  res.wcss = res.wcss_history.back();
  res.weights.assign(k, 0.0);
  for (auto l : res.labels) res.weights[l] += 1.0;
  for (auto& w : res.weights) w /= static_cast<double>(points.size());
  return res;
}

Palette merge_palette(const std::vector<Point3>& rgb_centroids, const std::vector<double>& weights, double radius) {
  std::vector<std::size_t> order(rgb_centroids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weights[a] > weights[b]; });
  Palette out;
  for (auto i : order) {
    if (weights[i] <= 0) continue;
    auto hit = std::find_if(out.begin(), out.end(), [&](const PaletteEntry& e) {
      return kernels::squared_distance(e.rgb, rgb_centroids[i]) <= radius * radius;
    });
    if (hit != out.end()) {
      hit->weight += weights[i];
    } else {
      out.push_back({rgb_centroids[i], weights[i]});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
  return out;
}

PaletteResult kmeans_palette(std::span<const Point3> rgb_pixels, const KMeansOptions& options, ColorModel model) {
  std::vector<Point3> converted;
  std::span<const Point3> points = rgb_pixels;
  if (model != ColorModel::Rgb) {
    converted.reserve(rgb_pixels.size());
    for (const auto& p : rgb_pixels) converted.push_back(to_model(p, model));
    points = converted;
  }
  PaletteResult out;
  out.clustering = kmeans(points, options);
  std::vector<Point3> rgb;
  for (const auto& c : out.clustering.centroids) rgb.push_back(from_model(c, model));
  out.palette = merge_palette(rgb, out.clustering.weights);
  return out;
}

std::vector<fs::path> frame_files(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

std::vector<std::uint8_t> subsample(const Frame& frame, std::size_t stride) {
  if (stride == 0) throw ParameterError("stride must be >= 1");
  std::vector<std::uint8_t> out;
  out.reserve(3 * ((frame.width + stride - 1) / stride) * ((frame.height + stride - 1) / stride));
  for (std::size_t y = 0; y < frame.height; y += stride) {
    for (std::size_t x = 0; x < frame.width; x += stride) {
      const auto* p = &frame.pixels[3 * (y * frame.width + x)];
      out.insert(out.end(), p, p + 3);
    }
  }
  return out;
}

ColorSummary summarize_frames(std::vector<Frame> frames, const SummaryOptions& options) {
  if (frames.empty()) throw EmptyVideoError("no frames to summarize");
  std::vector<std::vector<std::uint8_t>> sampled(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) sampled[f] = subsample(frames[f], options.stride);
  std::sort(sampled.begin(), sampled.end());  // canonical order, independent of file names

  const auto sums = options.parallel ? kernels::omp::frame_sums(sampled) : kernels::serial::frame_sums(sampled);
  kernels::PixelSums total;
  for (const auto& s : sums) {
    total.hue += s.hue;
    total.saturation += s.saturation;
    total.intensity += s.intensity;
    total.hue_sin += s.hue_sin;
    total.hue_cos += s.hue_cos;
    total.count += s.count;
  }

  ColorSummary out;
  out.frame_count = frames.size();
  out.pixel_count = total.count;
  const double n = static_cast<double>(total.count);
  out.mean_saturation = total.saturation / n;
  out.mean_intensity = total.intensity / n;
  if (options.hue_mean == HueMean::Arithmetic) {
    out.mean_hue = total.hue / n;
  } else {
    double deg = std::atan2(total.hue_sin, total.hue_cos) * 180.0 / std::numbers::pi;
    if (deg < 0) deg += 360.0;
    out.mean_hue = deg / 2.0;
    if (out.mean_hue >= 180.0) out.mean_hue -= 180.0;
  }

  std::vector<Point3> pooled;
  pooled.reserve(total.count);
  for (const auto& s : sampled) {
    for (std::size_t i = 0; i + 2 < s.size(); i += 3) pooled.push_back({double(s[i]), double(s[i + 1]), double(s[i + 2])});
  }
  auto km = options.kmeans;
  km.parallel = options.parallel;
  auto palette = kmeans_palette(pooled, km, options.model);
  out.palette = std::move(palette.palette);
  out.k_used = palette.clustering.k_used;
  out.k_reduced = palette.clustering.k_used < palette.clustering.k_requested;
  out.wcss = palette.clustering.wcss;
  return out;
}

ColorSummary video_color_summary(const fs::path& frames_dir, const SummaryOptions& options) {
  const auto files = frame_files(frames_dir);
  if (files.empty()) throw EmptyVideoError("no PPM frames in " + frames_dir.string());
  std::vector<Frame> frames(files.size());
  if (options.parallel) {
    std::vector<std::string> errors(files.size());
    const auto n = static_cast<std::ptrdiff_t>(files.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        frames[k] = read_ppm(files[k]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw FormatError(e);
    }
  } else {
    for (std::size_t i = 0; i < files.size(); ++i) frames[i] = read_ppm(files[i]);
  }
  return summarize_frames(std::move(frames), options);
}

std::string palette_csv_rows(const std::string& video_id, const Palette& palette) {
  std::string out;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const auto& e = palette[i];
    out += io::csv_line({video_id, std::to_string(i + 1), io::format_double(e.rgb[0]), io::format_double(e.rgb[1]),
                         io::format_double(e.rgb[2]), io::format_double(e.weight)});
  }
  return out;
}

std::string palette_svg(const std::vector<std::pair<std::string, Palette>>& palettes) {
  constexpr double kLabel = 120, kStrip = 400, kRow = 24, kGap = 6;
  const double height = kGap + static_cast<double>(palettes.size()) * (kRow + kGap);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + io::format_double(kLabel + kStrip + kGap) +
                    "\" height=\"" + io::format_double(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double y = kGap;
  for (const auto& [id, palette] : palettes) {
    out += "<text x=\"4\" y=\"" + io::format_double(y + kRow * 0.7) + "\">" + xml_escape(id) + "</text>\n";
    double x = kLabel;
    for (const auto& e : palette) {
      const double w = e.weight * kStrip;
      char fill[8];
      std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", static_cast<unsigned>(std::lround(e.rgb[0])),
                    static_cast<unsigned>(std::lround(e.rgb[1])), static_cast<unsigned>(std::lround(e.rgb[2])));
      out += "<rect x=\"" + io::format_fixed(x, 3) + "\" y=\"" + io::format_double(y) + "\" width=\"" +
             io::format_fixed(w, 3) + "\" height=\"" + io::format_double(kRow) + "\" fill=\"" + fill + "\"/>\n";
      x += w;
    }
    y += kRow + kGap;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ecovid::chroma
