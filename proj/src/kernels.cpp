#include "ecovid/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ecovid::kernels {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

std::size_t nearest(const chroma::Point3& p, std::span<const chroma::Point3> centroids, std::size_t current) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (current != kUnassigned && current != best && squared_distance(p, centroids[current]) == best_d)
    return current;
  return best;
}

}  // namespace

PixelSums pixel_sums(std::span<const std::uint8_t> rgb) {
  PixelSums s;
  constexpr double kRadPerUnit = std::numbers::pi / 90.0;  // 8-bit hue unit = 2 degrees
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    const auto hsv = chroma::rgb_to_hsv(rgb[i], rgb[i + 1], rgb[i + 2]);
    s.hue += hsv.h;
    s.saturation += hsv.s;
    s.intensity += chroma::rgb_to_gray(rgb[i], rgb[i + 1], rgb[i + 2]);
    s.hue_sin += std::sin(hsv.h * kRadPerUnit);
    s.hue_cos += std::cos(hsv.h * kRadPerUnit);
    ++s.count;
  }
  return s;
}

namespace serial {

std::vector<PixelSums> frame_sums(std::span<const std::vector<std::uint8_t>> frames) {
  std::vector<PixelSums> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) out[f] = pixel_sums(frames[f]);
  return out;
}

std::size_t assign(std::span<const chroma::Point3> points, std::span<const chroma::Point3> centroids,
                   std::span<std::size_t> labels) {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto next = nearest(points[i], centroids, labels[i]);
    if (next != labels[i]) ++changed;
    labels[i] = next;
  }
  return changed;
}

}  // namespace serial

namespace omp {

std::vector<PixelSums> frame_sums(std::span<const std::vector<std::uint8_t>> frames) {
  std::vector<PixelSums> out(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < n; ++f) out[static_cast<std::size_t>(f)] = pixel_sums(frames[static_cast<std::size_t>(f)]);
  return out;
}

std::size_t assign(std::span<const chroma::Point3> points, std::span<const chroma::Point3> centroids,
                   std::span<std::size_t> labels) {
  std::size_t changed = 0;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) reduction(+ : changed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto next = nearest(points[k], centroids, labels[k]);
    if (next != labels[k]) ++changed;
    labels[k] = next;
  }
  return changed;
}

}  // namespace omp

}  // namespace ecovid::kernels
