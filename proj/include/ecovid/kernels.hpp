#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both produce bit-identical output because each parallel
// iteration writes only its own slot and all floating-point reductions run
// sequentially in a fixed order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecovid/chroma.hpp"

namespace ecovid::kernels {

/// Per-frame colour sums over a packed RGB byte buffer.
struct PixelSums {
  double hue = 0;
  double saturation = 0;
  double intensity = 0;
  double hue_sin = 0;  // for the circular hue mean
  double hue_cos = 0;
  std::size_t count = 0;
};

PixelSums pixel_sums(std::span<const std::uint8_t> rgb);

namespace serial {
std::vector<PixelSums> frame_sums(std::span<const std::vector<std::uint8_t>> frames);
/// Assigns each point to its nearest centroid. A point keeps its current
/// label when that centroid is among the nearest; otherwise the lowest index
/// wins. Pass labels filled with SIZE_MAX for a fresh assignment.
/// Returns the number of labels that changed.
std::size_t assign(std::span<const chroma::Point3> points, std::span<const chroma::Point3> centroids,
                   std::span<std::size_t> labels);
}  // namespace serial

namespace omp {
std::vector<PixelSums> frame_sums(std::span<const std::vector<std::uint8_t>> frames);
std::size_t assign(std::span<const chroma::Point3> points, std::span<const chroma::Point3> centroids,
                   std::span<std::size_t> labels);
}  // namespace omp

inline double squared_distance(const chroma::Point3& a, const chroma::Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace ecovid::kernels
