#include "steel/imaging.hpp"

#include <array>
#include <cmath>
#include <queue>

namespace steel {

Kernel2 Kernel2::identity(int radius) {
  Kernel2 k;
  k.radius = radius;
  k.weights = RealImage::Zero(2 * radius + 1, 2 * radius + 1);
  k.weights(radius, radius) = 1.0;
  return k;
}

Kernel2 Kernel2::gaussian(double sigma, int radius) {
  if (!(sigma > 0.0) || radius < 0) throw PreconditionError("Kernel2::gaussian: sigma must be > 0");
  Kernel2 k;
  k.radius = radius;
  k.weights.resize(2 * radius + 1, 2 * radius + 1);
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      k.weights(y + radius, x + radius) = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    }
  }
  k.weights /= k.weights.sum();
  return k;
}

GrayImage median_filter(const GrayImage& image, const BinaryMask& region, int radius) {
  if (region.rows() != image.rows() || region.cols() != image.cols()) {
    throw PreconditionError("median_filter: region and image dimensions differ");
  }
  if (radius < 0) throw PreconditionError("median_filter: negative radius");
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  GrayImage out = image;
  std::vector<std::uint8_t> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!region(y, x)) continue;
      window.clear();
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          window.push_back(image(detail::clamp_index(y + dy, rows), detail::clamp_index(x + dx, cols)));
        }
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out(y, x) = *mid;
    }
  }
  return out;
}

LabelImage label_components(const BinaryMask& mask, int* count) {
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());
  LabelImage labels = LabelImage::Zero(rows, cols);
  int next = 0;
  std::queue<Pixel> queue;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!mask(y, x) || labels(y, x) != 0) continue;
      labels(y, x) = ++next;
      queue.push({x, y});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= cols || ny >= rows) continue;
            if (mask(ny, nx) && labels(ny, nx) == 0) {
              labels(ny, nx) = next;
              queue.push({nx, ny});
            }
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

int count_components(const BinaryMask& mask) {
  int n = 0;
  label_components(mask, &n);
  return n;
}

BinaryMask morphological_cleanup(const BinaryMask& mask, int min_area) {
  if (min_area < 0) throw PreconditionError("morphological_cleanup: min_area must be >= 0");
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());

  // A pixel survives the segment openings iff some 8-neighbour is also set.
  BinaryMask opened = BinaryMask::Constant(rows, cols, false);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!mask(y, x)) continue;
      bool paired = false;
      for (int dy = -1; dy <= 1 && !paired; ++dy) {
        for (int dx = -1; dx <= 1 && !paired; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          paired = nx >= 0 && ny >= 0 && nx < cols && ny < rows && mask(ny, nx);
        }
      }
      opened(y, x) = paired;
    }
  }

  int n = 0;
  const LabelImage labels = label_components(opened, &n);
  std::vector<int> area(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) ++area[static_cast<std::size_t>(labels.data()[i])];
  BinaryMask out = BinaryMask::Constant(rows, cols, false);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int l = labels.data()[i];
    out.data()[i] = l != 0 && area[static_cast<std::size_t>(l)] >= min_area;
  }
  return out;
}

GrayImage to_gray(const RealImage& image) {
  return image.round().max(0.0).min(255.0).cast<std::uint8_t>();
}

}  // namespace steel
