#include "steel/stitching.hpp"

#include <cmath>
#include <limits>

namespace steel {

Eigen::Isometry2d CapturePose::T_rw() const {
  Eigen::Isometry2d t = Eigen::Isometry2d::Identity();
  t.translate(odom_mm);
  t.rotate(Eigen::Rotation2Dd(heading_rad));
  return t;
}

Eigen::Isometry2d CapturePose::image_to_world_transform() const { return T_rw() * T_cr * T_ic; }

Eigen::Vector2d image_to_world(const Eigen::Vector2d& pixel, const CapturePose& pose) {
  return pose.image_to_world_transform() * (pose.mm_per_pixel * pixel);
}

Eigen::Vector2d world_to_image(const Eigen::Vector2d& world, const CapturePose& pose) {
  return (pose.image_to_world_transform().inverse() * world) / pose.mm_per_pixel;
}

double polygon_area(const Polygon2& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(twice) / 2.0;
}

namespace {

double orientation(const Polygon2& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return twice >= 0.0 ? 1.0 : -1.0;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip) {
  Polygon2 out = subject;
  const double sign = orientation(clip);
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Eigen::Vector2d a = clip[e];
    const Eigen::Vector2d b = clip[(e + 1) % clip.size()];
    auto inside = [&](const Eigen::Vector2d& p) { return sign * cross(b - a, p - a) >= 0.0; };
    Polygon2 input;
    input.swap(out);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + input.size() - 1) % input.size()];
      const bool cin = inside(cur);
      const bool pin = inside(prev);
      if (cin != pin) {
        const Eigen::Vector2d d = cur - prev;
        const double denom = cross(b - a, d);
        if (denom != 0.0) out.push_back(prev + d * (cross(a - prev, b - a) / -denom));
      }
      if (cin) out.push_back(cur);
    }
  }
  return out;
}

Polygon2 camera_footprint(const CapturePose& pose, const Eigen::Vector2d& footprint_mm) {
  const Eigen::Isometry2d cam = pose.T_rw() * pose.T_cr;
  const double hx = footprint_mm.x() / 2.0;
  const double hy = footprint_mm.y() / 2.0;
  return {cam * Eigen::Vector2d(-hx, -hy), cam * Eigen::Vector2d(hx, -hy), cam * Eigen::Vector2d(hx, hy),
          cam * Eigen::Vector2d(-hx, hy)};
}

Polygon2 image_footprint(const CapturePose& pose, int width, int height) {
  return {image_to_world({0.0, 0.0}, pose), image_to_world({double(width), 0.0}, pose),
          image_to_world({double(width), double(height)}, pose), image_to_world({0.0, double(height)}, pose)};
}

double overlap_fraction(const Polygon2& a, const Polygon2& b) {
  const double area = polygon_area(a);
  if (area <= 0.0) return 0.0;
  const Polygon2 common = clip_convex(a, b);
  return common.size() < 3 ? 0.0 : polygon_area(common) / area;
}

double check_overlap(const CapturePose& a, const CapturePose& b, const Eigen::Vector2d& footprint_mm) {
  return overlap_fraction(camera_footprint(a, footprint_mm), camera_footprint(b, footprint_mm));
}

std::optional<double> ncc_at(const GrayImage& a, const GrayImage& b, const Eigen::Vector2i& d) {
  const int x0 = std::max(0, d.x());
  const int y0 = std::max(0, d.y());
  const int x1 = std::min(static_cast<int>(a.cols()), d.x() + static_cast<int>(b.cols()));
  const int y1 = std::min(static_cast<int>(a.rows()), d.y() + static_cast<int>(b.rows()));
  const long w = x1 - x0;
  const long h = y1 - y0;
  if (w <= 0 || h <= 0) return std::nullopt;
  const double area = static_cast<double>(w * h);
  if (area < 16.0 || area < 0.1 * static_cast<double>(b.size())) return std::nullopt;
  const Eigen::ArrayXXd pa = a.block(y0, x0, h, w).cast<double>();
  const Eigen::ArrayXXd pb = b.block(y0 - d.y(), x0 - d.x(), h, w).cast<double>();
  const Eigen::ArrayXXd za = pa - pa.mean();
  const Eigen::ArrayXXd zb = pb - pb.mean();
  const double denom = std::sqrt(za.square().sum() * zb.square().sum());
  if (!(denom > 0.0)) return std::nullopt;
  return (za * zb).sum() / denom;
}

OffsetEstimate estimate_offset(const GrayImage& a, const GrayImage& b, const Eigen::Vector2i& prior, int radius) {
  if (radius < 0) throw PreconditionError("estimate_offset: radius must be >= 0");
  OffsetEstimate best;
  best.displacement = prior;
  bool found = false;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const Eigen::Vector2i d = prior + Eigen::Vector2i(dx, dy);
      const std::optional<double> s = ncc_at(a, b, d);
      if (s && (!found || *s > best.score)) {
        best = {d, *s};
        found = true;
      }
    }
  }
  if (!found || best.score < kMinOffsetScore) throw LowConfidenceError(best);
  return best;
}

void fill_gaps(Mosaic& mosaic) {
  const BinaryMask holes = mosaic.coverage == 0;
  int count = 0;
  const LabelImage labels = label_components(holes, &count);
  if (count == 0) return;
  std::vector<bool> touches(static_cast<std::size_t>(count) + 1, false);
  const Eigen::Index rows = labels.rows();
  const Eigen::Index cols = labels.cols();
  for (Eigen::Index x = 0; x < cols; ++x) {
    touches[static_cast<std::size_t>(labels(0, x))] = true;
    touches[static_cast<std::size_t>(labels(rows - 1, x))] = true;
  }
  for (Eigen::Index y = 0; y < rows; ++y) {
    touches[static_cast<std::size_t>(labels(y, 0))] = true;
    touches[static_cast<std::size_t>(labels(y, cols - 1))] = true;
  }
  BinaryMask interior(rows, cols);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int l = labels.data()[i];
    interior.data()[i] = l != 0 && !touches[static_cast<std::size_t>(l)];
  }
  if (!interior.any()) return;
  mosaic.canvas = median_filter(mosaic.canvas, interior, 1);
}

void StitchParams::validate() const {
  if (!(tau > 1.0)) throw ConfigError("tau", "must be > 1");
  if (search_radius < 0) throw ConfigError("search_radius", "must be >= 0");
  if (!(min_overlap >= 0.0 && min_overlap <= 1.0)) throw ConfigError("min_overlap", "must lie in [0, 1]");
}

Mosaic stitch_sequence(const std::vector<GrayImage>& images, const std::vector<CapturePose>& poses,
                       const StitchParams& params) {
  params.validate();
  if (images.empty()) throw PreconditionError("stitch_sequence: no images");
  if (images.size() != poses.size()) throw PreconditionError("stitch_sequence: images and poses differ in count");
  const std::size_t n = images.size();

  for (std::size_t i = 1; i < n; ++i) {
    const double f = overlap_fraction(
        image_footprint(poses[i - 1], static_cast<int>(images[i - 1].cols()), static_cast<int>(images[i - 1].rows())),
        image_footprint(poses[i], static_cast<int>(images[i].cols()), static_cast<int>(images[i].rows())));
    if (f < params.min_overlap) {
      throw PreconditionError("captures " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap " +
                              std::to_string(f) + ", below the floor " + std::to_string(params.min_overlap));
    }
  }

  Mosaic m;
  m.placements.assign(n, Eigen::Vector2i::Zero());
  m.scores.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < n; ++i) {
    const Eigen::Vector2d prior_px = world_to_image(image_to_world({0.0, 0.0}, poses[i]), poses[i - 1]);
    const Eigen::Vector2i prior(static_cast<int>(std::lround(prior_px.x())), static_cast<int>(std::lround(prior_px.y())));
    Eigen::Vector2i d = prior;
    try {
      const OffsetEstimate e = estimate_offset(images[i - 1], images[i], prior, params.search_radius);
      d = e.displacement;
      m.scores[i] = e.score;
    } catch (const LowConfidenceError&) {
      // keep the odometry prior
    }
    m.placements[i] = m.placements[i - 1] + d;
  }

  Eigen::Vector2i lo = m.placements[0];
  Eigen::Vector2i hi = lo;
  for (std::size_t i = 0; i < n; ++i) {
    lo = lo.cwiseMin(m.placements[i]);
    hi = hi.cwiseMax(m.placements[i] + Eigen::Vector2i(images[i].cols(), images[i].rows()));
  }
  for (auto& p : m.placements) p -= lo;
  const Eigen::Vector2i size = hi - lo;
  m.canvas = GrayImage::Zero(size.y(), size.x());
  m.coverage = Raster<int>::Zero(size.y(), size.x());
  m.origin_mm = image_to_world(lo.cast<double>(), poses[0]);
  m.exposure_offsets.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const GrayImage& img = images[i];
    const Eigen::Vector2i at = m.placements[i];
    auto canvas = m.canvas.block(at.y(), at.x(), img.rows(), img.cols());
    auto cover = m.coverage.block(at.y(), at.x(), img.rows(), img.cols());
    double offset = 0.0;
    if (params.compensate_exposure && i > 0) {
      const auto covered = (cover > 0).cast<double>();
      const double k = covered.sum();
      if (k > 0.0) offset = (covered * (canvas.cast<double>() - img.cast<double>())).sum() / k;
    }
    m.exposure_offsets[i] = offset;
    for (Eigen::Index y = 0; y < img.rows(); ++y) {
      for (Eigen::Index x = 0; x < img.cols(); ++x) {
        const auto incoming =
            static_cast<std::uint8_t>(std::clamp(std::lround(img(y, x) + offset), 0L, 255L));
        canvas(y, x) = cover(y, x) == 0 ? incoming : blend(canvas(y, x), incoming, params.tau);
        ++cover(y, x);
      }
    }
  }
  fill_gaps(m);

  // Refined poses: move each capture so its pixel origin lands where the mosaic put it.
  m.refined_poses = poses;
  for (std::size_t i = 1; i < n; ++i) {
    const Eigen::Vector2d want = image_to_world((m.placements[i] - m.placements[0]).cast<double>(), poses[0]);
    const Eigen::Vector2d have = image_to_world({0.0, 0.0}, poses[i]);
    m.refined_poses[i].odom_mm += want - have;
  }
  return m;
}

}  // namespace steel
