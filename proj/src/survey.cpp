#include "steel/survey.hpp"

#include <json.hpp>

#include <fstream>

namespace steel {

std::vector<Capture> load_capture_list(const std::filesystem::path& path, double mm_per_pixel) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open capture list");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw IoError(path.string() + ": expected a JSON array of captures");
  std::vector<Capture> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      Capture c;
      c.image_path = e.at("image_path").get<std::string>();
      if (c.image_path.is_relative()) c.image_path = path.parent_path() / c.image_path;
      c.pose.odom_mm = {e.at("odom_x_mm").get<double>(), e.at("odom_y_mm").get<double>()};
      c.pose.heading_rad = e.value("heading_rad", 0.0);
      c.pose.mm_per_pixel = mm_per_pixel;
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& ex) {
      throw IoError(path.string() + ": capture " + std::to_string(i) + ": " + ex.what());
    }
  }
  return out;
}

Eigen::Vector2d mosaic_to_world(const Mosaic& mosaic, const std::vector<CapturePose>& poses,
                                const Eigen::Vector2d& pixel) {
  return image_to_world(pixel - mosaic.placements.front().cast<double>(), poses.front());
}

SurveyResult full_survey(const std::vector<GrayImage>& images, const std::vector<CapturePose>& poses,
                         const InspectConfig& cfg, const BinaryMask* gt) {
  SurveyResult out;
  try {
    out.mosaic = stitch_sequence(images, poses, cfg.stitch);
  } catch (const Error& e) {
    throw StageError("stitch", e);
  }
  try {
    out.segmentation = segment_crack(out.mosaic.canvas, cfg.segmentation);
  } catch (const Error& e) {
    throw StageError("detect", e);
  }
  const BinaryMask& m = out.segmentation.mask;
  if (m.any()) {
    WorldBox box;
    bool first = true;
    for (Eigen::Index y = 0; y < m.rows(); ++y) {
      for (Eigen::Index x = 0; x < m.cols(); ++x) {
        if (!m(y, x)) continue;
        const Eigen::Vector2d w = mosaic_to_world(out.mosaic, poses, Eigen::Vector2d(double(x), double(y)));
        box.min_mm = first ? w : box.min_mm.cwiseMin(w);
        box.max_mm = first ? w : box.max_mm.cwiseMax(w);
        first = false;
      }
    }
    out.crack_box = box;
  }
  if (gt) {
    try {
      out.scores = scores(confusion(m, *gt));
    } catch (const Error& e) {
      throw StageError("eval", e);
    }
  }
  return out;
}

}  // namespace steel
