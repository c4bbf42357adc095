#pragma once

#include <filesystem>

#include "steel/registration3d.hpp"

namespace steel {

/// ASCII "x y z" per line; blank lines and '#' comments skipped.
PointCloud load_xyz(const std::filesystem::path& path);
void save_xyz(const std::filesystem::path& path, const PointCloud& cloud);

/// ASCII vertex-only PLY. Extra vertex properties after x, y, z are ignored on read.
PointCloud load_ply(const std::filesystem::path& path);
void save_ply(const std::filesystem::path& path, const PointCloud& cloud);

/// Dispatches on extension (.ply, anything else as XYZ).
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace steel
