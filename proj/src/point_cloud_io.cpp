#include "steel/point_cloud_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace steel {
namespace {

PointCloud from_vector(const std::vector<double>& xyz) {
  PointCloud c;
  c.points = Eigen::Map<const Eigen::Matrix3Xd>(xyz.data(), 3, static_cast<Eigen::Index>(xyz.size() / 3));
  return c;
}

void check_finite(const PointCloud& c, const std::filesystem::path& path) {
  if (!c.points.allFinite()) throw IoError(path.string() + ": non-finite coordinate");
}

}  // namespace

PointCloud load_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::vector<double> xyz;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    std::istringstream ls(line);
    double x = 0, y = 0, z = 0;
    if (!(ls >> x >> y >> z)) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 'x y z'");
    xyz.insert(xyz.end(), {x, y, z});
  }
  PointCloud c = from_vector(xyz);
  check_finite(c, path);
  return c;
}

void save_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    out << cloud.points(0, i) << ' ' << cloud.points(1, i) << ' ' << cloud.points(2, i) << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

PointCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw IoError(path.string() + ": not a PLY file");
  long vertices = -1;
  int properties = 0;
  bool in_vertex = false;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw IoError(path.string() + ": only ASCII PLY is supported");
    } else if (word == "element") {
      std::string name;
      long count = 0;
      ls >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex) vertices = count;
    } else if (word == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      names.push_back(name);
      ++properties;
    } else if (word == "end_header") {
      break;
    }
  }
  if (vertices < 0 || properties < 3 || names[0] != "x" || names[1] != "y" || names[2] != "z") {
    throw IoError(path.string() + ": PLY needs a vertex element starting with x, y, z");
  }
  std::vector<double> xyz;
  xyz.reserve(static_cast<std::size_t>(vertices) * 3);
  for (long v = 0; v < vertices; ++v) {
    if (!std::getline(in, line)) throw IoError(path.string() + ": truncated vertex list");
    std::istringstream ls(line);
    double x = 0, y = 0, z = 0;
    if (!(ls >> x >> y >> z)) throw IoError(path.string() + ": bad vertex line " + std::to_string(v));
    xyz.insert(xyz.end(), {x, y, z});
  }
  PointCloud c = from_vector(xyz);
  check_finite(c, path);
  return c;
}

void save_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    out << cloud.points(0, i) << ' ' << cloud.points(1, i) << ' ' << cloud.points(2, i) << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError(path.string() + ": no such file");
  return path.extension() == ".ply" ? load_ply(path) : load_xyz(path);
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  if (path.extension() == ".ply") {
    save_ply(path, cloud);
  } else {
    save_xyz(path, cloud);
  }
}

}  // namespace steel
