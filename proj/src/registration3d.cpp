#include "steel/registration3d.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <unordered_map>

namespace steel {

PointCloud subsample(const PointCloud& cloud, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw PreconditionError("subsample: ratio must lie in (0, 1]");
  const Eigen::Index n = cloud.size();
  if (n == 0) throw PreconditionError("subsample: empty cloud");
  const auto count = static_cast<Eigen::Index>(std::ceil(ratio * static_cast<double>(n) - 1e-12));
  PointCloud out;
  out.odometry = cloud.odometry;
  out.points.resize(3, count);
  for (Eigen::Index i = 0; i < count; ++i) out.points.col(i) = cloud.points.col(i * n / count);
  return out;
}

InitialAlignment initial_align(const PointCloud& src, const PointCloud& ref) {
  if (!src.odometry || !ref.odometry) return {Rigid3d::identity(), false};
  return {ref.odometry->inverse() * *src.odometry, true};
}

namespace {

struct CellKey {
  long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return static_cast<std::size_t>(k.x * 73856093L ^ k.y * 19349663L ^ k.z * 83492791L);
  }
};

void consider(const Eigen::Matrix3Xd& ref, const Eigen::Vector3d& p, int j, double max2, int& best, double& best2) {
  const double d2 = (ref.col(j) - p).squaredNorm();
  if (d2 > max2) return;
  if (best < 0 || d2 < best2 || (d2 == best2 && j < best)) {
    best = j;
    best2 = d2;
  }
}

}  // namespace

std::vector<Correspondence> match_brute_force(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref,
                                              double max_dist) {
  std::vector<Correspondence> out;
  const double max2 = max_dist * max_dist;
  for (Eigen::Index i = 0; i < src.cols(); ++i) {
    int best = -1;
    double best2 = 0.0;
    for (Eigen::Index j = 0; j < ref.cols(); ++j) consider(ref, src.col(i), static_cast<int>(j), max2, best, best2);
    if (best >= 0) out.push_back({static_cast<int>(i), best, std::sqrt(best2)});
  }
  return out;
}

std::vector<Correspondence> match(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref, double max_dist) {
  if (!(max_dist > 0.0)) throw PreconditionError("match: max_dist must be > 0");
  if (src.cols() == 0 || ref.cols() == 0) return {};
  const Eigen::Vector3d lo = ref.rowwise().minCoeff();
  const Eigen::Vector3d extent = ref.rowwise().maxCoeff() - lo;
  if (!std::isfinite(max_dist) || (extent / max_dist).maxCoeff() > 1e6) return match_brute_force(src, ref, max_dist);

  auto cell_of = [&](const Eigen::Vector3d& p) {
    const Eigen::Vector3d c = ((p - lo) / max_dist).array().floor();
    return CellKey{static_cast<long>(c.x()), static_cast<long>(c.y()), static_cast<long>(c.z())};
  };
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  for (Eigen::Index j = 0; j < ref.cols(); ++j) grid[cell_of(ref.col(j))].push_back(static_cast<int>(j));

  std::vector<Correspondence> out;
  const double max2 = max_dist * max_dist;
  for (Eigen::Index i = 0; i < src.cols(); ++i) {
    const Eigen::Vector3d p = src.col(i);
    const Eigen::Vector3d rel = (p - lo) / max_dist;
    if ((rel.array() < -2.0).any() || (rel - extent / max_dist).maxCoeff() > 2.0) continue;
    const CellKey c = cell_of(p);
    int best = -1;
    double best2 = 0.0;
    for (long dz = -1; dz <= 1; ++dz) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == grid.end()) continue;
          for (int j : it->second) consider(ref, p, j, max2, best, best2);
        }
      }
    }
    if (best >= 0) out.push_back({static_cast<int>(i), best, std::sqrt(best2)});
  }
  return out;
}

std::vector<Correspondence> reject(const std::vector<Correspondence>& pairs) {
  std::unordered_map<int, std::size_t> winner;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [it, inserted] = winner.try_emplace(pairs[k].ref, k);
    if (inserted) continue;
    const Correspondence& cur = pairs[it->second];
    if (pairs[k].distance < cur.distance || (pairs[k].distance == cur.distance && pairs[k].src < cur.src)) {
      it->second = k;
    }
  }
  std::vector<Correspondence> out;
  out.reserve(winner.size());
  for (const auto& [ref, k] : winner) out.push_back(pairs[k]);
  std::sort(out.begin(), out.end(), [](const Correspondence& a, const Correspondence& b) { return a.src < b.src; });
  return out;
}

Rigid3d solve_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref) {
  if (src.cols() != ref.cols()) throw PreconditionError("solve_rigid: point counts differ");
  if (src.cols() < 3) throw PreconditionError("solve_rigid: need at least 3 pairs");
  const Eigen::Vector3d cs = src.rowwise().mean();
  const Eigen::Vector3d cr = ref.rowwise().mean();
  const Eigen::Matrix3Xd s = src.colwise() - cs;
  const Eigen::Matrix3Xd r = ref.colwise() - cr;

  const Eigen::JacobiSVD<Eigen::Matrix3Xd> spread(s);
  const Eigen::Vector3d sv = spread.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-9 * sv(0)) throw PreconditionError("solve_rigid: degenerate (collinear) geometry");

  const Eigen::Matrix3d cov = r * s.transpose();
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) fix(2, 2) = -1.0;
  Rigid3d out;
  out.rotation = svd.matrixU() * fix * svd.matrixV().transpose();
  out.translation = cr - out.rotation * cs;
  return out;
}

Rigid3d solve_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref, const std::vector<Correspondence>& pairs) {
  Eigen::Matrix3Xd a(3, static_cast<Eigen::Index>(pairs.size()));
  Eigen::Matrix3Xd b(3, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    a.col(static_cast<Eigen::Index>(k)) = src.col(pairs[k].src);
    b.col(static_cast<Eigen::Index>(k)) = ref.col(pairs[k].ref);
  }
  return solve_rigid(a, b);
}

void IcpParams::validate() const {
  if (!(subsample_ratio > 0.0 && subsample_ratio <= 1.0)) throw ConfigError("icp.subsample_ratio", "must lie in (0, 1]");
  if (!(max_correspondence > 0.0)) throw ConfigError("icp.max_correspondence", "must be > 0");
  if (max_iterations < 0) throw ConfigError("icp.max_iterations", "must be >= 0");
  if (!(rmse_floor > 0.0)) throw ConfigError("icp.rmse_floor", "must be > 0");
  if (!(rmse_delta_floor > 0.0)) throw ConfigError("icp.rmse_delta_floor", "must be > 0");
  if (!(motion_epsilon > 0.0)) throw ConfigError("icp.motion_epsilon", "must be > 0");
  if (!(max_rotation > 0.0)) throw ConfigError("icp.max_rotation", "must be > 0");
  if (!(max_translation > 0.0)) throw ConfigError("icp.max_translation", "must be > 0");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::iteration_cap: return "iteration_cap";
    case StopReason::stalled: return "stalled";
    case StopReason::out_of_bound: return "out_of_bound";
  }
  return "unknown";
}

char stop_rule(StopReason r) {
  switch (r) {
    case StopReason::converged: return 'a';
    case StopReason::iteration_cap: return 'b';
    default: return 'c';
  }
}

namespace {

double pair_rmse(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref, const std::vector<Correspondence>& pairs,
                 const Rigid3d& t) {
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const Correspondence& c : pairs) acc += (t * Eigen::Vector3d(src.col(c.src)) - ref.col(c.ref)).squaredNorm();
  return std::sqrt(acc / static_cast<double>(pairs.size()));
}

}  // namespace

IcpResult icp(const PointCloud& src, const PointCloud& ref, const IcpParams& params) {
  const InitialAlignment init = initial_align(src, ref);
  IcpResult r = icp(src, ref, params, init.transform);
  r.prior_from_odometry = init.from_odometry;
  return r;
}

IcpResult icp(const PointCloud& src, const PointCloud& ref, const IcpParams& params, const Rigid3d& prior) {
  params.validate();
  if (src.size() == 0 || ref.size() == 0) throw PreconditionError("icp: empty cloud");
  const Eigen::Matrix3Xd sub = subsample(src, params.subsample_ratio).points;
  IcpResult out;
  out.transform = prior;

  if (params.max_iterations == 0) {
    const Eigen::Matrix3Xd moved = prior.apply(sub);
    out.rmse = pair_rmse(moved, ref.points, reject(match(moved, ref.points, params.max_correspondence)),
                         Rigid3d::identity());
    out.reason = StopReason::iteration_cap;
    return out;
  }

  for (int it = 1; it <= params.max_iterations; ++it) {
    const Eigen::Matrix3Xd moved = out.transform.apply(sub);
    const std::vector<Correspondence> pairs = reject(match(moved, ref.points, params.max_correspondence));
    if (pairs.empty() && it == 1) throw PreconditionError("icp: no correspondences within max distance");
    if (pairs.size() < 3) {
      out.reason = StopReason::stalled;
      return out;
    }
    const double before = pair_rmse(moved, ref.points, pairs, Rigid3d::identity());
    const Rigid3d delta = solve_rigid(moved, ref.points, pairs);
    const Rigid3d candidate = delta * out.transform;
    const Rigid3d correction = candidate * prior.inverse();
    if (correction.angle() > params.max_rotation || correction.translation.norm() > params.max_translation) {
      out.reason = StopReason::out_of_bound;
      return out;
    }
    out.transform = candidate;
    out.iterations = it;
    out.rmse = pair_rmse(moved, ref.points, pairs, delta);
    const double previous = out.rmse_history.empty() ? before : out.rmse_history.back();
    out.rmse_history.push_back(out.rmse);

    if (out.rmse <= params.rmse_floor && std::abs(out.rmse - previous) <= params.rmse_delta_floor) {
      out.reason = StopReason::converged;
      return out;
    }
    if ((delta.rotation - Eigen::Matrix3d::Identity()).norm() <= params.motion_epsilon &&
        delta.translation.norm() <= params.motion_epsilon) {
      out.reason = StopReason::stalled;
      return out;
    }
  }
  out.reason = StopReason::iteration_cap;
  return out;
}

SequenceRegistration register_sequence(const std::vector<PointCloud>& clouds, const IcpParams& params) {
  if (clouds.empty()) throw PreconditionError("register_sequence: no clouds");
  SequenceRegistration out;
  out.transforms.assign(clouds.size(), Rigid3d::identity());
  out.pairwise.resize(clouds.size());
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].size() == 0) throw RegistrationError(i, "empty cloud");
    total += clouds[i].size();
  }
  for (std::size_t i = 1; i < clouds.size(); ++i) {
    try {
      out.pairwise[i] = icp(clouds[i], clouds[i - 1], params);
    } catch (const Error& e) {
      throw RegistrationError(i, e.what());
    }
    out.transforms[i] = out.transforms[i - 1] * out.pairwise[i].transform;
  }
  out.merged.points.resize(3, total);
  out.merged.odometry = clouds[0].odometry;
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    out.merged.points.middleCols(at, clouds[i].size()) = out.transforms[i].apply(clouds[i].points);
    at += clouds[i].size();
  }
  return out;
}

}  // namespace steel
