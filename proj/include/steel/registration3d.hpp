#pragma once

// Point-to-point ICP with an odometry-seeded initial alignment.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "steel/errors.hpp"

namespace steel {

template <typename Scalar>
struct RigidTransform3 {
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform3 identity() { return {}; }
  static RigidTransform3 from(const Mat3& r, const Vec3& t) { return {r, t}; }
  static RigidTransform3 yaw(Scalar angle, const Vec3& t = Vec3::Zero()) {
    return {Eigen::AngleAxis<Scalar>(angle, Vec3::UnitZ()).toRotationMatrix(), t};
  }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  template <typename Derived>
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> apply(const Eigen::MatrixBase<Derived>& points) const {
    return (rotation * points).colwise() + translation;
  }

  /// (*this * other)(p) == (*this)(other(p))
  RigidTransform3 operator*(const RigidTransform3& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform3 inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }

  /// Rotation angle in radians, in [0, pi].
  Scalar angle() const {
    const Scalar c = (rotation.trace() - Scalar(1)) / Scalar(2);
    return std::acos(std::clamp(c, Scalar(-1), Scalar(1)));
  }

  bool is_valid(Scalar tol = Scalar(1e-9)) const {
    return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(rotation.determinant() - Scalar(1)) <= tol && translation.allFinite();
  }
};

using Rigid3d = RigidTransform3<double>;

struct PointCloud {
  Eigen::Matrix3Xd points;
  std::optional<Rigid3d> odometry;  ///< sensor pose in the world, when known

  Eigen::Index size() const { return points.cols(); }
};

/// ceil(ratio N) points at indices floor(i N / count).
PointCloud subsample(const PointCloud& cloud, double ratio);

struct InitialAlignment {
  Rigid3d transform;       ///< maps source-frame points into the reference frame
  bool from_odometry = false;
};

/// refPose^-1 * srcPose; identity (from_odometry == false) when either tag is missing.
InitialAlignment initial_align(const PointCloud& src, const PointCloud& ref);

struct Correspondence {
  int src = 0;
  int ref = 0;
  double distance = 0.0;
};

/// Exact nearest reference point per source point within max_dist (ties: lowest ref index).
/// Uses a uniform grid of cell size max_dist; brute force when the grid would be unbounded.
std::vector<Correspondence> match(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref, double max_dist);
std::vector<Correspondence> match_brute_force(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref,
                                              double max_dist);

/// Keeps only the closest pair for every reference point (ties: lowest source index).
/// Output is ordered by source index.
std::vector<Correspondence> reject(const std::vector<Correspondence>& pairs);

/// Least-squares R, t minimizing sum |R s + t - r|^2 (Kabsch with reflection fix).
Rigid3d solve_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref);
Rigid3d solve_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& ref,
                    const std::vector<Correspondence>& pairs);

struct IcpParams {
  double subsample_ratio = 1.0;
  double max_correspondence = 0.10;   ///< m
  int max_iterations = 50;
  double rmse_floor = 1e-3;           ///< m
  double rmse_delta_floor = 1e-6;     ///< m per iteration
  double motion_epsilon = 1e-9;       ///< rad and m
  double max_rotation = 0.8;          ///< rad, accumulated correction beyond the prior
  double max_translation = 0.5;       ///< m

  void validate() const;
};

enum class StopReason {
  converged,        ///< (a) error small and no longer changing
  iteration_cap,    ///< (b)
  stalled,          ///< (c) update below motion epsilon
  out_of_bound,     ///< (c) accumulated correction left the transform bound
};

const char* to_string(StopReason r);
/// "a", "b" or "c"
char stop_rule(StopReason r);

struct IcpResult {
  Rigid3d transform;
  double rmse = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::iteration_cap;
  std::vector<double> rmse_history;  ///< matched rmse after each update
  bool prior_from_odometry = false;
};

IcpResult icp(const PointCloud& src, const PointCloud& ref, const IcpParams& params);
IcpResult icp(const PointCloud& src, const PointCloud& ref, const IcpParams& params, const Rigid3d& prior);

class RegistrationError : public Error {
public:
  RegistrationError(std::size_t frame, const std::string& what)
      : Error("frame " + std::to_string(frame) + ": " + what), frame_(frame) {}
  std::size_t frame() const noexcept { return frame_; }

private:
  std::size_t frame_;
};

struct SequenceRegistration {
  PointCloud merged;
  std::vector<Rigid3d> transforms;  ///< frame i -> frame 0
  std::vector<IcpResult> pairwise;  ///< pairwise[i] aligns frame i to frame i - 1; pairwise[0] is empty
};

SequenceRegistration register_sequence(const std::vector<PointCloud>& clouds, const IcpParams& params);

}  // namespace steel
