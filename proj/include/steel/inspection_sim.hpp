#pragma once

// Kinematic simulation of the magnetic climbing robot: adhesion check, IR edge sensing,
// the edge-avoidance state machine and the capture scheduler.
//
// Units: metres, radians, seconds, kgf. Robot frame: x forward, y left.
// Sensor and wheel order: front-right, front-left, rear-right, rear-left.

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "steel/errors.hpp"

namespace steel {

enum Corner : int { front_right = 0, front_left = 1, rear_right = 2, rear_left = 3 };

const char* to_string(Corner c);

struct RobotSpec {
  double weight = 6.0;          ///< P, kgf
  double magnetic_force = 16.0; ///< F_mag, kgf
  double friction = 0.5;        ///< mu
  double com_height = 0.05;     ///< d, m
  double wheelbase = 0.20;      ///< L, m
  double track = 0.18;          ///< lateral wheel spacing, m
  Eigen::Vector2d chassis{0.30, 0.24};        ///< IR sensors sit at these corners, m
  Eigen::Vector2d contact_patch{0.028, 0.0203};  ///< per-wheel contact, m

  void validate() const;
  /// Wheel support rectangle (wheel centres padded by half a contact patch).
  Eigen::Vector2d support() const;
};

/// max(P sin(a) / mu + P cos(a), 2 P d / L)
double required_force(const RobotSpec& spec, double alpha);

struct Stability {
  bool ok = false;
  double margin = 0.0;  ///< F_mag - required
};

Stability check_stability(const RobotSpec& spec, double alpha);

/// Both sides at least 20.3 mm x 28 mm in either orientation.
bool min_contact_check(double width_mm, double height_mm);

struct Plate {
  double x_min = 0.0, y_min = 0.0, x_max = 1.0, y_max = 1.0;
  double alpha = 0.0;  ///< inclination, rad

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
};

struct SimWorld {
  std::vector<Plate> plates;

  void validate() const;
  bool on_surface(const Eigen::Vector2d& p) const;
  /// First plate containing p.
  const Plate* plate_at(const Eigen::Vector2d& p) const;
};

struct Pose2 {
  double x = 0.0, y = 0.0, heading = 0.0;

  Eigen::Vector2d to_world(const Eigen::Vector2d& local) const;
};

enum class Mode { moving, avoiding, stopped };
enum class Phase { none, halt, retreat, turn };
enum class Motion { forward, backward, spin_left, spin_right, halt };

const char* to_string(Mode m);
const char* to_string(Motion m);

struct RobotState {
  Pose2 pose;
  std::array<double, 4> wheel_travel{};            ///< accumulated |distance| per wheel, m
  std::array<double, 4> ir_calibration{1.0, 1.0, 1.0, 1.0};
  Mode mode = Mode::moving;
  Phase phase = Phase::none;
  int maneuver_sensor = -1;
  std::array<double, 4> maneuver_start{};          ///< wheel_travel when the current phase began
};

struct SimParams {
  double dt = 0.01;              ///< s
  double speed = 0.1;            ///< m/s, wheel surface speed
  double ir_epsilon = 0.05;      ///< band half-width around r_cal
  double retreat = 0.05;         ///< m
  double turn_arc = 0.03;        ///< m of wheel travel
  double tick_length = 0.05 / 3.0;
  double capture_interval = 0.12;
  Eigen::Vector2d camera_footprint{0.18, 0.14};

  void validate() const;
};

/// Wheel odometer ticks.
int ticks(double travel, const SimParams& params);

std::array<Eigen::Vector2d, 4> sensor_positions(const RobotSpec& spec, const Pose2& pose);
std::array<Eigen::Vector2d, 4> support_corners(const RobotSpec& spec, const Pose2& pose);

/// r_cal over a plate, r_cal + 10 eps over void.
std::array<double, 4> read_ir(const SimWorld& world, const RobotSpec& spec, const RobotState& state, double epsilon);

/// Indices whose reading lies outside [r_cal - eps, r_cal + eps].
std::vector<int> out_of_band(const RobotState& state, const std::array<double, 4>& readings, double epsilon);

struct ManeuverPlan {
  Motion retreat = Motion::backward;
  Motion turn = Motion::spin_left;
};

/// Front corners retreat backwards, rear corners forwards; the spin turns the tripped corner
/// away from the edge.
ManeuverPlan maneuver_for(int sensor);

/// Scripted sequence for one tripped sensor: halt, retreat, turn, forward (resume).
std::vector<Motion> maneuver_sequence(int sensor);

/// One decision of the edge-avoidance machine. Updates mode / phase in `state` and returns the
/// motion to apply for this timestep.
Motion edge_avoidance_step(RobotState& state, const std::array<double, 4>& readings, const SimParams& params);

/// Moves the robot for one timestep and accumulates wheel odometry. Returns signed forward travel.
double apply_motion(RobotState& state, Motion motion, const RobotSpec& spec, const SimParams& params);

class CaptureScheduler {
public:
  explicit CaptureScheduler(double interval = 0.12);

  /// Adds forward travel (negative values ignored); returns how many interval marks were crossed.
  int advance(double travel);
  double pending() const { return accumulated_; }

private:
  double interval_;
  double accumulated_ = 0.0;
};

struct StepRecord {
  int step = 0;
  Pose2 pose;
  Mode mode = Mode::moving;
  Motion motion = Motion::halt;
  std::array<double, 4> readings{};
  bool support_on_surface = true;
};

struct CaptureRecord {
  int step = 0;
  Pose2 pose;
  Eigen::Vector2d footprint;
};

struct SimResult {
  std::vector<StepRecord> trajectory;
  std::vector<CaptureRecord> captures;
  int unsafe_steps = 0;     ///< steps whose support rectangle left the surface
  int maneuvers = 0;
  bool stopped = false;
};

class SimRefusal : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

/// Fixed-timestep loop: read_ir, edge_avoidance_step, apply_motion, capture check.
/// Refuses to start if adhesion fails on the start plate or the chassis is not fully on it.
/// Ends early once the robot stops and waits.
SimResult run_sim(const SimWorld& world, const RobotSpec& spec, const Pose2& start, int steps,
                  const SimParams& params = {}, bool record_trajectory = true);

/// Support rectangle fully inside the surface (sampled on a 5 x 5 grid including corners).
bool support_on_surface(const SimWorld& world, const RobotSpec& spec, const Pose2& pose);

}  // namespace steel
