#include "steel/inspection_sim.hpp"

#include <algorithm>
#include <cmath>

namespace steel {

const char* to_string(Corner c) {
  switch (c) {
    case front_right: return "front-right";
    case front_left: return "front-left";
    case rear_right: return "rear-right";
    case rear_left: return "rear-left";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::moving: return "moving";
    case Mode::avoiding: return "avoiding";
    case Mode::stopped: return "stopped";
  }
  return "?";
}

const char* to_string(Motion m) {
  switch (m) {
    case Motion::forward: return "forward";
    case Motion::backward: return "backward";
    case Motion::spin_left: return "spin_left";
    case Motion::spin_right: return "spin_right";
    case Motion::halt: return "halt";
  }
  return "?";
}

void RobotSpec::validate() const {
  if (!(weight >= 0.0)) throw ConfigError("sim.weight", "must be >= 0");
  if (!(magnetic_force >= 0.0)) throw ConfigError("sim.magnetic_force", "must be >= 0");
  if (!(friction > 0.0 && friction <= 2.0)) throw ConfigError("sim.friction", "must lie in (0, 2]");
  if (!(com_height > 0.0)) throw ConfigError("sim.com_height", "must be > 0");
  if (!(wheelbase > 0.0)) throw ConfigError("sim.wheelbase", "must be > 0");
  if (!(track > 0.0)) throw ConfigError("sim.track", "must be > 0");
  const Eigen::Vector2d s = support();
  if (!(chassis.x() >= s.x() && chassis.y() >= s.y())) {
    throw ConfigError("sim.chassis", "must enclose the wheel support rectangle");
  }
}

Eigen::Vector2d RobotSpec::support() const {
  return {wheelbase + contact_patch.x(), track + contact_patch.y()};
}

double required_force(const RobotSpec& spec, double alpha) {
  if (spec.friction == 0.0) throw PreconditionError("required_force: friction must be nonzero");
  if (!(alpha >= 0.0 && alpha <= M_PI / 2 + 1e-12)) throw PreconditionError("required_force: alpha outside [0, pi/2]");
  const double P = spec.weight;
  const double sliding = P * std::sin(alpha) / spec.friction + P * std::cos(alpha);
  const double turnover = 2.0 * P * spec.com_height / spec.wheelbase;
  return std::max(sliding, turnover);
}

Stability check_stability(const RobotSpec& spec, double alpha) {
  const double margin = spec.magnetic_force - required_force(spec, alpha);
  return {margin > 0.0, margin};
}

bool min_contact_check(double width_mm, double height_mm) {
  return (width_mm >= 20.3 && height_mm >= 28.0) || (width_mm >= 28.0 && height_mm >= 20.3);
}

void SimWorld::validate() const {
  if (plates.empty()) throw ConfigError("world.plates", "at least one plate required");
  for (const Plate& p : plates) {
    if (!(p.x_max > p.x_min && p.y_max > p.y_min)) throw ConfigError("world.plates", "degenerate plate");
    if (!(p.alpha >= 0.0 && p.alpha <= M_PI / 2 + 1e-12)) throw ConfigError("world.plates", "alpha outside [0, pi/2]");
  }
}

bool SimWorld::on_surface(const Eigen::Vector2d& p) const { return plate_at(p) != nullptr; }

const Plate* SimWorld::plate_at(const Eigen::Vector2d& p) const {
  for (const Plate& plate : plates) {
    if (plate.contains(p)) return &plate;
  }
  return nullptr;
}

Eigen::Vector2d Pose2::to_world(const Eigen::Vector2d& local) const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {x + c * local.x() - s * local.y(), y + s * local.x() + c * local.y()};
}

void SimParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sim.dt", "must be > 0");
  if (!(speed > 0.0)) throw ConfigError("sim.speed", "must be > 0");
  if (!(ir_epsilon > 0.0)) throw ConfigError("ir_epsilon", "must be > 0");
  if (!(retreat > 0.0)) throw ConfigError("sim.retreat", "must be > 0");
  if (!(turn_arc > 0.0)) throw ConfigError("sim.turn_arc", "must be > 0");
  if (!(tick_length > 0.0)) throw ConfigError("sim.tick_length", "must be > 0");
  if (!(capture_interval > 0.0)) throw ConfigError("sim.capture_interval", "must be > 0");
}

int ticks(double travel, const SimParams& params) {
  return static_cast<int>(std::floor(travel / params.tick_length + 1e-9));
}

namespace {

std::array<Eigen::Vector2d, 4> rectangle_corners(const Eigen::Vector2d& size, const Pose2& pose) {
  const double hx = size.x() / 2.0;
  const double hy = size.y() / 2.0;
  return {pose.to_world({hx, -hy}), pose.to_world({hx, hy}), pose.to_world({-hx, -hy}), pose.to_world({-hx, hy})};
}

}  // namespace

std::array<Eigen::Vector2d, 4> sensor_positions(const RobotSpec& spec, const Pose2& pose) {
  return rectangle_corners(spec.chassis, pose);
}

std::array<Eigen::Vector2d, 4> support_corners(const RobotSpec& spec, const Pose2& pose) {
  return rectangle_corners(spec.support(), pose);
}

std::array<double, 4> read_ir(const SimWorld& world, const RobotSpec& spec, const RobotState& state, double epsilon) {
  const auto sensors = sensor_positions(spec, state.pose);
  std::array<double, 4> r{};
  for (int i = 0; i < 4; ++i) {
    r[i] = state.ir_calibration[i] + (world.on_surface(sensors[i]) ? 0.0 : 10.0 * epsilon);
  }
  return r;
}

std::vector<int> out_of_band(const RobotState& state, const std::array<double, 4>& readings, double epsilon) {
  std::vector<int> out;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(readings[i] - state.ir_calibration[i]) > epsilon) out.push_back(i);
  }
  return out;
}

ManeuverPlan maneuver_for(int sensor) {
  switch (sensor) {
    case front_right: return {Motion::backward, Motion::spin_left};
    case front_left: return {Motion::backward, Motion::spin_right};
    case rear_right: return {Motion::forward, Motion::spin_right};
    case rear_left: return {Motion::forward, Motion::spin_left};
    default: throw PreconditionError("maneuver_for: sensor index must lie in [0, 3]");
  }
}

std::vector<Motion> maneuver_sequence(int sensor) {
  const ManeuverPlan plan = maneuver_for(sensor);
  return {Motion::halt, plan.retreat, plan.turn, Motion::forward};
}

namespace {

void begin_phase(RobotState& state, Phase phase) {
  state.phase = phase;
  state.maneuver_start = state.wheel_travel;
}

double phase_travel(const RobotState& state) {
  double best = 0.0;
  for (int i = 0; i < 4; ++i) best = std::max(best, state.wheel_travel[i] - state.maneuver_start[i]);
  return best;
}

void start_maneuver(RobotState& state, int sensor) {
  state.mode = Mode::avoiding;
  state.maneuver_sensor = sensor;
  begin_phase(state, Phase::halt);
}

}  // namespace

Motion edge_avoidance_step(RobotState& state, const std::array<double, 4>& readings, const SimParams& params) {
  if (state.mode == Mode::stopped) return Motion::halt;
  const std::vector<int> out = out_of_band(state, readings, params.ir_epsilon);
  if (out.size() > 1) {
    state.mode = Mode::stopped;
    state.phase = Phase::none;
    return Motion::halt;
  }
  if (state.mode == Mode::moving) {
    if (out.empty()) return Motion::forward;
    start_maneuver(state, out.front());
    return Motion::halt;
  }

  // avoiding
  if (out.size() == 1 && (out.front() != state.maneuver_sensor || state.phase == Phase::turn)) {
    // Another corner tripped, or the same one tripped again while turning: start over.
    start_maneuver(state, out.front());
    return Motion::halt;
  }
  const ManeuverPlan plan = maneuver_for(state.maneuver_sensor);
  switch (state.phase) {
    case Phase::halt:
      begin_phase(state, Phase::retreat);
      [[fallthrough]];
    case Phase::retreat:
      if (phase_travel(state) + 1e-12 < params.retreat) return plan.retreat;
      begin_phase(state, Phase::turn);
      [[fallthrough]];
    case Phase::turn:
      if (phase_travel(state) + 1e-12 < params.turn_arc) return plan.turn;
      break;
    case Phase::none:
      break;
  }
  state.mode = Mode::moving;
  state.phase = Phase::none;
  state.maneuver_sensor = -1;
  return out.empty() ? Motion::forward : Motion::halt;
}

double apply_motion(RobotState& state, Motion motion, const RobotSpec& spec, const SimParams& params) {
  double v = 0.0;      // forward speed
  double omega = 0.0;  // yaw rate
  const double half_track = spec.track / 2.0;
  switch (motion) {
    case Motion::forward: v = params.speed; break;
    case Motion::backward: v = -params.speed; break;
    case Motion::spin_left: omega = params.speed / half_track; break;
    case Motion::spin_right: omega = -params.speed / half_track; break;
    case Motion::halt: break;
  }
  const double dt = params.dt;
  // exact unicycle integration for piecewise-constant commands
  Pose2& p = state.pose;
  if (omega == 0.0) {
    p.x += v * dt * std::cos(p.heading);
    p.y += v * dt * std::sin(p.heading);
  } else {
    const double h1 = p.heading + omega * dt;
    if (v != 0.0) {
      p.x += v / omega * (std::sin(h1) - std::sin(p.heading));
      p.y -= v / omega * (std::cos(h1) - std::cos(p.heading));
    }
    p.heading = std::remainder(h1, 2.0 * M_PI);
  }
  const double right = std::abs(v + omega * half_track) * dt;
  const double left = std::abs(v - omega * half_track) * dt;
  state.wheel_travel[front_right] += right;
  state.wheel_travel[rear_right] += right;
  state.wheel_travel[front_left] += left;
  state.wheel_travel[rear_left] += left;
  return v * dt;
}

CaptureScheduler::CaptureScheduler(double interval) : interval_(interval) {
  if (!(interval > 0.0)) throw PreconditionError("capture interval must be > 0");
}

int CaptureScheduler::advance(double travel) {
  if (travel > 0.0) accumulated_ += travel;
  // Relative slack absorbs summation error from many small steps.
  const double marks = std::floor(accumulated_ / interval_ + 1e-9);
  if (marks < 1.0) return 0;
  accumulated_ = std::max(0.0, accumulated_ - marks * interval_);
  return static_cast<int>(marks);
}

bool support_on_surface(const SimWorld& world, const RobotSpec& spec, const Pose2& pose) {
  const Eigen::Vector2d s = spec.support();
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      const Eigen::Vector2d local((i / 4.0 - 0.5) * s.x(), (j / 4.0 - 0.5) * s.y());
      if (!world.on_surface(pose.to_world(local))) return false;
    }
  }
  return true;
}

SimResult run_sim(const SimWorld& world, const RobotSpec& spec, const Pose2& start, int steps,
                  const SimParams& params, bool record_trajectory) {
  world.validate();
  spec.validate();
  params.validate();
  if (steps < 0) throw PreconditionError("run_sim: steps must be >= 0");
  const auto sensors = sensor_positions(spec, start);
  const Plate* plate = world.plate_at({start.x, start.y});
  for (const auto& s : sensors) {
    if (!plate || !plate->contains(s)) throw SimRefusal("run_sim: robot does not start fully on a plate");
  }
  const Stability st = check_stability(spec, plate->alpha);
  if (!st.ok) {
    throw SimRefusal("run_sim: adhesion condition fails at alpha " + std::to_string(plate->alpha) + " (margin " +
                     std::to_string(st.margin) + " kgf)");
  }

  SimResult out;
  RobotState state;
  state.pose = start;
  CaptureScheduler scheduler(params.capture_interval);
  for (int k = 0; k < steps; ++k) {
    const auto readings = read_ir(world, spec, state, params.ir_epsilon);
    const Mode before = state.mode;
    const Motion motion = edge_avoidance_step(state, readings, params);
    if (before != Mode::avoiding && state.mode == Mode::avoiding) ++out.maneuvers;
    if (state.mode == Mode::avoiding && motion == Motion::halt && state.phase == Phase::halt && before == Mode::avoiding) {
      ++out.maneuvers;
    }
    const double forward = apply_motion(state, motion, spec, params);
    const bool safe = support_on_surface(world, spec, state.pose);
    if (!safe) ++out.unsafe_steps;
    if (record_trajectory) out.trajectory.push_back({k, state.pose, state.mode, motion, readings, safe});
    if (state.mode == Mode::moving) {
      for (int c = scheduler.advance(forward); c > 0; --c) out.captures.push_back({k, state.pose, params.camera_footprint});
    }
    if (state.mode == Mode::stopped) {
      out.stopped = true;
      break;
    }
  }
  return out;
}

}  // namespace steel
