#pragma once

// Fixed-step closed-loop simulation: recursive plant with slosh pendulum,
// hierarchical (or PI baseline) controller on the rigidized model, guidance
// setpoints. One RK4 step integrates plant, integrator state and command
// filter together, with the control law re-evaluated at every stage.

#include <array>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "orbitgrasp/control_inner.hpp"
#include "orbitgrasp/control_outer.hpp"
#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/scenario.hpp"

namespace orbitgrasp {

// Plant state layout: [base quat w,x,y,z (4); base position (3); q (7); q_p (2); v (15)].
inline constexpr int kPlantStateSize = 31;
// Closed loop appends the 13 integrator states and the 26 filter states.
inline constexpr int kLoopStateSize = kPlantStateSize + 13 + 26;

Eigen::VectorXd pack_plant(const SystemState& s);
SystemState unpack_plant(const Eigen::VectorXd& y);

// Time derivative of the plant state under generalized force u.
Eigen::VectorXd plant_rate(const Tree& plant_tree, const Eigen::VectorXd& y, const Vec13& u);

// Quaternion renormalization and abort checks applied after each step.
void finish_plant_step(Eigen::VectorXd& y, double t);

inline constexpr std::array<const char*, 13> kChannelNames = {
    "m_b_x", "m_b_y", "m_b_z", "f_b_x", "f_b_y", "f_b_z", "tau_1",
    "tau_2", "tau_3", "tau_4", "tau_5", "tau_6", "tau_7"};

// Everything the controller computed at one evaluation point.
struct LoopSample {
  Setpoint setpoint;
  Pose ee;
  Vec13 v_v;
  Vec13 u_raw;  // before the actuator clamp
  Vec13 u;      // applied
  double epsilon = 0.0;
  double p0_norm = 0.0;
};

class ClosedLoop {
 public:
  explicit ClosedLoop(const ScenarioConfig& cfg, KernelPolicy policy = KernelPolicy::kSerial);

  Eigen::VectorXd initial_state() const;
  Eigen::VectorXd derivative(double t, const Eigen::VectorXd& y, LoopSample* sample = nullptr) const;

  // One RK4 step from (t, y) given k1 = derivative(t, y). Applies the
  // post-step checks and the hybrid jump. Throws SimulationAbort.
  Eigen::VectorXd step(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& k1, double dt);

  int h() const { return hybrid_.h; }
  int h_flips() const { return h_flips_; }
  const GainSet& gains() const { return gains_; }
  const RobotModel& plant() const { return plant_; }
  const RobotModel& controller() const { return ctrl_; }
  const Pose& ee_initial() const { return ee_initial_; }

 private:
  const ScenarioConfig& cfg_;
  KernelPolicy policy_;
  RobotModel plant_;
  RobotModel ctrl_;
  Tree plant_tree_;
  Tree ctrl_tree_;
  OuterGains outer_;
  GainSet gains_;
  Pose ee_initial_;
  HybridState hybrid_;
  int h_flips_ = 0;
};

// Pose error of the end effector against the grasp frame: position error
// (inertial) and the vector part of the error quaternion, sign chosen so the
// scalar part is non-negative.
struct GraspError {
  Vec3 position;
  Vec3 attitude;
};
GraspError grasp_error(const Pose& ee, const Pose& grasp);

struct RunMetrics {
  bool captured = false;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_cause;
  double end_time = 0.0;
  long steps = 0;

  double capture_position_error = 0.0;
  double capture_attitude_error = 0.0;
  double final_position_error = 0.0;
  double final_attitude_error = 0.0;
  double max_tracking_position_error = 0.0;
  double max_tracking_attitude_error = 0.0;

  Eigen::Matrix<long, 13, 1> saturated_samples = Eigen::Matrix<long, 13, 1>::Zero();
  Vec13 max_abs_u = Vec13::Zero();
  int h_flips = 0;
  double pendulum_max_excursion = 0.0;

  long saturated_total() const { return saturated_samples.sum(); }
};

// Runs from t = 0 to t_grasp + hold. Telemetry rows go to `telemetry` when
// non-null. Aborts are caught and reported in the metrics.
RunMetrics run_scenario(const ScenarioConfig& cfg, std::ostream* telemetry = nullptr,
                        KernelPolicy policy = KernelPolicy::kSerial);

// Plant state reached at time t (rounded to the step grid).
SystemState state_at(const ScenarioConfig& cfg, double t);

std::string telemetry_header();
void write_metrics(std::ostream& out, const ScenarioConfig& cfg, const RunMetrics& m);

// 0 captured, 2 not captured.
int exit_code(const RunMetrics& m);

}  // namespace orbitgrasp
