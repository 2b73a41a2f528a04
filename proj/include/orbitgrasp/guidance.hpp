#pragma once

// End-effector setpoints for approaching a tumbling target whose centre of
// mass sits at the inertial origin.
//
// Timeline:
//   t < t_start          hold the initial end-effector pose
//   [t_start, t_point]   blend to the standoff pose (grasp attitude, backed off
//                        along the grasp z axis by `standoff`)
//   [t_point, t_grasp]   close the standoff distance to zero
//   t >= t_grasp         ride with the grasp frame
// Each blend uses the rest-to-rest quintic, so pose and twist are continuous.

#include "orbitgrasp/control_outer.hpp"
#include "orbitgrasp/model.hpp"

namespace orbitgrasp {

struct Timeline {
  double t_start = 1.0;
  double t_point = 20.0;
  double t_grasp = 30.0;
};

void validate(const Timeline& tl);

// State of the target at a reference time: attitude, constant body-frame
// rate, and the grasping frame fixed in the target body.
struct TargetState {
  Quat attitude = Quat::Identity();
  Vec3 omega_t = Vec3::Zero();
  Pose grasp_point;
};

struct QuinticSample {
  double y = 0.0;
  double yd = 0.0;
  double ydd = 0.0;
};

// Rest-to-rest quintic from (t0, y0) to (tf, y1); t is clamped into [t0, tf].
QuinticSample quintic(double t, double t0, double tf, double y0, double y1);

// Torque-free, constant-rate propagation by dt (exact quaternion exponential).
TargetState target_propagate(const TargetState& ts, double dt);

// Grasp frame at time t for a target that was in `ts` at t = 0.
struct GraspFrame {
  Pose pose;            // inertial
  Vec3 omega_body;      // grasp-frame angular velocity, grasp-frame coordinates
  Vec3 omega_inertial;
  Vec3 velocity;        // inertial velocity of the grasp-frame origin
};
GraspFrame grasp_frame_at(const TargetState& ts, double t);

struct GuidanceParams {
  Timeline timeline;
  double standoff = 0.3;  // m, along -z of the grasp frame
};

Setpoint ee_setpoint(const GuidanceParams& params, const TargetState& target,
                     const Pose& ee_initial, double t);

}  // namespace orbitgrasp
