#pragma once

// Lateral propellant slosh as a spherical pendulum realised by two revolute
// joints (tank x, then y) with a massless intermediate body and a point-mass
// bob hanging `length` below the tank frame origin (along tank -z).

#include <vector>

#include <Eigen/Core>

#include "orbitgrasp/model.hpp"

namespace orbitgrasp {

inline constexpr double kDefaultSloshDamping = 0.0131;  // kg·m²/s

struct SloshingParams {
  double pendulum_length = 0.3;
  double bob_mass = 0.0;
  Pose attach_pose;  // tank frame in the base frame
  double beta_damp = kDefaultSloshDamping;
};

void validate(const SloshingParams& params);

// -beta * qp_dot.
Eigen::Vector2d damping_torque(const SloshingParams& params, const Eigen::Vector2d& qp_dot);

std::vector<Link> build_pendulum_branch(const SloshingParams& params);

// Bob position in the tank frame for the given pendulum angles.
Vec3 bob_position(const SloshingParams& params, const Eigen::Vector2d& q_p);

// Angle between the pendulum and its rest direction.
double pendulum_excursion(const Eigen::Vector2d& q_p);

// The two-joint realisation is singular at |theta2| = pi/2; simulation stops
// beyond this bound.
inline constexpr double kPendulumGimbalMargin = 0.01;
bool pendulum_near_singular(const Eigen::Vector2d& q_p);

}  // namespace orbitgrasp
