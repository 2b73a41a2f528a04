#include "orbitgrasp/sloshing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

void validate(const SloshingParams& params) {
  if (!(params.pendulum_length > 0.0) || !std::isfinite(params.pendulum_length)) {
    throw Error("pendulum length must be positive");
  }
  if (!(params.bob_mass >= 0.0) || !std::isfinite(params.bob_mass)) {
    throw Error("bob mass must be non-negative");
  }
  if (!(params.beta_damp >= 0.0) || !std::isfinite(params.beta_damp)) {
    throw Error("slosh damping must be non-negative");
  }
}

Eigen::Vector2d damping_torque(const SloshingParams& params, const Eigen::Vector2d& qp_dot) {
  return -params.beta_damp * qp_dot;
}

std::vector<Link> build_pendulum_branch(const SloshingParams& params) {
  validate(params);
  Link first;
  first.joint.axis = Vec3::UnitX();
  first.joint.parent = 0;
  first.joint.origin = params.attach_pose;
  first.joint.damping = params.beta_damp;

  Link bob;
  bob.joint.axis = Vec3::UnitY();
  bob.joint.parent = 1 + kArmJoints;
  bob.joint.damping = params.beta_damp;
  bob.body.mass = params.bob_mass;
  bob.body.com = Vec3(0.0, 0.0, -params.pendulum_length);
  return {first, bob};
}

Vec3 bob_position(const SloshingParams& params, const Eigen::Vector2d& q_p) {
  return axis_rotation(Vec3::UnitX(), q_p(0)) * axis_rotation(Vec3::UnitY(), q_p(1)) *
         Vec3(0.0, 0.0, -params.pendulum_length);
}

double pendulum_excursion(const Eigen::Vector2d& q_p) {
  return std::acos(std::clamp(std::cos(q_p(0)) * std::cos(q_p(1)), -1.0, 1.0));
}

bool pendulum_near_singular(const Eigen::Vector2d& q_p) {
  return std::abs(q_p(1)) > std::numbers::pi / 2.0 - kPendulumGimbalMargin;
}

}  // namespace orbitgrasp
