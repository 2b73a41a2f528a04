#pragma once

#include <random>
#include <string>

#include "orbitgrasp/model.hpp"
#include "orbitgrasp/sloshing.hpp"

namespace orbitgrasp::testing {

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937& rng, double scale = 1.0) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
              uniform(rng, -scale, scale));
}

inline Quat random_quat(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

// Physically valid inertia about the centre of mass: principal moments from
// random box dimensions, rotated.
inline Mat3 random_inertia(std::mt19937& rng, double mass) {
  const double a = uniform(rng, 0.1, 0.6), b = uniform(rng, 0.1, 0.6), c = uniform(rng, 0.1, 0.6);
  const Vec3 d = mass / 12.0 * Vec3(b * b + c * c, a * a + c * c, a * a + b * b);
  const Mat3 R = random_quat(rng).toRotationMatrix();
  return R * d.asDiagonal() * R.transpose();
}

inline BodyInertia random_body(std::mt19937& rng, double mass_lo, double mass_hi) {
  BodyInertia b;
  b.mass = uniform(rng, mass_lo, mass_hi);
  b.com = random_vec(rng, 0.2);
  b.inertia = random_inertia(rng, b.mass);
  return b;
}

inline RobotModel random_robot(std::mt19937& rng, bool pendulum, double bob_mass = 15.0) {
  RobotModel m;
  m.base = random_body(rng, 200.0, 600.0);
  for (int i = 0; i < kArmJoints; ++i) {
    Link l;
    l.joint.axis = random_vec(rng).normalized();
    l.joint.parent = i;
    l.joint.origin = {random_quat(rng), random_vec(rng, 0.4)};
    l.body = random_body(rng, 1.0, 12.0);
    m.arm.push_back(l);
  }
  m.ee_offset = {random_quat(rng), random_vec(rng, 0.2)};
  if (pendulum) {
    SloshingParams sp;
    sp.pendulum_length = uniform(rng, 0.2, 0.5);
    sp.bob_mass = bob_mass;
    sp.attach_pose = {random_quat(rng), random_vec(rng, 0.3)};
    m.pendulum = build_pendulum_branch(sp);
  }
  return m;
}

inline SystemState random_state(std::mt19937& rng, double speed = 1.0) {
  SystemState s;
  s.base_pose = {random_quat(rng), random_vec(rng, 3.0)};
  for (int i = 0; i < kArmJoints; ++i) {
    s.q(i) = uniform(rng, -2.5, 2.5);
    s.omega_q(i) = uniform(rng, -speed, speed);
  }
  s.q_p = Eigen::Vector2d(uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8));
  s.qp_dot = Eigen::Vector2d(uniform(rng, -speed, speed), uniform(rng, -speed, speed));
  s.nu0 = {random_vec(rng, 0.3 * speed), random_vec(rng, speed)};
  return s;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(ORBITGRASP_SCENARIO_DIR) + "/" + name;
}

}  // namespace orbitgrasp::testing
