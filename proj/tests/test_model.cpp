#include "doctest.h"

#include <Eigen/Geometry>

#include "orbitgrasp/error.hpp"
#include "orbitgrasp/model.hpp"
#include "support.hpp"

using namespace orbitgrasp;
using namespace orbitgrasp::testing;

namespace {

Eigen::Isometry3d iso(const Pose& p) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() = p.rotation.toRotationMatrix();
  T.translation() = p.position;
  return T;
}

// Independent forward kinematics with 4x4 homogeneous transforms.
std::vector<Eigen::Isometry3d> homogeneous_fk(const RobotModel& m, const SystemState& s) {
  std::vector<Eigen::Isometry3d> T{iso(s.base_pose)};
  const Eigen::VectorXd q = joint_positions(m, s);
  for (int b = 1; b < m.num_bodies(); ++b) {
    const Link& l = b <= kArmJoints ? m.arm[b - 1] : m.pendulum[b - 1 - kArmJoints];
    Eigen::Isometry3d J = Eigen::Isometry3d::Identity();
    J.linear() = Eigen::AngleAxisd(q(b - 1), l.joint.axis.normalized()).toRotationMatrix();
    T.push_back(T[l.joint.parent] * iso(l.joint.origin) * J);
  }
  T.push_back(T[kArmJoints] * iso(m.ee_offset));
  return T;
}

SystemState advance(const SystemState& s, double h) {
  SystemState out = s;
  out.base_pose.rotation = s.base_pose.rotation * Quat(Eigen::AngleAxisd(
                               h * s.nu0.angular.norm(), s.nu0.angular.normalized()));
  out.base_pose.position += h * (s.base_pose.rotation * s.nu0.linear);
  out.q += h * s.omega_q;
  return out;
}

}  // namespace

TEST_CASE("forward kinematics matches homogeneous transforms") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = random_robot(rng, true);
    const SystemState s = random_state(rng);
    const std::vector<Pose> poses = forward_kinematics(m, s);
    const auto T = homogeneous_fk(m, s);
    REQUIRE(poses.size() == T.size());
    for (size_t i = 0; i < T.size(); ++i) {
      CHECK((poses[i].R() - T[i].linear()).norm() < 1e-12);
      CHECK((poses[i].position - T[i].translation()).norm() < 1e-12);
    }
  }
}

TEST_CASE("extended Jacobian matches finite-differenced end-effector motion") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = random_robot(rng, false);
    const SystemState s = random_state(rng);
    const double h = 1e-6;
    const Pose e0 = end_effector_pose(m, s);
    const Pose ep = end_effector_pose(m, advance(s, h));
    const Pose em = end_effector_pose(m, advance(s, -h));
    const Mat3 R0 = e0.R();
    const Mat3 dR = (ep.R() - em.R()) / (2.0 * h);
    const Mat3 W = R0.transpose() * dR;
    const Vec3 w(W(2, 1), W(0, 2), W(1, 0));
    const Vec3 v = R0.transpose() * (ep.position - em.position) / (2.0 * h);

    const Vec6 twist = extended_jacobian(m, s) * control_velocity(s);
    CHECK((ang(twist) - w).norm() < 1e-7 * (1.0 + w.norm()));
    CHECK((lin(twist) - v).norm() < 1e-7 * (1.0 + v.norm()));
  }
}

TEST_CASE("quaternion error and attitude vector") {
  std::mt19937 rng(3);
  const Quat a = random_quat(rng), b = random_quat(rng);
  const Quat e = quat_error(a, b);
  CHECK((a * e).angularDistance(b) < 1e-12);
  CHECK(quat_error(a, a).vec().norm() < 1e-15);

  // For R = exp(theta k), the vector is sin(theta) k.
  const double theta = 0.7;
  const Vec3 k = Vec3(1, 2, -1).normalized();
  const Mat3 R = Eigen::AngleAxisd(theta, k).toRotationMatrix();
  CHECK((attitude_error_vec(R) - std::sin(theta) * k).norm() < 1e-14);
  CHECK_THROWS_AS(attitude_error_vec(2.0 * Mat3::Identity()), Error);
}

TEST_CASE("model validation") {
  std::mt19937 rng(5);
  RobotModel m = random_robot(rng, true);
  CHECK_NOTHROW(validate(m));

  SUBCASE("wrong arm length") {
    m.arm.pop_back();
    CHECK_THROWS_AS(validate(m), Error);
  }
  SUBCASE("non-positive link mass") {
    m.arm[2].body.mass = -1.0;
    CHECK_THROWS_AS(validate(m), Error);
  }
  SUBCASE("inertia violating the triangle inequality") {
    m.base.inertia = Vec3(1.0, 1.0, 5.0).asDiagonal();
    CHECK_THROWS_AS(validate(m), Error);
  }
  SUBCASE("branch parent out of order") {
    m.arm[3].joint.parent = 5;
    CHECK_THROWS_AS(validate(m), Error);
  }
}

TEST_CASE("velocity packing round trip") {
  std::mt19937 rng(9);
  const RobotModel m = random_robot(rng, true);
  const SystemState s = random_state(rng);
  SystemState t;
  set_velocity(m, t, velocity_vector(m, s));
  CHECK((velocity_vector(m, t) - velocity_vector(m, s)).norm() == 0.0);
  CHECK(velocity_vector(m, s).size() == kFullDofs);
  CHECK(control_velocity(s).head<3>() == s.nu0.angular);
}
