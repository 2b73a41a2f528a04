#pragma once

// Kinematic tree of the chaser: floating base, 7-joint arm branch and an
// optional 2-joint pendulum branch (propellant slosh) hung off the base.
//
// Body numbering used everywhere:
//   0            base
//   1 .. 7       arm links
//   8 .. 9       pendulum bodies (when present)
// Velocity numbering: [base angular(3); base linear(3); arm(7); pendulum(2)],
// base twist expressed in the base body frame.

#include <vector>

#include <Eigen/Core>

#include "orbitgrasp/spatial.hpp"

namespace orbitgrasp {

inline constexpr int kArmJoints = 7;
inline constexpr int kPendulumJoints = 2;
inline constexpr int kControlDofs = 6 + kArmJoints;  // 13
inline constexpr int kFullDofs = kControlDofs + kPendulumJoints;  // 15

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Vec13 = Eigen::Matrix<double, 13, 1>;
using Mat13 = Eigen::Matrix<double, 13, 13>;
using Mat6x13 = Eigen::Matrix<double, 6, 13>;
using Mat13x6 = Eigen::Matrix<double, 13, 6>;

struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 position = Vec3::Zero();

  static Pose identity() { return {}; }
  Mat3 R() const { return rotation.toRotationMatrix(); }
  Pose operator*(const Pose& rhs) const {
    return {(rotation * rhs.rotation).normalized(), position + rotation * rhs.position};
  }
  Vec3 apply(const Vec3& p) const { return position + rotation * p; }
  Pose inverse() const {
    const Quat qi = rotation.conjugate();
    return {qi, -(qi * position)};
  }
};

struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Vec6 vector() const { return stack(angular, linear); }
  static Twist from_vector(const Vec6& v) { return {ang(v), lin(v)}; }
};

enum class JointKind { kRevolute };

// Revolute joint. The child frame is origin ∘ Rot(axis, q); `axis` is given in
// the joint frame (the parent-fixed frame reached through `origin`).
struct JointSpec {
  JointKind kind = JointKind::kRevolute;
  Vec3 axis = Vec3::UnitZ();
  int parent = 0;
  Pose origin;
  double damping = 0.0;  // viscous, N·m·s/rad; the joint sees -damping * rate
};

// Mass properties in the body frame; inertia about the centre of mass.
struct BodyInertia {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};

struct Link {
  JointSpec joint;
  BodyInertia body;
};

struct RobotModel {
  BodyInertia base;
  std::vector<Link> arm;       // exactly kArmJoints
  std::vector<Link> pendulum;  // kPendulumJoints, or empty for the rigid controller model
  Pose ee_offset;              // end-effector frame in the last arm link frame

  bool has_pendulum() const { return !pendulum.empty(); }
  int num_bodies() const { return 1 + static_cast<int>(arm.size() + pendulum.size()); }
  int nv() const { return 6 + static_cast<int>(arm.size() + pendulum.size()); }
};

// Throws Error when a structural or inertial invariant fails.
void validate(const RobotModel& model);

// Throws Error for a mass/inertia that cannot belong to a physical body.
// Massless bodies (zero mass and zero inertia) are accepted when allow_massless.
void validate(const BodyInertia& body, bool allow_massless = false);

struct SystemState {
  Pose base_pose;
  Vec7 q = Vec7::Zero();
  Eigen::Vector2d q_p = Eigen::Vector2d::Zero();
  Twist nu0;
  Vec7 omega_q = Vec7::Zero();
  Eigen::Vector2d qp_dot = Eigen::Vector2d::Zero();
};

// Joint angles of every non-base body in body order (arm, then pendulum if present).
Eigen::VectorXd joint_positions(const RobotModel& model, const SystemState& state);

// Generalized velocity of length model.nv().
Eigen::VectorXd velocity_vector(const RobotModel& model, const SystemState& state);
void set_velocity(const RobotModel& model, SystemState& state, const Eigen::VectorXd& v);

// The 13 controlled velocities [nu0; omega_q].
Vec13 control_velocity(const SystemState& state);

// Inertial poses of every body, followed by the end-effector frame.
std::vector<Pose> forward_kinematics(const RobotModel& model, const SystemState& state);

Pose end_effector_pose(const RobotModel& model, const SystemState& state);

// 6x13 map from [nu0; omega_q] to the end-effector twist, both components
// expressed in the end-effector frame (linear part is the velocity of the
// end-effector origin).
Mat6x13 extended_jacobian(const RobotModel& model, const SystemState& state);

// conj(eta_d) ⊗ eta, normalized.
Quat quat_error(const Quat& eta_d, const Quat& eta);

// ½ vee(R - R^T). Throws Error when R is not a rotation (tolerance 1e-9).
Vec3 attitude_error_vec(const Mat3& R);

}  // namespace orbitgrasp
