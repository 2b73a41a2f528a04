#include "orbitgrasp/model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

void validate(const BodyInertia& body, bool allow_massless) {
  if (!std::isfinite(body.mass) || !body.com.allFinite() || !body.inertia.allFinite()) {
    throw Error("body inertia has non-finite entries");
  }
  if ((body.inertia - body.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("inertia tensor is not symmetric");
  }
  if (allow_massless && body.mass == 0.0) {
    if (!body.inertia.isZero()) throw Error("massless body carries rotational inertia");
    return;
  }
  if (allow_massless && body.mass > 0.0 && body.inertia.isZero()) return;  // point mass
  if (!(body.mass > 0.0)) throw Error("body mass must be positive");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(body.inertia, Eigen::EigenvaluesOnly);
  const Vec3 p = eig.eigenvalues();
  if (!(p.minCoeff() > 0.0)) throw Error("inertia tensor is not positive definite");
  const double tol = 1e-12 * p.maxCoeff();
  if (p(0) + p(1) < p(2) - tol || p(0) + p(2) < p(1) - tol || p(1) + p(2) < p(0) - tol) {
    throw Error("principal moments violate the triangle inequality");
  }
}

void validate(const RobotModel& model) {
  validate(model.base);
  if (static_cast<int>(model.arm.size()) != kArmJoints) {
    throw Error("arm must have exactly 7 joints, got " + std::to_string(model.arm.size()));
  }
  if (!model.pendulum.empty() && static_cast<int>(model.pendulum.size()) != kPendulumJoints) {
    throw Error("pendulum branch must have exactly 2 joints");
  }
  auto check_link = [](const Link& link, int body, bool massless_ok) {
    const std::string where = "body " + std::to_string(body) + ": ";
    if (link.joint.parent < 0 || link.joint.parent >= body) {
      throw Error(where + "parent index must precede the child");
    }
    if (!link.joint.axis.allFinite() || std::abs(link.joint.axis.norm() - 1.0) > 1e-9) {
      throw Error(where + "joint axis must be a unit vector");
    }
    if (std::abs(link.joint.origin.rotation.norm() - 1.0) > 1e-9) {
      throw Error(where + "joint origin rotation must be a unit quaternion");
    }
    try {
      validate(link.body, massless_ok);
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
  };
  for (int i = 0; i < kArmJoints; ++i) {
    const int expected_parent = i;  // serial chain off the base
    if (model.arm[i].joint.parent != expected_parent) {
      throw Error("arm joint " + std::to_string(i + 1) + " must attach to body " +
                  std::to_string(expected_parent));
    }
    check_link(model.arm[i], i + 1, false);
  }
  if (model.has_pendulum()) {
    if (model.pendulum[0].joint.parent != 0 || model.pendulum[1].joint.parent != 1 + kArmJoints) {
      throw Error("pendulum branch must hang off the base as a two-joint chain");
    }
    check_link(model.pendulum[0], 1 + kArmJoints, true);
    check_link(model.pendulum[1], 2 + kArmJoints, true);
    if (model.pendulum[0].body.mass != 0.0) {
      throw Error("pendulum intermediate body must be massless");
    }
  }
}

Eigen::VectorXd joint_positions(const RobotModel& model, const SystemState& state) {
  Eigen::VectorXd q(model.nv() - 6);
  q.head<kArmJoints>() = state.q;
  if (model.has_pendulum()) q.tail<kPendulumJoints>() = state.q_p;
  return q;
}

Eigen::VectorXd velocity_vector(const RobotModel& model, const SystemState& state) {
  Eigen::VectorXd v(model.nv());
  v.head<3>() = state.nu0.angular;
  v.segment<3>(3) = state.nu0.linear;
  v.segment<kArmJoints>(6) = state.omega_q;
  if (model.has_pendulum()) v.tail<kPendulumJoints>() = state.qp_dot;
  return v;
}

void set_velocity(const RobotModel& model, SystemState& state, const Eigen::VectorXd& v) {
  state.nu0.angular = v.head<3>();
  state.nu0.linear = v.segment<3>(3);
  state.omega_q = v.segment<kArmJoints>(6);
  if (model.has_pendulum()) state.qp_dot = v.tail<kPendulumJoints>();
}

Vec13 control_velocity(const SystemState& state) {
  Vec13 v;
  v << state.nu0.angular, state.nu0.linear, state.omega_q;
  return v;
}

std::vector<Pose> forward_kinematics(const RobotModel& model, const SystemState& state) {
  const int n = model.num_bodies();
  std::vector<Pose> poses(n + 1);
  poses[0] = state.base_pose;
  const Eigen::VectorXd q = joint_positions(model, state);
  for (int b = 1; b < n; ++b) {
    const Link& link = b <= kArmJoints ? model.arm[b - 1] : model.pendulum[b - 1 - kArmJoints];
    const Pose joint{Quat(Eigen::AngleAxisd(q(b - 1), link.joint.axis)), Vec3::Zero()};
    poses[b] = poses[link.joint.parent] * link.joint.origin * joint;
  }
  poses[n] = poses[kArmJoints] * model.ee_offset;
  return poses;
}

Pose end_effector_pose(const RobotModel& model, const SystemState& state) {
  return forward_kinematics(model, state).back();
}

Mat6x13 extended_jacobian(const RobotModel& model, const SystemState& state) {
  const std::vector<Pose> poses = forward_kinematics(model, state);
  const Pose& ee = poses.back();
  const Mat3 Ree_t = ee.R().transpose();
  const Mat3 R0 = poses[0].R();

  Mat6x13 J = Mat6x13::Zero();
  // Base twist (body frame) -> end-effector twist (end-effector frame).
  J.block<3, 3>(0, 0) = Ree_t * R0;
  J.block<3, 3>(3, 0) = -Ree_t * skew(ee.position - poses[0].position) * R0;
  J.block<3, 3>(3, 3) = Ree_t * R0;
  // Joint columns: the arm is a serial chain, so every arm joint moves the end-effector.
  for (int k = 0; k < kArmJoints; ++k) {
    const Pose& body = poses[k + 1];
    const Vec3 axis = body.rotation * model.arm[k].joint.axis;
    J.block<3, 1>(0, 6 + k) = Ree_t * axis;
    J.block<3, 1>(3, 6 + k) = Ree_t * axis.cross(ee.position - body.position);
  }
  return J;
}

Quat quat_error(const Quat& eta_d, const Quat& eta) {
  return (eta_d.conjugate() * eta).normalized();
}

Vec3 attitude_error_vec(const Mat3& R) {
  if (!R.allFinite() || (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(R.determinant() - 1.0) > 1e-9) {
    throw Error("attitude_error_vec: input is not a rotation matrix");
  }
  return 0.5 * vee(R - R.transpose());
}

}  // namespace orbitgrasp
