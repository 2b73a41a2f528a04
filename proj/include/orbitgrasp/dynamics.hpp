#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "orbitgrasp/model.hpp"

namespace orbitgrasp {

// Flattened kinematic tree used by the recursive algorithms.
struct Tree {
  int num_bodies = 0;
  int nv = 0;
  std::vector<int> parent;                 // parent[0] = -1
  std::vector<SpatialTransform> x_tree;    // fixed parent->joint transform (body >= 1)
  std::vector<Vec3> axis;                  // joint axis in the child frame (body >= 1)
  std::vector<SpatialInertia> inertia;     // about the body frame origin
  std::vector<double> damping;             // viscous coefficient per joint (body >= 1)
};

Tree make_tree(const RobotModel& model);

// Parent -> child transform for body b at joint angle q.
SpatialTransform joint_transform(const Tree& tree, int body, double q);

// Tree-level kernels; q holds joint angles in body order, v/a are length nv.
Eigen::VectorXd rnea(const Tree& tree, const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& a, std::span<const Vec6> external_wrenches = {});
Eigen::MatrixXd crba(const Tree& tree, const Eigen::VectorXd& q);

// Body spatial velocities (body coordinates).
std::vector<Vec6> body_velocities(const RobotModel& model, const SystemState& state);

// Inverse dynamics: generalized forces that produce `accel` (length nv).
// Includes pendulum damping. external_wrenches, when non-empty, holds one
// body-frame wrench [n; f] per body acting on that body.
Eigen::VectorXd rnea(const RobotModel& model, const SystemState& state,
                     const Eigen::VectorXd& accel,
                     std::span<const Vec6> external_wrenches = {});

// Joint-space inertia matrix (nv x nv) by the composite-rigid-body algorithm.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const SystemState& state);

// Coriolis/centrifugal forces plus pendulum damping: rnea with zero acceleration.
Eigen::VectorXd bias_forces(const RobotModel& model, const SystemState& state);

// Solves H a = u_RM - C_RM with u_RM = [u; 0 0]. `u` has length 13.
// Throws Error when H is not positive definite.
Eigen::VectorXd forward_dynamics(const RobotModel& model, const SystemState& state,
                                 const Vec13& u);

// Tree-level variant; q and v as for rnea.
Eigen::VectorXd forward_dynamics(const Tree& tree, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& v, const Vec13& u);

// Controller-side model: pendulum removed, bob mass lumped into the base at
// its rest position. Identity on models without a pendulum.
RobotModel rigidize(const RobotModel& model);

struct ClosedFormMatrices {
  Mat13 M;
  Mat13 C;
};

enum class KernelPolicy { kSerial, kParallel };

// Closed-form 13-dof matrices. The pendulum is rigidized first. C is built
// from Christoffel symbols of M (central differences, step 1e-6) plus the
// base gyroscopic term, so that M_dot - 2C is skew-symmetric.
ClosedFormMatrices closed_form(const RobotModel& model, const SystemState& state,
                               KernelPolicy policy = KernelPolicy::kSerial);

// Same, on a prebuilt tree of an already rigidized model.
ClosedFormMatrices closed_form(const Tree& rigid_tree, const Vec7& q, const Vec13& v,
                               KernelPolicy policy = KernelPolicy::kSerial);

inline constexpr double kMassMatrixFdStep = 1e-6;

// Partial derivatives of the 13x13 controller mass matrix with respect to the
// 7 arm joint angles. The parallel variant distributes joints across threads.
std::vector<Mat13> mass_matrix_partials_serial(const Tree& rigid_tree, const Vec7& q);
std::vector<Mat13> mass_matrix_partials_parallel(const Tree& rigid_tree, const Vec7& q);

struct LinearizedPlant {
  Mat13 A;
  Mat13 B;
  Mat13 C;
  Mat13 D;
  Mat13 M;  // mass matrix at the linearization point
};

LinearizedPlant linearize(const RobotModel& model, const SystemState& state);

// Text format: one block per matrix, header "NAME rows cols" followed by
// rows of whitespace-separated values (17 significant digits).
void write_linearized(std::ostream& out, const LinearizedPlant& plant);
LinearizedPlant read_linearized(std::istream& in);

// Kinetic energy ½ v^T H v.
double kinetic_energy(const RobotModel& model, const SystemState& state);

struct Momentum {
  Vec3 linear;          // inertial frame
  Vec3 angular_com;     // about the system centre of mass, inertial frame
  Vec3 com;             // inertial position of the system centre of mass
};

Momentum system_momentum(const RobotModel& model, const SystemState& state);

// Time derivative of the configuration: base quaternion, base position, joints.
struct ConfigRate {
  Eigen::Vector4d quat_dot;  // (w, x, y, z)
  Vec3 position_dot;
};
ConfigRate base_config_rate(const SystemState& state);

}  // namespace orbitgrasp
