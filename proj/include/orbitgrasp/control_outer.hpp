#pragma once

// Outer loop: end-effector pose error -> virtual velocity through a
// distance-weighted pseudoinverse of the extended Jacobian, with hysteretic
// quaternion sign selection, followed by a second-order command-shaping
// filter that supplies the virtual acceleration.

#include <optional>

#include <Eigen/Core>

#include "orbitgrasp/model.hpp"

namespace orbitgrasp {

using Vec26 = Eigen::Matrix<double, 26, 1>;

// Desired end-effector pose and twist. `omega` is expressed in the desired
// frame, `velocity` in the inertial frame.
struct Setpoint {
  Quat attitude = Quat::Identity();
  Vec3 position = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct OuterGains {
  Vec3 k_att = Vec3(1.0, 0.99, 1.01);
  Vec3 k_pos = Vec3::Ones();
  double w_base_ang = 1.0;
  double w_base_lin = 10.0;
  double r_cl = 1.0;
  double r_far = 2.0;
  // When set, replaces the distance schedule with a constant joint weight.
  std::optional<double> epsilon_fixed;
};

void validate(const OuterGains& gains);

// Affine joint-weight schedule: 100 at r_cl, 10 at r_far; p0_norm is clamped
// into [r_cl, r_far] first. Throws Error when r_far <= r_cl.
double epsilon_schedule(double p0_norm, double r_cl, double r_far);

double joint_weight(const OuterGains& gains, double p0_norm);

// blkdiag(w_ang I3, w_lin I3, eps I7) as a diagonal.
Vec13 weight_diagonal(const OuterGains& gains, double epsilon);

inline constexpr double kPinvConditionLimit = 1e8;

enum class SingularityPolicy { kThrow, kDamp };

// W J^T (J W J^T)^-1. W is given by its diagonal. With kThrow a SingularityError
// carries cond(J W J^T) when it exceeds kPinvConditionLimit; with kDamp the
// inverse is regularized by 1e-6 * trace(J W J^T) / 6 instead.
Mat13x6 weighted_pseudoinverse(const Mat6x13& J, const Vec13& w_diag,
                               SingularityPolicy policy = SingularityPolicy::kThrow);
// Dense-weight variant for general SPD W.
Mat13x6 weighted_pseudoinverse(const Mat6x13& J, const Mat13& W,
                               SingularityPolicy policy = SingularityPolicy::kThrow);

struct HybridState {
  int h = 1;
  double delta = 0.5;
};

// h0 = sign(eta_s) with sign(0) = +1.
HybridState hybrid_init(const Quat& eta_e, double delta = 0.5);
// Jump h -> -h iff h * eta_s < -delta; otherwise h is held.
HybridState hybrid_update(const HybridState& hs, const Quat& eta_e);

struct PoseError {
  Quat eta_e;         // conj(eta_d) ⊗ eta
  Vec3 p_e;           // p - p_d, inertial
  Mat3 R_ee;
  Mat3 R_e;
};
PoseError pose_error(const Pose& ee, const Setpoint& sp);

// Commanded end-effector twist (end-effector frame) of the hybrid law.
Vec6 commanded_twist(const PoseError& err, const Setpoint& sp, const OuterGains& gains, int h);

struct IkResult {
  Vec13 v_v;
  Vec6 twist;        // commanded twist that J v_v reproduces
  double epsilon;
  double p0_norm;
};

IkResult ik_virtual_velocity(const RobotModel& model, const SystemState& state,
                             const Setpoint& sp, const OuterGains& gains, const HybridState& hs,
                             SingularityPolicy policy = SingularityPolicy::kDamp);

struct CSFParams {
  double omega = 10.0;
  double xi = 0.9;
};

// State x = [x1; x2] with x1 tracking the input and x2 = dx1/dt (the output).
struct CSFState {
  Vec26 x = Vec26::Zero();
};

// Position-like half at v0, velocity-like half zero.
CSFState csf_init(const Vec13& v0);
Vec26 csf_derivative(const CSFParams& p, const CSFState& cs, const Vec13& input);
Vec13 csf_output(const CSFState& cs);

// Advances the filter over dt (RK4, input held) and returns the output at the
// end of the step.
std::pair<Vec13, CSFState> csf_step(const CSFParams& p, const CSFState& cs, const Vec13& v_v,
                                    double dt);

struct OuterOutput {
  Vec13 v_v;
  Vec13 v_v_dot;
  HybridState hybrid;
  CSFState csf;
  double epsilon;
};

OuterOutput outer_loop(const RobotModel& model, const SystemState& state, const Setpoint& sp,
                       const OuterGains& gains, const HybridState& hs, const CSFParams& csf_params,
                       const CSFState& cs, double dt);

// Kinematic Lyapunov function ½|p_e|² + ½ trace(I - R_e).
double outer_lyapunov(const PoseError& err);

}  // namespace orbitgrasp
