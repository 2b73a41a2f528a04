#include "orbitgrasp/control_outer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

void validate(const OuterGains& g) {
  if (!(g.k_att.minCoeff() > 0.0) || !g.k_att.allFinite()) throw Error("k_att must be positive");
  if (!(g.k_pos.minCoeff() > 0.0) || !g.k_pos.allFinite()) throw Error("k_pos must be positive");
  if (!(g.w_base_ang > 0.0) || !(g.w_base_lin > 0.0)) throw Error("base weights must be positive");
  if (!(g.r_cl > 0.0) || !(g.r_far > g.r_cl)) throw Error("need r_far > r_cl > 0");
  if (g.epsilon_fixed && !(*g.epsilon_fixed > 0.0)) throw Error("fixed epsilon must be positive");
}

double epsilon_schedule(double p0_norm, double r_cl, double r_far) {
  if (!(r_far > r_cl)) throw Error("epsilon_schedule: r_far must exceed r_cl");
  const double d = r_far - r_cl;
  const double p = std::clamp(p0_norm, r_cl, r_far);
  return -90.0 / d * p + 100.0 * r_far / d - 10.0 * r_cl / d;
}

double joint_weight(const OuterGains& gains, double p0_norm) {
  if (gains.epsilon_fixed) return *gains.epsilon_fixed;
  return epsilon_schedule(p0_norm, gains.r_cl, gains.r_far);
}

Vec13 weight_diagonal(const OuterGains& gains, double epsilon) {
  Vec13 w;
  w << Vec3::Constant(gains.w_base_ang), Vec3::Constant(gains.w_base_lin),
      Vec7::Constant(epsilon);
  return w;
}

namespace {

Mat13x6 finish_pinv(const Mat13x6& WJt, const Eigen::Matrix<double, 6, 6>& S,
                    SingularityPolicy policy) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(S, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  Eigen::Matrix<double, 6, 6> S_reg = S;
  if (!(cond <= kPinvConditionLimit)) {
    if (policy == SingularityPolicy::kThrow) {
      throw SingularityError("weighted pseudoinverse: cond(J W J^T) = " + std::to_string(cond),
                             cond);
    }
    S_reg += (1e-6 * S.trace() / 6.0) * Eigen::Matrix<double, 6, 6>::Identity();
  }
  // (S^-1 J W)^T = W J^T S^-1 since S and W are symmetric.
  return S_reg.llt().solve(WJt.transpose()).transpose();
}

}  // namespace

Mat13x6 weighted_pseudoinverse(const Mat6x13& J, const Vec13& w_diag, SingularityPolicy policy) {
  const Mat13x6 WJt = w_diag.asDiagonal() * J.transpose();
  return finish_pinv(WJt, J * WJt, policy);
}

Mat13x6 weighted_pseudoinverse(const Mat6x13& J, const Mat13& W, SingularityPolicy policy) {
  const Mat13x6 WJt = W * J.transpose();
  return finish_pinv(WJt, J * WJt, policy);
}

HybridState hybrid_init(const Quat& eta_e, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("hysteresis half-width must lie in (0, 1)");
  return {eta_e.w() >= 0.0 ? 1 : -1, delta};
}

HybridState hybrid_update(const HybridState& hs, const Quat& eta_e) {
  HybridState next = hs;
  if (hs.h * eta_e.w() < -hs.delta) next.h = -hs.h;
  return next;
}

PoseError pose_error(const Pose& ee, const Setpoint& sp) {
  PoseError e;
  e.eta_e = quat_error(sp.attitude, ee.rotation);
  e.p_e = ee.position - sp.position;
  e.R_ee = ee.R();
  e.R_e = e.eta_e.toRotationMatrix();
  return e;
}

Vec6 commanded_twist(const PoseError& err, const Setpoint& sp, const OuterGains& gains, int h) {
  const Vec3 w = -gains.k_att.cwiseProduct(h * err.eta_e.vec()) + err.R_e.transpose() * sp.omega;
  const Vec3 v = err.R_ee.transpose() * (-gains.k_pos.cwiseProduct(err.p_e) + sp.velocity);
  return stack(w, v);
}

IkResult ik_virtual_velocity(const RobotModel& model, const SystemState& state,
                             const Setpoint& sp, const OuterGains& gains, const HybridState& hs,
                             SingularityPolicy policy) {
  const std::vector<Pose> poses = forward_kinematics(model, state);
  const PoseError err = pose_error(poses.back(), sp);
  IkResult r;
  r.p0_norm = state.base_pose.position.norm();
  r.epsilon = joint_weight(gains, r.p0_norm);
  r.twist = commanded_twist(err, sp, gains, hs.h);
  const Mat13x6 pinv =
      weighted_pseudoinverse(extended_jacobian(model, state), weight_diagonal(gains, r.epsilon),
                             policy);
  r.v_v = pinv * r.twist;
  return r;
}

CSFState csf_init(const Vec13& v0) {
  CSFState cs;
  cs.x.head<13>() = v0;
  return cs;
}

Vec26 csf_derivative(const CSFParams& p, const CSFState& cs, const Vec13& input) {
  const double w2 = p.omega * p.omega;
  Vec26 d;
  d.head<13>() = cs.x.tail<13>();
  d.tail<13>() = -w2 * cs.x.head<13>() - 2.0 * p.xi * p.omega * cs.x.tail<13>() + w2 * input;
  return d;
}

Vec13 csf_output(const CSFState& cs) { return cs.x.tail<13>(); }

std::pair<Vec13, CSFState> csf_step(const CSFParams& p, const CSFState& cs, const Vec13& v_v,
                                    double dt) {
  if (!(dt > 0.0)) throw Error("csf_step: dt must be positive");
  auto at = [&](const Vec26& x) { return csf_derivative(p, CSFState{x}, v_v); };
  const Vec26 k1 = at(cs.x);
  const Vec26 k2 = at(cs.x + 0.5 * dt * k1);
  const Vec26 k3 = at(cs.x + 0.5 * dt * k2);
  const Vec26 k4 = at(cs.x + dt * k3);
  CSFState next{cs.x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
  return {csf_output(next), next};
}

OuterOutput outer_loop(const RobotModel& model, const SystemState& state, const Setpoint& sp,
                       const OuterGains& gains, const HybridState& hs, const CSFParams& csf_params,
                       const CSFState& cs, double dt) {
  const PoseError err = pose_error(end_effector_pose(model, state), sp);
  OuterOutput out;
  out.hybrid = hybrid_update(hs, err.eta_e);
  const IkResult ik = ik_virtual_velocity(model, state, sp, gains, out.hybrid);
  out.v_v = ik.v_v;
  out.epsilon = ik.epsilon;
  std::tie(out.v_v_dot, out.csf) = csf_step(csf_params, cs, ik.v_v, dt);
  return out;
}

double outer_lyapunov(const PoseError& err) {
  return 0.5 * err.p_e.squaredNorm() + 0.5 * (Mat3::Identity() - err.R_e).trace();
}

}  // namespace orbitgrasp
