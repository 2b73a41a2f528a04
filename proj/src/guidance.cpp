#include "orbitgrasp/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

void validate(const Timeline& tl) {
  if (!(tl.t_start >= 0.0 && tl.t_start < tl.t_point && tl.t_point < tl.t_grasp) ||
      !std::isfinite(tl.t_grasp)) {
    throw Error("timeline must satisfy 0 <= t_start < t_point < t_grasp");
  }
}

QuinticSample quintic(double t, double t0, double tf, double y0, double y1) {
  if (!(tf > t0)) throw Error("quintic: tf must exceed t0");
  const double T = tf - t0;
  const double s = std::clamp((t - t0) / T, 0.0, 1.0);
  const double d = y1 - y0;
  const double s2 = s * s, s3 = s2 * s;
  QuinticSample out;
  out.y = y0 + d * s3 * (10.0 - 15.0 * s + 6.0 * s2);
  out.yd = d / T * 30.0 * s2 * (1.0 - 2.0 * s + s2);
  out.ydd = d / (T * T) * 60.0 * s * (1.0 - 3.0 * s + 2.0 * s2);
  // The polynomial hits its end values exactly only up to rounding.
  if (s == 1.0) out.y = y1;
  return out;
}

TargetState target_propagate(const TargetState& ts, double dt) {
  TargetState next = ts;
  next.attitude = (ts.attitude * quat_exp(ts.omega_t * dt)).normalized();
  return next;
}

GraspFrame grasp_frame_at(const TargetState& ts, double t) {
  const Quat q_target = target_propagate(ts, t).attitude;
  GraspFrame g;
  g.pose = Pose{q_target, Vec3::Zero()} * ts.grasp_point;
  g.omega_inertial = q_target * ts.omega_t;
  g.omega_body = ts.grasp_point.rotation.conjugate() * ts.omega_t;
  g.velocity = g.omega_inertial.cross(g.pose.position);
  return g;
}

namespace {

Eigen::Vector4d as_vec(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }
Quat as_quat(const Eigen::Vector4d& v) { return Quat(v(0), v(1), v(2), v(3)); }

// d/dt q for body-frame rate w.
Eigen::Vector4d quat_rate(const Quat& q, const Vec3& w_body) {
  const Quat d = q * Quat(0.0, w_body.x(), w_body.y(), w_body.z());
  return 0.5 * as_vec(d);
}

}  // namespace

Setpoint ee_setpoint(const GuidanceParams& params, const TargetState& target,
                     const Pose& ee_initial, double t) {
  const Timeline& tl = params.timeline;
  Setpoint sp;
  if (t < tl.t_start) {
    sp.attitude = ee_initial.rotation;
    sp.position = ee_initial.position;
    return sp;
  }

  const GraspFrame g = grasp_frame_at(target, t);
  const Vec3 z = g.pose.rotation * Vec3::UnitZ();
  const double d = params.standoff;
  // Fix the quaternion sign once, from the phase-one endpoint, so the blend
  // takes the short way and stays continuous in t.
  const Quat q_point = grasp_frame_at(target, tl.t_point).pose.rotation;
  const double sign = ee_initial.rotation.coeffs().dot(q_point.coeffs()) < 0.0 ? -1.0 : 1.0;
  const Eigen::Vector4d qg = sign * as_vec(g.pose.rotation);

  if (t < tl.t_point) {
    const QuinticSample s = quintic(t, tl.t_start, tl.t_point, 0.0, 1.0);
    const Vec3 p_so = g.pose.position - d * z;
    const Vec3 v_so = g.velocity - d * g.omega_inertial.cross(z);
    sp.position = (1.0 - s.y) * ee_initial.position + s.y * p_so;
    sp.velocity = s.yd * (p_so - ee_initial.position) + s.y * v_so;

    const Eigen::Vector4d q0 = as_vec(ee_initial.rotation);
    const Eigen::Vector4d qt = (1.0 - s.y) * q0 + s.y * qg;
    const Eigen::Vector4d qt_dot =
        s.yd * (qg - q0) + s.y * sign * quat_rate(g.pose.rotation, g.omega_body);
    const double n = qt.norm();
    const Eigen::Vector4d q = qt / n;
    const Eigen::Vector4d q_dot = (qt_dot - q * q.dot(qt_dot)) / n;
    sp.attitude = as_quat(q);
    sp.omega = 2.0 * (sp.attitude.conjugate() * as_quat(q_dot)).vec();
    return sp;
  }

  sp.attitude = as_quat(qg);
  sp.omega = g.omega_body;
  if (t < tl.t_grasp) {
    const QuinticSample s = quintic(t, tl.t_point, tl.t_grasp, 0.0, 1.0);
    sp.position = g.pose.position - (1.0 - s.y) * d * z;
    sp.velocity = g.velocity - (1.0 - s.y) * d * g.omega_inertial.cross(z) + s.yd * d * z;
    return sp;
  }
  sp.position = g.pose.position;
  sp.velocity = g.velocity;
  return sp;
}

}  // namespace orbitgrasp
