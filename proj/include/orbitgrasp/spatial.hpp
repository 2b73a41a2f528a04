#pragma once

// Spatial (6D) algebra in [angular; linear] ordering, plus small 3D helpers.
// Motion vectors are [omega; v], force vectors are [n; f].

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace orbitgrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

// Inverse of skew() applied to the skew-symmetric part of m.
inline Vec3 vee(const Mat3& m) {
  return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) * 0.5;
}

inline Vec3 ang(const Vec6& s) { return s.head<3>(); }
inline Vec3 lin(const Vec6& s) { return s.tail<3>(); }

inline Vec6 stack(const Vec3& a, const Vec3& b) {
  Vec6 s;
  s << a, b;
  return s;
}

// Motion cross product: v x m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = ang(v), u = lin(v);
  return stack(w.cross(ang(m)), w.cross(lin(m)) + u.cross(ang(m)));
}

// Force cross product: v x* f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = ang(v), u = lin(v);
  return stack(w.cross(ang(f)) + u.cross(lin(f)), w.cross(lin(f)));
}

// Matrix B(p) with v x* p = -B(p) v. Skew-symmetric.
inline Mat6 momentum_cross_matrix(const Vec6& p) {
  Mat6 b = Mat6::Zero();
  b.block<3, 3>(0, 0) = skew(ang(p));
  b.block<3, 3>(0, 3) = skew(lin(p));
  b.block<3, 3>(3, 0) = skew(lin(p));
  return b;
}

// Plucker transform from frame A (parent) to frame B (child).
// E rotates A coordinates into B coordinates; r is B's origin in A coordinates.
struct SpatialTransform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  Vec6 apply_motion(const Vec6& m) const {
    return stack(E * ang(m), E * (lin(m) - r.cross(ang(m))));
  }

  // X^T f: maps a force in B coordinates back into A coordinates.
  Vec6 apply_force_transpose(const Vec6& f) const {
    const Vec3 fa = E.transpose() * lin(f);
    return stack(E.transpose() * ang(f) + r.cross(fa), fa);
  }

  // X^{-1} m: maps a motion in B coordinates into A coordinates.
  Vec6 inverse_motion(const Vec6& m) const {
    const Vec3 wa = E.transpose() * ang(m);
    return stack(wa, E.transpose() * lin(m) + r.cross(wa));
  }

  // Composition: (X_cb * X_ba) maps A coordinates to C coordinates.
  SpatialTransform operator*(const SpatialTransform& inner) const {
    SpatialTransform out;
    out.E = E * inner.E;
    out.r = inner.r + inner.E.transpose() * r;
    return out;
  }

  Mat6 matrix() const {
    Mat6 x = Mat6::Zero();
    x.block<3, 3>(0, 0) = E;
    x.block<3, 3>(3, 3) = E;
    x.block<3, 3>(3, 0) = -E * skew(r);
    return x;
  }
};

// Rigid-body spatial inertia about a frame origin: mass m, first moment
// h = m * c, rotational inertia Ibar about the origin.
struct SpatialInertia {
  double m = 0.0;
  Vec3 h = Vec3::Zero();
  Mat3 Ibar = Mat3::Zero();

  static SpatialInertia from_com(double mass, const Vec3& com, const Mat3& inertia_com) {
    const Mat3 c = skew(com);
    return {mass, mass * com, inertia_com - mass * c * c};
  }

  Vec6 operator*(const Vec6& v) const {
    return stack(Ibar * ang(v) + h.cross(lin(v)), m * lin(v) - h.cross(ang(v)));
  }

  SpatialInertia& operator+=(const SpatialInertia& o) {
    m += o.m;
    h += o.h;
    Ibar += o.Ibar;
    return *this;
  }

  // X^T I X: expresses a child-frame inertia in parent coordinates.
  SpatialInertia to_parent(const SpatialTransform& x) const {
    const Mat3 R = x.E.transpose();
    const Vec3 ha = R * h;
    const Mat3 rx = skew(x.r);
    const Mat3 hx = skew(ha);
    SpatialInertia out;
    out.m = m;
    out.h = ha + m * x.r;
    out.Ibar = R * Ibar * x.E - m * rx * rx - rx * hx - hx * rx;
    return out;
  }

  Mat6 matrix() const {
    Mat6 out;
    out.block<3, 3>(0, 0) = Ibar;
    out.block<3, 3>(0, 3) = skew(h);
    out.block<3, 3>(3, 0) = skew(h).transpose();
    out.block<3, 3>(3, 3) = m * Mat3::Identity();
    return out;
  }
};

// Rotation of angle `angle` about unit `axis`, as a matrix.
inline Mat3 axis_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

// Quaternion exponential of a rotation vector.
inline Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    return q.normalized();
  }
  return Quat(Eigen::AngleAxisd(angle, rotvec / angle));
}

}  // namespace orbitgrasp
