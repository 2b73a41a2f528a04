#include "orbitgrasp/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

namespace {

const Link& link_of(const RobotModel& model, int body) {
  return body <= kArmJoints ? model.arm[body - 1] : model.pendulum[body - 1 - kArmJoints];
}

SpatialTransform from_pose(const Pose& p) {
  return {p.R().transpose(), p.position};
}

Vec6 motion_axis(const Vec3& axis) { return stack(axis, Vec3::Zero()); }

}  // namespace

Tree make_tree(const RobotModel& model) {
  Tree t;
  t.num_bodies = model.num_bodies();
  t.nv = model.nv();
  t.parent.assign(t.num_bodies, -1);
  t.x_tree.resize(t.num_bodies);
  t.axis.assign(t.num_bodies, Vec3::Zero());
  t.inertia.resize(t.num_bodies);
  t.damping.assign(t.num_bodies, 0.0);
  t.inertia[0] = SpatialInertia::from_com(model.base.mass, model.base.com, model.base.inertia);
  for (int b = 1; b < t.num_bodies; ++b) {
    const Link& link = link_of(model, b);
    t.parent[b] = link.joint.parent;
    t.x_tree[b] = from_pose(link.joint.origin);
    t.axis[b] = link.joint.axis;
    t.damping[b] = link.joint.damping;
    t.inertia[b] = SpatialInertia::from_com(link.body.mass, link.body.com, link.body.inertia);
  }
  return t;
}

SpatialTransform joint_transform(const Tree& tree, int body, double q) {
  SpatialTransform xj;
  xj.E = axis_rotation(tree.axis[body], q).transpose();
  return xj * tree.x_tree[body];
}

Eigen::VectorXd rnea(const Tree& tree, const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& a, std::span<const Vec6> external_wrenches) {
  const int n = tree.num_bodies;
  std::vector<SpatialTransform> X(n);
  std::vector<Vec6> vel(n), acc(n), f(n);
  vel[0] = v.head<6>();
  acc[0] = a.head<6>();
  for (int b = 1; b < n; ++b) {
    const int p = tree.parent[b];
    X[b] = joint_transform(tree, b, q(b - 1));
    const Vec6 s = motion_axis(tree.axis[b]);
    const Vec6 vj = s * v(5 + b);
    vel[b] = X[b].apply_motion(vel[p]) + vj;
    acc[b] = X[b].apply_motion(acc[p]) + s * a(5 + b) + cross_motion(vel[b], vj);
  }
  for (int b = 0; b < n; ++b) {
    f[b] = tree.inertia[b] * acc[b] + cross_force(vel[b], tree.inertia[b] * vel[b]);
    if (!external_wrenches.empty()) f[b] -= external_wrenches[b];
  }
  Eigen::VectorXd tau(tree.nv);
  for (int b = n - 1; b >= 1; --b) {
    tau(5 + b) = tree.axis[b].dot(ang(f[b])) + tree.damping[b] * v(5 + b);
    f[tree.parent[b]] += X[b].apply_force_transpose(f[b]);
  }
  tau.head<6>() = f[0];
  return tau;
}

Eigen::MatrixXd crba(const Tree& tree, const Eigen::VectorXd& q) {
  const int n = tree.num_bodies;
  std::vector<SpatialTransform> X(n);
  std::vector<SpatialInertia> Ic(tree.inertia);
  for (int b = 1; b < n; ++b) X[b] = joint_transform(tree, b, q(b - 1));
  for (int b = n - 1; b >= 1; --b) Ic[tree.parent[b]] += Ic[b].to_parent(X[b]);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(tree.nv, tree.nv);
  H.topLeftCorner<6, 6>() = Ic[0].matrix();
  for (int b = n - 1; b >= 1; --b) {
    const int i = 5 + b;
    Vec6 F = Ic[b] * motion_axis(tree.axis[b]);
    H(i, i) = tree.axis[b].dot(ang(F));
    int j = b;
    while (true) {
      F = X[j].apply_force_transpose(F);
      j = tree.parent[j];
      if (j == 0) {
        H.block<6, 1>(0, i) = F;
        H.block<1, 6>(i, 0) = F.transpose();
        break;
      }
      H(5 + j, i) = tree.axis[j].dot(ang(F));
      H(i, 5 + j) = H(5 + j, i);
    }
  }
  return H;
}

std::vector<Vec6> body_velocities(const RobotModel& model, const SystemState& state) {
  const Tree tree = make_tree(model);
  const Eigen::VectorXd q = joint_positions(model, state);
  const Eigen::VectorXd v = velocity_vector(model, state);
  std::vector<Vec6> vel(tree.num_bodies);
  vel[0] = v.head<6>();
  for (int b = 1; b < tree.num_bodies; ++b) {
    vel[b] = joint_transform(tree, b, q(b - 1)).apply_motion(vel[tree.parent[b]]) +
             motion_axis(tree.axis[b]) * v(5 + b);
  }
  return vel;
}

Eigen::VectorXd rnea(const RobotModel& model, const SystemState& state,
                     const Eigen::VectorXd& accel, std::span<const Vec6> external_wrenches) {
  if (accel.size() != model.nv()) throw Error("rnea: acceleration has wrong dimension");
  if (!external_wrenches.empty() &&
      static_cast<int>(external_wrenches.size()) != model.num_bodies()) {
    throw Error("rnea: need one external wrench per body");
  }
  const Tree tree = make_tree(model);
  return rnea(tree, joint_positions(model, state), velocity_vector(model, state), accel,
              external_wrenches);
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const SystemState& state) {
  return crba(make_tree(model), joint_positions(model, state));
}

Eigen::VectorXd bias_forces(const RobotModel& model, const SystemState& state) {
  return rnea(model, state, Eigen::VectorXd::Zero(model.nv()));
}

Eigen::VectorXd forward_dynamics(const Tree& tree, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& v, const Vec13& u) {
  const Eigen::MatrixXd H = crba(tree, q);
  const Eigen::VectorXd c = rnea(tree, q, v, Eigen::VectorXd::Zero(tree.nv));
  Eigen::VectorXd rhs = -c;
  rhs.head<kControlDofs>() += u;

  double pendulum_mass = 0.0;
  for (int b = 1 + kArmJoints; b < tree.num_bodies; ++b) pendulum_mass += tree.inertia[b].m;
  const int n = pendulum_mass == 0.0 ? kControlDofs : tree.nv;

  Eigen::LLT<Eigen::MatrixXd> llt(H.topLeftCorner(n, n));
  if (llt.info() != Eigen::Success) {
    throw Error("forward_dynamics: mass matrix is not positive definite");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(tree.nv);
  acc.head(n) = llt.solve(rhs.head(n));
  return acc;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const SystemState& state,
                                 const Vec13& u) {
  return forward_dynamics(make_tree(model), joint_positions(model, state),
                          velocity_vector(model, state), u);
}

RobotModel rigidize(const RobotModel& model) {
  if (!model.has_pendulum()) return model;
  RobotModel rigid = model;
  rigid.pendulum.clear();

  // Pendulum bodies at zero angles, expressed about the base origin.
  SpatialInertia base = SpatialInertia::from_com(model.base.mass, model.base.com, model.base.inertia);
  Pose frame = Pose::identity();
  for (const Link& l : model.pendulum) {
    frame = frame * l.joint.origin;
    const SpatialInertia body = SpatialInertia::from_com(l.body.mass, l.body.com, l.body.inertia);
    base += body.to_parent(from_pose(frame));
  }
  rigid.base.mass = base.m;
  rigid.base.com = base.h / base.m;
  rigid.base.inertia = base.Ibar + base.m * skew(rigid.base.com) * skew(rigid.base.com);
  rigid.base.inertia = 0.5 * (rigid.base.inertia + rigid.base.inertia.transpose()).eval();
  return rigid;
}

std::vector<Mat13> mass_matrix_partials_serial(const Tree& rigid_tree, const Vec7& q) {
  std::vector<Mat13> out(kArmJoints);
  const double h = kMassMatrixFdStep;
  for (int k = 0; k < kArmJoints; ++k) {
    Eigen::VectorXd qp = q, qm = q;
    qp(k) += h;
    qm(k) -= h;
    out[k] = (crba(rigid_tree, qp) - crba(rigid_tree, qm)) / (2.0 * h);
  }
  return out;
}

std::vector<Mat13> mass_matrix_partials_parallel(const Tree& rigid_tree, const Vec7& q) {
  std::vector<Mat13> out(kArmJoints);
  const double h = kMassMatrixFdStep;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < kArmJoints; ++k) {
    Eigen::VectorXd qp = q, qm = q;
    qp(k) += h;
    qm(k) -= h;
    out[k] = (crba(rigid_tree, qp) - crba(rigid_tree, qm)) / (2.0 * h);
  }
  return out;
}

ClosedFormMatrices closed_form(const Tree& rigid_tree, const Vec7& q, const Vec13& v,
                               KernelPolicy policy) {
  if (rigid_tree.nv != kControlDofs) throw Error("closed_form: tree must be the 13-dof rigid model");
  ClosedFormMatrices cf;
  cf.M = crba(rigid_tree, q);
  const std::vector<Mat13> dM = policy == KernelPolicy::kParallel
                                    ? mass_matrix_partials_parallel(rigid_tree, q)
                                    : mass_matrix_partials_serial(rigid_tree, q);
  // M depends on the joint angles only, so Christoffel terms involve the arm
  // coordinates alone.
  Mat13 M_dot = Mat13::Zero();
  Mat13 A = Mat13::Zero();  // A(:, j) = dM/dq_j * v
  for (int k = 0; k < kArmJoints; ++k) {
    M_dot += v(6 + k) * dM[k];
    A.col(6 + k) = dM[k] * v;
  }
  cf.C = 0.5 * M_dot + 0.5 * (A - A.transpose());
  // Base momentum transported by the body-frame twist: nu0 x* p = -B(p) nu0.
  const Vec6 p_base = (cf.M * v).head<6>();
  cf.C.topLeftCorner<6, 6>() -= momentum_cross_matrix(p_base);
  return cf;
}

ClosedFormMatrices closed_form(const RobotModel& model, const SystemState& state,
                               KernelPolicy policy) {
  return closed_form(make_tree(rigidize(model)), state.q, control_velocity(state), policy);
}

LinearizedPlant linearize(const RobotModel& model, const SystemState& state) {
  const ClosedFormMatrices cf = closed_form(model, state);
  LinearizedPlant plant;
  plant.M = cf.M;
  Eigen::LLT<Mat13> llt(cf.M);
  if (llt.info() != Eigen::Success) throw Error("linearize: mass matrix is not positive definite");
  plant.B = llt.solve(Mat13::Identity());
  plant.A = -plant.B * cf.C;
  plant.C = Mat13::Identity();
  plant.D = Mat13::Zero();
  return plant;
}

namespace {

void write_block(std::ostream& out, const std::string& name, const Mat13& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << std::setprecision(17) << m(r, c);
    }
    out << '\n';
  }
}

Mat13 read_block(std::istream& in, const std::string& expected) {
  std::string name;
  int rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expected || rows != 13 || cols != 13) {
    throw Error("linearized plant file: expected block header '" + expected + " 13 13'");
  }
  Mat13 m;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) throw Error("linearized plant file: truncated block " + expected);
    }
  }
  return m;
}

}  // namespace

void write_linearized(std::ostream& out, const LinearizedPlant& plant) {
  write_block(out, "A", plant.A);
  write_block(out, "B", plant.B);
  write_block(out, "C", plant.C);
  write_block(out, "D", plant.D);
  write_block(out, "M", plant.M);
}

LinearizedPlant read_linearized(std::istream& in) {
  LinearizedPlant plant;
  plant.A = read_block(in, "A");
  plant.B = read_block(in, "B");
  plant.C = read_block(in, "C");
  plant.D = read_block(in, "D");
  plant.M = read_block(in, "M");
  return plant;
}

double kinetic_energy(const RobotModel& model, const SystemState& state) {
  const Tree tree = make_tree(model);
  const std::vector<Vec6> vel = body_velocities(model, state);
  double e = 0.0;
  for (int b = 0; b < tree.num_bodies; ++b) e += 0.5 * vel[b].dot(tree.inertia[b] * vel[b]);
  return e;
}

Momentum system_momentum(const RobotModel& model, const SystemState& state) {
  const Tree tree = make_tree(model);
  const std::vector<Vec6> vel = body_velocities(model, state);
  const std::vector<Pose> poses = forward_kinematics(model, state);
  Vec3 P = Vec3::Zero(), L = Vec3::Zero(), first = Vec3::Zero();
  double mass = 0.0;
  for (int b = 0; b < tree.num_bodies; ++b) {
    const Mat3 R = poses[b].R();
    const Vec3& p = poses[b].position;
    const Vec6 h = tree.inertia[b] * vel[b];
    const Vec3 f = R * lin(h);
    P += f;
    L += R * ang(h) + p.cross(f);
    mass += tree.inertia[b].m;
    first += tree.inertia[b].m * p + R * tree.inertia[b].h;
  }
  Momentum out;
  out.linear = P;
  out.com = first / mass;
  out.angular_com = L - out.com.cross(P);
  return out;
}

ConfigRate base_config_rate(const SystemState& state) {
  const Quat& eta = state.base_pose.rotation;
  const Quat w(0.0, state.nu0.angular.x(), state.nu0.angular.y(), state.nu0.angular.z());
  const Quat d = eta * w;
  ConfigRate r;
  r.quat_dot << 0.5 * d.w(), 0.5 * d.x(), 0.5 * d.y(), 0.5 * d.z();
  r.position_dot = eta * state.nu0.linear;
  return r;
}

}  // namespace orbitgrasp
