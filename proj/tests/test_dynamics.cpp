#include "doctest.h"

#include <sstream>

#include <Eigen/Cholesky>

#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/error.hpp"
#include "support.hpp"

using namespace orbitgrasp;
using namespace orbitgrasp::testing;

namespace {

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// Fixed-mass-matrix inverse dynamics on the rigid 13-dof model.
Eigen::VectorXd rigid_rnea(const RobotModel& rigid, const SystemState& s, const Vec13& a) {
  return rnea(rigid, s, Eigen::VectorXd(a));
}

}  // namespace

TEST_CASE("mass matrix columns equal inverse dynamics probes") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const RobotModel m = random_robot(rng, true);
    const SystemState s = random_state(rng);
    const Eigen::MatrixXd H = mass_matrix(m, s);
    CHECK((H - H.transpose()).norm() < 1e-12 * H.norm());
    CHECK(Eigen::LLT<Eigen::MatrixXd>(H).info() == Eigen::Success);
    const Eigen::VectorXd c = bias_forces(m, s);
    for (int i = 0; i < m.nv(); ++i) {
      const Eigen::VectorXd col = rnea(m, s, Eigen::VectorXd::Unit(m.nv(), i)) - c;
      CHECK(rel(col, H.col(i)) < 1e-10);
    }
  }
}

TEST_CASE("kinetic energy agrees between body sum and joint-space form") {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const RobotModel m = random_robot(rng, true);
    const SystemState s = random_state(rng);
    const Eigen::VectorXd v = velocity_vector(m, s);
    const double quad = 0.5 * v.dot(mass_matrix(m, s) * v);
    CHECK(kinetic_energy(m, s) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("closed-form and recursive formulations agree on the rigid model") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const RobotModel rigid = rigidize(random_robot(rng, true));
    const SystemState s = random_state(rng);
    Vec13 a;
    for (int i = 0; i < 13; ++i) a(i) = uniform(rng, -1.0, 1.0);
    const ClosedFormMatrices cf = closed_form(rigid, s);
    const Vec13 closed = cf.M * a + cf.C * control_velocity(s);
    const Eigen::VectorXd recursive = rigid_rnea(rigid, s, a);
    CHECK(rel(closed, recursive) < 1e-8);
  }
}

TEST_CASE("rigidized model matches the pendulum model at rest angles") {
  std::mt19937 rng(24);
  const RobotModel m = random_robot(rng, true);
  SystemState s = random_state(rng);
  s.q_p.setZero();
  const Eigen::MatrixXd H = mass_matrix(m, s);
  const Eigen::MatrixXd M = mass_matrix(rigidize(m), s);
  CHECK((H.topLeftCorner(13, 13) - M).norm() < 1e-10 * M.norm());
}

TEST_CASE("M_dot - 2C is skew-symmetric") {
  std::mt19937 rng(25);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RobotModel rigid = rigidize(random_robot(rng, true));
    const SystemState s = random_state(rng);
    const double h = 1e-6;
    SystemState sp = s, sm = s;
    sp.q += h * s.omega_q;
    sm.q -= h * s.omega_q;
    const Eigen::MatrixXd M_dot = (mass_matrix(rigid, sp) - mass_matrix(rigid, sm)) / (2.0 * h);
    const ClosedFormMatrices cf = closed_form(rigid, s);
    Vec13 x;
    for (int i = 0; i < 13; ++i) x(i) = uniform(rng, -1.0, 1.0);
    const double r = std::abs(x.dot((M_dot - 2.0 * cf.C) * x)) / (x.squaredNorm() * cf.M.norm());
    worst = std::max(worst, r);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("serial and parallel mass-matrix partials are identical") {
  std::mt19937 rng(26);
  const Tree tree = make_tree(rigidize(random_robot(rng, true)));
  const Vec7 q = random_state(rng).q;
  const auto a = mass_matrix_partials_serial(tree, q);
  const auto b = mass_matrix_partials_parallel(tree, q);
  for (int k = 0; k < kArmJoints; ++k) CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward dynamics inverts inverse dynamics") {
  std::mt19937 rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const RobotModel m = random_robot(rng, true);
    const SystemState s = random_state(rng);
    Vec13 u;
    for (int i = 0; i < 13; ++i) u(i) = uniform(rng, -5.0, 5.0);
    const Eigen::VectorXd a = forward_dynamics(m, s, u);
    const Eigen::VectorXd tau = rnea(m, s, a);
    CHECK(rel(tau.head<13>(), u) < 1e-9);
    CHECK(tau.tail<2>().norm() < 1e-9 * (1.0 + u.norm()));
  }
}

TEST_CASE("pendulum damping enters the joint equation as beta * rate") {
  std::mt19937 rng(28);
  SloshingParams sp;
  sp.bob_mass = 10.0;
  sp.beta_damp = 0.5;
  RobotModel m = random_robot(rng, false);
  m.pendulum = build_pendulum_branch(sp);
  SystemState s = random_state(rng);
  const Eigen::VectorXd with = bias_forces(m, s);
  m.pendulum[0].joint.damping = 0.0;
  m.pendulum[1].joint.damping = 0.0;
  const Eigen::VectorXd without = bias_forces(m, s);
  CHECK((with - without).head<13>().norm() < 1e-12);
  CHECK(((with - without).tail<2>() + damping_torque(sp, s.qp_dot)).norm() < 1e-12);
}

TEST_CASE("massless pendulum leaves the 13-dof dynamics untouched") {
  std::mt19937 rng(29);
  RobotModel m = random_robot(rng, true, 0.0);
  const SystemState s = random_state(rng);
  const Vec13 u = Vec13::Constant(1.0);
  const Eigen::VectorXd a = forward_dynamics(m, s, u);
  RobotModel rigid = m;
  rigid.pendulum.clear();
  const Eigen::VectorXd b = forward_dynamics(rigid, s, u);
  CHECK(rel(a.head<13>(), b) < 1e-12);
  CHECK(a.tail<2>().norm() == 0.0);
}

TEST_CASE("linearized plant") {
  std::mt19937 rng(30);
  const RobotModel m = random_robot(rng, true);
  SystemState s = random_state(rng);
  const LinearizedPlant p = linearize(m, s);
  CHECK((p.B * p.M - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(p.D.norm() == 0.0);
  CHECK((p.C - Mat13::Identity()).norm() == 0.0);

  SUBCASE("zero velocity gives a zero A block") {
    SystemState rest = s;
    rest.nu0 = Twist{};
    rest.omega_q.setZero();
    CHECK(linearize(m, rest).A.norm() == 0.0);
  }
  SUBCASE("text round trip") {
    std::stringstream ss;
    write_linearized(ss, p);
    const LinearizedPlant back = read_linearized(ss);
    CHECK((back.B * back.M - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.A - p.A).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + p.A.cwiseAbs().maxCoeff()));
  }
  SUBCASE("malformed file") {
    std::stringstream ss("A 13 12\n");
    CHECK_THROWS_AS(read_linearized(ss), Error);
  }
}

TEST_CASE("momentum of a body moving without joint motion") {
  std::mt19937 rng(31);
  const RobotModel m = random_robot(rng, true);
  SystemState s = random_state(rng);
  s.omega_q.setZero();
  s.qp_dot.setZero();
  s.nu0.angular.setZero();
  double mass = m.base.mass;
  for (const Link& l : m.arm) mass += l.body.mass;
  for (const Link& l : m.pendulum) mass += l.body.mass;
  const Momentum p = system_momentum(m, s);
  CHECK((p.linear - mass * (s.base_pose.rotation * s.nu0.linear)).norm() < 1e-10 * mass);
  CHECK(p.angular_com.norm() < 1e-9 * mass);
}
