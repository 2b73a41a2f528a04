#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "orbitgrasp/control_inner.hpp"
#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/error.hpp"
#include "orbitgrasp/integrator.hpp"
#include "support.hpp"

using namespace orbitgrasp;
using namespace orbitgrasp::testing;

namespace {

Mat13 random_spd(std::mt19937& rng, double lo, double hi) {
  Mat13 Q = Mat13::NullaryExpr([&] { return uniform(rng, -1.0, 1.0); });
  Q = Eigen::HouseholderQR<Mat13>(Q).householderQ();
  Vec13 d;
  for (int i = 0; i < 13; ++i) d(i) = uniform(rng, lo, hi);
  const Mat13 S = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (S + S.transpose());
}

Vec13 random13(std::mt19937& rng, double scale) {
  return Vec13::NullaryExpr([&] { return uniform(rng, -scale, scale); });
}

}  // namespace

TEST_CASE("conditional integrator equals PI when unsaturated") {
  std::mt19937 rng(41);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const GainSet g(random_spd(rng, 0.5, 5.0), random_spd(rng, 0.1, 2.0), random_spd(rng, 1.0, 10.0));
    const Vec13 sigma = random13(rng, 0.05);
    const Vec13 y = random13(rng, 0.05);
    if ((g.H_inv() * (g.G() * sigma + y)).cwiseAbs().maxCoeff() >= 1.0) continue;
    ++checked;
    const CIOutput ci = ci_law(g, sigma, y);
    const Vec13 pi = pi_control(g, y, sigma);
    CHECK((ci.u - pi).norm() <= 1e-10 * (1.0 + pi.norm()));
    CHECK((ci.sigma_dot - y).norm() <= 1e-10 * (1.0 + y.norm()));
  }
  CHECK(checked > 900);
}

TEST_CASE("conditional integrator output is bounded by the K_S norm") {
  std::mt19937 rng(42);
  const GainSet g(random_spd(rng, 0.5, 50.0), random_spd(rng, 0.1, 20.0), random_spd(rng, 0.5, 3.0));
  double worst = 0.0;
  for (int trial = 0; trial < 100000; ++trial) {
    const CIOutput ci = ci_law(g, random13(rng, 100.0), random13(rng, 100.0));
    worst = std::max(worst, ci.u.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= g.ks_norm() * (1.0 + 1e-15));
  CHECK(worst == doctest::Approx(g.ks_norm()));
}

TEST_CASE("gain set construction") {
  const Mat13 I = Mat13::Identity();
  CHECK_THROWS_AS(GainSet(-I, I, I), Error);
  Mat13 asym = I;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(GainSet(I, asym, I), Error);
  const GainSet g(2.0 * I, 3.0 * I, Vec13::LinSpaced(13, 1.0, 4.0).asDiagonal());
  CHECK(g.ks_norm() == doctest::Approx(4.0));
  CHECK((g.H_inv() * g.H() - I).norm() < 1e-14);
  CHECK((g.G() - 1.5 * I).norm() < 1e-14);
}

TEST_CASE("ci_step integrates sigma with RK4 and returns the start-of-step output") {
  const GainSet g(Mat13::Identity(), Mat13::Identity(), 10.0 * Mat13::Identity());
  const Vec13 y = Vec13::Constant(0.1);
  const auto [u, next] = ci_step(g, CIState{}, y, 0.01);
  CHECK((u - y).norm() < 1e-15);
  CHECK((next.sigma - 0.01 * y).norm() < 1e-15);
  CHECK_THROWS_AS(ci_step(g, CIState{}, y, 0.0), Error);
}

TEST_CASE("feedforward cancels the closed-form dynamics along the reference") {
  std::mt19937 rng(43);
  const RobotModel rigid = rigidize(random_robot(rng, true));
  const SystemState s = random_state(rng);
  const ClosedFormMatrices cf = closed_form(rigid, s);
  const Vec13 vd = random13(rng, 1.0);
  const Vec13 u = feedforward(cf, control_velocity(s), vd);
  const Eigen::VectorXd tau = rnea(rigid, s, Eigen::VectorXd(vd));
  CHECK((u - tau).norm() < 1e-8 * tau.norm());
}

TEST_CASE("Lyapunov function decreases under exact-model regulation") {
  std::mt19937 rng(44);
  const RobotModel rigid = rigidize(random_robot(rng, true));
  const Tree tree = make_tree(rigid);
  const double k = 20.0;
  const GainSet g(k * Mat13::Identity(), 1e-6 * Mat13::Identity(), 1e6 * Mat13::Identity());

  // State: [q (7); v (13); sigma (13)], regulation to v_v = 0.
  using Vec33 = Eigen::Matrix<double, 33, 1>;
  auto f = [&](double, const Vec33& x) {
    const Vec7 q = x.head<7>();
    const Vec13 v = x.segment<13>(7);
    const ClosedFormMatrices cf = closed_form(tree, q, v);
    const CIOutput ci = ci_law(g, x.tail<13>(), -v);
    Vec33 d;
    d.head<7>() = v.tail<7>();
    d.segment<13>(7) = cf.M.llt().solve(ci.u - cf.C * v);
    d.tail<13>() = ci.sigma_dot;
    return d;
  };
  Vec33 x = Vec33::Zero();
  x.head<7>() = random_state(rng).q;
  x.segment<13>(7) = random13(rng, 0.2);
  auto V = [&](const Vec33& s) {
    const Mat13 M = crba(tree, s.head<7>());
    return inner_lyapunov(M, g, -s.segment<13>(7), s.tail<13>());
  };

  const double dt = 0.01;
  double prev = V(x);
  bool monotone = true;
  std::vector<double> history{prev};
  for (int i = 0; i < 4000; ++i) {
    x = rk4_step(f, x, i * dt, dt);
    const double now = V(x);
    if (now > prev + 1e-9) monotone = false;
    prev = now;
    history.push_back(now);
  }
  CHECK(monotone);

  // Late-time decay of sqrt(V) is set by the slowest mode, k / max eig(M).
  const Mat13 M = crba(tree, x.head<7>());
  const double predicted = k / Eigen::SelfAdjointEigenSolver<Mat13>(M).eigenvalues().maxCoeff();
  const size_t a = 2000, b = 4000;
  const double measured =
      -0.5 * std::log(history[b] / history[a]) / ((b - a) * dt);
  MESSAGE("decay rate measured " << measured << ", predicted " << predicted);
  CHECK(measured > 0.5 * predicted);
  CHECK(measured < 2.0 * predicted);
}

TEST_CASE("pole placement gains") {
  LinearizedPlant p;
  p.B = Vec13::LinSpaced(13, 0.1, 1.3).asDiagonal();
  const PolePlacementGains g = pole_placement(p, LoopBandwidths{}, 0.7);
  CHECK(g.kp(0) == doctest::Approx(2.0 * 0.7 * 1.5 / 0.1));
  CHECK(g.ki(4) == doctest::Approx(1.0 / p.B(4, 4)));
  CHECK(g.ki(12) == doctest::Approx(25.0 / p.B(12, 12)));
}
