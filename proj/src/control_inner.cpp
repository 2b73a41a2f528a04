#include "orbitgrasp/control_inner.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

namespace {

void require_spd(const Mat13& m, const char* name) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.norm())) {
    throw Error(std::string(name) + " must be symmetric");
  }
  Eigen::LLT<Mat13> llt(m);
  if (llt.info() != Eigen::Success) throw Error(std::string(name) + " must be positive definite");
}

}  // namespace

GainSet::GainSet(const Mat13& kp, const Mat13& ki, const Mat13& ks) : kp_(kp), ki_(ki), ks_(ks) {
  require_spd(kp_, "K_P");
  require_spd(ki_, "K_I");
  require_spd(ks_, "K_S");
  // Symmetric positive definite: the induced 2-norm is the largest eigenvalue.
  Eigen::SelfAdjointEigenSolver<Mat13> eig(ks_, Eigen::EigenvaluesOnly);
  ks_norm_ = eig.eigenvalues().maxCoeff();
  F_ = ks_norm_ * Mat13::Identity();
  const Mat13 kp_inv = kp_.llt().solve(Mat13::Identity());
  H_ = kp_inv * F_;
  G_ = H_ * (Mat13::Identity() / ks_norm_) * ki_;
  H_inv_ = (Mat13::Identity() / ks_norm_) * kp_;
}

Vec13 feedforward(const ClosedFormMatrices& cf, const Vec13& v_v, const Vec13& v_v_dot) {
  return cf.M * v_v_dot + cf.C * v_v;
}

Vec13 pi_control(const GainSet& gains, const Vec13& v_e, const Vec13& x_i) {
  return gains.kp() * v_e + gains.ki() * x_i;
}

Vec13 sat1(const Vec13& x) { return x.cwiseMax(-1.0).cwiseMin(1.0); }

CIOutput ci_law(const GainSet& gains, const Vec13& sigma, const Vec13& y) {
  const Vec13 s = sat1(gains.H_inv() * (gains.G() * sigma + y));
  return {gains.F() * s, -gains.G() * sigma + gains.H() * s};
}

std::pair<Vec13, CIState> ci_step(const GainSet& gains, const CIState& ci, const Vec13& y,
                                  double dt) {
  if (!(dt > 0.0)) throw Error("ci_step: dt must be positive");
  const CIOutput k1 = ci_law(gains, ci.sigma, y);
  const Vec13 k2 = ci_law(gains, ci.sigma + 0.5 * dt * k1.sigma_dot, y).sigma_dot;
  const Vec13 k3 = ci_law(gains, ci.sigma + 0.5 * dt * k2, y).sigma_dot;
  const Vec13 k4 = ci_law(gains, ci.sigma + dt * k3, y).sigma_dot;
  CIState next;
  next.sigma = ci.sigma + dt / 6.0 * (k1.sigma_dot + 2.0 * k2 + 2.0 * k3 + k4);
  return {k1.u, next};
}

InnerOutput inner_control(const ClosedFormMatrices& cf, const GainSet& gains, const CIState& ci,
                          const Vec13& v_v, const Vec13& v_v_dot, const Vec13& v_measured,
                          double dt) {
  InnerOutput out;
  const auto [u_ci, next] = ci_step(gains, ci, v_v - v_measured, dt);
  out.u_ci = u_ci;
  out.u_ff = feedforward(cf, v_v, v_v_dot);
  out.u = out.u_ci + out.u_ff;
  out.next = next;
  return out;
}

double inner_lyapunov(const Mat13& M, const GainSet& gains, const Vec13& v_e, const Vec13& x_i) {
  return 0.5 * v_e.dot(M * v_e) + 0.5 * x_i.dot(gains.ki() * x_i);
}

PolePlacementGains pole_placement(const LinearizedPlant& plant, const LoopBandwidths& bw,
                                  double zeta) {
  PolePlacementGains g;
  for (int i = 0; i < kControlDofs; ++i) {
    const double w = i < 3 ? bw.attitude : (i < 6 ? bw.position : bw.manipulator);
    const double inertia = 1.0 / plant.B(i, i);
    g.kp(i) = 2.0 * zeta * w * inertia;
    g.ki(i) = w * w * inertia;
  }
  return g;
}

}  // namespace orbitgrasp
