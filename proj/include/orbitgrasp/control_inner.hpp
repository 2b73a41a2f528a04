#pragma once

// Inner loop: tracks the virtual velocity with a conditional-integrator
// feedback term plus model-based feedforward.
//
//   u_CI      = F sat1(H^-1 (G sigma + y))
//   sigma_dot = -G sigma + H sat1(H^-1 (G sigma + y))
//   F = |K_S| I, H = K_P^-1 F, G = H F^-1 K_I
//
// Inside the unsaturated region this is exactly the PI law K_P y + K_I sigma
// with sigma_dot = y; once saturated every channel is pinned at |K_S|.

#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/model.hpp"

namespace orbitgrasp {

class GainSet {
 public:
  GainSet() = default;
  // Throws Error unless all three are symmetric positive definite.
  GainSet(const Mat13& kp, const Mat13& ki, const Mat13& ks);

  const Mat13& kp() const { return kp_; }
  const Mat13& ki() const { return ki_; }
  const Mat13& ks() const { return ks_; }

  // Induced 2-norm of K_S.
  double ks_norm() const { return ks_norm_; }
  const Mat13& F() const { return F_; }
  const Mat13& H() const { return H_; }
  const Mat13& G() const { return G_; }
  const Mat13& H_inv() const { return H_inv_; }

 private:
  Mat13 kp_ = Mat13::Identity();
  Mat13 ki_ = Mat13::Identity();
  Mat13 ks_ = Mat13::Identity();
  double ks_norm_ = 1.0;
  Mat13 F_ = Mat13::Identity();
  Mat13 H_ = Mat13::Identity();
  Mat13 G_ = Mat13::Identity();
  Mat13 H_inv_ = Mat13::Identity();
};

struct CIState {
  Vec13 sigma = Vec13::Zero();
};

Vec13 feedforward(const ClosedFormMatrices& cf, const Vec13& v_v, const Vec13& v_v_dot);

Vec13 pi_control(const GainSet& gains, const Vec13& v_e, const Vec13& x_i);

// Componentwise clamp to [-1, 1].
Vec13 sat1(const Vec13& x);

struct CIOutput {
  Vec13 u;
  Vec13 sigma_dot;
};

// Instantaneous conditional-integrator law; used by the coupled integrator.
CIOutput ci_law(const GainSet& gains, const Vec13& sigma, const Vec13& y);

// Advances sigma over dt with RK4, holding y constant. Returns u at the start
// of the step together with the advanced state.
std::pair<Vec13, CIState> ci_step(const GainSet& gains, const CIState& ci, const Vec13& y,
                                  double dt);

struct InnerOutput {
  Vec13 u;          // [m_b; f_b; tau]
  Vec13 u_ci;
  Vec13 u_ff;
  CIState next;
};

InnerOutput inner_control(const ClosedFormMatrices& cf, const GainSet& gains, const CIState& ci,
                          const Vec13& v_v, const Vec13& v_v_dot, const Vec13& v_measured,
                          double dt);

// Inner-loop Lyapunov function ½ v_e^T M v_e + ½ x_I^T K_I x_I.
double inner_lyapunov(const Mat13& M, const GainSet& gains, const Vec13& v_e, const Vec13& x_i);

// Loop bandwidths (rad/s) per channel group.
struct LoopBandwidths {
  double attitude = 1.5;
  double position = 1.0;
  double manipulator = 5.0;
};

// Diagonal K_P, K_I by decoupled pole placement on the linearized plant:
// each channel with effective inertia 1/B_ii gets a double pole at -w
// (damping ratio `zeta`).
struct PolePlacementGains {
  Vec13 kp;
  Vec13 ki;
};
PolePlacementGains pole_placement(const LinearizedPlant& plant, const LoopBandwidths& bw,
                                  double zeta = 1.0);

}  // namespace orbitgrasp
