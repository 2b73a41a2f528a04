#include "orbitgrasp/sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "orbitgrasp/error.hpp"
#include "orbitgrasp/guidance.hpp"
#include "orbitgrasp/integrator.hpp"
#include "orbitgrasp/sloshing.hpp"

namespace orbitgrasp {

namespace {

constexpr int kQuat = 0;
constexpr int kPos = 4;
constexpr int kQ = 7;
constexpr int kQp = 14;
constexpr int kVel = 16;
constexpr int kSigma = kPlantStateSize;
constexpr int kCsf = kPlantStateSize + 13;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

GainSet make_gains(const ScenarioConfig& cfg, const RobotModel& ctrl) {
  Vec13 kp = cfg.inner.kp, ki = cfg.inner.ki;
  if (cfg.inner.pole_placement) {
    const PolePlacementGains pp =
        pole_placement(linearize(ctrl, cfg.initial), cfg.inner.bandwidth, cfg.inner.damping);
    kp = pp.kp;
    ki = pp.ki;
  }
  if (cfg.controller == ControllerKind::kPiBaseline) {
    kp *= cfg.baseline_gain_scale;
    ki *= cfg.baseline_gain_scale;
  }
  return GainSet(kp.asDiagonal(), ki.asDiagonal(), cfg.inner.ks.asDiagonal());
}

}  // namespace

Eigen::VectorXd pack_plant(const SystemState& s) {
  Eigen::VectorXd y(kPlantStateSize);
  const Quat& e = s.base_pose.rotation;
  y.segment<4>(kQuat) << e.w(), e.x(), e.y(), e.z();
  y.segment<3>(kPos) = s.base_pose.position;
  y.segment<7>(kQ) = s.q;
  y.segment<2>(kQp) = s.q_p;
  y.segment<3>(kVel) = s.nu0.angular;
  y.segment<3>(kVel + 3) = s.nu0.linear;
  y.segment<7>(kVel + 6) = s.omega_q;
  y.segment<2>(kVel + 13) = s.qp_dot;
  return y;
}

SystemState unpack_plant(const Eigen::VectorXd& y) {
  SystemState s;
  s.base_pose.rotation = Quat(y(kQuat), y(kQuat + 1), y(kQuat + 2), y(kQuat + 3));
  s.base_pose.position = y.segment<3>(kPos);
  s.q = y.segment<7>(kQ);
  s.q_p = y.segment<2>(kQp);
  s.nu0.angular = y.segment<3>(kVel);
  s.nu0.linear = y.segment<3>(kVel + 3);
  s.omega_q = y.segment<7>(kVel + 6);
  s.qp_dot = y.segment<2>(kVel + 13);
  return s;
}

Eigen::VectorXd plant_rate(const Tree& plant_tree, const Eigen::VectorXd& y, const Vec13& u) {
  const SystemState s = unpack_plant(y);
  const ConfigRate cr = base_config_rate(s);
  const int nv = plant_tree.nv;
  Eigen::VectorXd q(nv - 6);
  q.head<7>() = s.q;
  if (nv > kControlDofs) q.tail<2>() = s.q_p;
  const Eigen::VectorXd v = y.segment(kVel, nv);

  Eigen::VectorXd d = Eigen::VectorXd::Zero(kPlantStateSize);
  d.segment<4>(kQuat) = cr.quat_dot;
  d.segment<3>(kPos) = cr.position_dot;
  d.segment<7>(kQ) = s.omega_q;
  d.segment<2>(kQp) = s.qp_dot;
  d.segment(kVel, nv) = forward_dynamics(plant_tree, q, v, u);
  return d;
}

void finish_plant_step(Eigen::VectorXd& y, double t) {
  if (!y.allFinite()) throw SimulationAbort(t, "non-finite state");
  const double n = y.segment<4>(kQuat).norm();
  if (!(n > 0.5)) throw SimulationAbort(t, "base quaternion collapsed");
  y.segment<4>(kQuat) /= n;
  if (pendulum_near_singular(y.segment<2>(kQp))) {
    throw SimulationAbort(t, "slosh pendulum reached the gimbal singularity");
  }
}

ClosedLoop::ClosedLoop(const ScenarioConfig& cfg, KernelPolicy policy)
    : cfg_(cfg),
      policy_(policy),
      plant_(plant_model(cfg)),
      ctrl_(rigidize(plant_)),
      plant_tree_(make_tree(plant_)),
      ctrl_tree_(make_tree(ctrl_)),
      outer_(cfg.outer),
      gains_(make_gains(cfg, ctrl_)),
      ee_initial_(end_effector_pose(ctrl_, cfg.initial)) {
  if (cfg.controller == ControllerKind::kPiBaseline) outer_.epsilon_fixed = cfg.baseline_epsilon;
  const Setpoint sp = ee_setpoint(cfg.guidance, cfg.target, ee_initial_, 0.0);
  hybrid_ = hybrid_init(pose_error(ee_initial_, sp).eta_e, cfg.hybrid_delta);
}

Eigen::VectorXd ClosedLoop::initial_state() const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(kLoopStateSize);
  y.head<kPlantStateSize>() = pack_plant(cfg_.initial);
  const Setpoint sp = ee_setpoint(cfg_.guidance, cfg_.target, ee_initial_, 0.0);
  const IkResult ik = ik_virtual_velocity(ctrl_, cfg_.initial, sp, outer_, hybrid_);
  y.segment<26>(kCsf) = csf_init(ik.v_v).x;
  return y;
}

Eigen::VectorXd ClosedLoop::derivative(double t, const Eigen::VectorXd& y,
                                       LoopSample* sample) const {
  SystemState s = unpack_plant(y);
  s.base_pose.rotation.normalize();
  const Setpoint sp = ee_setpoint(cfg_.guidance, cfg_.target, ee_initial_, t);
  const IkResult ik = ik_virtual_velocity(ctrl_, s, sp, outer_, hybrid_);
  const CSFState csf{y.segment<26>(kCsf)};
  const Vec13 v_v_dot = csf_output(csf);

  const Vec13 v = control_velocity(s);
  const ClosedFormMatrices cf = closed_form(ctrl_tree_, s.q, v, policy_);
  const Vec13 u_ff = feedforward(cf, ik.v_v, v_v_dot);
  const Vec13 err = ik.v_v - v;
  const Vec13 sigma = y.segment<13>(kSigma);

  Vec13 u_fb, sigma_dot;
  if (cfg_.controller == ControllerKind::kHierarchical) {
    const CIOutput ci = ci_law(gains_, sigma, err);
    u_fb = ci.u;
    sigma_dot = ci.sigma_dot;
  } else {
    u_fb = pi_control(gains_, err, sigma);
    sigma_dot = err;
  }
  const Vec13 u_raw = u_fb + u_ff;
  const Vec13 u = u_raw.cwiseMax(-cfg_.limits).cwiseMin(cfg_.limits);

  Eigen::VectorXd d(kLoopStateSize);
  try {
    d.head<kPlantStateSize>() = plant_rate(plant_tree_, y.head<kPlantStateSize>(), u);
  } catch (const SimulationAbort&) {
    throw;
  } catch (const Error& e) {
    throw SimulationAbort(t, e.what());
  }
  d.segment<13>(kSigma) = sigma_dot;
  d.segment<26>(kCsf) = csf_derivative(cfg_.csf, csf, ik.v_v);

  if (sample) {
    sample->setpoint = sp;
    sample->ee = end_effector_pose(ctrl_, s);
    sample->v_v = ik.v_v;
    sample->u_raw = u_raw;
    sample->u = u;
    sample->epsilon = ik.epsilon;
    sample->p0_norm = ik.p0_norm;
  }
  return d;
}

Eigen::VectorXd ClosedLoop::step(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& k1,
                                 double dt) {
  auto f = [this](double tt, const Eigen::VectorXd& yy) { return derivative(tt, yy); };
  Eigen::VectorXd next = rk4_step(f, y, k1, t, dt);
  Eigen::VectorXd plant = next.head<kPlantStateSize>();
  finish_plant_step(plant, t + dt);
  next.head<kPlantStateSize>() = plant;
  if (!next.allFinite()) throw SimulationAbort(t + dt, "non-finite controller state");

  const SystemState s = unpack_plant(next);
  const Setpoint sp = ee_setpoint(cfg_.guidance, cfg_.target, ee_initial_, t + dt);
  const HybridState updated = hybrid_update(hybrid_, pose_error(end_effector_pose(ctrl_, s), sp).eta_e);
  if (updated.h != hybrid_.h) ++h_flips_;
  hybrid_ = updated;
  return next;
}

GraspError grasp_error(const Pose& ee, const Pose& grasp) {
  Quat e = quat_error(grasp.rotation, ee.rotation);
  if (e.w() < 0.0) e.coeffs() = -e.coeffs();
  return {ee.position - grasp.position, e.vec()};
}

std::string telemetry_header() {
  std::string h = "t,p_err_x,p_err_y,p_err_z,eta_v_err_x,eta_v_err_y,eta_v_err_z";
  for (const char* name : kChannelNames) h += std::string(",") + csv_field(name);
  return h + ",q_p_1,q_p_2,eps,h,p0_norm";
}

namespace {

struct Engine {
  const ScenarioConfig& cfg;
  ClosedLoop loop;
  Eigen::VectorXd y;
  long n_steps;

  Engine(const ScenarioConfig& c, KernelPolicy policy, double t_end)
      : cfg(c), loop(c, policy), y(loop.initial_state()),
        n_steps(std::lround(t_end / c.dt)) {}
};

}  // namespace

RunMetrics run_scenario(const ScenarioConfig& cfg, std::ostream* telemetry, KernelPolicy policy) {
  Engine eng(cfg, policy, end_time(cfg));
  const long capture_step = std::lround(cfg.guidance.timeline.t_grasp / cfg.dt);
  RunMetrics m;
  m.end_time = eng.n_steps * cfg.dt;
  if (telemetry) *telemetry << telemetry_header() << '\n';

  for (long k = 0; k <= eng.n_steps; ++k) {
    const double t = k * cfg.dt;
    LoopSample s;
    Eigen::VectorXd k1;
    try {
      k1 = eng.loop.derivative(t, eng.y, &s);
    } catch (const SimulationAbort& e) {
      m.aborted = true;
      m.abort_time = e.time();
      m.abort_cause = e.cause();
      break;
    }

    const SystemState st = unpack_plant(eng.y);
    const GraspError ge = grasp_error(s.ee, grasp_frame_at(cfg.target, t).pose);
    const GraspError te = grasp_error(s.ee, Pose{s.setpoint.attitude, s.setpoint.position});
    m.max_tracking_position_error = std::max(m.max_tracking_position_error, te.position.norm());
    m.max_tracking_attitude_error = std::max(m.max_tracking_attitude_error, te.attitude.norm());
    for (int i = 0; i < 13; ++i) {
      if (std::abs(s.u_raw(i)) > cfg.limits(i)) ++m.saturated_samples(i);
      m.max_abs_u(i) = std::max(m.max_abs_u(i), std::abs(s.u(i)));
    }
    m.pendulum_max_excursion = std::max(m.pendulum_max_excursion, pendulum_excursion(st.q_p));
    if (k == capture_step) {
      m.capture_position_error = ge.position.norm();
      m.capture_attitude_error = ge.attitude.norm();
    }
    m.final_position_error = ge.position.norm();
    m.final_attitude_error = ge.attitude.norm();
    m.steps = k;

    if (telemetry && (k % cfg.decimation == 0 || k == eng.n_steps)) {
      std::ostream& o = *telemetry;
      o << fmt(t);
      for (int i = 0; i < 3; ++i) o << ',' << fmt(ge.position(i));
      for (int i = 0; i < 3; ++i) o << ',' << fmt(ge.attitude(i));
      for (int i = 0; i < 13; ++i) o << ',' << fmt(s.u(i));
      o << ',' << fmt(st.q_p(0)) << ',' << fmt(st.q_p(1)) << ',' << fmt(s.epsilon) << ','
        << eng.loop.h() << ',' << fmt(s.p0_norm) << '\n';
    }
    if (k == eng.n_steps) break;
    try {
      eng.y = eng.loop.step(t, eng.y, k1, cfg.dt);
    } catch (const SimulationAbort& e) {
      m.aborted = true;
      m.abort_time = e.time();
      m.abort_cause = e.cause();
      break;
    }
  }
  m.h_flips = eng.loop.h_flips();
  m.captured = !m.aborted && m.steps >= capture_step &&
               m.capture_position_error <= cfg.capture_position_tol &&
               m.capture_attitude_error <= cfg.capture_attitude_tol;
  return m;
}

SystemState state_at(const ScenarioConfig& cfg, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error("snapshot time must be a finite value >= 0");
  Engine eng(cfg, KernelPolicy::kSerial, t);
  for (long k = 0; k < eng.n_steps; ++k) {
    const double tk = k * cfg.dt;
    eng.y = eng.loop.step(tk, eng.y, eng.loop.derivative(tk, eng.y), cfg.dt);
  }
  return unpack_plant(eng.y);
}

void write_metrics(std::ostream& out, const ScenarioConfig& cfg, const RunMetrics& m) {
  auto line = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  line("controller", cfg.controller == ControllerKind::kHierarchical ? "hierarchical"
                                                                     : "pi_baseline");
  line("captured", m.captured ? "true" : "false");
  line("aborted", m.aborted ? "true" : "false");
  if (m.aborted) {
    line("abort_time", fmt(m.abort_time));
    line("abort_cause", "\"" + m.abort_cause + "\"");
  }
  line("end_time", fmt(m.end_time));
  line("steps", std::to_string(m.steps));
  line("capture_time", fmt(cfg.guidance.timeline.t_grasp));
  line("capture_position_error", fmt(m.capture_position_error));
  line("capture_attitude_error", fmt(m.capture_attitude_error));
  line("final_position_error", fmt(m.final_position_error));
  line("final_attitude_error", fmt(m.final_attitude_error));
  line("max_tracking_position_error", fmt(m.max_tracking_position_error));
  line("max_tracking_attitude_error", fmt(m.max_tracking_attitude_error));
  line("saturated_samples_total", std::to_string(m.saturated_total()));
  for (int i = 0; i < 13; ++i) {
    line(std::string("saturated_samples.") + kChannelNames[i],
         std::to_string(m.saturated_samples(i)));
  }
  for (int i = 0; i < 13; ++i) line(std::string("max_abs_u.") + kChannelNames[i], fmt(m.max_abs_u(i)));
  line("h_flips", std::to_string(m.h_flips));
  line("pendulum_max_excursion", fmt(m.pendulum_max_excursion));
}

int exit_code(const RunMetrics& m) { return m.captured ? 0 : 2; }

}  // namespace orbitgrasp
