#include "orbitgrasp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orbitgrasp/dynamics.hpp"

namespace orbitgrasp {

namespace {

using Kind = ConfigValue::Kind;

std::vector<KeySpec> build_schema() {
  auto num = [](std::string k, KeyCheck c, bool req) {
    return KeySpec{std::move(k), Kind::kNumber, 0, c, req, {}};
  };
  auto arr = [](std::string k, int n, KeyCheck c, bool req) {
    return KeySpec{std::move(k), Kind::kArray, n, c, req, {}};
  };
  auto word = [](std::string k, std::vector<std::string> words, bool req) {
    return KeySpec{std::move(k), Kind::kString, 0, KeyCheck::kWord, req, std::move(words)};
  };
  const bool R = true, O = false;
  std::vector<KeySpec> s = {
      word("controller", {"hierarchical", "pi_baseline"}, R),
      num("sim.dt", KeyCheck::kPositive, R),
      num("sim.hold", KeyCheck::kNonNegative, O),
      num("sim.decimation", KeyCheck::kCount, O),
      num("capture.position_tol", KeyCheck::kPositive, O),
      num("capture.attitude_tol", KeyCheck::kPositive, O),
      num("timeline.t_start", KeyCheck::kNonNegative, R),
      num("timeline.t_point", KeyCheck::kPositive, R),
      num("timeline.t_grasp", KeyCheck::kPositive, R),
      num("guidance.standoff", KeyCheck::kNonNegative, O),
      arr("target.attitude", 4, KeyCheck::kUnitQuat, R),
      arr("target.omega", 3, KeyCheck::kAny, R),
      arr("target.grasp_position", 3, KeyCheck::kAny, R),
      arr("target.grasp_attitude", 4, KeyCheck::kUnitQuat, R),
      arr("initial.base_position", 3, KeyCheck::kAny, R),
      arr("initial.base_attitude", 4, KeyCheck::kUnitQuat, R),
      arr("initial.q", 7, KeyCheck::kAny, R),
      arr("initial.q_p", 2, KeyCheck::kAny, O),
      arr("initial.base_twist", 6, KeyCheck::kAny, O),
      arr("initial.joint_rates", 7, KeyCheck::kAny, O),
      num("base.mass", KeyCheck::kPositive, R),
      arr("base.com", 3, KeyCheck::kAny, R),
      arr("base.inertia", 6, KeyCheck::kAny, R),
      arr("end_effector.position", 3, KeyCheck::kAny, R),
      arr("end_effector.attitude", 4, KeyCheck::kUnitQuat, R),
      num("sloshing.length", KeyCheck::kPositive, R),
      num("sloshing.bob_mass", KeyCheck::kNonNegative, R),
      arr("sloshing.attach_position", 3, KeyCheck::kAny, R),
      arr("sloshing.attach_attitude", 4, KeyCheck::kUnitQuat, R),
      num("sloshing.beta_damp", KeyCheck::kNonNegative, O),
      arr("outer.k_att", 3, KeyCheck::kPositive, O),
      arr("outer.k_pos", 3, KeyCheck::kPositive, O),
      num("outer.w_base_ang", KeyCheck::kPositive, O),
      num("outer.w_base_lin", KeyCheck::kPositive, O),
      num("outer.r_cl", KeyCheck::kPositive, R),
      num("outer.r_far", KeyCheck::kPositive, O),
      KeySpec{"outer.epsilon", Kind::kString, 0, KeyCheck::kWordOrPositive, O, {"scheduled"}},
      num("outer.delta", KeyCheck::kOpenUnit, O),
      num("outer.csf_omega", KeyCheck::kPositive, O),
      num("outer.csf_xi", KeyCheck::kPositive, O),
      word("inner.tuning", {"pole_placement", "manual"}, O),
      arr("inner.bandwidth", 3, KeyCheck::kPositive, O),
      num("inner.damping", KeyCheck::kPositive, O),
      arr("inner.kp", 13, KeyCheck::kPositive, O),
      arr("inner.ki", 13, KeyCheck::kPositive, O),
      arr("inner.ks", 13, KeyCheck::kPositive, R),
      arr("actuators.limits", 13, KeyCheck::kPositive, R),
      num("baseline.gain_scale", KeyCheck::kPositive, O),
      num("baseline.epsilon", KeyCheck::kPositive, O),
  };
  for (int i = 1; i <= kArmJoints; ++i) {
    const std::string p = "arm." + std::to_string(i) + ".";
    s.push_back(arr(p + "axis", 3, KeyCheck::kNonZero, R));
    s.push_back(arr(p + "origin_position", 3, KeyCheck::kAny, R));
    s.push_back(arr(p + "origin_attitude", 4, KeyCheck::kUnitQuat, R));
    s.push_back(num(p + "mass", KeyCheck::kPositive, R));
    s.push_back(arr(p + "com", 3, KeyCheck::kAny, R));
    s.push_back(arr(p + "inertia", 6, KeyCheck::kAny, R));
  }
  return s;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kNumber: return "a number";
    case Kind::kString: return "a word";
    case Kind::kBool: return "true or false";
    case Kind::kArray: return "an array";
  }
  return "?";
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (size_t i = 0; i < words.size(); ++i) s += (i ? ", " : "") + words[i];
  return s;
}

void check_entry(const KeySpec& spec, const ConfigValue& v) {
  auto fail = [&](const std::string& msg) { throw ConfigError(spec.key, v.line, msg); };
  const bool word_ok = spec.check == KeyCheck::kWordOrPositive && v.kind == Kind::kNumber;
  if (v.kind != spec.kind && !word_ok) fail(std::string("expected ") + kind_name(spec.kind));
  if (spec.kind == Kind::kArray && static_cast<int>(v.array.size()) != spec.size) {
    fail("expected " + std::to_string(spec.size) + " elements, got " +
         std::to_string(v.array.size()));
  }
  const std::vector<double> values =
      v.kind == Kind::kArray ? v.array : std::vector<double>{v.number};
  switch (spec.check) {
    case KeyCheck::kAny: break;
    case KeyCheck::kPositive:
      for (double x : values) {
        if (!(x > 0.0)) fail("must be positive");
      }
      break;
    case KeyCheck::kNonNegative:
      for (double x : values) {
        if (!(x >= 0.0)) fail("must be non-negative");
      }
      break;
    case KeyCheck::kUnitQuat: {
      double n2 = 0.0;
      for (double x : values) n2 += x * x;
      if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) fail("quaternion [w, x, y, z] must have unit norm");
      break;
    }
    case KeyCheck::kNonZero: {
      double n2 = 0.0;
      for (double x : values) n2 += x * x;
      if (!(n2 > 0.0)) fail("must not be the zero vector");
      break;
    }
    case KeyCheck::kCount:
      if (!(v.number >= 1.0) || v.number != std::floor(v.number) || v.number > 1e9) {
        fail("must be a whole number >= 1");
      }
      break;
    case KeyCheck::kOpenUnit:
      if (!(v.number > 0.0 && v.number < 1.0)) fail("must lie strictly between 0 and 1");
      break;
    case KeyCheck::kWord:
    case KeyCheck::kWordOrPositive:
      if (v.kind == Kind::kNumber) {
        if (!(v.number > 0.0)) fail("must be positive or one of: " + join(spec.words));
      } else if (std::find(spec.words.begin(), spec.words.end(), v.text) == spec.words.end()) {
        fail("'" + v.text + "' is not one of: " + join(spec.words));
      }
      break;
  }
}

class Binder {
 public:
  explicit Binder(const ConfigDocument& doc) : doc_(doc) {}

  bool has(const std::string& key) const { return doc_.contains(key); }
  int line(const std::string& key) const { return has(key) ? doc_.at(key).line : 0; }

  double number(const std::string& key, double fallback = 0.0) const {
    return has(key) ? doc_.at(key).number : fallback;
  }
  std::string word(const std::string& key, const std::string& fallback) const {
    return has(key) ? doc_.at(key).text : fallback;
  }
  template <int N>
  Eigen::Matrix<double, N, 1> vec(const std::string& key,
                                  const Eigen::Matrix<double, N, 1>& fallback =
                                      Eigen::Matrix<double, N, 1>::Zero()) const {
    if (!has(key)) return fallback;
    const std::vector<double>& a = doc_.at(key).array;
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(a.data());
  }
  Quat quat(const std::string& key) const {
    const Eigen::Vector4d q = vec<4>(key);
    return Quat(q(0), q(1), q(2), q(3)).normalized();
  }
  Mat3 inertia(const std::string& key) const {
    const Eigen::Matrix<double, 6, 1> a = vec<6>(key);
    Mat3 I;
    I << a(0), a(3), a(4),
         a(3), a(1), a(5),
         a(4), a(5), a(2);
    return I;
  }

 private:
  const ConfigDocument& doc_;
};

BodyInertia bind_body(const Binder& b, const std::string& section) {
  BodyInertia body;
  body.mass = b.number(section + ".mass");
  body.com = b.vec<3>(section + ".com");
  body.inertia = b.inertia(section + ".inertia");
  try {
    validate(body);
  } catch (const Error& e) {
    throw ConfigError(section + ".inertia", b.line(section + ".inertia"), e.what());
  }
  return body;
}

}  // namespace

const std::vector<KeySpec>& scenario_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

const KeySpec* find_key_spec(const std::string& key) {
  for (const KeySpec& s : scenario_schema()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides) {
  for (const std::string& o : overrides) {
    std::string key = o.substr(0, o.find('='));
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (!find_key_spec(key)) throw ConfigError(key, 0, "unknown key in override");
    doc.set(o);
  }
}

ScenarioConfig scenario_from_config(const ConfigDocument& doc) {
  for (const auto& [key, value] : doc.entries()) {
    const KeySpec* spec = find_key_spec(key);
    if (!spec) throw ConfigError(key, value.line, "unknown key");
    check_entry(*spec, value);
  }
  for (const KeySpec& spec : scenario_schema()) {
    if (spec.required && !doc.contains(spec.key)) {
      throw ConfigError(spec.key, 0, "missing required key");
    }
  }

  const Binder b(doc);
  ScenarioConfig cfg;
  cfg.controller = b.word("controller", "") == "pi_baseline" ? ControllerKind::kPiBaseline
                                                             : ControllerKind::kHierarchical;
  cfg.dt = b.number("sim.dt");
  cfg.hold = b.number("sim.hold", 2.0);
  cfg.decimation = static_cast<int>(b.number("sim.decimation", 10));
  cfg.capture_position_tol = b.number("capture.position_tol", 0.01);
  cfg.capture_attitude_tol = b.number("capture.attitude_tol", 0.01);

  Timeline& tl = cfg.guidance.timeline;
  tl.t_start = b.number("timeline.t_start");
  tl.t_point = b.number("timeline.t_point");
  tl.t_grasp = b.number("timeline.t_grasp");
  if (!(tl.t_point > tl.t_start)) {
    throw ConfigError("timeline.t_point", b.line("timeline.t_point"), "must exceed t_start");
  }
  if (!(tl.t_grasp > tl.t_point)) {
    throw ConfigError("timeline.t_grasp", b.line("timeline.t_grasp"), "must exceed t_point");
  }
  if (cfg.dt > tl.t_point - tl.t_start) {
    throw ConfigError("sim.dt", b.line("sim.dt"), "is longer than the approach phase");
  }

  cfg.target.attitude = b.quat("target.attitude");
  cfg.target.omega_t = b.vec<3>("target.omega");
  cfg.target.grasp_point = {b.quat("target.grasp_attitude"), b.vec<3>("target.grasp_position")};

  cfg.initial.base_pose = {b.quat("initial.base_attitude"), b.vec<3>("initial.base_position")};
  cfg.initial.q = b.vec<7>("initial.q");
  cfg.initial.q_p = b.vec<2>("initial.q_p");
  cfg.initial.nu0 = Twist::from_vector(b.vec<6>("initial.base_twist"));
  cfg.initial.omega_q = b.vec<7>("initial.joint_rates");
  if (pendulum_near_singular(cfg.initial.q_p)) {
    throw ConfigError("initial.q_p", b.line("initial.q_p"),
                      "second pendulum angle too close to +-pi/2");
  }

  cfg.robot.base = bind_body(b, "base");
  cfg.robot.arm.resize(kArmJoints);
  for (int i = 1; i <= kArmJoints; ++i) {
    const std::string p = "arm." + std::to_string(i);
    Link& link = cfg.robot.arm[i - 1];
    link.joint.axis = b.vec<3>(p + ".axis").normalized();
    link.joint.parent = i - 1;
    link.joint.origin = {b.quat(p + ".origin_attitude"), b.vec<3>(p + ".origin_position")};
    link.body = bind_body(b, p);
  }
  cfg.robot.ee_offset = {b.quat("end_effector.attitude"), b.vec<3>("end_effector.position")};

  cfg.sloshing.pendulum_length = b.number("sloshing.length");
  cfg.sloshing.bob_mass = b.number("sloshing.bob_mass");
  cfg.sloshing.attach_pose = {b.quat("sloshing.attach_attitude"),
                              b.vec<3>("sloshing.attach_position")};
  cfg.sloshing.beta_damp = b.number("sloshing.beta_damp", kDefaultSloshDamping);

  OuterGains& og = cfg.outer;
  og.k_att = b.vec<3>("outer.k_att", og.k_att);
  og.k_pos = b.vec<3>("outer.k_pos", og.k_pos);
  og.w_base_ang = b.number("outer.w_base_ang", og.w_base_ang);
  og.w_base_lin = b.number("outer.w_base_lin", og.w_base_lin);
  og.r_cl = b.number("outer.r_cl");
  og.r_far = b.number("outer.r_far", 2.0 * og.r_cl);
  if (!(og.r_far > og.r_cl)) {
    throw ConfigError(b.has("outer.r_far") ? "outer.r_far" : "outer.r_cl",
                      b.line("outer.r_far"), "r_far must exceed r_cl");
  }
  if (b.has("outer.epsilon") && doc.at("outer.epsilon").kind == Kind::kNumber) {
    og.epsilon_fixed = b.number("outer.epsilon");
  }
  cfg.hybrid_delta = b.number("outer.delta", 0.5);
  cfg.csf.omega = b.number("outer.csf_omega", cfg.csf.omega);
  cfg.csf.xi = b.number("outer.csf_xi", cfg.csf.xi);
  cfg.guidance.standoff = b.number("guidance.standoff", og.r_cl);

  InnerTuning& it = cfg.inner;
  it.pole_placement = b.word("inner.tuning", "pole_placement") == "pole_placement";
  const Eigen::Vector3d bw = b.vec<3>(
      "inner.bandwidth", Eigen::Vector3d(it.bandwidth.attitude, it.bandwidth.position,
                                         it.bandwidth.manipulator));
  it.bandwidth = {bw(0), bw(1), bw(2)};
  it.damping = b.number("inner.damping", 1.0);
  if (!it.pole_placement) {
    for (const char* key : {"inner.kp", "inner.ki"}) {
      if (!b.has(key)) throw ConfigError(key, 0, "required when inner.tuning = manual");
    }
    it.kp = b.vec<13>("inner.kp");
    it.ki = b.vec<13>("inner.ki");
  }
  it.ks = b.vec<13>("inner.ks");
  cfg.limits = b.vec<13>("actuators.limits");
  cfg.baseline_gain_scale = b.number("baseline.gain_scale", 1.0);
  cfg.baseline_epsilon = b.number("baseline.epsilon", 100.0);
  return cfg;
}

RobotModel plant_model(const ScenarioConfig& cfg) {
  RobotModel m = cfg.robot;
  m.pendulum = build_pendulum_branch(cfg.sloshing);
  return m;
}

RobotModel controller_model(const ScenarioConfig& cfg) { return rigidize(plant_model(cfg)); }

double end_time(const ScenarioConfig& cfg) { return cfg.guidance.timeline.t_grasp + cfg.hold; }

}  // namespace orbitgrasp
