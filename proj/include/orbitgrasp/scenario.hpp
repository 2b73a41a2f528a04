#pragma once

// Typed scenario description bound from a ConfigDocument. Every key the
// simulator understands is listed in scenario_schema(); anything else is
// rejected. Validation failures are reported as ConfigError naming the key.

#include <string>
#include <vector>

#include "orbitgrasp/config.hpp"
#include "orbitgrasp/control_inner.hpp"
#include "orbitgrasp/control_outer.hpp"
#include "orbitgrasp/guidance.hpp"
#include "orbitgrasp/model.hpp"
#include "orbitgrasp/sloshing.hpp"

namespace orbitgrasp {

enum class ControllerKind { kHierarchical, kPiBaseline };

enum class KeyCheck {
  kAny,
  kPositive,      // every element > 0
  kNonNegative,   // every element >= 0
  kUnitQuat,      // 4 elements, norm 1 within 1e-6
  kNonZero,       // not the zero vector
  kCount,         // integer >= 1
  kOpenUnit,      // scalar in (0, 1)
  kWord,          // one of `words`
  kWordOrPositive // one of `words`, or a number > 0
};

struct KeySpec {
  std::string key;
  ConfigValue::Kind kind;
  int size;  // array length; 0 for scalars
  KeyCheck check;
  bool required;
  std::vector<std::string> words;
};

const std::vector<KeySpec>& scenario_schema();
const KeySpec* find_key_spec(const std::string& key);

struct InnerTuning {
  bool pole_placement = true;
  LoopBandwidths bandwidth;
  double damping = 1.0;
  Vec13 kp = Vec13::Ones();  // manual tuning only
  Vec13 ki = Vec13::Ones();
  Vec13 ks = Vec13::Ones();
};

struct ScenarioConfig {
  ControllerKind controller = ControllerKind::kHierarchical;
  RobotModel robot;  // base and arm; the pendulum is added from `sloshing`
  SloshingParams sloshing;
  GuidanceParams guidance;
  TargetState target;
  SystemState initial;

  OuterGains outer;
  double hybrid_delta = 0.5;
  CSFParams csf;
  InnerTuning inner;
  Vec13 limits = Vec13::Ones();
  double baseline_gain_scale = 1.0;
  double baseline_epsilon = 100.0;

  double dt = 1e-3;
  double hold = 2.0;  // simulated time past t_grasp
  int decimation = 10;
  double capture_position_tol = 0.01;
  double capture_attitude_tol = 0.01;
};

// Binds and validates. Throws ConfigError.
ScenarioConfig scenario_from_config(const ConfigDocument& doc);

// Applies "KEY=VALUE" overrides; each key must be part of the schema.
void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides);

// Arm and base with the slosh pendulum attached.
RobotModel plant_model(const ScenarioConfig& cfg);

// What the controller believes: pendulum lumped into the base.
RobotModel controller_model(const ScenarioConfig& cfg);

double end_time(const ScenarioConfig& cfg);

}  // namespace orbitgrasp
