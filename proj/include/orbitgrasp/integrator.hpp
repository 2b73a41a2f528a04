#pragma once

#include <Eigen/Core>

namespace orbitgrasp {

// Classical explicit RK4 step for y' = f(t, y), with the first stage
// k1 = f(t, y) supplied by the caller.
template <typename Vector, typename F>
Vector rk4_step(F&& f, const Vector& y, const Vector& k1, double t, double dt) {
  const Vector k2 = f(t + 0.5 * dt, Vector(y + 0.5 * dt * k1));
  const Vector k3 = f(t + 0.5 * dt, Vector(y + 0.5 * dt * k2));
  const Vector k4 = f(t + dt, Vector(y + dt * k3));
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Vector, typename F>
Vector rk4_step(F&& f, const Vector& y, double t, double dt) {
  return rk4_step(f, y, Vector(f(t, y)), t, dt);
}

}  // namespace orbitgrasp
