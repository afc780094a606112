#pragma once

#include <Eigen/Dense>

namespace cfc {

/// One classical fourth-order Runge-Kutta step of x' = f(t, x).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& x, double h) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * h, State(x + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(x + (0.5 * h) * k2));
    const State k4 = f(t + h, State(x + h * k3));
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of fixed steps covering [0, t_end], rounding to the nearest step.
inline long step_count(double t_end, double dt) {
    return static_cast<long>(t_end / dt + 0.5);
}

}  // namespace cfc
