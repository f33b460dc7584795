#include "deconf/env/pendulum.hpp"

#include <algorithm>
#include <cmath>

namespace deconf::env {

std::size_t
scripted_rational_policy(const StateVec& s, const ControllerGains& gains)
{
  // With unit rod and mass the dynamics are v' = 15 sin(theta) + 3 u, which
  // conserves E = v^2/2 + 15 cos(theta) when u = 0. Upright at rest has E = 15.
  const double theta = std::atan2(s.y, s.x);
  const double v = s.v;
  double u;
  if (std::abs(theta) < gains.balance_angle) {
    u = -gains.kp * theta - gains.kd * v;
  } else {
    double energy = 0.5 * v * v + 15.0 * std::cos(theta);
    double deficit = 15.0 - energy;
    if (std::abs(v) < 1e-3)
      u = deficit > 0.0 ? 2.0 : 0.0;
    else
      u = gains.energy * deficit * (v > 0.0 ? 1.0 : -1.0);
  }
  u = std::clamp(u, -2.0, 2.0);
  return static_cast<std::size_t>(std::lround(u) + 2);
}

Policy
scripted_policy(const ControllerGains& gains)
{
  return [gains](const StateVec& s) { return scripted_rational_policy(s, gains); };
}

} // namespace deconf::env
