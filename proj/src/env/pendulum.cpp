#include "deconf/env/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace deconf::env {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEncouragementMean = 10.0;
constexpr double kExpressionGivenEmotion = 0.99;

int
sign(double x)
{
  return (x > 0.0) - (x < 0.0);
}

} // namespace

BehaviorConfig
behavior_config(Scenario scenario, const EnvSettings& settings)
{
  BehaviorConfig c;
  c.odds = settings.odds;
  c.irrational_prob = settings.irrational_prob;
  c.v_threshold = settings.v_threshold.value_or(1.0);
  c.p_fail = is_star(scenario) ? 0.0 : settings.p_fail.value_or(0.0);
  return c;
}

double
wrap_angle(double theta)
{
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w < 0.0)
    w += 2.0 * kPi;
  w -= kPi;
  // fmod maps +pi to -pi; the interval is (-pi, pi].
  return w <= -kPi ? kPi : w;
}

EnvState
step_physics(const EnvState& state, double torque, const PhysicsParams& p)
{
  double accel = 3.0 * p.g / (2.0 * p.l_rod) * std::sin(state.theta) +
                 3.0 / (p.mass * p.l_rod * p.l_rod) * torque;
  double v = std::clamp(state.v + accel * p.dt, -p.max_speed, p.max_speed);
  return { wrap_angle(state.theta + v * p.dt), v };
}

StateVec
observe(const EnvState& state, Rng& rng)
{
  std::normal_distribution<double> length(1.0, 0.1);
  double l = length(rng);
  while (!(l > 0.5 && l < 1.5))
    l = length(rng);
  return { std::cos(state.theta) * l, std::sin(state.theta) * l, state.v };
}

ConfounderDraw
sample_confounders(Scenario scenario, const StateVec&, const BehaviorConfig& config, Rng& rng)
{
  ConfounderDraw w;
  if (is_windy(scenario)) {
    double calm = config.odds / (1.0 + config.odds);
    double u = uniform01(rng);
    if (u < calm)
      w.w2 = 1;
    else
      w.w2 = u < calm + 0.5 * (1.0 - calm) ? 0 : 2;
    w.w1 = w.w2 != 1;
    return w;
  }
  w.w1 = bernoulli(rng, 1.0 / (1.0 + config.odds));
  double p_expression = w.w1 ? kExpressionGivenEmotion : 1.0 - kExpressionGivenEmotion;
  w.w2 = bernoulli(rng, p_expression) ? 1 : 0;
  return w;
}

std::size_t
behavior_action(Scenario scenario,
                const EnvState& s_true,
                const StateVec& s_obs,
                const ConfounderDraw& w,
                const Policy& rational,
                const BehaviorConfig& config,
                Rng& rng)
{
  const std::size_t rational_action = rational(s_obs);
  if (!w.w1)
    return rational_action;

  auto torque_index = [&](int direction) {
    return direction == 0 ? rational_action : ActionSpace::index_of(2 * direction);
  };
  const double v = s_true.v;

  if (is_windy(scenario)) {
    double u = uniform01(rng);
    if (u < 0.5 * config.irrational_prob) {
      double push = wind_force(w.w2) * std::cos(s_true.theta);
      return torque_index(-sign(push));
    }
    if (u < config.irrational_prob)
      return torque_index(-sign(v));
    return rational_action;
  }

  if (v == 0.0)
    return rational_action;
  if (!bernoulli(rng, config.irrational_prob))
    return rational_action;
  // Speed up when slow, slow down when fast.
  return std::abs(v) <= config.v_threshold ? torque_index(sign(v)) : torque_index(-sign(v));
}

std::size_t
intermediate_action(std::size_t a, double p_fail, Rng& rng)
{
  if (bernoulli(rng, p_fail))
    return std::uniform_int_distribution<std::size_t>(0, kNumActions - 1)(rng);
  return a;
}

double
original_reward(const EnvState& state, double torque)
{
  double th = wrap_angle(state.theta);
  return -(th * th + 0.1 * state.v * state.v + 0.001 * torque * torque);
}

bool
encouragement(Scenario scenario, const ConfounderDraw& w)
{
  return is_windy(scenario) ? w.w2 != 1 : w.w2 == 1;
}

double
reward(Scenario scenario, const EnvState& state, double executed_torque, const ConfounderDraw& w, Rng& rng)
{
  double bonus = normal(rng, encouragement(scenario, w) ? kEncouragementMean : 0.0, 1.0);
  return original_reward(state, executed_torque) + bonus;
}

double
wind_force(int w2)
{
  switch (w2) {
    case 0: return -5.0;
    case 1: return 0.0;
    case 2: return 5.0;
    default: throw Error("invalid wind code " + std::to_string(w2));
  }
}

double
effective_torque(Scenario scenario, const EnvState& state, int executed_torque, const ConfounderDraw& w)
{
  if (!is_windy(scenario))
    return executed_torque;
  return executed_torque - wind_force(w.w2) * std::cos(state.theta);
}

EnvState
reset_state(Rng& rng)
{
  double theta = uniform(rng, -kPi, kPi);
  double v = uniform(rng, -1.0, 1.0);
  return { wrap_angle(theta), v };
}

} // namespace deconf::env
