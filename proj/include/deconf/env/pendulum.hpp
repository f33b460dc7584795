#pragma once

#include "deconf/core/config.hpp"
#include "deconf/core/dataset.hpp"
#include "deconf/core/random.hpp"
#include "deconf/core/types.hpp"

#include <functional>

namespace deconf::env {

struct PhysicsParams
{
  double g = 10.0;
  double l_rod = 1.0;
  double mass = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  std::size_t episode_len = 200;
};

//! Angle (0 upright, wrapped to (-pi, pi]) and angular velocity.
struct EnvState
{
  double theta = 0.0;
  double v = 0.0;
};

//! Emotional tasks: w1 = negative emotion, w2 = negative expression (0/1).
//! Windy tasks: w1 = fear, w2 = wind direction code in {0, 1, 2}.
struct ConfounderDraw
{
  bool w1 = false;
  int w2 = 0;
};

struct BehaviorConfig
{
  double odds = 4.0;
  double irrational_prob = 0.7;
  double v_threshold = 1.0;
  double p_fail = 0.0;
};

BehaviorConfig behavior_config(Scenario scenario, const EnvSettings& settings);

//! Maps an observed state to an action index.
using Policy = std::function<std::size_t(const StateVec&)>;

double wrap_angle(double theta);

EnvState step_physics(const EnvState& state, double torque, const PhysicsParams& params = {});

// Sensor reading with a jittered arm length l ~ TruncNormal(1, 0.1^2) on (0.5, 1.5).
StateVec observe(const EnvState& state, Rng& rng);

ConfounderDraw sample_confounders(Scenario scenario,
                                  const StateVec& s,
                                  const BehaviorConfig& config,
                                  Rng& rng);

std::size_t behavior_action(Scenario scenario,
                            const EnvState& s_true,
                            const StateVec& s_obs,
                            const ConfounderDraw& w,
                            const Policy& rational,
                            const BehaviorConfig& config,
                            Rng& rng);

std::size_t intermediate_action(std::size_t a, double p_fail, Rng& rng);

// Gym pendulum cost on the pre-step state.
double original_reward(const EnvState& state, double executed_torque);

// Whether the environment pays the N(10,1) encouragement bonus.
bool encouragement(Scenario scenario, const ConfounderDraw& w);

double reward(Scenario scenario,
              const EnvState& state,
              double executed_torque,
              const ConfounderDraw& w,
              Rng& rng);

double wind_force(int w2);

// Torque seen by the physics: the executed action minus the wind's tangential
// component on Windy tasks.
double effective_torque(Scenario scenario, const EnvState& state, int executed_torque, const ConfounderDraw& w);

EnvState reset_state(Rng& rng);

OfflineDataset generate_offline_dataset(const ExperimentConfig& config, const Policy& rational, Rng& rng);

double online_rollout(Scenario scenario,
                      const Policy& policy,
                      const EnvSettings& settings,
                      Rng& rng,
                      std::size_t n_episodes,
                      const PhysicsParams& params = {});

//! Energy-shaping swing-up with a PD balance law, snapped to the nearest
//! discrete torque.
struct ControllerGains
{
  double energy = 0.5;
  double kp = 10.0;
  double kd = 2.0;
  double balance_angle = 0.5;
};

std::size_t scripted_rational_policy(const StateVec& s, const ControllerGains& gains = {});

Policy scripted_policy(const ControllerGains& gains = {});

// Mean undiscounted original-reward return on the plain pendulum (no
// confounders, no bonus, no actuator failure).
double unconfounded_return(const Policy& policy, Rng& rng, std::size_t n_episodes);

} // namespace deconf::env
