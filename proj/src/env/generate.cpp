#include "deconf/core/text_io.hpp"
#include "deconf/env/pendulum.hpp"

namespace deconf::env {

namespace {

std::string
generator_digest(const ExperimentConfig& c)
{
  std::string key = std::string(to_string(c.scenario)) + ";" +
                    text::format_real(c.env.p_fail.value_or(-1.0)) + ";" + text::format_real(c.env.odds) +
                    ";" + text::format_real(c.env.v_threshold.value_or(-1.0)) + ";" +
                    text::format_real(c.env.irrational_prob) + ";" + std::to_string(c.dataset_size) +
                    ";" + std::to_string(c.data_seed) + ";rational=scripted";
  return text::digest(key);
}

} // namespace

OfflineDataset
generate_offline_dataset(const ExperimentConfig& config, const Policy& rational, Rng& rng)
{
  if (config.scenario == Scenario::Tabular)
    throw Error("tabular datasets are generated from explicit probability tables");
  config.validate();

  const Scenario scenario = config.scenario;
  const BehaviorConfig bc = behavior_config(scenario, config.env);
  const PhysicsParams physics;
  const bool star = is_star(scenario);

  OfflineDataset ds;
  ds.scenario = scenario;
  ds.shape = *required_shape(scenario);
  ds.num_actions = kNumActions;
  ds.seed = config.data_seed;
  ds.generator_config_digest = generator_digest(config);
  ds.transitions.reserve(config.dataset_size);

  EnvState state = reset_state(rng);
  StateVec s_obs = observe(state, rng);
  std::size_t step = 0;
  for (std::size_t i = 0; i < config.dataset_size; ++i) {
    if (step == physics.episode_len) {
      state = reset_state(rng);
      s_obs = observe(state, rng);
      step = 0;
    }
    ConfounderDraw w = sample_confounders(scenario, s_obs, bc, rng);
    std::size_t a = behavior_action(scenario, state, s_obs, w, rational, bc, rng);
    std::size_t executed = star ? a : intermediate_action(a, bc.p_fail, rng);
    int torque = ActionSpace::torque(executed);
    double r = reward(scenario, state, torque, w, rng);
    EnvState next = step_physics(state, effective_torque(scenario, state, torque, w), physics);
    StateVec s_next_obs = observe(next, rng);

    Transition t;
    t.s = s_obs;
    t.a = static_cast<int>(a);
    if (star)
      t.u = w.w2;
    else
      t.m = static_cast<int>(executed);
    t.s_next = s_next_obs;
    t.r = r;
    t.done = false;
    ds.transitions.push_back(t);

    state = next;
    s_obs = s_next_obs;
    ++step;
  }
  return ds;
}

double
online_rollout(Scenario scenario,
               const Policy& policy,
               const EnvSettings& settings,
               Rng& rng,
               std::size_t n_episodes,
               const PhysicsParams& physics)
{
  if (n_episodes == 0)
    throw Error("n_episodes must be at least 1");
  const BehaviorConfig bc = behavior_config(scenario, settings);
  const bool star = is_star(scenario);
  double total = 0.0;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    EnvState state = reset_state(rng);
    for (std::size_t t = 0; t < physics.episode_len; ++t) {
      StateVec s_obs = observe(state, rng);
      std::size_t a = policy(s_obs);
      ConfounderDraw w = sample_confounders(scenario, s_obs, bc, rng);
      std::size_t executed = star ? a : intermediate_action(a, bc.p_fail, rng);
      int torque = ActionSpace::torque(executed);
      total += reward(scenario, state, torque, w, rng);
      state = step_physics(state, effective_torque(scenario, state, torque, w), physics);
    }
  }
  return total / static_cast<double>(n_episodes);
}

double
unconfounded_return(const Policy& policy, Rng& rng, std::size_t n_episodes)
{
  const PhysicsParams physics;
  double total = 0.0;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    EnvState state = reset_state(rng);
    for (std::size_t t = 0; t < physics.episode_len; ++t) {
      int torque = ActionSpace::torque(policy(observe(state, rng)));
      total += original_reward(state, torque);
      state = step_physics(state, torque, physics);
    }
  }
  return total / static_cast<double>(n_episodes);
}

} // namespace deconf::env
