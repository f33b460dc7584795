#pragma once

#include "deconf/core/dataset.hpp"
#include "deconf/core/random.hpp"

#include <functional>
#include <vector>

namespace deconf::weights {

//! Finite confounded MDP given by explicit probability tables.
//!
//! Offline step: w ~ P(w|s), a ~ pi_b(a|s,w), m ~ P(m|a),
//! (s', r) ~ P(s', r | s, w, m). Rewards are the codes 0..num_rewards-1.
//! Frontdoor instances record m; backdoor instances execute a directly
//! (P(m|a) is the identity) and record u = u_of_w[w].
struct TabularCmdp
{
  std::size_t num_states = 2;
  std::size_t num_actions = 2;
  std::size_t num_w = 2;
  std::size_t num_rewards = 2;
  std::vector<double> mu0;     // [s]
  std::vector<double> p_w;     // [s][w]
  std::vector<double> policy;  // [s][w][a]
  std::vector<double> p_m;     // [a][m]
  std::vector<double> outcome; // [s][w][m][s'][r]
  std::vector<int> u_of_w;
  bool backdoor = false;
  std::size_t episode_len = 50;

  double w_prob(std::size_t s, std::size_t w) const { return p_w[s * num_w + w]; }
  double pi(std::size_t s, std::size_t w, std::size_t a) const { return policy[(s * num_w + w) * num_actions + a]; }
  double m_prob(std::size_t a, std::size_t m) const { return p_m[a * num_actions + m]; }
  double outcome_prob(std::size_t s, std::size_t w, std::size_t m, std::size_t s2, std::size_t r) const;

  // Throws unless every table is finite, nonnegative and normalized.
  void validate() const;
};

// 2 states, 2 actions, binary w, actuator noise; pi_b(a=1|s,w=1)=0.9 and
// pi_b(a=1|s,w=0)=0.1.
TabularCmdp frontdoor_instance();

// Same dynamics with a behavior policy that ignores w.
TabularCmdp unconfounded_instance();

// Frontdoor instance where m lowers the reward while w raises it: a=1 looks
// better in the data, a=0 is better under do(a).
TabularCmdp reversal_instance();

// w = (w1, w2) with u = w2; the policy sees both, the outcome only w2.
TabularCmdp backdoor_instance();

OfflineDataset generate_tabular_dataset(const TabularCmdp& cmdp, std::size_t n, std::uint64_t seed);

using RatioOracle = std::function<double(const Transition&)>;

// Exact d1 / reward-only / next-state-only / d2 by enumeration over w and m.
RatioOracle exact_ratio_oracle(const TabularCmdp& cmdp, RatioKind kind);

// E[ratio | s, a] under the offline process (exactly 1 for every kind).
double oracle_conditional_mean(const TabularCmdp& cmdp, RatioKind kind, std::size_t s, std::size_t a);

// Offline probability of the observed row (s fixed): P(a, m or u, s', r | s).
double offline_row_prob(const TabularCmdp& cmdp, const Transition& t);

struct InterventionalDraw
{
  std::size_t m = 0;
  std::size_t s_next = 0;
  std::size_t r = 0;
};

// One step of the online process under do(a) at state s.
InterventionalDraw sample_interventional(const TabularCmdp& cmdp, std::size_t s, std::size_t a, Rng& rng);

// P(s', r | s, do(a)) as a [s'][r] table.
std::vector<double> interventional_outcome(const TabularCmdp& cmdp, std::size_t s, std::size_t a);

// Exact discounted value of a deterministic policy in the interventional MDP,
// averaged over mu0.
double interventional_value(const TabularCmdp& cmdp, const std::vector<std::size_t>& policy, double gamma);

// Optimal deterministic policy of the interventional MDP (value iteration).
std::vector<std::size_t> interventional_optimal_policy(const TabularCmdp& cmdp, double gamma);

} // namespace deconf::weights
