#pragma once

#include "deconf/core/dataset.hpp"
#include "deconf/rl/approximators.hpp"

#include <span>

namespace deconf::rl {

struct Batch
{
  Matrix states;      // input_dim x B
  Matrix next_states; // input_dim x B
  std::vector<std::size_t> actions;
  Vector rewards;
  Vector not_done; // 0 at true terminals, else 1

  std::size_t size() const { return actions.size(); }
};

Batch make_batch(const OfflineDataset& dataset,
                 std::span<const std::size_t> indices,
                 std::size_t input_dim,
                 double reward_scale = 1.0);

//! Per-sample loss split into an outcome-dependent part f and a part h that
//! depends only on (s, a), with their derivatives with respect to the
//! network outputs of each sample (Q values, or policy logits for the actor
//! and BC losses). Targets are constants.
struct LossTerms
{
  Vector f;
  Vector h;
  Matrix df; // column i: d f_i / d outputs(s_i)
  Matrix dh;
};

// mean_i (w_i f_i + h_i); weights may be null (all ones).
double objective(const LossTerms& terms, const Vector* weights = nullptr);

// d objective / d outputs, one column per sample.
Matrix output_gradient(const LossTerms& terms, const Vector* weights = nullptr);

// V(s) = pi(s)^T [Q(s) - alpha log pi(s)], per column.
Vector soft_values(const Matrix& q, const Matrix& log_probs, double alpha);

// Bellman terms from precomputed network outputs.
LossTerms dqn_terms(const Matrix& q, const Matrix& q_next_target, const Batch& b, double gamma);
LossTerms ddqn_terms(const Matrix& q, const Matrix& q_next_online, const Matrix& q_next_target, const Batch& b, double gamma);
LossTerms sac_critic_terms(const Matrix& q,
                           const Matrix& q_next_target,
                           const Matrix& next_logits,
                           const Batch& b,
                           double gamma,
                           double alpha);
// Outputs are policy logits at s; h = -V(s) with Q held constant.
LossTerms sac_actor_terms(const Matrix& q, const Matrix& logits, double alpha);
LossTerms cql_terms(const Matrix& q, const Matrix& q_next_target, const Batch& b, double gamma, double cql_weight);
// Cross-entropy of the dataset action under the policy logits (in f).
LossTerms bc_terms(const Matrix& logits, const Batch& b);

// Convenience forms that run the networks.
LossTerms loss_dqn(const QApproximator& q, const Batch& b, double gamma);
LossTerms loss_ddqn(const QApproximator& q, const Batch& b, double gamma);
LossTerms loss_sac_critic(const QApproximator& q, const PolicyHead& pi, const Batch& b, double gamma, double alpha);
LossTerms loss_sac_actor(const QApproximator& q, const PolicyHead& pi, const Batch& b, double alpha);
LossTerms loss_cql(const QApproximator& q, const Batch& b, double gamma, double cql_weight);
LossTerms loss_bc(const PolicyHead& pi, const Batch& b);

} // namespace deconf::rl
