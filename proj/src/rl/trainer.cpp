#include "deconf/rl/trainer.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/sampler.hpp"
#include "deconf/rl/losses.hpp"
#include "deconf/rl/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace deconf::rl {

std::size_t
TrainedAgent::act(const StateVec& s) const
{
  if (policy)
    return policy->greedy_action(s);
  return q.greedy_action(s);
}

std::function<std::size_t(const StateVec&)>
TrainedAgent::greedy() const
{
  return [agent = *this](const StateVec& s) { return agent.act(s); };
}

std::size_t
input_dim_for(const OfflineDataset& dataset)
{
  return dataset.scenario == Scenario::Tabular ? 1 : 3;
}

namespace {

Mlp
network_for(const OfflineDataset& dataset, const TrainConfig& cfg)
{
  const auto dim = input_dim_for(dataset);
  Vector scale = dim == 3 ? pendulum_input_scale() : Vector::Ones(1);
  return make_network(dim, dataset.num_actions, cfg.hidden, scale);
}

[[noreturn]] void
non_finite(std::size_t step, Algo algo, const char* part, const LossTerms& t)
{
  std::ostringstream msg;
  msg << "non-finite " << part << " loss at step " << step << " (" << to_string(algo) << "): mean f = " << t.f.mean()
      << ", mean h = " << t.h.mean() << "; lower the learning rate or the reward scale";
  throw Error(msg.str());
}

} // namespace

TrainedAgent
train(const OfflineDataset& dataset,
      const weights::WeightVector* weights,
      Algo algo,
      const TrainConfig& cfg,
      std::uint64_t seed,
      const EvalHook& hook)
{
  if (dataset.size() == 0)
    throw Error("empty dataset");
  if ((weights != nullptr) != (cfg.mode != DeconfoundMode::None))
    throw Error("weights must be supplied exactly when the deconfounding mode is not 'none'");
  if (weights && weights->size() != dataset.size())
    throw Error("weight vector has " + std::to_string(weights->size()) + " entries, dataset has " +
                std::to_string(dataset.size()) + " rows");
  if (algo == Algo::BC && cfg.mode != DeconfoundMode::None)
    throw Error("BC does not take deconfounding weights");
  if (cfg.batch_size == 0 || cfg.target_sync_interval == 0)
    throw Error("batch size and target sync interval must be positive");

  const Mlp net = network_for(dataset, cfg);
  const auto input_dim = input_dim_for(dataset);
  TrainedAgent agent;
  agent.algo = algo;
  if (algo != Algo::BC)
    agent.q = QApproximator(net, derive_seed(seed, 1));
  if (algo == Algo::SAC || algo == Algo::BC)
    agent.policy = PolicyHead(net, derive_seed(seed, 2));

  SamplingDistribution dist = UniformSampling{ dataset.size() };
  if (cfg.mode == DeconfoundMode::Resample)
    dist = weights::resample_distribution(*weights);
  MinibatchSampler sampler(dist, cfg.batch_size, derive_seed(seed, 3));

  Optimizer q_opt(cfg.optimizer, cfg.learning_rate, net.num_params());
  Optimizer pi_opt(cfg.optimizer, cfg.learning_rate, net.num_params());

  std::vector<std::size_t> idx;
  Vector batch_weights(static_cast<Eigen::Index>(cfg.batch_size));
  const bool reweight = cfg.mode == DeconfoundMode::Reweight;
  const Vector* wptr = reweight ? &batch_weights : nullptr;
  Mlp::Cache cache;

  if (hook.callback && hook.interval > 0)
    hook.callback(0, agent);

  for (std::size_t step = 1; step <= cfg.total_steps; ++step) {
    sampler.next(idx);
    Batch b = make_batch(dataset, idx, input_dim, cfg.reward_scale);
    if (reweight)
      for (std::size_t i = 0; i < idx.size(); ++i)
        batch_weights(static_cast<Eigen::Index>(i)) = weights->clipped[idx[i]];

    if (algo == Algo::BC) {
      Matrix logits = net.forward(agent.policy->params(), b.states, cache);
      LossTerms t = bc_terms(logits, b);
      if (!std::isfinite(objective(t)))
        non_finite(step, algo, "behavior cloning", t);
      pi_opt.step(agent.policy->params(), net.backward(agent.policy->params(), cache, output_gradient(t)));
    } else {
      Vector& theta = agent.q.params();
      Matrix q = net.forward(theta, b.states, cache);
      Matrix q_next_target = agent.q.target_values(b.next_states);
      LossTerms t;
      switch (algo) {
        case Algo::DQN:
          t = dqn_terms(q, q_next_target, b, cfg.gamma);
          break;
        case Algo::DDQN:
          t = ddqn_terms(q, net.forward(theta, b.next_states), q_next_target, b, cfg.gamma);
          break;
        case Algo::CQL:
          t = cql_terms(q, q_next_target, b, cfg.gamma, cfg.cql_weight);
          break;
        case Algo::SAC:
          t = sac_critic_terms(q, q_next_target, agent.policy->logits(b.next_states), b, cfg.gamma, cfg.alpha_ent);
          break;
        case Algo::BC:
          break;
      }
      if (!std::isfinite(objective(t, wptr)))
        non_finite(step, algo, "critic", t);
      q_opt.step(theta, net.backward(theta, cache, output_gradient(t, wptr)));

      if (algo == Algo::SAC) {
        Vector& phi = agent.policy->params();
        Matrix logits = net.forward(phi, b.states, cache);
        LossTerms a = sac_actor_terms(agent.q.values(b.states), logits, cfg.alpha_ent);
        if (!std::isfinite(objective(a, wptr)))
          non_finite(step, algo, "actor", a);
        pi_opt.step(phi, net.backward(phi, cache, output_gradient(a, wptr)));
      }
      if (step % cfg.target_sync_interval == 0)
        agent.q.sync_target();
    }
    agent.steps = step;
    if (hook.callback && hook.interval > 0 && step % hook.interval == 0)
      hook.callback(step, agent);
  }
  return agent;
}

PolicyHead
behavior_cloning(const OfflineDataset& dataset, const TrainConfig& cfg, std::uint64_t seed)
{
  TrainConfig c = cfg;
  c.mode = DeconfoundMode::None;
  return *train(dataset, nullptr, Algo::BC, c, seed).policy;
}

double
action_accuracy(const PolicyHead& policy, const OfflineDataset& dataset, std::span<const std::size_t> rows)
{
  if (rows.empty())
    throw Error("no rows to score");
  std::size_t hits = 0;
  for (auto i : rows)
    hits += policy.greedy_action(dataset.transitions.at(i).s) == static_cast<std::size_t>(dataset.transitions[i].a);
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

} // namespace deconf::rl
