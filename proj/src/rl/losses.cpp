#include "deconf/rl/losses.hpp"

#include <cmath>

namespace deconf::rl {

namespace {

void
check_batch(const Matrix& q, const Batch& b)
{
  if (b.size() == 0)
    throw Error("empty batch");
  if (static_cast<std::size_t>(q.cols()) != b.size())
    throw Error("network outputs do not match the batch");
  for (auto a : b.actions)
    if (a >= static_cast<std::size_t>(q.rows()))
      throw Error("batch action outside the network output range");
}

// Squared TD error (y - Q(s,a))^2 in f; h = 0.
LossTerms
squared_error(const Matrix& q, const Vector& targets, const Batch& b)
{
  const auto n = static_cast<Eigen::Index>(b.size());
  LossTerms t;
  t.f.resize(n);
  t.h = Vector::Zero(n);
  t.df = Matrix::Zero(q.rows(), n);
  t.dh = Matrix::Zero(q.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto a = static_cast<Eigen::Index>(b.actions[static_cast<std::size_t>(i)]);
    double err = targets(i) - q(a, i);
    t.f(i) = err * err;
    t.df(a, i) = -2.0 * err;
  }
  return t;
}

} // namespace

Batch
make_batch(const OfflineDataset& dataset, std::span<const std::size_t> indices, std::size_t input_dim, double reward_scale)
{
  Batch b;
  const auto n = static_cast<Eigen::Index>(indices.size());
  const auto d = static_cast<Eigen::Index>(input_dim);
  b.states.resize(d, n);
  b.next_states.resize(d, n);
  b.rewards.resize(n);
  b.not_done.resize(n);
  b.actions.resize(indices.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    auto idx = indices[static_cast<std::size_t>(i)];
    if (idx >= dataset.size())
      throw Error("batch index out of range");
    const Transition& t = dataset.transitions[idx];
    b.states.col(i) = state_input(t.s, input_dim);
    b.next_states.col(i) = state_input(t.s_next, input_dim);
    b.rewards(i) = t.r * reward_scale;
    b.not_done(i) = t.done ? 0.0 : 1.0;
    b.actions[static_cast<std::size_t>(i)] = static_cast<std::size_t>(t.a);
  }
  return b;
}

double
objective(const LossTerms& t, const Vector* weights)
{
  if (weights)
    return (weights->cwiseProduct(t.f) + t.h).mean();
  return (t.f + t.h).mean();
}

Matrix
output_gradient(const LossTerms& t, const Vector* weights)
{
  const double scale = 1.0 / static_cast<double>(t.f.size());
  if (weights)
    return (t.df * weights->asDiagonal() + t.dh) * scale;
  return (t.df + t.dh) * scale;
}

Vector
soft_values(const Matrix& q, const Matrix& log_probs, double alpha)
{
  Matrix probs = log_probs.array().exp().matrix();
  return (probs.array() * (q.array() - alpha * log_probs.array())).colwise().sum().transpose();
}

LossTerms
dqn_terms(const Matrix& q, const Matrix& q_next_target, const Batch& b, double gamma)
{
  check_batch(q, b);
  Vector targets = b.rewards + gamma * b.not_done.cwiseProduct(q_next_target.colwise().maxCoeff().transpose());
  return squared_error(q, targets, b);
}

LossTerms
ddqn_terms(const Matrix& q, const Matrix& q_next_online, const Matrix& q_next_target, const Batch& b, double gamma)
{
  check_batch(q, b);
  const auto n = static_cast<Eigen::Index>(b.size());
  Vector targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best;
    q_next_online.col(i).maxCoeff(&best);
    targets(i) = b.rewards(i) + gamma * b.not_done(i) * q_next_target(best, i);
  }
  return squared_error(q, targets, b);
}

LossTerms
sac_critic_terms(const Matrix& q,
                 const Matrix& q_next_target,
                 const Matrix& next_logits,
                 const Batch& b,
                 double gamma,
                 double alpha)
{
  check_batch(q, b);
  Vector v_next = soft_values(q_next_target, log_softmax(next_logits), alpha);
  Vector targets = b.rewards + gamma * b.not_done.cwiseProduct(v_next);
  return squared_error(q, targets, b);
}

LossTerms
sac_actor_terms(const Matrix& q, const Matrix& logits, double alpha)
{
  if (q.rows() != logits.rows() || q.cols() != logits.cols())
    throw Error("actor loss: Q values and logits differ in shape");
  const auto n = logits.cols();
  Matrix logp = log_softmax(logits);
  Matrix p = logp.array().exp().matrix();
  Matrix g = q - alpha * logp;
  Eigen::RowVectorXd gbar = (p.array() * g.array()).colwise().sum().matrix();
  LossTerms t;
  t.f = Vector::Zero(n);
  t.h = -gbar.transpose();
  t.df = Matrix::Zero(logits.rows(), n);
  // d(-V)/dz_c = -p_c (g_c - sum_b p_b g_b)
  t.dh = -(p.array() * (g.rowwise() - gbar).array()).matrix();
  return t;
}

LossTerms
cql_terms(const Matrix& q, const Matrix& q_next_target, const Batch& b, double gamma, double cql_weight)
{
  LossTerms t = dqn_terms(q, q_next_target, b, gamma);
  Matrix logp = log_softmax(q);
  Eigen::RowVectorXd lse = (q - logp).row(0);
  Matrix p = logp.array().exp().matrix();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    auto a = static_cast<Eigen::Index>(b.actions[static_cast<std::size_t>(i)]);
    t.h(i) = cql_weight * (lse(i) - q(a, i));
    t.dh.col(i) = cql_weight * p.col(i);
    t.dh(a, i) -= cql_weight;
  }
  return t;
}

LossTerms
bc_terms(const Matrix& logits, const Batch& b)
{
  check_batch(logits, b);
  const auto n = logits.cols();
  Matrix logp = log_softmax(logits);
  LossTerms t;
  t.f.resize(n);
  t.h = Vector::Zero(n);
  t.df = logp.array().exp().matrix();
  t.dh = Matrix::Zero(logits.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto a = static_cast<Eigen::Index>(b.actions[static_cast<std::size_t>(i)]);
    t.f(i) = -logp(a, i);
    t.df(a, i) -= 1.0;
  }
  return t;
}

LossTerms
loss_dqn(const QApproximator& q, const Batch& b, double gamma)
{
  return dqn_terms(q.values(b.states), q.target_values(b.next_states), b, gamma);
}

LossTerms
loss_ddqn(const QApproximator& q, const Batch& b, double gamma)
{
  return ddqn_terms(q.values(b.states), q.values(b.next_states), q.target_values(b.next_states), b, gamma);
}

LossTerms
loss_sac_critic(const QApproximator& q, const PolicyHead& pi, const Batch& b, double gamma, double alpha)
{
  return sac_critic_terms(q.values(b.states), q.target_values(b.next_states), pi.logits(b.next_states), b, gamma, alpha);
}

LossTerms
loss_sac_actor(const QApproximator& q, const PolicyHead& pi, const Batch& b, double alpha)
{
  return sac_actor_terms(q.values(b.states), pi.logits(b.states), alpha);
}

LossTerms
loss_cql(const QApproximator& q, const Batch& b, double gamma, double cql_weight)
{
  return cql_terms(q.values(b.states), q.target_values(b.next_states), b, gamma, cql_weight);
}

LossTerms
loss_bc(const PolicyHead& pi, const Batch& b)
{
  return bc_terms(pi.logits(b.states), b);
}

} // namespace deconf::rl
