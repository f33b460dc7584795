#include "deconf/rl/optimizer.hpp"

#include "deconf/core/types.hpp"

namespace deconf::rl {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

} // namespace

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params)
  : kind_(kind)
  , lr_(learning_rate)
{
  if (!(learning_rate > 0.0))
    throw Error("learning rate must be positive");
  if (kind_ == OptimizerKind::Adam) {
    m_ = Vector::Zero(static_cast<Eigen::Index>(num_params));
    v_ = Vector::Zero(static_cast<Eigen::Index>(num_params));
  }
}

void
Optimizer::step(Vector& params, const Vector& grad)
{
  if (grad.size() != params.size())
    throw Error("gradient and parameters differ in length");
  if (kind_ == OptimizerKind::Sgd) {
    params -= lr_ * grad;
    return;
  }
  beta1_power_ *= kBeta1;
  beta2_power_ *= kBeta2;
  m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
  v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double step = lr_ / (1.0 - beta1_power_);
  const double correction = 1.0 / (1.0 - beta2_power_);
  params.array() -= step * m_.array() / ((v_.array() * correction).sqrt() + kEps);
}

} // namespace deconf::rl
