#pragma once

#include "deconf/core/config.hpp"
#include "deconf/rl/mlp.hpp"

namespace deconf::rl {

//! Plain gradient descent or Adam (beta1 0.9, beta2 0.999, eps 1e-8).
class Optimizer
{
public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params);

  void step(Vector& params, const Vector& grad);

private:
  OptimizerKind kind_;
  double lr_;
  Vector m_;
  Vector v_;
  double beta1_power_ = 1.0;
  double beta2_power_ = 1.0;
};

} // namespace deconf::rl
