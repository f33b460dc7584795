#include "deconf/rl/mlp.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/types.hpp"

#include <cmath>

namespace deconf::rl {

namespace {

// tanh through the vectorized exp.
Matrix
fast_tanh(const Matrix& z)
{
  return (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
}

} // namespace

Mlp::Mlp(std::vector<std::size_t> sizes, Vector input_scale)
  : sizes_(std::move(sizes))
  , input_scale_(std::move(input_scale))
{
  if (sizes_.size() < 2)
    throw Error("network needs at least an input and an output layer");
  for (auto s : sizes_)
    if (s == 0)
      throw Error("network layers must be nonempty");
  if (static_cast<std::size_t>(input_scale_.size()) != sizes_.front())
    throw Error("input scale must match the input dimension");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

Vector
Mlp::initial_params(std::uint64_t seed) const
{
  Vector p(static_cast<Eigen::Index>(num_params_));
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    std::size_t count = sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    for (std::size_t i = 0; i < count; ++i)
      p(static_cast<Eigen::Index>(offsets_[l] + i)) = uniform(rng, -bound, bound);
  }
  return p;
}

Matrix
Mlp::forward(const Vector& params, const Matrix& inputs) const
{
  Cache cache;
  return forward(params, inputs, cache);
}

Matrix
Mlp::forward(const Vector& params, const Matrix& inputs, Cache& cache) const
{
  if (static_cast<std::size_t>(params.size()) != num_params_)
    throw Error("parameter vector has the wrong length");
  if (static_cast<std::size_t>(inputs.rows()) != sizes_.front())
    throw Error("network input has the wrong dimension");
  const std::size_t layers = sizes_.size() - 1;
  cache.activations.resize(layers + 1);
  cache.activations[0] = input_scale_.asDiagonal() * inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    auto in = static_cast<Eigen::Index>(sizes_[l]);
    Eigen::Map<const Matrix> W(params.data() + offsets_[l], out, in);
    Eigen::Map<const Vector> b(params.data() + offsets_[l] + out * in, out);
    Matrix z = W * cache.activations[l];
    z.colwise() += b;
    if (l + 1 < layers)
      cache.activations[l + 1] = fast_tanh(z);
    else
      cache.activations[l + 1] = std::move(z);
  }
  return cache.activations.back();
}

Vector
Mlp::backward(const Vector& params, const Cache& cache, const Matrix& d_output) const
{
  const std::size_t layers = sizes_.size() - 1;
  if (cache.activations.size() != layers + 1)
    throw Error("backward needs the cache of a forward pass");
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(num_params_));
  Matrix delta = d_output;
  for (std::size_t l = layers; l-- > 0;) {
    auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    auto in = static_cast<Eigen::Index>(sizes_[l]);
    Eigen::Map<Matrix> gW(grad.data() + offsets_[l], out, in);
    Eigen::Map<Vector> gb(grad.data() + offsets_[l] + out * in, out);
    gW.noalias() = delta * cache.activations[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const Matrix> W(params.data() + offsets_[l], out, in);
      Matrix back = W.transpose() * delta;
      delta = back.array() * (1.0 - cache.activations[l].array().square());
    }
  }
  return grad;
}

} // namespace deconf::rl
