#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace deconf::rl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

//! Fully connected network with tanh hidden layers and a linear output.
//! Inputs are multiplied elementwise by a fixed `input_scale` first.
//! Samples are columns; parameters live in one flat vector laid out per layer
//! as W (column-major, out x in) followed by b.
class Mlp
{
public:
  struct Cache
  {
    std::vector<Matrix> activations; // input (scaled), hidden outputs, output
  };

  Mlp() = default;
  Mlp(std::vector<std::size_t> sizes, Vector input_scale);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const Vector& input_scale() const { return input_scale_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t num_params() const { return num_params_; }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  Vector initial_params(std::uint64_t seed) const;

  Matrix forward(const Vector& params, const Matrix& inputs) const;
  Matrix forward(const Vector& params, const Matrix& inputs, Cache& cache) const;

  // Gradient of sum(d_output .* output) with respect to the parameters.
  Vector backward(const Vector& params, const Cache& cache, const Matrix& d_output) const;

private:
  std::vector<std::size_t> sizes_;
  Vector input_scale_;
  std::size_t num_params_ = 0;
  std::vector<std::size_t> offsets_; // start of each layer's W
};

} // namespace deconf::rl
