#pragma once

#include "deconf/core/types.hpp"
#include "deconf/rl/mlp.hpp"

#include <filesystem>
#include <string>

namespace deconf::rl {

// Default architecture for an input dimension: in -> 64 -> 64 -> out.
Mlp make_network(std::size_t input_dim,
                 std::size_t output_dim,
                 const std::vector<std::size_t>& hidden = { 64, 64 },
                 const Vector& input_scale = {});

// Fixed input scaling for pendulum observations (x, y, v / max_speed).
Vector pendulum_input_scale();

//! State-action values with a lagged target copy. The target changes only
//! through sync_target.
class QApproximator
{
public:
  QApproximator() = default;
  QApproximator(Mlp net, std::uint64_t seed);
  QApproximator(Mlp net, Vector params);

  const Mlp& net() const { return net_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  const Vector& target_params() const { return target_; }

  // One column of action values per input column.
  Matrix values(const Matrix& states) const { return net_.forward(params_, states); }
  Matrix target_values(const Matrix& states) const { return net_.forward(target_, states); }
  Vector forward(const StateVec& s) const;

  std::size_t greedy_action(const StateVec& s) const;

  void sync_target() { target_ = params_; }

private:
  Mlp net_;
  Vector params_;
  Vector target_;
};

//! Softmax policy over the discrete actions.
class PolicyHead
{
public:
  PolicyHead() = default;
  PolicyHead(Mlp net, std::uint64_t seed);
  PolicyHead(Mlp net, Vector params);

  const Mlp& net() const { return net_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Matrix logits(const Matrix& states) const { return net_.forward(params_, states); }
  Matrix probabilities(const Matrix& states) const;
  Vector probabilities(const StateVec& s) const;
  std::size_t greedy_action(const StateVec& s) const;

private:
  Mlp net_;
  Vector params_;
};

// Column-wise softmax and log-softmax.
Matrix softmax(const Matrix& logits);
Matrix log_softmax(const Matrix& logits);

// Observation column used as network input (state code only for tabular data).
Vector state_input(const StateVec& s, std::size_t input_dim);

//! Parameter file: `# architecture=3,64,64,5`, `# input_scale=...`,
//! `# n=<count>`, then one parameter per line.
std::string serialize_params(const Mlp& net, const Vector& params);
std::pair<Mlp, Vector> parse_params(const std::string& contents);
void save_params(const Mlp& net, const Vector& params, const std::filesystem::path& path);
std::pair<Mlp, Vector> load_params(const std::filesystem::path& path);

} // namespace deconf::rl
