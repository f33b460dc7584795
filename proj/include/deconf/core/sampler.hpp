#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace deconf {

struct UniformSampling
{
  std::size_t n = 0;
};

struct CategoricalSampling
{
  std::vector<double> probabilities;
};

//! Index distribution for minibatch draws: uniform over N rows, or an
//! explicit categorical (used for resampling by deconfounding weights).
using SamplingDistribution = std::variant<UniformSampling, CategoricalSampling>;

std::size_t support_size(const SamplingDistribution& dist);

//! Deterministic stream of index batches, drawn with replacement.
class MinibatchSampler
{
public:
  MinibatchSampler(const SamplingDistribution& dist, std::size_t batch_size, std::uint64_t seed);

  std::vector<std::size_t> next();
  void next(std::vector<std::size_t>& out);

  std::size_t batch_size() const { return batch_size_; }

private:
  std::size_t batch_size_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> uniform_;
  std::discrete_distribution<std::size_t> categorical_;
  bool is_uniform_;
};

} // namespace deconf
