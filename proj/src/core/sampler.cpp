#include "deconf/core/sampler.hpp"

#include "deconf/core/types.hpp"

#include <cmath>

namespace deconf {

std::size_t
support_size(const SamplingDistribution& dist)
{
  if (const auto* u = std::get_if<UniformSampling>(&dist))
    return u->n;
  return std::get<CategoricalSampling>(dist).probabilities.size();
}

MinibatchSampler::MinibatchSampler(const SamplingDistribution& dist,
                                   std::size_t batch_size,
                                   std::uint64_t seed)
  : batch_size_(batch_size)
  , rng_(seed)
  , is_uniform_(std::holds_alternative<UniformSampling>(dist))
{
  if (batch_size == 0)
    throw Error("batch size must be at least 1");
  if (is_uniform_) {
    auto n = std::get<UniformSampling>(dist).n;
    if (n == 0)
      throw Error("cannot sample from an empty dataset");
    uniform_ = std::uniform_int_distribution<std::size_t>(0, n - 1);
    return;
  }
  const auto& p = std::get<CategoricalSampling>(dist).probabilities;
  double total = 0.0;
  for (double q : p) {
    if (!(q >= 0.0) || !std::isfinite(q))
      throw Error("categorical probabilities must be finite and nonnegative");
    total += q;
  }
  if (total <= 0.0)
    throw Error("zero-mass sampling distribution");
  if (std::abs(total - 1.0) > 1e-9)
    throw Error("categorical probabilities must sum to 1 (got " + std::to_string(total) + ")");
  categorical_ = std::discrete_distribution<std::size_t>(p.begin(), p.end());
}

std::vector<std::size_t>
MinibatchSampler::next()
{
  std::vector<std::size_t> out;
  next(out);
  return out;
}

void
MinibatchSampler::next(std::vector<std::size_t>& out)
{
  out.resize(batch_size_);
  if (is_uniform_) {
    for (auto& i : out)
      i = uniform_(rng_);
  } else {
    for (auto& i : out)
      i = categorical_(rng_);
  }
}

} // namespace deconf
