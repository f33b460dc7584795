#pragma once

#include "deconf/core/sampler.hpp"
#include "deconf/core/types.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace deconf::weights {

struct ClipBounds
{
  double low = 0.1;
  double high = 10.0;
};

inline constexpr ClipBounds kNoClip{ 0.0, std::numeric_limits<double>::infinity() };

//! Per-transition deconfounding ratios, aligned with the dataset rows.
struct WeightVector
{
  RatioKind kind = RatioKind::Full;
  std::vector<double> raw;
  std::vector<double> clipped;
  ClipBounds bounds;
  double mean_raw = 0.0;
  double fraction_clipped = 0.0;
  std::size_t flagged = 0; // denominators raised to the floor
  bool quality_warning = false;

  std::size_t size() const { return raw.size(); }
};

WeightVector postprocess_weights(std::vector<double> raw, ClipBounds bounds, RatioKind kind = RatioKind::Full);

// p_i = clipped_i / sum_j clipped_j; uniform when every weight is equal.
SamplingDistribution resample_distribution(const WeightVector& weights);

std::string serialize_weights(const WeightVector& weights);
WeightVector parse_weights(const std::string& contents);
void save_weights(const WeightVector& weights, const std::filesystem::path& path);
WeightVector load_weights(const std::filesystem::path& path);

} // namespace deconf::weights
