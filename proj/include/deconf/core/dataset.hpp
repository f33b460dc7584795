#pragma once

#include "deconf/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace deconf {

//! Ordered offline transitions plus the metadata needed to regenerate them.
//!
//! The row count N is stored in the file header and checked on load, so
//! deterministic subsampling can rely on it.
struct OfflineDataset
{
  std::vector<Transition> transitions;
  Scenario scenario = Scenario::EmotionalPendulum;
  FieldShape shape;
  std::size_t num_actions = kNumActions;
  std::string generator_config_digest;
  std::uint64_t seed = 0;

  std::size_t size() const { return transitions.size(); }

  // Throws if the shape disagrees with the scenario or with any row.
  void validate() const;

  friend bool operator==(const OfflineDataset&, const OfflineDataset&) = default;
};

// Number of episode ends, detected where s_next of one row is not the s of
// the following row (plus the final row).
std::size_t count_episode_ends(const OfflineDataset& dataset);

std::string serialize_dataset(const OfflineDataset& dataset);
OfflineDataset parse_dataset(const std::string& contents);

void save_dataset(const OfflineDataset& dataset, const std::filesystem::path& path);
OfflineDataset load_dataset(const std::filesystem::path& path);

} // namespace deconf
