#pragma once

#include "deconf/core/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace deconf::harness {

//! Mean online return of one agent snapshot.
struct EvalRecord
{
  std::string scenario;
  Algo algo = Algo::DQN;
  DeconfoundMode mode = DeconfoundMode::None;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  double mean_return = 0.0;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// "CQL", "CQL_RW", "CQL_RS".
std::string algo_label(Algo algo, DeconfoundMode mode);

// Orders by (algo, seed, step), then mode and scenario.
void sort_records(std::vector<EvalRecord>& records);

//! Header `scenario,algo,mode,seed,step,mean_return` and one sorted row per
//! record.
std::string serialize_records(std::vector<EvalRecord> records);
std::vector<EvalRecord> parse_records(const std::string& contents);

void save_records(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> load_records(const std::filesystem::path& path);

} // namespace deconf::harness
