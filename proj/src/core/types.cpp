#include "deconf/core/types.hpp"

#include <algorithm>

namespace deconf {

std::size_t
ActionSpace::index_of(int torque)
{
  auto it = std::find(kTorques.begin(), kTorques.end(), torque);
  if (it == kTorques.end())
    throw Error("torque " + std::to_string(torque) + " is not in the action space");
  return static_cast<std::size_t>(it - kTorques.begin());
}

namespace {

constexpr std::array<std::pair<Scenario, std::string_view>, 5> kScenarioNames{ {
  { Scenario::EmotionalPendulum, "EmotionalPendulum" },
  { Scenario::WindyPendulum, "WindyPendulum" },
  { Scenario::EmotionalPendulumStar, "EmotionalPendulumStar" },
  { Scenario::WindyPendulumStar, "WindyPendulumStar" },
  { Scenario::Tabular, "Tabular" },
} };

constexpr std::array<std::pair<DeconfoundMode, std::string_view>, 3> kModeNames{ {
  { DeconfoundMode::None, "none" },
  { DeconfoundMode::Reweight, "reweight" },
  { DeconfoundMode::Resample, "resample" },
} };

constexpr std::array<std::pair<RatioKind, std::string_view>, 4> kRatioNames{ {
  { RatioKind::Full, "full" },
  { RatioKind::RewardOnly, "reward-only" },
  { RatioKind::NextStateOnly, "next-state-only" },
  { RatioKind::Backdoor, "backdoor" },
} };

template<typename E, std::size_t N>
std::string_view
name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value)
{
  for (const auto& [v, name] : table)
    if (v == value)
      return name;
  return "unknown";
}

template<typename E, std::size_t N>
E
parse_name(const std::array<std::pair<E, std::string_view>, N>& table,
           std::string_view name,
           std::string_view what)
{
  for (const auto& [v, n] : table)
    if (n == name)
      return v;
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

} // namespace

std::string_view
to_string(Scenario scenario)
{
  return name_of(kScenarioNames, scenario);
}

Scenario
scenario_from_string(std::string_view name)
{
  // "EmotionalPendulum*" is accepted as an alias for the Star variants.
  if (name == "EmotionalPendulum*")
    return Scenario::EmotionalPendulumStar;
  if (name == "WindyPendulum*")
    return Scenario::WindyPendulumStar;
  return parse_name(kScenarioNames, name, "scenario");
}

std::optional<FieldShape>
required_shape(Scenario scenario)
{
  switch (scenario) {
    case Scenario::EmotionalPendulum:
    case Scenario::WindyPendulum:
      return FieldShape{ true, false };
    case Scenario::EmotionalPendulumStar:
    case Scenario::WindyPendulumStar:
      return FieldShape{ false, true };
    case Scenario::Tabular:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string_view
to_string(DeconfoundMode mode)
{
  return name_of(kModeNames, mode);
}

DeconfoundMode
mode_from_string(std::string_view name)
{
  return parse_name(kModeNames, name, "deconfounding mode");
}

std::string_view
to_string(RatioKind kind)
{
  return name_of(kRatioNames, kind);
}

RatioKind
ratio_kind_from_string(std::string_view name)
{
  return parse_name(kRatioNames, name, "ratio kind");
}

} // namespace deconf
