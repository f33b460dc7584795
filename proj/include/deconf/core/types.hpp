#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace deconf {

// Raised for malformed inputs, violated preconditions and I/O failures.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

//! Discrete torque set shared by the pendulum tasks. Index i always maps to
//! the same torque.
struct ActionSpace
{
  static constexpr std::array<int, 5> kTorques{ -2, -1, 0, 1, 2 };
  static constexpr std::size_t size() { return kTorques.size(); }
  static constexpr int torque(std::size_t index) { return kTorques[index]; }
  static std::size_t index_of(int torque);
};

inline constexpr std::size_t kNumActions = ActionSpace::size();

//! Observed pendulum state: sensor coordinates (m) and angular velocity
//! (rad/s). For tabular instances the state code is carried in `x`.
struct StateVec
{
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;

  friend bool operator==(const StateVec&, const StateVec&) = default;
};

struct Transition
{
  StateVec s;
  int a = 0;
  std::optional<int> m;
  std::optional<int> u;
  StateVec s_next;
  double r = 0.0;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

enum class Scenario
{
  EmotionalPendulum,
  WindyPendulum,
  EmotionalPendulumStar,
  WindyPendulumStar,
  Tabular
};

std::string_view to_string(Scenario scenario);
Scenario scenario_from_string(std::string_view name);

// Star tasks record the confounder subset u and execute a directly.
constexpr bool is_star(Scenario s)
{
  return s == Scenario::EmotionalPendulumStar || s == Scenario::WindyPendulumStar;
}

constexpr bool is_windy(Scenario s)
{
  return s == Scenario::WindyPendulum || s == Scenario::WindyPendulumStar;
}

//! Which optional transition fields a dataset populates.
struct FieldShape
{
  bool has_m = false;
  bool has_u = false;

  friend bool operator==(const FieldShape&, const FieldShape&) = default;
};

// Shape mandated by a pendulum scenario. Tabular datasets declare their own.
std::optional<FieldShape> required_shape(Scenario scenario);

enum class DeconfoundMode
{
  None,
  Reweight,
  Resample
};

std::string_view to_string(DeconfoundMode mode);
DeconfoundMode mode_from_string(std::string_view name);

enum class RatioKind
{
  Full,
  RewardOnly,
  NextStateOnly,
  Backdoor
};

std::string_view to_string(RatioKind kind);
RatioKind ratio_kind_from_string(std::string_view name);

} // namespace deconf
