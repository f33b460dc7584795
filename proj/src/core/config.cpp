#include "deconf/core/config.hpp"

#include "deconf/core/text_io.hpp"

#include <json.hpp>

#include <type_traits>

namespace deconf {

using nlohmann::json;

std::string_view
to_string(Algo algo)
{
  switch (algo) {
    case Algo::DQN: return "DQN";
    case Algo::DDQN: return "DDQN";
    case Algo::SAC: return "SAC";
    case Algo::CQL: return "CQL";
    case Algo::BC: return "BC";
  }
  return "unknown";
}

Algo
algo_from_string(std::string_view name)
{
  for (auto a : { Algo::DQN, Algo::DDQN, Algo::SAC, Algo::CQL, Algo::BC })
    if (to_string(a) == name)
      return a;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view
to_string(CenterMethod method)
{
  return method == CenterMethod::KMeans ? "kmeans" : "random";
}

CenterMethod
center_method_from_string(std::string_view name)
{
  if (name == "kmeans")
    return CenterMethod::KMeans;
  if (name == "random")
    return CenterMethod::Random;
  throw ConfigError("unknown center method '" + std::string(name) + "'");
}

namespace {

void
require(bool cond, const std::string& what)
{
  if (!cond)
    throw ConfigError(what);
}

bool
is_probability(double p)
{
  return p >= 0.0 && p <= 1.0;
}

template<typename T>
constexpr bool is_count = std::is_unsigned_v<T> && !std::is_same_v<T, bool>;

void
require_count(const json& v, const char* key)
{
  if (!v.is_number_unsigned())
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
}

template<typename T>
void
read(const json& j, const char* key, T& out)
{
  if (!j.contains(key))
    return;
  const json& v = j.at(key);
  if constexpr (is_count<T>)
    require_count(v, key);
  if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
    if constexpr (is_count<typename T::value_type>)
      if (v.is_array())
        for (const auto& e : v)
          require_count(e, key);
  }
  out = v.get<T>();
}

template<typename T>
void
read_optional(const json& j, const char* key, std::optional<T>& out)
{
  if (!j.contains(key))
    return;
  if (j.at(key).is_null())
    out.reset();
  else
    out = j.at(key).get<T>();
}

template<typename T>
json
optional_json(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

} // namespace

void
ExperimentConfig::validate() const
{
  require(dataset_size >= 1, "dataset_size must be at least 1");
  require(env.odds > 0.0, "odds must be positive");
  require(is_probability(env.irrational_prob), "irrational_prob must lie in [0,1]");
  if (is_star(scenario))
    require(!env.p_fail || *env.p_fail == 0.0, "p_fail is not used by Star scenarios");
  else if (scenario != Scenario::Tabular)
    require(env.p_fail.has_value() && is_probability(*env.p_fail), "p_fail must lie in [0,1]");
  if (scenario == Scenario::EmotionalPendulum || scenario == Scenario::EmotionalPendulumStar)
    require(env.v_threshold.has_value() && *env.v_threshold >= 0.0,
            "v_threshold must be a nonnegative speed");
  require(density.k >= 1, "density.k must be at least 1");
  require(density.lambda > 0.0, "density.lambda must be positive");
  require(!density.sigma_x || *density.sigma_x > 0.0, "density.sigma_x must be positive");
  require(!density.sigma_y || *density.sigma_y > 0.0, "density.sigma_y must be positive");
  require(density.jitter_theta >= 0.0 && density.jitter_v > 0.0, "invalid jitter parameters");
  require(density.discrete_scale > 0.0, "density.discrete_scale must be positive");
  require(density.clip_low >= 0.0 && density.clip_low <= density.clip_high,
          "clip bounds must satisfy 0 <= low <= high");
  require(train.gamma >= 0.0 && train.gamma < 1.0, "gamma must lie in [0,1)");
  require(train.learning_rate > 0.0, "learning_rate must be positive");
  require(train.batch_size >= 1, "batch_size must be at least 1");
  require(train.target_sync_interval >= 1, "target_sync_interval must be at least 1");
  require(train.alpha_ent >= 0.0 && train.cql_weight >= 0.0, "alpha_ent and cql_weight must be nonnegative");
  require(train.reward_scale > 0.0, "reward_scale must be positive");
  require(eval_interval >= 1, "eval_interval must be at least 1");
  require(eval_episodes >= 1, "eval_episodes must be at least 1");
  require(!seeds.empty(), "seed list must not be empty");
  if (is_star(scenario) && train.mode != DeconfoundMode::None)
    require(ratio == RatioKind::Backdoor, "Star scenarios only support the backdoor ratio");
  if (!is_star(scenario) && scenario != Scenario::Tabular && train.mode != DeconfoundMode::None)
    require(ratio != RatioKind::Backdoor, "the backdoor ratio needs a Star scenario");
  if (algo == Algo::BC)
    require(train.mode == DeconfoundMode::None, "BC does not take deconfounding weights");
}

std::string
to_json(const ExperimentConfig& c)
{
  json j;
  j["name"] = c.name;
  j["scenario"] = std::string(to_string(c.scenario));
  j["env"] = { { "p_fail", optional_json(c.env.p_fail) },
               { "odds", c.env.odds },
               { "v_threshold", optional_json(c.env.v_threshold) },
               { "irrational_prob", c.env.irrational_prob } };
  j["dataset_size"] = c.dataset_size;
  j["data_seed"] = c.data_seed;
  const auto& d = c.density;
  j["density"] = { { "k", d.k },
                   { "lambda", d.lambda },
                   { "sigma_x", optional_json(d.sigma_x) },
                   { "sigma_y", optional_json(d.sigma_y) },
                   { "centers", std::string(to_string(d.centers)) },
                   { "center_sample_cap", d.center_sample_cap },
                   { "jitter_theta", d.jitter_theta },
                   { "jitter_v", d.jitter_v },
                   { "discrete_scale", d.discrete_scale },
                   { "policy_lscde", d.policy_lscde },
                   { "policy_cells", d.policy_cells },
                   { "clip_low", d.clip_low },
                   { "clip_high", d.clip_high },
                   { "cv",
                     { { "k_grid", d.cv.k_grid },
                       { "lambda_grid", d.cv.lambda_grid },
                       { "sigma_x_grid", d.cv.sigma_x_grid },
                       { "sigma_y_grid", d.cv.sigma_y_grid },
                       { "folds", d.cv.folds },
                       { "sample_cap", d.cv.sample_cap } } } };
  j["ratio"] = std::string(to_string(c.ratio));
  j["algo"] = std::string(to_string(c.algo));
  const auto& t = c.train;
  j["train"] = { { "gamma", t.gamma },
                 { "learning_rate", t.learning_rate },
                 { "batch_size", t.batch_size },
                 { "target_sync_interval", t.target_sync_interval },
                 { "alpha_ent", t.alpha_ent },
                 { "cql_weight", t.cql_weight },
                 { "total_steps", t.total_steps },
                 { "mode", std::string(to_string(t.mode)) },
                 { "optimizer", t.optimizer == OptimizerKind::Adam ? "adam" : "sgd" },
                 { "reward_scale", t.reward_scale },
                 { "hidden", t.hidden } };
  j["eval_interval"] = c.eval_interval;
  j["eval_episodes"] = c.eval_episodes;
  j["seeds"] = c.seeds;
  return j.dump(2);
}

ExperimentConfig
config_from_json(const std::string& text)
{
  ExperimentConfig c;
  try {
    auto j = json::parse(text);
    read(j, "name", c.name);
    if (j.contains("scenario"))
      c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    if (c.scenario == Scenario::EmotionalPendulumStar || c.scenario == Scenario::WindyPendulumStar)
      c.env.p_fail.reset();
    if (is_windy(c.scenario)) {
      c.env.v_threshold.reset();
      c.env.odds = 2.5;
      c.env.irrational_prob = 0.9;
      c.env.p_fail = is_star(c.scenario) ? std::nullopt : std::optional<double>(0.1);
    }
    if (j.contains("env")) {
      const auto& e = j.at("env");
      read_optional(e, "p_fail", c.env.p_fail);
      read(e, "odds", c.env.odds);
      read_optional(e, "v_threshold", c.env.v_threshold);
      read(e, "irrational_prob", c.env.irrational_prob);
    }
    read(j, "dataset_size", c.dataset_size);
    read(j, "data_seed", c.data_seed);
    if (j.contains("density")) {
      const auto& e = j.at("density");
      auto& d = c.density;
      read(e, "k", d.k);
      read(e, "lambda", d.lambda);
      read_optional(e, "sigma_x", d.sigma_x);
      read_optional(e, "sigma_y", d.sigma_y);
      if (e.contains("centers"))
        d.centers = center_method_from_string(e.at("centers").get<std::string>());
      read(e, "center_sample_cap", d.center_sample_cap);
      read(e, "jitter_theta", d.jitter_theta);
      read(e, "jitter_v", d.jitter_v);
      read(e, "discrete_scale", d.discrete_scale);
      read(e, "policy_lscde", d.policy_lscde);
      read(e, "policy_cells", d.policy_cells);
      read(e, "clip_low", d.clip_low);
      read(e, "clip_high", d.clip_high);
      if (e.contains("cv")) {
        const auto& cv = e.at("cv");
        read(cv, "k_grid", d.cv.k_grid);
        read(cv, "lambda_grid", d.cv.lambda_grid);
        read(cv, "sigma_x_grid", d.cv.sigma_x_grid);
        read(cv, "sigma_y_grid", d.cv.sigma_y_grid);
        read(cv, "folds", d.cv.folds);
        read(cv, "sample_cap", d.cv.sample_cap);
      }
    }
    if (j.contains("ratio"))
      c.ratio = ratio_kind_from_string(j.at("ratio").get<std::string>());
    else if (is_star(c.scenario))
      c.ratio = RatioKind::Backdoor;
    else if (is_windy(c.scenario))
      c.ratio = RatioKind::Full;
    if (j.contains("algo"))
      c.algo = algo_from_string(j.at("algo").get<std::string>());
    if (j.contains("train")) {
      const auto& e = j.at("train");
      auto& t = c.train;
      read(e, "gamma", t.gamma);
      read(e, "learning_rate", t.learning_rate);
      read(e, "batch_size", t.batch_size);
      read(e, "target_sync_interval", t.target_sync_interval);
      read(e, "alpha_ent", t.alpha_ent);
      read(e, "cql_weight", t.cql_weight);
      read(e, "total_steps", t.total_steps);
      if (e.contains("mode"))
        t.mode = mode_from_string(e.at("mode").get<std::string>());
      if (e.contains("optimizer")) {
        auto name = e.at("optimizer").get<std::string>();
        if (name == "adam")
          t.optimizer = OptimizerKind::Adam;
        else if (name == "sgd")
          t.optimizer = OptimizerKind::Sgd;
        else
          throw ConfigError("unknown optimizer '" + name + "'");
      }
      read(e, "reward_scale", t.reward_scale);
      read(e, "hidden", t.hidden);
    }
    read(j, "eval_interval", c.eval_interval);
    read(j, "eval_episodes", c.eval_episodes);
    read(j, "seeds", c.seeds);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig
load_config(const std::filesystem::path& path)
{
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(text);
}

} // namespace deconf
