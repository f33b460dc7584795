#include "deconf/harness/pipeline.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/text_io.hpp"
#include "deconf/rl/approximators.hpp"

#include <chrono>
#include <json.hpp>
#include <sstream>

namespace deconf::harness {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kDensityStream = 1;
constexpr std::uint64_t kEvalStream = 2;

std::string
key_of(std::string_view stage, const json& fields)
{
  return std::string(kCodeVersion) + "|" + std::string(stage) + "|" + fields.dump();
}

} // namespace

std::string
setting_label(const ExperimentConfig& c)
{
  std::string out(to_string(c.scenario));
  out += "(";
  bool first = true;
  auto add = [&](const char* name, std::optional<double> v) {
    if (!v)
      return;
    if (!first)
      out += ';';
    first = false;
    std::ostringstream s;
    s << name << '=' << *v;
    out += s.str();
  };
  add("p_fail", c.env.p_fail);
  add("odds", c.env.odds);
  add("v_T", is_windy(c.scenario) ? std::nullopt : c.env.v_threshold);
  add("I_p", c.env.irrational_prob);
  return out + ")";
}

double
evaluate_policy(const ExperimentConfig& config, const env::Policy& policy, std::uint64_t seed, std::size_t step)
{
  Rng rng(derive_seed(derive_seed(seed, kEvalStream), step));
  return env::online_rollout(config.scenario, policy, config.env, rng, config.eval_episodes);
}

void
save_agent(const rl::TrainedAgent& agent, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  if (agent.algo != Algo::BC)
    rl::save_params(agent.q.net(), agent.q.params(), dir / "q.params");
  if (agent.policy)
    rl::save_params(agent.policy->net(), agent.policy->params(), dir / "policy.params");
  text::write_atomic(dir / "agent.txt",
                     "# algo=" + std::string(to_string(agent.algo)) + "\n# steps=" + std::to_string(agent.steps) + "\n");
}

rl::TrainedAgent
load_agent(const std::filesystem::path& dir)
{
  text::Header header;
  std::istringstream in(text::read_file(dir / "agent.txt"));
  std::string line;
  while (std::getline(in, line))
    text::parse_header_line(line, header);
  rl::TrainedAgent agent;
  agent.algo = algo_from_string(header.at("algo"));
  agent.steps = static_cast<std::size_t>(text::parse_int(header.at("steps")));
  if (agent.algo != Algo::BC) {
    auto [net, params] = rl::load_params(dir / "q.params");
    agent.q = rl::QApproximator(std::move(net), std::move(params));
  }
  if (agent.algo == Algo::SAC || agent.algo == Algo::BC) {
    auto [net, params] = rl::load_params(dir / "policy.params");
    agent.policy = rl::PolicyHead(std::move(net), std::move(params));
  }
  return agent;
}

Pipeline::Pipeline(ExperimentConfig config, std::filesystem::path cache_dir, Log log)
  : config_(std::move(config))
  , cache_(std::move(cache_dir))
  , log_(std::move(log))
{
  config_.validate();
  if (config_.scenario == Scenario::Tabular)
    throw ConfigError("the pipeline runs pendulum scenarios; tabular instances are built in code");
}

std::string
Pipeline::data_key() const
{
  auto j = json::parse(to_json(config_));
  return key_of("gen-data",
                { { "scenario", j["scenario"] },
                  { "env", j["env"] },
                  { "dataset_size", j["dataset_size"] },
                  { "data_seed", j["data_seed"] } });
}

std::string
Pipeline::density_key() const
{
  auto j = json::parse(to_json(config_));
  auto density = j["density"];
  density.erase("clip_low");
  density.erase("clip_high");
  return key_of("fit-density", { { "data", data_key() }, { "ratio", j["ratio"] }, { "density", density } });
}

std::string
Pipeline::weights_key() const
{
  return key_of("weights",
                { { "density", density_key() },
                  { "clip_low", config_.density.clip_low },
                  { "clip_high", config_.density.clip_high } });
}

std::string
Pipeline::train_key(std::uint64_t seed) const
{
  auto j = json::parse(to_json(config_));
  bool weighted = config_.train.mode != DeconfoundMode::None;
  return key_of("train",
                { { "upstream", weighted ? weights_key() : data_key() },
                  { "algo", j["algo"] },
                  { "train", j["train"] },
                  { "eval_interval", config_.eval_interval },
                  { "eval_episodes", config_.eval_episodes },
                  { "seed", seed } });
}

template<class T, class Load, class Compute, class Save>
T
Pipeline::stage(const std::string& name, const std::string& key, Load load, Compute compute, Save save)
{
  const auto start = std::chrono::steady_clock::now();
  StageEvent event{ name, text::digest(key), false, 0.0 };
  auto finish = [&](bool cached) {
    event.cached = cached;
    event.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    events_.push_back(event);
    if (log_)
      log_(name + " " + event.digest + (cached ? " cached" : " computed") + " (" +
           std::to_string(event.seconds) + " s)");
  };
  try {
    std::filesystem::path dir;
    if (!cache_.empty()) {
      dir = cache_ / (name + "-" + event.digest);
      auto key_file = dir / "key";
      if (std::filesystem::exists(key_file)) {
        if (text::read_file(key_file) == key) {
          try {
            T value = load(dir);
            finish(true);
            return value;
          } catch (const Error& e) {
            if (log_)
              log_(name + ": unreadable cache entry, recomputing (" + e.what() + ")");
          }
        } else if (log_) {
          log_(name + ": stale cache entry " + dir.string() + ", recomputing");
        }
      }
    }
    T value = compute();
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      save(value, dir);
      // The key file is written last and marks the entry complete.
      text::write_atomic(dir / "key", key);
    }
    finish(false);
    return value;
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

const OfflineDataset&
Pipeline::dataset()
{
  if (!dataset_)
    dataset_ = stage<OfflineDataset>(
      "gen-data",
      data_key(),
      [](const std::filesystem::path& dir) { return load_dataset(dir / "dataset.txt"); },
      [&] {
        Rng rng(derive_seed(config_.data_seed, kDataStream));
        return env::generate_offline_dataset(config_, env::scripted_policy(), rng);
      },
      [](const OfflineDataset& d, const std::filesystem::path& dir) { save_dataset(d, dir / "dataset.txt"); });
  return *dataset_;
}

const weights::DensityBundle&
Pipeline::density()
{
  if (!density_)
    density_ = stage<weights::DensityBundle>(
      "fit-density",
      density_key(),
      [](const std::filesystem::path& dir) { return weights::load_bundle(dir / "bundle"); },
      [&] {
        return weights::fit_density_bundle(
          dataset(), config_.ratio, config_.density, derive_seed(config_.data_seed, kDensityStream));
      },
      [](const weights::DensityBundle& b, const std::filesystem::path& dir) { weights::save_bundle(b, dir / "bundle"); });
  return *density_;
}

const weights::WeightVector&
Pipeline::weights()
{
  if (!weights_)
    weights_ = stage<weights::WeightVector>(
      "weights",
      weights_key(),
      [](const std::filesystem::path& dir) { return weights::load_weights(dir / "weights.txt"); },
      [&] {
        const auto& d = dataset();
        auto w = weights::estimate_weights(d, density(), { config_.density.clip_low, config_.density.clip_high });
        if (w.size() != d.size())
          throw Error("weight vector does not match the dataset");
        return w;
      },
      [](const weights::WeightVector& w, const std::filesystem::path& dir) {
        weights::save_weights(w, dir / "weights.txt");
      });
  return *weights_;
}

SeedRun
Pipeline::train(std::uint64_t seed)
{
  return stage<SeedRun>(
    "train",
    train_key(seed),
    [](const std::filesystem::path& dir) {
      return SeedRun{ load_agent(dir / "agent"), load_records(dir / "records.csv") };
    },
    [&] {
      const auto& d = dataset();
      const weights::WeightVector* w = nullptr;
      if (config_.train.mode != DeconfoundMode::None)
        w = &weights();
      SeedRun run;
      const std::string label = setting_label(config_);
      rl::EvalHook hook{ config_.eval_interval, [&](std::size_t step, const rl::TrainedAgent& agent) {
                          run.records.push_back({ label,
                                                  config_.algo,
                                                  config_.train.mode,
                                                  seed,
                                                  step,
                                                  evaluate_policy(config_, agent.greedy(), seed, step) });
                        } };
      run.agent = rl::train(d, w, config_.algo, config_.train, seed, hook);
      sort_records(run.records);
      return run;
    },
    [](const SeedRun& run, const std::filesystem::path& dir) {
      save_agent(run.agent, dir / "agent");
      save_records(run.records, dir / "records.csv");
    });
}

std::vector<EvalRecord>
Pipeline::run()
{
  std::vector<EvalRecord> all;
  for (auto seed : config_.seeds) {
    auto r = train(seed);
    all.insert(all.end(), r.records.begin(), r.records.end());
  }
  sort_records(all);
  return all;
}

ReportCell
Pipeline::cell(const std::vector<EvalRecord>& records) const
{
  return summarize(records, config_.algo);
}

} // namespace deconf::harness
