// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is nonzero when any selected criterion fails.

#include "deconf/density/lscde.hpp"
#include "deconf/harness/pipeline.hpp"
#include "deconf/rl/losses.hpp"
#include "deconf/weights/tabular.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace deconf;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::filesystem::path g_cache;

std::string
fmt(double x, int precision = 4)
{
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

double
seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- settings

constexpr std::size_t kTabularRows = 50000;
constexpr std::uint64_t kTabularDataSeed = 0;
constexpr std::uint64_t kTabularFitSeed = 5;

DensitySettings
tabular_density()
{
  DensitySettings d;
  d.k = 200;
  d.lambda = 0.01;
  d.sigma_x = 0.4;
  d.sigma_y = 0.45;
  d.discrete_scale = 3.0;
  return d;
}

ExperimentConfig
experiment(Scenario scenario, Algo algo, DeconfoundMode mode)
{
  ExperimentConfig c;
  c.scenario = scenario;
  c.algo = algo;
  c.name = std::string(to_string(scenario)) + "-" + harness::algo_label(algo, mode);
  if (is_star(scenario))
    c.env.p_fail.reset();
  if (is_windy(scenario)) {
    c.env.v_threshold.reset();
    c.env.odds = 2.5;
    c.env.irrational_prob = 0.9;
    if (!is_star(scenario))
      c.env.p_fail = 0.1;
  }
  c.ratio = is_star(scenario) ? RatioKind::Backdoor : is_windy(scenario) ? RatioKind::Full : RatioKind::RewardOnly;
  c.dataset_size = 50000;
  c.data_seed = 0;
  c.density.k = 400;
  c.density.lambda = 0.1;
  c.density.discrete_scale = 3.0;
  c.density.sigma_x = 1.0;
  c.density.sigma_y = is_windy(scenario) ? 1.0 : 0.5;
  c.train.total_steps = 30000;
  c.train.learning_rate = 1e-3;
  c.train.target_sync_interval = 100;
  c.train.reward_scale = 0.1;
  c.train.mode = mode;
  c.eval_interval = 1000;
  c.eval_episodes = 20;
  c.seeds = { 0, 1, 2 };
  c.validate();
  return c;
}

std::size_t g_stages = 0;
std::size_t g_cached_stages = 0;

std::vector<harness::EvalRecord>
run_experiment(const ExperimentConfig& c)
{
  harness::Pipeline p(c, g_cache, [&](const std::string& line) { std::cerr << "  [" << c.name << "] " << line << "\n"; });
  auto records = p.run();
  for (const auto& e : p.events()) {
    ++g_stages;
    g_cached_stages += e.cached;
  }
  return records;
}

std::string
cache_note()
{
  return std::to_string(g_cached_stages) + " of " + std::to_string(g_stages) + " stages loaded from cache";
}

// ---------------------------------------------------------------- helpers

std::vector<double>
oracle_values(const weights::TabularCmdp& c, RatioKind kind, const OfflineDataset& d)
{
  auto oracle = weights::exact_ratio_oracle(c, kind);
  std::vector<double> out;
  out.reserve(d.size());
  for (const auto& t : d.transitions)
    out.push_back(oracle(t));
  return out;
}

double
share_within(const std::vector<double>& est, const std::vector<double>& exact, double rel)
{
  std::size_t ok = 0;
  for (std::size_t i = 0; i < est.size(); ++i)
    ok += std::abs(est[i] - exact[i]) <= rel * exact[i];
  return double(ok) / double(est.size());
}

double
median(std::vector<double> v)
{
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

weights::WeightVector
estimate(const OfflineDataset& d, RatioKind kind, const DensitySettings& ds, std::uint64_t seed)
{
  return weights::estimate_weights(d, weights::fit_density_bundle(d, kind, ds, seed), weights::kNoClip);
}

weights::TabularCmdp
instance_for(RatioKind kind)
{
  return kind == RatioKind::Backdoor ? weights::backdoor_instance() : weights::frontdoor_instance();
}

// Backdoor instance whose behavior policy ignores w.
weights::TabularCmdp
unconfounded_backdoor()
{
  auto c = weights::backdoor_instance();
  for (std::size_t s = 0; s < c.num_states; ++s)
    for (std::size_t w = 0; w < c.num_w; ++w) {
      double a1 = 0.35 + 0.3 * double(s);
      c.policy[(s * c.num_w + w) * 2] = 1.0 - a1;
      c.policy[(s * c.num_w + w) * 2 + 1] = a1;
    }
  c.validate();
  return c;
}

// ---------------------------------------------------------------- criteria

Outcome
weight_mean()
{
  bool pass = true;
  std::string detail;
  for (auto [name, c] : { std::pair{ "frontdoor", weights::frontdoor_instance() },
                          std::pair{ "reversal", weights::reversal_instance() } }) {
    auto t0 = std::chrono::steady_clock::now();
    auto d = weights::generate_tabular_dataset(c, kTabularRows, kTabularDataSeed);
    // Exact expectation of the oracle ratio given each row's (s, a).
    std::map<std::pair<int, int>, double> cond;
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t a = 0; a < 2; ++a)
        cond[{ int(s), int(a) }] = weights::oracle_conditional_mean(c, RatioKind::Full, s, a);
    double exact = 0.0;
    for (const auto& t : d.transitions)
      exact += cond[{ int(t.s.x), t.a }];
    exact /= double(d.size());
    auto w = estimate(d, RatioKind::Full, tabular_density(), kTabularFitSeed);
    double secs = seconds_since(t0);
    bool ok = std::abs(exact - 1.0) <= 1e-12 && std::abs(w.mean_raw - 1.0) <= 0.15 && secs < 120.0;
    pass = pass && ok;
    detail += std::string(name) + ": oracle mean-1 " + fmt(exact - 1.0, 3) + ", estimated " + fmt(w.mean_raw) + " (" +
              fmt(secs, 3) + " s); ";
  }
  auto t0 = std::chrono::steady_clock::now();
  harness::Pipeline p(experiment(Scenario::EmotionalPendulum, Algo::DQN, DeconfoundMode::Reweight));
  const auto& w = p.weights();
  double secs = seconds_since(t0);
  bool ok = std::abs(w.mean_raw - 1.0) <= 0.25 && secs < 120.0;
  detail += "EmotionalPendulum reward-only estimated " + fmt(w.mean_raw) + " (" + fmt(secs, 3) + " s)";
  return { pass && ok, detail };
}

Outcome
oracle_agreement()
{
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly, RatioKind::Backdoor }) {
    auto c = instance_for(kind);
    auto d = weights::generate_tabular_dataset(c, kTabularRows, kTabularDataSeed);
    auto w = estimate(d, kind, tabular_density(), kTabularFitSeed);
    double share = share_within(w.raw, oracle_values(c, kind, d), 0.10);
    pass = pass && share >= 0.90;
    detail += std::string(to_string(kind)) + " " + fmt(share) + "; ";
  }
  double secs = seconds_since(t0);
  detail += fmt(secs, 3) + " s";
  return { pass && secs < 300.0, "share within 10%: " + detail };
}

// Bounded test function of (s, a, s', r) with values in [0, 1].
double
test_function(std::size_t s, std::size_t a, std::size_t s2, std::size_t r)
{
  return 0.6 * double(r) + 0.3 * double(s2) + 0.1 * double(s * a);
}

Outcome
unbiasedness()
{
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  double worst = 0.0;
  for (auto kind : { RatioKind::Full, RatioKind::Backdoor }) {
    auto c = instance_for(kind);
    auto d = weights::generate_tabular_dataset(c, kTabularRows, kTabularDataSeed + 1);
    auto oracle = weights::exact_ratio_oracle(c, kind);
    Rng rng(99);
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t a = 0; a < 2; ++a) {
        double sum = 0.0, sq = 0.0;
        std::size_t n = 0;
        for (const auto& t : d.transitions) {
          if (std::size_t(t.s.x) != s || std::size_t(t.a) != a)
            continue;
          double v = oracle(t) * test_function(s, a, std::size_t(t.s_next.x), std::size_t(t.r));
          sum += v;
          sq += v * v;
          ++n;
        }
        double off_mean = sum / double(n);
        double off_se = std::sqrt((sq / double(n) - off_mean * off_mean) / double(n));
        const std::size_t draws = 200000;
        double msum = 0.0, msq = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
          auto x = weights::sample_interventional(c, s, a, rng);
          double v = test_function(s, a, x.s_next, x.r);
          msum += v;
          msq += v * v;
        }
        double on_mean = msum / double(draws);
        double on_se = std::sqrt((msq / double(draws) - on_mean * on_mean) / double(draws));
        double z = std::abs(off_mean - on_mean) / std::hypot(off_se, on_se);
        worst = std::max(worst, z);
        pass = pass && z <= 3.0;
      }
  }
  double secs = seconds_since(t0);
  return { pass && secs < 120.0,
           "largest gap " + fmt(worst, 3) + " combined SE over 8 (instance, s, a) cells, " + fmt(secs, 3) + " s" };
}

Outcome
resample_vs_reweight()
{
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = experiment(Scenario::EmotionalPendulum, Algo::DQN, DeconfoundMode::Reweight);
  harness::Pipeline p(cfg, g_cache);
  const auto& d = p.dataset();
  const auto& w = p.weights();
  rl::QApproximator q(rl::make_network(3, kNumActions, cfg.train.hidden, rl::pendulum_input_scale()), 0);
  bool pass = true;
  std::string detail;
  for (auto algo : { Algo::DQN, Algo::CQL }) {
    auto mean_loss = [&](const SamplingDistribution& dist, bool weighted) {
      MinibatchSampler sampler(dist, 256, 5);
      double total = 0.0;
      for (int i = 0; i < 500; ++i) {
        auto idx = sampler.next();
        auto b = rl::make_batch(d, idx, 3, cfg.train.reward_scale);
        rl::Vector bw(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j)
          bw(static_cast<Eigen::Index>(j)) = w.clipped[idx[j]];
        auto terms = algo == Algo::DQN ? rl::loss_dqn(q, b, cfg.train.gamma)
                                       : rl::loss_cql(q, b, cfg.train.gamma, cfg.train.cql_weight);
        total += rl::objective(terms, weighted ? &bw : nullptr);
      }
      return total / 500.0;
    };
    double rs = mean_loss(weights::resample_distribution(w), false);
    double rw = mean_loss(UniformSampling{ d.size() }, true);
    double gap = std::abs(rs - rw) / std::abs(rw);
    pass = pass && gap <= 0.05;
    detail += std::string(to_string(algo)) + " relative gap " + fmt(gap, 3) + "; ";
  }
  double secs = seconds_since(t0);
  return { pass && secs < 120.0, detail + fmt(secs, 3) + " s" };
}

Outcome
no_confounding()
{
  bool pass = true;
  std::string detail = "medians ";
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly, RatioKind::Backdoor }) {
    auto c = kind == RatioKind::Backdoor ? unconfounded_backdoor() : weights::unconfounded_instance();
    auto d = weights::generate_tabular_dataset(c, kTabularRows, kTabularDataSeed);
    double m = median(estimate(d, kind, tabular_density(), kTabularFitSeed).raw);
    pass = pass && m >= 0.8 && m <= 1.25;
    detail += std::string(to_string(kind)) + " " + fmt(m) + ", ";
  }
  auto d = weights::generate_tabular_dataset(weights::unconfounded_instance(), 5000, 1);
  auto ones = weights::postprocess_weights(std::vector<double>(d.size(), 1.0), weights::kNoClip);
  bool bitwise = true;
  for (auto algo : { Algo::DQN, Algo::DDQN, Algo::SAC, Algo::CQL }) {
    TrainConfig t;
    t.total_steps = 300;
    t.batch_size = 64;
    t.target_sync_interval = 50;
    auto plain = rl::train(d, nullptr, algo, t, 11);
    t.mode = DeconfoundMode::Reweight;
    auto weighted = rl::train(d, &ones, algo, t, 11);
    bitwise = bitwise && plain.q.params() == weighted.q.params() &&
              (!plain.policy || plain.policy->params() == weighted.policy->params());
  }
  detail += std::string("reweight-by-ones trajectories ") + (bitwise ? "bitwise identical" : "differ");
  return { pass && bitwise, detail };
}

double
gradient_error(const rl::Mlp& net,
               const rl::Vector& params,
               const rl::Batch& b,
               const rl::Vector* w,
               const std::function<rl::LossTerms(const rl::Matrix&)>& terms_of)
{
  rl::Mlp::Cache cache;
  rl::Matrix out = net.forward(params, b.states, cache);
  rl::Vector analytic = net.backward(params, cache, rl::output_gradient(terms_of(out), w));
  rl::Vector fd(params.size());
  rl::Vector p = params;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    p(i) = params(i) + h;
    double up = rl::objective(terms_of(net.forward(p, b.states)), w);
    p(i) = params(i) - h;
    double down = rl::objective(terms_of(net.forward(p, b.states)), w);
    p(i) = params(i);
    fd(i) = (up - down) / (2.0 * h);
  }
  return (analytic - fd).norm() / std::max({ analytic.norm(), fd.norm(), 1e-12 });
}

Outcome
gradient_checks()
{
  auto net = rl::make_network(3, kNumActions, { 16, 16 }, rl::pendulum_input_scale());
  rl::Vector p = net.initial_params(1);
  rl::Vector target = net.initial_params(2);
  Rng rng(3);
  rl::Batch b;
  const Eigen::Index n = 12;
  b.states = rl::Matrix::Random(3, n);
  b.next_states = rl::Matrix::Random(3, n);
  b.rewards = rl::Vector::Random(n);
  b.not_done = rl::Vector::Ones(n);
  b.not_done(0) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    b.actions.push_back(std::size_t(i) % kNumActions);
  rl::Vector w = rl::Vector::LinSpaced(n, 0.1, 4.0);
  rl::Matrix q_next_target = net.forward(target, b.next_states);
  rl::Matrix q_next_online = net.forward(p, b.next_states);
  rl::Matrix next_logits = rl::Matrix::Random(kNumActions, n);
  rl::Matrix q_fixed = rl::Matrix::Random(kNumActions, n);

  std::vector<std::pair<std::string, std::function<rl::LossTerms(const rl::Matrix&)>>> losses{
    { "DQN", [&](const rl::Matrix& q) { return rl::dqn_terms(q, q_next_target, b, 0.99); } },
    { "DDQN", [&](const rl::Matrix& q) { return rl::ddqn_terms(q, q_next_online, q_next_target, b, 0.99); } },
    { "SAC critic",
      [&](const rl::Matrix& q) { return rl::sac_critic_terms(q, q_next_target, next_logits, b, 0.99, 0.2); } },
    { "SAC actor", [&](const rl::Matrix& logits) { return rl::sac_actor_terms(q_fixed, logits, 0.2); } },
    { "CQL", [&](const rl::Matrix& q) { return rl::cql_terms(q, q_next_target, b, 0.99, 1.0); } },
    { "BC", [&](const rl::Matrix& logits) { return rl::bc_terms(logits, b); } },
  };
  bool pass = true;
  std::string detail = "max relative error ";
  for (const auto& [name, terms_of] : losses) {
    double err = std::max(gradient_error(net, p, b, nullptr, terms_of), gradient_error(net, p, b, &w, terms_of));
    pass = pass && err <= 1e-4;
    detail += name + " " + fmt(err, 2) + ", ";
  }
  detail.resize(detail.size() - 2);
  return { pass, detail };
}

// Per-seed maximum over steps.
std::map<std::uint64_t, double>
best_by_seed(const std::vector<harness::EvalRecord>& records)
{
  std::map<std::uint64_t, double> best;
  for (const auto& r : records) {
    auto it = best.find(r.seed);
    if (it == best.end())
      best[r.seed] = r.mean_return;
    else
      it->second = std::max(it->second, r.mean_return);
  }
  return best;
}

// Per-seed baseline score for BC: best part average of that seed's curve.
std::map<std::uint64_t, double>
bc_by_seed(const std::vector<harness::EvalRecord>& records)
{
  std::map<std::uint64_t, std::vector<harness::EvalRecord>> split;
  for (const auto& r : records)
    split[r.seed].push_back(r);
  std::map<std::uint64_t, double> out;
  for (const auto& [seed, rs] : split)
    out[seed] = harness::best_part_average(rs);
  return out;
}

struct Run
{
  std::string label;
  double cell = 0.0; // seed-averaged best (best part average for BC)
  std::map<std::uint64_t, double> per_seed;
};

Run
run_cell(Scenario scenario, Algo algo, DeconfoundMode mode, double irrational_prob = -1.0, bool random_centers = false)
{
  auto c = experiment(scenario, algo, mode);
  if (irrational_prob >= 0.0)
    c.env.irrational_prob = irrational_prob;
  if (random_centers)
    c.density.centers = CenterMethod::Random;
  auto records = run_experiment(c);
  Run r;
  r.label = harness::algo_label(algo, mode) + (random_centers ? "*" : "");
  r.cell = *harness::summarize(records, algo).best;
  r.per_seed = algo == Algo::BC ? bc_by_seed(records) : best_by_seed(records);
  return r;
}

// Strictly higher seed-averaged best and a per-seed win in at least 2 of 3 seeds.
bool
beats(const Run& a, const Run& b)
{
  std::size_t wins = 0;
  for (const auto& [seed, v] : a.per_seed)
    wins += v > b.per_seed.at(seed);
  return a.cell > b.cell && wins >= 2;
}

std::string
describe(const std::vector<Run>& runs)
{
  std::string s;
  for (const auto& r : runs) {
    s += r.label + " " + fmt(r.cell, 5) + " (per seed";
    for (const auto& [seed, v] : r.per_seed)
      s += " " + fmt(v, 4);
    s += "), ";
  }
  s.resize(s.size() - 2);
  return s;
}

Outcome
headline()
{
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (auto scenario : { Scenario::EmotionalPendulum, Scenario::WindyPendulum }) {
    std::vector<Run> runs;
    Run bc = run_cell(scenario, Algo::BC, DeconfoundMode::None);
    for (auto algo : { Algo::DQN, Algo::CQL }) {
      Run base = run_cell(scenario, algo, DeconfoundMode::None);
      runs.push_back(base);
      for (auto mode : { DeconfoundMode::Reweight, DeconfoundMode::Resample }) {
        Run v = run_cell(scenario, algo, mode);
        bool ok = beats(v, base) && beats(v, bc);
        pass = pass && ok;
        runs.push_back(v);
        if (!ok)
          detail += to_string(scenario).data() + std::string(" ") + v.label + " ordering fails; ";
      }
    }
    runs.push_back(bc);
    detail += std::string(to_string(scenario)) + ": " + describe(runs) + "; ";
  }
  double secs = seconds_since(t0);
  return { pass && secs < 7200.0, detail + fmt(secs / 60.0, 3) + " min, " + cache_note() };
}

Outcome
monotonicity()
{
  std::string detail;
  double gaps[2];
  int i = 0;
  for (double ip : { 0.7, 0.9 }) {
    Run base = run_cell(Scenario::EmotionalPendulum, Algo::CQL, DeconfoundMode::None, ip);
    Run rw = run_cell(Scenario::EmotionalPendulum, Algo::CQL, DeconfoundMode::Reweight, ip);
    gaps[i++] = rw.cell - base.cell;
    detail += "I_p=" + fmt(ip) + ": CQL " + fmt(base.cell, 5) + ", CQL_RW " + fmt(rw.cell, 5) + ", gap " +
              fmt(rw.cell - base.cell, 4) + "; ";
  }
  return { gaps[1] > gaps[0], detail };
}

Outcome
center_ablation()
{
  Run kmeans = run_cell(Scenario::EmotionalPendulum, Algo::DQN, DeconfoundMode::Reweight);
  Run random = run_cell(Scenario::EmotionalPendulum, Algo::DQN, DeconfoundMode::Reweight, -1.0, true);
  return { kmeans.cell >= random.cell, describe({ kmeans, random }) };
}

Outcome
lscde_consistency()
{
  // y | x ~ N(x, 0.2^2), x ~ U(-1, 1); hyperparameters chosen by 5-fold CV at each n.
  const double sd = 0.2;
  const int grid = 801;
  const double lo = -2.5, hi = 2.5, dy = (hi - lo) / (grid - 1);
  bool decreasing = true;
  double worst_norm = 0.0;
  std::string detail = "mean L1 error by seed:";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double prev = 1e300;
    detail += " [";
    for (std::size_t n : { 500, 2000, 8000 }) {
      Rng rng(7 + seed);
      density::Matrix X(static_cast<Eigen::Index>(n), 1), Y(static_cast<Eigen::Index>(n), 1);
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        X(i, 0) = uniform(rng, -1.0, 1.0);
        Y(i, 0) = normal(rng, X(i, 0), sd);
      }
      density::CvGrid g;
      g.k = { std::min<std::size_t>(n / 10, 400) };
      g.lambda = { 1e-3, 1e-2, 1e-1 };
      g.sigma_x = { 0.05, 0.1, 0.2, 0.4 };
      g.sigma_y = { 0.05, 0.1, 0.2, 0.4 };
      auto choice = density::cross_validate(X, Y, g, 5, 3);
      density::LscdeParams params;
      params.k = choice.k;
      params.lambda = choice.lambda;
      params.sigma_x = choice.sigma_x;
      params.sigma_y = choice.sigma_y;
      params.seed = 3;
      auto model = density::fit_lscde(X, Y, params);
      double err = 0.0;
      const int tests = 41;
      for (int t = 0; t < tests; ++t) {
        double x = -0.9 + 1.8 * t / (tests - 1);
        double l1 = 0.0, mass = 0.0;
        for (int k = 0; k < grid; ++k) {
          double y = lo + k * dy;
          double est = density::conditional_density(model, std::span(&x, 1), std::span(&y, 1));
          double z = (y - x) / sd;
          double truth = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
          double wgt = (k == 0 || k == grid - 1) ? 0.5 * dy : dy;
          l1 += wgt * std::abs(est - truth);
          mass += wgt * est;
        }
        err += l1 / tests;
        worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
      }
      decreasing = decreasing && err < prev;
      prev = err;
      detail += (n == 500 ? "" : " ") + fmt(err, 3);
    }
    detail += "]";
  }
  detail += "; largest normalization error " + fmt(worst_norm, 3);
  return { decreasing && worst_norm <= 0.01, detail };
}

Outcome
backdoor_end_to_end()
{
  Run base = run_cell(Scenario::EmotionalPendulumStar, Algo::DQN, DeconfoundMode::None);
  Run rw = run_cell(Scenario::EmotionalPendulumStar, Algo::DQN, DeconfoundMode::Reweight);
  Run rs = run_cell(Scenario::EmotionalPendulumStar, Algo::DQN, DeconfoundMode::Resample);
  return { beats(rw, base) && beats(rs, base), describe({ base, rw, rs }) };
}

struct Criterion
{
  int id;
  const char* name;
  std::function<Outcome()> check;
};

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "acceptance checks" };
  std::vector<int> selected;
  std::string cache = "acceptance-cache";
  app.add_option("criteria", selected, "criterion numbers (default: all)");
  app.add_option("--cache", cache, "pipeline cache directory");
  CLI11_PARSE(app, argc, argv);
  g_cache = cache;

  const std::vector<Criterion> criteria{
    { 1, "weight mean", weight_mean },
    { 2, "oracle agreement", oracle_agreement },
    { 3, "reweighted loss unbiased", unbiasedness },
    { 4, "resample matches reweight", resample_vs_reweight },
    { 5, "no-confounding degeneracy", no_confounding },
    { 6, "gradient checks", gradient_checks },
    { 7, "deconfounded variants beat baselines", headline },
    { 8, "gap grows with confounding strength", monotonicity },
    { 9, "k-means centers vs random centers", center_ablation },
    { 10, "LSCDE consistency", lscde_consistency },
    { 11, "backdoor variant end to end", backdoor_end_to_end },
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = { false, std::string("error: ") + e.what() };
    }
    failures += !o.pass;
    std::printf("criterion %d (%s): %s: %s [%.1f s]\n",
                c.id,
                c.name,
                o.pass ? "PASS" : "FAIL",
                o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
