#include "deconf/weights/ratios.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace deconf::weights {

using density::Matrix;
using density::Vector;
using nlohmann::json;

namespace {

// Target bandwidth of the jittered action code in the policy LSCDE, in code units.
constexpr double kPolicySigmaY = 0.3;

density::LscdeParams
lscde_params(const DensitySettings& settings, std::uint64_t seed)
{
  density::LscdeParams p;
  p.k = settings.k;
  p.lambda = settings.lambda;
  p.sigma_x = settings.sigma_x;
  p.sigma_y = settings.sigma_y;
  p.centers = settings.centers;
  p.center_sample_cap = settings.center_sample_cap;
  p.seed = seed;
  return p;
}

// Replaces unset parameters by cross-validated choices when folds >= 2.
void
apply_cross_validation(density::LscdeParams& p,
                       const Matrix& X,
                       const Matrix& Y,
                       const CrossValidationSettings& cv,
                       std::uint64_t seed)
{
  if (cv.folds < 2)
    return;
  Matrix joint(X.rows(), X.cols() + Y.cols());
  joint << X, Y;
  Matrix sub = density::subsample_rows(joint, cv.sample_cap, derive_seed(seed, 11));
  Matrix xs = sub.leftCols(X.cols());
  Matrix ys = sub.rightCols(Y.cols());
  density::CvGrid grid;
  grid.k = cv.k_grid.empty() ? std::vector<std::size_t>{ p.k } : cv.k_grid;
  grid.lambda = cv.lambda_grid.empty() ? std::vector<double>{ p.lambda } : cv.lambda_grid;
  grid.sigma_x = cv.sigma_x_grid;
  if (grid.sigma_x.empty())
    grid.sigma_x = { p.sigma_x ? *p.sigma_x : density::median_pairwise_distance(X, 1000, derive_seed(seed, 12)) };
  grid.sigma_y = cv.sigma_y_grid;
  if (grid.sigma_y.empty())
    grid.sigma_y = { p.sigma_y ? *p.sigma_y : density::median_pairwise_distance(Y, 1000, derive_seed(seed, 13)) };
  auto choice = density::cross_validate(xs, ys, grid, cv.folds, derive_seed(seed, 14), p.centers);
  p.k = choice.k;
  p.lambda = choice.lambda;
  p.sigma_x = choice.sigma_x;
  p.sigma_y = choice.sigma_y;
}

std::size_t
checked_action(int a, std::size_t num_actions)
{
  if (a < 0 || static_cast<std::size_t>(a) >= num_actions)
    throw Error("action code " + std::to_string(a) + " outside the action space");
  return static_cast<std::size_t>(a);
}

WeightVector
finish(std::vector<double> raw, std::size_t flagged, RatioKind kind, ClipBounds bounds)
{
  const auto n = raw.size();
  auto w = postprocess_weights(std::move(raw), bounds, kind);
  w.flagged = flagged;
  if (n > 0 && static_cast<double>(flagged) > kFlaggedWarningShare * static_cast<double>(n)) {
    w.quality_warning = true;
    std::cerr << "warning: " << flagged << " of " << n << " ratio denominators were floored at " << kRatioFloor
              << "; the density estimate is unreliable\n";
  }
  return w;
}

WeightVector
outcome_ratio(const OfflineDataset& dataset, const DensityBundle& bundle, RatioKind kind, ClipBounds bounds)
{
  if (bundle.kind != kind)
    throw Error("density bundle holds " + std::string(to_string(bundle.kind)) + " models, " +
                std::string(to_string(kind)) + " requested");
  if (!bundle.features || !bundle.outcome_model || !bundle.policy_model)
    throw Error("density bundle is missing the outcome or policy model");
  const auto& features = *bundle.features;
  const auto& model = *bundle.outcome_model;
  const auto& policy = *bundle.policy_model;
  const std::size_t A = bundle.num_actions;
  if (policy.num_actions() != A || dataset.num_actions != A)
    throw Error("action space differs between the dataset and the density bundle");
  if (model.dim_x() != features.dim_x() || model.dim_y() != features.dim_y())
    throw Error("outcome model dimensions do not match the feature map");

  std::vector<double> raw(dataset.size());
  std::vector<double> xbuf(features.dim_x()), ybuf(features.dim_y()), dens(A);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Transition& t = dataset.transitions[i];
    if (!t.m)
      throw Error("row " + std::to_string(i) + " lacks the intermediate action m");
    const std::size_t a = checked_action(t.a, A);
    checked_action(*t.m, A);
    auto probs = policy.probabilities(t.s);
    features.outcome(t, ybuf.data());
    Vector ky = model.y_kernels(ybuf);
    double numerator = 0.0;
    for (std::size_t b = 0; b < A; ++b) {
      features.conditioning(t.s, *t.m, static_cast<int>(b), xbuf.data());
      dens[b] = model.density_from_kernels(model.x_kernels(xbuf), ky);
      numerator += dens[b] * probs[b];
    }
    double denominator = dens[a];
    if (denominator < kRatioFloor) {
      denominator = kRatioFloor;
      ++flagged;
    }
    raw[i] = numerator / denominator;
  }
  return finish(std::move(raw), flagged, kind, bounds);
}

} // namespace

PolicyModel
PolicyModel::fit_cells(const OfflineDataset& dataset, std::size_t cells, std::uint64_t seed)
{
  if (dataset.size() == 0)
    throw Error("empty dataset");
  PolicyModel p;
  p.num_actions_ = dataset.num_actions;
  p.partition_ = StatePartition::fit(dataset, cells, seed);
  p.table_ = DiscreteConditional(p.partition_->size(), 1, p.num_actions_);
  for (const auto& t : dataset.transitions)
    p.table_.add(p.partition_->cell(t.s), 0, checked_action(t.a, p.num_actions_));
  return p;
}

PolicyModel
PolicyModel::fit_lscde(const OfflineDataset& dataset, const DensitySettings& settings, std::uint64_t seed)
{
  if (dataset.size() == 0)
    throw Error("empty dataset");
  PolicyModel p;
  p.num_actions_ = dataset.num_actions;
  const bool tabular = dataset.scenario == Scenario::Tabular;
  Matrix states = state_matrix(dataset);
  p.scaler_ = tabular ? Standardizer::identity(1) : Standardizer::fit(states);
  Matrix X = p.scaler_.apply(states);
  Matrix Y(X.rows(), 1);
  density::JitterConfig jit{ settings.jitter_theta, settings.jitter_v };
  Rng rng(derive_seed(seed, 21));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto row = static_cast<Eigen::Index>(i);
    if (tabular)
      X(row, 0) = density::jitter(X(row, 0), jit, rng);
    Y(row, 0) = density::jitter(dataset.transitions[i].a, jit, rng);
  }
  auto params = lscde_params(settings, derive_seed(seed, 22));
  params.sigma_y = kPolicySigmaY;
  p.lscde_ = density::fit_lscde(X, Y, params);
  return p;
}

std::vector<double>
PolicyModel::probabilities(const StateVec& s) const
{
  std::vector<double> out(num_actions_);
  if (lscde_) {
    double raw[3] = { s.x, s.y, s.v };
    std::vector<double> z(scaler_.dim());
    scaler_.apply(raw, z.data());
    Vector kx = lscde_->x_kernels(z);
    double total = 0.0;
    for (std::size_t a = 0; a < num_actions_; ++a) {
      double y = static_cast<double>(a);
      out[a] = lscde_->density_from_kernels(kx, lscde_->y_kernels({ &y, 1 }));
      total += out[a];
    }
    if (!(total > 0.0))
      std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(num_actions_));
    else
      for (auto& v : out)
        v /= total;
    return out;
  }
  auto cell = partition_->cell(s);
  for (std::size_t a = 0; a < num_actions_; ++a)
    out[a] = table_.probability(cell, 0, a);
  return out;
}

json
PolicyModel::to_json() const
{
  json j;
  j["num_actions"] = num_actions_;
  if (lscde_) {
    j["type"] = "lscde";
    j["mean"] = std::vector<double>(scaler_.mean.data(), scaler_.mean.data() + scaler_.mean.size());
    j["scale"] = std::vector<double>(scaler_.scale.data(), scaler_.scale.data() + scaler_.scale.size());
    j["model"] = density::serialize_model(*lscde_);
  } else {
    j["type"] = "cells";
    j["partition"] = partition_->to_json();
    j["table"] = table_.to_json();
  }
  return j;
}

PolicyModel
PolicyModel::from_json(const json& j)
{
  PolicyModel p;
  p.num_actions_ = j.at("num_actions").get<std::size_t>();
  if (j.at("type") == "lscde") {
    auto m = j.at("mean").get<std::vector<double>>();
    auto s = j.at("scale").get<std::vector<double>>();
    p.scaler_.mean = Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
    p.scaler_.scale = Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
    p.lscde_ = density::parse_model(j.at("model").get<std::string>());
  } else {
    p.partition_ = StatePartition::from_json(j.at("partition"));
    p.table_ = DiscreteConditional::from_json(j.at("table"));
  }
  return p;
}

DensityBundle
fit_density_bundle(const OfflineDataset& dataset, RatioKind kind, const DensitySettings& settings, std::uint64_t seed)
{
  dataset.validate();
  DensityBundle b;
  b.kind = kind;
  b.num_actions = dataset.num_actions;

  if (kind == RatioKind::Backdoor) {
    if (!dataset.shape.has_u)
      throw Error("the backdoor ratio needs the confounder subset u");
    int max_u = 0;
    for (const auto& t : dataset.transitions)
      max_u = std::max(max_u, *t.u);
    const auto num_u = static_cast<std::size_t>(std::max(max_u, 1)) + 1;
    b.u_partition = StatePartition::fit(dataset, settings.policy_cells, derive_seed(seed, 1));
    b.u_given_s = DiscreteConditional(b.u_partition->size(), 1, num_u);
    b.u_given_sa = DiscreteConditional(b.u_partition->size(), b.num_actions, num_u);
    for (const auto& t : dataset.transitions) {
      if (*t.u < 0)
        throw Error("negative confounder code");
      auto cell = b.u_partition->cell(t.s);
      auto u = static_cast<std::size_t>(*t.u);
      b.u_given_s->add(cell, 0, u);
      b.u_given_sa->add(cell, checked_action(t.a, b.num_actions), u);
    }
    return b;
  }

  if (!dataset.shape.has_m)
    throw Error(std::string(to_string(kind)) + " ratio needs the intermediate action m");
  b.features = FeatureMap::fit(dataset, kind, settings.discrete_scale);
  density::JitterConfig jit{ settings.jitter_theta, settings.jitter_v };
  auto ts = training_features(dataset, *b.features, jit, derive_seed(seed, 2));
  auto params = lscde_params(settings, derive_seed(seed, 3));
  apply_cross_validation(params, ts.X, ts.Y, settings.cv, derive_seed(seed, 4));
  b.outcome_model = density::fit_lscde(ts.X, ts.Y, params);
  b.policy_model = settings.policy_lscde ? PolicyModel::fit_lscde(dataset, settings, derive_seed(seed, 5))
                                         : PolicyModel::fit_cells(dataset, settings.policy_cells, derive_seed(seed, 5));
  return b;
}

void
save_bundle(const DensityBundle& b, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  json j;
  j["kind"] = std::string(to_string(b.kind));
  j["num_actions"] = b.num_actions;
  if (b.features)
    j["features"] = b.features->to_json();
  if (b.policy_model)
    j["policy"] = b.policy_model->to_json();
  if (b.u_partition) {
    j["u_partition"] = b.u_partition->to_json();
    j["u_given_s"] = b.u_given_s->to_json();
    j["u_given_sa"] = b.u_given_sa->to_json();
  }
  if (b.outcome_model)
    density::save_model(*b.outcome_model, dir / "outcome.lscde");
  text::write_atomic(dir / "bundle.json", j.dump(1) + "\n");
}

DensityBundle
load_bundle(const std::filesystem::path& dir)
{
  try {
    auto j = json::parse(text::read_file(dir / "bundle.json"));
    DensityBundle b;
    b.kind = ratio_kind_from_string(j.at("kind").get<std::string>());
    b.num_actions = j.at("num_actions").get<std::size_t>();
    if (j.contains("features"))
      b.features = FeatureMap::from_json(j.at("features"));
    if (j.contains("policy"))
      b.policy_model = PolicyModel::from_json(j.at("policy"));
    if (j.contains("u_partition")) {
      b.u_partition = StatePartition::from_json(j.at("u_partition"));
      b.u_given_s = DiscreteConditional::from_json(j.at("u_given_s"));
      b.u_given_sa = DiscreteConditional::from_json(j.at("u_given_sa"));
    }
    if (b.features)
      b.outcome_model = density::load_model(dir / "outcome.lscde");
    return b;
  } catch (const json::exception& e) {
    throw Error("density bundle " + dir.string() + ": " + e.what());
  }
}

WeightVector
estimate_d1(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds)
{
  return outcome_ratio(dataset, bundle, RatioKind::Full, bounds);
}

WeightVector
estimate_d1_reward_only(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds)
{
  return outcome_ratio(dataset, bundle, RatioKind::RewardOnly, bounds);
}

WeightVector
estimate_d1_nextstate_only(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds)
{
  return outcome_ratio(dataset, bundle, RatioKind::NextStateOnly, bounds);
}

WeightVector
estimate_d2(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds)
{
  if (bundle.kind != RatioKind::Backdoor || !bundle.u_partition)
    throw Error("density bundle does not hold backdoor models");
  if (dataset.num_actions != bundle.num_actions)
    throw Error("action space differs between the dataset and the density bundle");
  std::vector<double> raw(dataset.size());
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Transition& t = dataset.transitions[i];
    if (!t.u)
      throw Error("row " + std::to_string(i) + " lacks the confounder subset u");
    if (*t.u < 0 || static_cast<std::size_t>(*t.u) >= bundle.u_given_s->num_values())
      throw Error("row " + std::to_string(i) + ": confounder code outside the fitted range");
    auto cell = bundle.u_partition->cell(t.s);
    auto u = static_cast<std::size_t>(*t.u);
    double numerator = bundle.u_given_s->probability(cell, 0, u);
    double denominator = bundle.u_given_sa->probability(cell, checked_action(t.a, bundle.num_actions), u);
    if (denominator < kRatioFloor) {
      denominator = kRatioFloor;
      ++flagged;
    }
    raw[i] = numerator / denominator;
  }
  return finish(std::move(raw), flagged, RatioKind::Backdoor, bounds);
}

WeightVector
estimate_weights(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds)
{
  if (bundle.kind == RatioKind::Backdoor)
    return estimate_d2(dataset, bundle, bounds);
  return outcome_ratio(dataset, bundle, bundle.kind, bounds);
}

} // namespace deconf::weights
