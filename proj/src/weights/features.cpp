#include "deconf/weights/features.hpp"

#include "deconf/core/types.hpp"

namespace deconf::weights {

using density::Matrix;
using density::Vector;
using nlohmann::json;

namespace {

Matrix
reward_matrix(const OfflineDataset& dataset)
{
  Matrix r(static_cast<Eigen::Index>(dataset.size()), 1);
  for (std::size_t i = 0; i < dataset.size(); ++i)
    r(static_cast<Eigen::Index>(i), 0) = dataset.transitions[i].r;
  return r;
}

json
standardizer_json(const Standardizer& s)
{
  return { { "mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size()) },
           { "scale", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size()) } };
}

Standardizer
standardizer_from_json(const json& j)
{
  auto m = j.at("mean").get<std::vector<double>>();
  auto s = j.at("scale").get<std::vector<double>>();
  if (m.size() != s.size())
    throw Error("standardizer: mean and scale differ in length");
  Standardizer out;
  out.mean = Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
  out.scale = Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
  return out;
}

} // namespace

FeatureMap
FeatureMap::fit(const OfflineDataset& dataset, RatioKind kind, double discrete_scale)
{
  if (kind == RatioKind::Backdoor)
    throw Error("the backdoor ratio uses no outcome density features");
  if (!(discrete_scale > 0.0))
    throw Error("discrete_scale must be positive");
  FeatureMap f;
  f.kind = kind;
  f.discrete_scale = discrete_scale;
  f.tabular = dataset.scenario == Scenario::Tabular;
  if (f.tabular) {
    f.state = f.next_state = f.reward = Standardizer::identity(1);
  } else {
    f.state = Standardizer::fit(state_matrix(dataset));
    f.next_state = Standardizer::fit(state_matrix(dataset, true));
    f.reward = Standardizer::fit(reward_matrix(dataset));
  }
  return f;
}

std::size_t
FeatureMap::dim_y() const
{
  switch (kind) {
    case RatioKind::Full:
      return next_state.dim() + 1;
    case RatioKind::RewardOnly:
      return 1;
    case RatioKind::NextStateOnly:
      return next_state.dim();
    case RatioKind::Backdoor:
      break;
  }
  return 0;
}

void
FeatureMap::conditioning(const StateVec& s, int m, int a, double* out) const
{
  const double raw[3] = { s.x, s.y, s.v };
  if (tabular)
    out[0] = raw[0] * discrete_scale;
  else
    state.apply(raw, out);
  out[state_dim()] = m * discrete_scale;
  out[state_dim() + 1] = a * discrete_scale;
}

void
FeatureMap::outcome(const Transition& t, double* out) const
{
  const double raw[3] = { t.s_next.x, t.s_next.y, t.s_next.v };
  const double c = tabular ? discrete_scale : 1.0;
  std::size_t j = 0;
  if (kind == RatioKind::Full || kind == RatioKind::NextStateOnly) {
    next_state.apply(raw, out);
    for (std::size_t i = 0; i < next_state.dim(); ++i)
      out[i] *= c;
    j = next_state.dim();
  }
  if (kind == RatioKind::Full || kind == RatioKind::RewardOnly) {
    reward.apply(&t.r, out + j);
    out[j] *= c;
  }
}

json
FeatureMap::to_json() const
{
  return { { "kind", std::string(to_string(kind)) },
           { "tabular", tabular },
           { "discrete_scale", discrete_scale },
           { "state", standardizer_json(state) },
           { "next_state", standardizer_json(next_state) },
           { "reward", standardizer_json(reward) } };
}

FeatureMap
FeatureMap::from_json(const json& j)
{
  FeatureMap f;
  f.kind = ratio_kind_from_string(j.at("kind").get<std::string>());
  f.tabular = j.at("tabular").get<bool>();
  f.discrete_scale = j.at("discrete_scale").get<double>();
  f.state = standardizer_from_json(j.at("state"));
  f.next_state = standardizer_from_json(j.at("next_state"));
  f.reward = standardizer_from_json(j.at("reward"));
  return f;
}

TrainingSet
training_features(const OfflineDataset& dataset,
                  const FeatureMap& features,
                  const density::JitterConfig& jitter,
                  std::uint64_t seed)
{
  const auto n = static_cast<Eigen::Index>(dataset.size());
  const auto dx = static_cast<Eigen::Index>(features.dim_x());
  const auto dy = static_cast<Eigen::Index>(features.dim_y());
  const auto ds = static_cast<Eigen::Index>(features.state_dim());
  const double c = features.discrete_scale;
  // Row-major scratch so each row is contiguous for the feature writers.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X(n, dx), Y(n, dy);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = dataset.transitions[static_cast<std::size_t>(i)];
    if (!t.m)
      throw Error("outcome density features need the intermediate action m");
    features.conditioning(t.s, *t.m, t.a, X.row(i).data());
    X(i, ds) = density::jitter(*t.m * c, jitter, rng);
    X(i, ds + 1) = density::jitter(t.a * c, jitter, rng);
    if (features.tabular)
      X(i, 0) = density::jitter(t.s.x * c, jitter, rng);
    features.outcome(t, Y.row(i).data());
    if (features.tabular) {
      Eigen::Index j = 0;
      if (features.kind != RatioKind::RewardOnly)
        Y(i, j++) = density::jitter(t.s_next.x * c, jitter, rng);
      if (features.kind != RatioKind::NextStateOnly)
        Y(i, j) = density::jitter(t.r * c, jitter, rng);
    }
  }
  return { Matrix(X), Matrix(Y) };
}

} // namespace deconf::weights
