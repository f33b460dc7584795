#include "deconf/weights/discrete_conditional.hpp"

#include "deconf/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace deconf::weights {

using density::Matrix;
using density::Vector;
using nlohmann::json;

namespace {

json
vector_json(const Vector& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector
vector_from_json(const json& j)
{
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

} // namespace

Standardizer
Standardizer::fit(const Matrix& data)
{
  if (data.rows() == 0)
    throw Error("cannot standardize an empty sample");
  Standardizer s;
  s.mean = data.colwise().mean().transpose();
  s.scale = ((data.rowwise() - s.mean.transpose()).array().square().colwise().sum() / static_cast<double>(data.rows()))
              .sqrt()
              .transpose();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j)
    if (!(s.scale(j) > 1e-12))
      s.scale(j) = 1.0;
  return s;
}

Standardizer
Standardizer::identity(std::size_t dim)
{
  Standardizer s;
  s.mean = Vector::Zero(static_cast<Eigen::Index>(dim));
  s.scale = Vector::Ones(static_cast<Eigen::Index>(dim));
  return s;
}

void
Standardizer::apply(const double* in, double* out) const
{
  for (Eigen::Index j = 0; j < mean.size(); ++j)
    out[j] = (in[j] - mean(j)) / scale(j);
}

Matrix
Standardizer::apply(const Matrix& data) const
{
  return (data.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Matrix
state_matrix(const OfflineDataset& dataset, bool next)
{
  const bool tabular = dataset.scenario == Scenario::Tabular;
  Matrix out(static_cast<Eigen::Index>(dataset.size()), tabular ? 1 : 3);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const StateVec& s = next ? dataset.transitions[i].s_next : dataset.transitions[i].s;
    auto row = static_cast<Eigen::Index>(i);
    out(row, 0) = s.x;
    if (!tabular) {
      out(row, 1) = s.y;
      out(row, 2) = s.v;
    }
  }
  return out;
}

StatePartition
StatePartition::fit(const OfflineDataset& dataset, std::size_t cells, std::uint64_t seed)
{
  if (dataset.scenario == Scenario::Tabular) {
    long long max_code = 0;
    for (const auto& t : dataset.transitions)
      max_code = std::max(max_code, std::llround(t.s.x));
    return codes(static_cast<std::size_t>(max_code) + 1);
  }
  StatePartition p;
  Matrix states = state_matrix(dataset);
  p.scaler_ = Standardizer::fit(states);
  Matrix z = p.scaler_.apply(states);
  // Clustering runs on a bounded subsample; every row is then assigned.
  Matrix pool = density::subsample_rows(z, 20000, seed);
  p.centers_ = density::kmeans(pool, std::min(cells, static_cast<std::size_t>(pool.rows())), seed).centers;
  p.num_cells_ = static_cast<std::size_t>(p.centers_.rows());
  return p;
}

StatePartition
StatePartition::codes(std::size_t num_states)
{
  StatePartition p;
  p.by_code_ = true;
  p.num_cells_ = num_states;
  return p;
}

std::size_t
StatePartition::cell(const StateVec& s) const
{
  if (by_code_) {
    long long code = std::llround(s.x);
    if (code < 0 || static_cast<std::size_t>(code) >= num_cells_)
      throw Error("state code " + std::to_string(code) + " outside the partition");
    return static_cast<std::size_t>(code);
  }
  double raw[3] = { s.x, s.y, s.v };
  Eigen::RowVector3d z;
  scaler_.apply(raw, z.data());
  Eigen::Index best;
  (centers_.rowwise() - z).rowwise().squaredNorm().minCoeff(&best);
  return static_cast<std::size_t>(best);
}

json
StatePartition::to_json() const
{
  json j;
  j["by_code"] = by_code_;
  j["cells"] = num_cells_;
  if (!by_code_) {
    j["mean"] = vector_json(scaler_.mean);
    j["scale"] = vector_json(scaler_.scale);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
      Vector r = centers_.row(i).transpose();
      rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    j["centers"] = rows;
  }
  return j;
}

StatePartition
StatePartition::from_json(const json& j)
{
  StatePartition p;
  p.by_code_ = j.at("by_code").get<bool>();
  p.num_cells_ = j.at("cells").get<std::size_t>();
  if (!p.by_code_) {
    p.scaler_.mean = vector_from_json(j.at("mean"));
    p.scaler_.scale = vector_from_json(j.at("scale"));
    auto rows = j.at("centers").get<std::vector<std::vector<double>>>();
    p.centers_.resize(static_cast<Eigen::Index>(rows.size()), p.scaler_.mean.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < rows[i].size(); ++c)
        p.centers_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    if (p.centers_.rows() != static_cast<Eigen::Index>(p.num_cells_))
      throw Error("state partition: cell count does not match the centers");
  }
  return p;
}

DiscreteConditional::DiscreteConditional(std::size_t num_cells,
                                         std::size_t num_contexts,
                                         std::size_t num_values,
                                         double smoothing)
  : num_cells_(num_cells)
  , num_contexts_(num_contexts)
  , num_values_(num_values)
  , smoothing_(smoothing)
  , counts_(num_cells * num_contexts * num_values, 0.0)
  , totals_(num_cells * num_contexts, 0.0)
{
  if (num_values == 0 || num_cells == 0 || num_contexts == 0)
    throw Error("discrete conditional needs nonempty tables");
  if (!(smoothing > 0.0))
    throw Error("smoothing must be positive");
}

std::size_t
DiscreteConditional::index(std::size_t cell, std::size_t context) const
{
  if (cell >= num_cells_ || context >= num_contexts_)
    throw Error("discrete conditional: cell or context out of range");
  return cell * num_contexts_ + context;
}

void
DiscreteConditional::add(std::size_t cell, std::size_t context, std::size_t value)
{
  if (value >= num_values_)
    throw Error("discrete conditional: value out of range");
  auto i = index(cell, context);
  counts_[i * num_values_ + value] += 1.0;
  totals_[i] += 1.0;
}

double
DiscreteConditional::probability(std::size_t cell, std::size_t context, std::size_t value) const
{
  if (value >= num_values_)
    throw Error("discrete conditional: value out of range");
  auto i = index(cell, context);
  return (counts_[i * num_values_ + value] + smoothing_) /
         (totals_[i] + smoothing_ * static_cast<double>(num_values_));
}

json
DiscreteConditional::to_json() const
{
  return { { "cells", num_cells_ },
           { "contexts", num_contexts_ },
           { "values", num_values_ },
           { "smoothing", smoothing_ },
           { "counts", counts_ } };
}

DiscreteConditional
DiscreteConditional::from_json(const json& j)
{
  DiscreteConditional d(j.at("cells").get<std::size_t>(),
                        j.at("contexts").get<std::size_t>(),
                        j.at("values").get<std::size_t>(),
                        j.at("smoothing").get<double>());
  d.counts_ = j.at("counts").get<std::vector<double>>();
  if (d.counts_.size() != d.num_cells_ * d.num_contexts_ * d.num_values_)
    throw Error("discrete conditional: count table has the wrong size");
  for (std::size_t i = 0; i < d.totals_.size(); ++i)
    for (std::size_t v = 0; v < d.num_values_; ++v)
      d.totals_[i] += d.counts_[i * d.num_values_ + v];
  return d;
}

} // namespace deconf::weights
