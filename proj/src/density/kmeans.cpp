#include "deconf/density/kmeans.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace deconf::density {

Matrix
squared_distances(const Matrix& a, const Matrix& b)
{
  Vector an = a.rowwise().squaredNorm();
  Vector bn = b.rowwise().squaredNorm();
  Matrix d = -2.0 * a * b.transpose();
  d.colwise() += an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

std::vector<std::size_t>
nearest_center(const Matrix& points, const Matrix& centers)
{
  std::vector<std::size_t> labels(static_cast<std::size_t>(points.rows()));
  constexpr Eigen::Index kChunk = 4096;
  for (Eigen::Index start = 0; start < points.rows(); start += kChunk) {
    Eigen::Index len = std::min(kChunk, points.rows() - start);
    Matrix d = squared_distances(points.middleRows(start, len), centers);
    for (Eigen::Index i = 0; i < len; ++i) {
      Eigen::Index best;
      d.row(i).minCoeff(&best);
      labels[static_cast<std::size_t>(start + i)] = static_cast<std::size_t>(best);
    }
  }
  return labels;
}

namespace {

Matrix
plus_plus_seeding(const Matrix& points, std::size_t k, Rng& rng)
{
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<Eigen::Index> chosen;
  chosen.reserve(k);
  chosen.push_back(static_cast<Eigen::Index>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)));

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = (points.row(static_cast<Eigen::Index>(i)) - points.row(chosen[0])).squaredNorm();

  while (chosen.size() < k) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total <= 0.0)
      break; // every remaining point coincides with a center
    double target = uniform01(rng) * total;
    std::size_t pick = n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0)
        continue;
      acc += d2[i];
      pick = i;
      if (acc >= target)
        break;
    }
    chosen.push_back(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points.row(static_cast<Eigen::Index>(i)) - points.row(chosen.back())).squaredNorm());
  }

  Matrix centers(static_cast<Eigen::Index>(chosen.size()), points.cols());
  for (std::size_t j = 0; j < chosen.size(); ++j)
    centers.row(static_cast<Eigen::Index>(j)) = points.row(chosen[j]);
  return centers;
}

} // namespace

KMeansResult
kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iter, double tol)
{
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0)
    throw Error("k-means needs at least one center");
  if (k > n)
    throw Error("k-means: k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " samples");

  Rng rng(seed);
  KMeansResult result;
  result.centers = plus_plus_seeding(points, k, rng);
  const Eigen::Index kk = result.centers.rows();

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    result.labels = nearest_center(points, result.centers);
    Matrix sums = Matrix::Zero(kk, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(kk), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(result.labels[i])) += points.row(static_cast<Eigen::Index>(i));
      ++counts[result.labels[i]];
    }
    double max_shift = 0.0;
    for (Eigen::Index j = 0; j < kk; ++j) {
      auto c = counts[static_cast<std::size_t>(j)];
      if (c == 0)
        continue; // empty cluster keeps its previous center
      Eigen::RowVectorXd updated = sums.row(j) / static_cast<double>(c);
      max_shift = std::max(max_shift, (updated - result.centers.row(j)).norm());
      result.centers.row(j) = updated;
    }
    result.iterations = iter + 1;
    if (max_shift < tol) {
      result.converged = true;
      break;
    }
  }
  result.labels = nearest_center(points, result.centers);
  return result;
}

Matrix
random_centers(const Matrix& points, std::size_t k, std::uint64_t seed)
{
  const auto n = static_cast<std::size_t>(points.rows());
  if (k > n)
    throw Error("random centers: k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " samples");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first k entries are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(i, n - 1)(rng);
    std::swap(idx[i], idx[j]);
  }
  Matrix centers(static_cast<Eigen::Index>(k), points.cols());
  for (std::size_t i = 0; i < k; ++i)
    centers.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(idx[i]));
  return centers;
}

Matrix
select_centers(const Matrix& points, std::size_t k, CenterMethod method, std::uint64_t seed)
{
  if (method == CenterMethod::Random)
    return random_centers(points, k, seed);
  return kmeans(points, k, seed).centers;
}

Matrix
subsample_rows(const Matrix& points, std::size_t cap, std::uint64_t seed)
{
  if (static_cast<std::size_t>(points.rows()) <= cap)
    return points;
  return random_centers(points, cap, seed);
}

} // namespace deconf::density
