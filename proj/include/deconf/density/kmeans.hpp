#pragma once

#include "deconf/core/config.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace deconf::density {

// Points are stored one per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct KMeansResult
{
  Matrix centers;
  std::vector<std::size_t> labels;
  std::size_t iterations = 0;
  bool converged = false;
};

//! Lloyd iterations from k-means++ seeding; stops when no center moves more
//! than `tol` or after `max_iter` rounds. If the data has fewer than k
//! distinct points, fewer centers are returned.
KMeansResult kmeans(const Matrix& points,
                    std::size_t k,
                    std::uint64_t seed,
                    std::size_t max_iter = 100,
                    double tol = 1e-6);

// k distinct rows drawn uniformly without replacement.
Matrix random_centers(const Matrix& points, std::size_t k, std::uint64_t seed);

Matrix select_centers(const Matrix& points, std::size_t k, CenterMethod method, std::uint64_t seed);

// Squared Euclidean distances, rows of `a` against rows of `b`.
Matrix squared_distances(const Matrix& a, const Matrix& b);

std::vector<std::size_t> nearest_center(const Matrix& points, const Matrix& centers);

// Deterministic row subsample (all rows when n <= cap).
Matrix subsample_rows(const Matrix& points, std::size_t cap, std::uint64_t seed);

} // namespace deconf::density
