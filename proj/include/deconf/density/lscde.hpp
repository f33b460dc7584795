#pragma once

#include "deconf/density/kmeans.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>

namespace deconf::density {

//! Kernel centers in the joint (conditioning, target) space. The first
//! `dim_x` columns of each row are the conditioning part.
struct KernelCenters
{
  Matrix centers;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
};

struct LscdeParams
{
  std::size_t k = 200;
  double lambda = 0.1;
  std::optional<double> sigma_x;
  std::optional<double> sigma_y;
  CenterMethod centers = CenterMethod::KMeans;
  std::size_t center_sample_cap = 10000;
  std::uint64_t seed = 0;
};

//! Least-squares conditional density model with product-Gaussian basis
//!   phi_i(x, y) = exp(-|x - cx_i|^2 / (2 sx^2)) exp(-|y - cy_i|^2 / (2 sy^2))
//! and nonnegative coefficients. Immutable once fitted.
class LscdeModel
{
public:
  LscdeModel() = default;
  LscdeModel(KernelCenters centers, Vector alpha, std::size_t dim_x, std::size_t dim_y);

  std::size_t dim_x() const { return dim_x_; }
  std::size_t dim_y() const { return dim_y_; }
  std::size_t num_centers() const { return static_cast<std::size_t>(alpha_.size()); }
  const KernelCenters& centers() const { return centers_; }
  const Vector& alpha() const { return alpha_; }

  // Per-center kernel values of the conditioning / target blocks.
  Vector x_kernels(std::span<const double> x) const;
  Vector y_kernels(std::span<const double> y) const;

  double unnormalized(std::span<const double> x, std::span<const double> y) const;

  // Normalized conditional density from precomputed kernel vectors.
  double density_from_kernels(const Vector& kx, const Vector& ky) const;

  // Copy with every coefficient multiplied by c > 0.
  LscdeModel scaled(double c) const;

  static constexpr double kDenominatorFloor = 1e-300;

private:
  KernelCenters centers_;
  Vector alpha_;
  std::size_t dim_x_ = 0;
  std::size_t dim_y_ = 0;
  Matrix cx_;
  Matrix cy_;
  double y_mass_ = 1.0; // (2 pi sy^2)^(dim_y / 2)
};

double conditional_density(const LscdeModel& model, std::span<const double> x, std::span<const double> y);

//! Regularized least-squares system for fixed centers:
//!   H_ij = (1/n) sum_l phi^x_i(x_l) phi^x_j(x_l) (pi sy^2)^(dy/2) exp(-|cy_i - cy_j|^2 / (4 sy^2))
//!   h_i  = (1/n) sum_l phi_i(x_l, y_l)
struct LeastSquaresSystem
{
  Matrix H;
  Vector h;
};

LeastSquaresSystem build_system(const Matrix& X, const Matrix& Y, const KernelCenters& centers);

LscdeModel solve_system(const LeastSquaresSystem& system,
                        const KernelCenters& centers,
                        double lambda,
                        std::size_t dim_x,
                        std::size_t dim_y);

// Held-out least-squares score 1/2 a^T H a - h^T a of fitted coefficients.
double held_out_score(const LscdeModel& model, const Matrix& X, const Matrix& Y);

double median_pairwise_distance(const Matrix& points, std::size_t cap = 1000, std::uint64_t seed = 0);

LscdeModel fit_lscde(const Matrix& X, const Matrix& Y, const LscdeParams& params);

LscdeModel fit_lscde_with_centers(const Matrix& X, const Matrix& Y, const KernelCenters& centers, double lambda);

std::string serialize_model(const LscdeModel& model);
LscdeModel parse_model(const std::string& contents);
void save_model(const LscdeModel& model, const std::filesystem::path& path);
LscdeModel load_model(const std::filesystem::path& path);

struct CvGrid
{
  std::vector<std::size_t> k;
  std::vector<double> lambda;
  std::vector<double> sigma_x;
  std::vector<double> sigma_y;
};

struct CvChoice
{
  std::size_t k = 0;
  double lambda = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double score = 0.0;
};

//! Grid search over (k, lambda, sigma_x, sigma_y) minimizing the mean
//! held-out least-squares score across folds. Fold assignment and center
//! selection are deterministic in `seed`.
CvChoice cross_validate(const Matrix& X,
                        const Matrix& Y,
                        const CvGrid& grid,
                        std::size_t folds,
                        std::uint64_t seed,
                        CenterMethod method = CenterMethod::KMeans);

} // namespace deconf::density
