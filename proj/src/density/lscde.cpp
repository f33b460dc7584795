#include "deconf/density/lscde.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/text_io.hpp"
#include "deconf/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace deconf::density {

namespace {

constexpr Eigen::Index kChunk = 2048;

Matrix
gaussian_kernels(const Matrix& points, const Matrix& centers, double sigma)
{
  return (squared_distances(points, centers) * (-0.5 / (sigma * sigma))).array().exp().matrix();
}

void
check_bandwidths(const KernelCenters& c)
{
  if (!(c.sigma_x > 0.0) || !(c.sigma_y > 0.0) || !std::isfinite(c.sigma_x) || !std::isfinite(c.sigma_y))
    throw Error("kernel bandwidths must be positive and finite");
  if (c.centers.rows() < 1)
    throw Error("at least one kernel center is required");
}

} // namespace

LscdeModel::LscdeModel(KernelCenters centers, Vector alpha, std::size_t dim_x, std::size_t dim_y)
  : centers_(std::move(centers))
  , alpha_(std::move(alpha))
  , dim_x_(dim_x)
  , dim_y_(dim_y)
{
  check_bandwidths(centers_);
  if (static_cast<std::size_t>(centers_.centers.cols()) != dim_x + dim_y)
    throw Error("center dimension does not match dim_x + dim_y");
  if (alpha_.size() != centers_.centers.rows())
    throw Error("one coefficient per center is required");
  if ((alpha_.array() < 0.0).any())
    throw Error("LSCDE coefficients must be nonnegative");
  if (!(alpha_.array() > 0.0).any())
    throw Error("degenerate fit: all coefficients are zero");
  cx_ = centers_.centers.leftCols(static_cast<Eigen::Index>(dim_x));
  cy_ = centers_.centers.rightCols(static_cast<Eigen::Index>(dim_y));
  y_mass_ = std::pow(2.0 * std::numbers::pi * centers_.sigma_y * centers_.sigma_y, 0.5 * static_cast<double>(dim_y));
}

Vector
LscdeModel::x_kernels(std::span<const double> x) const
{
  if (x.size() != dim_x_)
    throw Error("conditioning point has dimension " + std::to_string(x.size()) + ", model expects " +
                std::to_string(dim_x_));
  Eigen::Map<const Eigen::RowVectorXd> p(x.data(), static_cast<Eigen::Index>(x.size()));
  Vector d2 = (cx_.rowwise() - p).rowwise().squaredNorm();
  return (d2 * (-0.5 / (centers_.sigma_x * centers_.sigma_x))).array().exp().matrix();
}

Vector
LscdeModel::y_kernels(std::span<const double> y) const
{
  if (y.size() != dim_y_)
    throw Error("target point has dimension " + std::to_string(y.size()) + ", model expects " +
                std::to_string(dim_y_));
  Eigen::Map<const Eigen::RowVectorXd> p(y.data(), static_cast<Eigen::Index>(y.size()));
  Vector d2 = (cy_.rowwise() - p).rowwise().squaredNorm();
  return (d2 * (-0.5 / (centers_.sigma_y * centers_.sigma_y))).array().exp().matrix();
}

double
LscdeModel::unnormalized(std::span<const double> x, std::span<const double> y) const
{
  return alpha_.dot(x_kernels(x).cwiseProduct(y_kernels(y)));
}

double
LscdeModel::density_from_kernels(const Vector& kx, const Vector& ky) const
{
  Vector ax = alpha_.cwiseProduct(kx);
  double numerator = ax.dot(ky);
  double denominator = y_mass_ * ax.sum();
  if (denominator < kDenominatorFloor) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "warning: LSCDE normalizer underflow; query lies far outside the training data\n";
      warned = true;
    }
    denominator = kDenominatorFloor;
  }
  return numerator / denominator;
}

LscdeModel
LscdeModel::scaled(double c) const
{
  return LscdeModel(centers_, alpha_ * c, dim_x_, dim_y_);
}

double
conditional_density(const LscdeModel& model, std::span<const double> x, std::span<const double> y)
{
  return model.density_from_kernels(model.x_kernels(x), model.y_kernels(y));
}

LeastSquaresSystem
build_system(const Matrix& X, const Matrix& Y, const KernelCenters& centers)
{
  check_bandwidths(centers);
  if (X.rows() != Y.rows() || X.rows() == 0)
    throw Error("LSCDE needs matching, nonempty conditioning and target samples");
  const Eigen::Index dx = X.cols();
  const Eigen::Index dy = Y.cols();
  if (centers.centers.cols() != dx + dy)
    throw Error("center dimension does not match the samples");
  const Eigen::Index k = centers.centers.rows();
  Matrix cx = centers.centers.leftCols(dx);
  Matrix cy = centers.centers.rightCols(dy);

  Matrix gram = Matrix::Zero(k, k);
  Vector h = Vector::Zero(k);
  // Fixed chunk order keeps the accumulation bitwise reproducible.
  for (Eigen::Index start = 0; start < X.rows(); start += kChunk) {
    Eigen::Index len = std::min(kChunk, X.rows() - start);
    Matrix kx = gaussian_kernels(X.middleRows(start, len), cx, centers.sigma_x);
    Matrix ky = gaussian_kernels(Y.middleRows(start, len), cy, centers.sigma_y);
    gram.noalias() += kx.transpose() * kx;
    h.noalias() += kx.cwiseProduct(ky).colwise().sum().transpose();
  }
  const double n = static_cast<double>(X.rows());
  const double s2 = centers.sigma_y * centers.sigma_y;
  Matrix overlap = (squared_distances(cy, cy) * (-0.25 / s2)).array().exp().matrix() *
                   std::pow(std::numbers::pi * s2, 0.5 * static_cast<double>(dy));
  LeastSquaresSystem sys;
  sys.H = (gram / n).cwiseProduct(overlap);
  sys.h = h / n;
  return sys;
}

LscdeModel
solve_system(const LeastSquaresSystem& system,
             const KernelCenters& centers,
             double lambda,
             std::size_t dim_x,
             std::size_t dim_y)
{
  if (!(lambda > 0.0))
    throw Error("lambda must be positive");
  const Eigen::Index k = system.H.rows();
  Matrix A = system.H + lambda * Matrix::Identity(k, k);
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error("singular LSCDE system; increase lambda or remove duplicate centers");
  Vector alpha = llt.solve(system.h);
  if (!alpha.allFinite())
    throw Error("singular LSCDE system; increase lambda or remove duplicate centers");
  alpha = alpha.cwiseMax(0.0);
  if (!(alpha.array() > 0.0).any())
    throw Error("degenerate fit: all coefficients clipped to zero");
  return LscdeModel(centers, std::move(alpha), dim_x, dim_y);
}

double
held_out_score(const LscdeModel& model, const Matrix& X, const Matrix& Y)
{
  auto sys = build_system(X, Y, model.centers());
  const Vector& a = model.alpha();
  return 0.5 * a.dot(sys.H * a) - sys.h.dot(a);
}

double
median_pairwise_distance(const Matrix& points, std::size_t cap, std::uint64_t seed)
{
  Matrix sub = subsample_rows(points, cap, seed);
  const Eigen::Index n = sub.rows();
  if (n < 2)
    return 1.0;
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  Matrix d2 = squared_distances(sub, sub);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back(std::sqrt(d2(i, j)));
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  double med = *mid;
  return med > 0.0 ? med : 1.0;
}

LscdeModel
fit_lscde_with_centers(const Matrix& X, const Matrix& Y, const KernelCenters& centers, double lambda)
{
  auto sys = build_system(X, Y, centers);
  return solve_system(sys, centers, lambda, static_cast<std::size_t>(X.cols()), static_cast<std::size_t>(Y.cols()));
}

LscdeModel
fit_lscde(const Matrix& X, const Matrix& Y, const LscdeParams& params)
{
  if (X.rows() != Y.rows())
    throw Error("conditioning and target samples differ in length");
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0)
    throw Error("LSCDE needs at least one sample");
  if (params.k == 0)
    throw Error("LSCDE needs at least one center");
  const std::size_t k = std::min(params.k, n);

  Matrix joint(X.rows(), X.cols() + Y.cols());
  joint << X, Y;

  KernelCenters centers;
  Matrix pool = subsample_rows(joint, std::max(params.center_sample_cap, k), derive_seed(params.seed, 1));
  centers.centers = select_centers(pool, k, params.centers, derive_seed(params.seed, 2));
  centers.sigma_x = params.sigma_x ? *params.sigma_x : median_pairwise_distance(X, 1000, derive_seed(params.seed, 3));
  centers.sigma_y = params.sigma_y ? *params.sigma_y : median_pairwise_distance(Y, 1000, derive_seed(params.seed, 4));
  return fit_lscde_with_centers(X, Y, centers, params.lambda);
}

std::string
serialize_model(const LscdeModel& model)
{
  std::string out;
  out += "# model=lscde\n";
  out += "# dim_x=" + std::to_string(model.dim_x()) + "\n";
  out += "# dim_y=" + std::to_string(model.dim_y()) + "\n";
  out += "# k=" + std::to_string(model.num_centers()) + "\n";
  out += "# sigma_x=" + text::format_real(model.centers().sigma_x) + "\n";
  out += "# sigma_y=" + text::format_real(model.centers().sigma_y) + "\n";
  out += "# columns=alpha,center...\n";
  const auto& c = model.centers().centers;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    out += text::format_real(model.alpha()(i));
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      out += ',' + text::format_real(c(i, j));
    out += '\n';
  }
  return out;
}

LscdeModel
parse_model(const std::string& contents)
{
  text::Header header;
  std::istringstream in(contents);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '#') {
      text::parse_header_line(line, header);
      continue;
    }
    if (line.empty())
      continue;
    std::vector<double> row;
    try {
      for (auto cell : text::split(line, ','))
        row.push_back(text::parse_real(cell));
    } catch (const Error& e) {
      throw Error("model line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  if (!header.contains("model") || header.at("model") != "lscde")
    throw Error("not an LSCDE model file");
  auto dx = static_cast<std::size_t>(text::parse_int(header.at("dim_x")));
  auto dy = static_cast<std::size_t>(text::parse_int(header.at("dim_y")));
  auto k = static_cast<std::size_t>(text::parse_int(header.at("k")));
  if (rows.size() != k)
    throw Error("model declares " + std::to_string(k) + " centers, found " + std::to_string(rows.size()));
  KernelCenters centers;
  centers.sigma_x = text::parse_real(header.at("sigma_x"));
  centers.sigma_y = text::parse_real(header.at("sigma_y"));
  centers.centers.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dx + dy));
  Vector alpha(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (rows[i].size() != dx + dy + 1)
      throw Error("model row " + std::to_string(i) + " has the wrong number of cells");
    alpha(static_cast<Eigen::Index>(i)) = rows[i][0];
    for (std::size_t j = 0; j < dx + dy; ++j)
      centers.centers(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j + 1];
  }
  return LscdeModel(std::move(centers), std::move(alpha), dx, dy);
}

void
save_model(const LscdeModel& model, const std::filesystem::path& path)
{
  text::write_atomic(path, serialize_model(model));
}

LscdeModel
load_model(const std::filesystem::path& path)
{
  return parse_model(text::read_file(path));
}

} // namespace deconf::density
