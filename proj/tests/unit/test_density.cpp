#include "deconf/density/jitter.hpp"
#include "deconf/density/kmeans.hpp"
#include "deconf/density/lscde.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace deconf;
using namespace deconf::density;

namespace {

constexpr double kPi = 3.14159265358979323846;

// x ~ U(-1, 1), y ~ N(x, sd^2).
void
gaussian_data(std::size_t n, double sd, std::uint64_t seed, Matrix& X, Matrix& Y)
{
  Rng rng(seed);
  X.resize(static_cast<Eigen::Index>(n), 1);
  Y.resize(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    X(i, 0) = uniform(rng, -1, 1);
    Y(i, 0) = normal(rng, X(i, 0), sd);
  }
}

double
gaussian_pdf(double y, double mean, double sd)
{
  double z = (y - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * kPi));
}

double
density_at(const LscdeModel& m, double x, double y)
{
  return conditional_density(m, std::span<const double>(&x, 1), std::span<const double>(&y, 1));
}

double
grid_integral(const LscdeModel& m, double x, double lo, double hi, int steps)
{
  double h = (hi - lo) / steps, sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += w * density_at(m, x, lo + i * h);
  }
  return sum * h;
}

double
grid_error(const LscdeModel& m, double sd)
{
  double err = 0.0;
  int count = 0;
  for (double x = -0.8; x <= 0.8001; x += 0.2)
    for (double y = x - 3 * sd; y <= x + 3 * sd; y += sd / 4) {
      double d = density_at(m, x, y) - gaussian_pdf(y, x, sd);
      err += d * d;
      ++count;
    }
  return err / count;
}

} // namespace

TEST_CASE("jitter at the noise center returns the code")
{
  JitterConfig cfg;
  CHECK(jitter_with(3.0, 0.0, 0.5, cfg) == 3.0);
}

TEST_CASE("default jitter moments and support")
{
  Rng rng(1);
  JitterConfig cfg;
  const int n = 100000;
  double sum = 0.0;
  int recovered = 0;
  for (int i = 0; i < n; ++i) {
    double j = jitter(2.0, cfg, rng);
    CHECK(j > 1.25);
    CHECK(j < 2.75);
    sum += j;
    recovered += std::lround(j) == 2;
  }
  CHECK(std::abs(sum / n - 2.0) < 0.003);
  // Rounding fails exactly when |eps + eta| > 0.5, eta = theta (B - 0.5), so
  // the recovery rate is 1 - E|eta|. E|B - 0.5| for Beta(5, 5) by quadrature.
  double mean_abs = 0.0;
  const int steps = 20000;
  for (int i = 1; i < steps; ++i) {
    double b = i / double(steps);
    mean_abs += std::abs(b - 0.5) * 630.0 * std::pow(b * (1 - b), 4) / steps; // 1 / B(5,5) = 630
  }
  double expected = 1.0 - cfg.theta * mean_abs;
  double sd = std::sqrt(expected * (1 - expected) / n);
  CHECK(std::abs(recovered / double(n) - expected) < 3 * sd);
  CHECK(recovered / double(n) > 0.93);
}

TEST_CASE("theta zero leaves uniform noise")
{
  Rng rng(2);
  JitterConfig cfg;
  cfg.theta = 0.0;
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double e = jitter(0.0, cfg, rng);
    s1 += e;
    s2 += e * e;
  }
  double var = s2 / n - (s1 / n) * (s1 / n);
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("k equal to n returns the samples as centers")
{
  Rng rng(3);
  Matrix pts(30, 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    pts.row(i) << normal(rng, 0, 1), normal(rng, 0, 1);
  for (auto method : { CenterMethod::KMeans, CenterMethod::Random }) {
    Matrix c = select_centers(pts, 30, method, 4);
    REQUIRE(c.rows() == 30);
    std::set<std::pair<double, double>> a, b;
    for (Eigen::Index i = 0; i < 30; ++i) {
      a.insert({ pts(i, 0), pts(i, 1) });
      b.insert({ c(i, 0), c(i, 1) });
    }
    CHECK(a == b);
  }
}

TEST_CASE("k-means finds two separated blobs")
{
  Rng rng(5);
  Matrix pts(400, 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    double m = i < 200 ? -10.0 : 10.0;
    pts.row(i) << normal(rng, m, 1), normal(rng, m, 1);
  }
  Matrix c = select_centers(pts, 2, CenterMethod::KMeans, 6);
  REQUIRE(c.rows() == 2);
  int near_low = 0, near_high = 0;
  for (Eigen::Index i = 0; i < 2; ++i) {
    near_low += (c.row(i) - Eigen::RowVector2d(-10, -10)).norm() < 3.0;
    near_high += (c.row(i) - Eigen::RowVector2d(10, 10)).norm() < 3.0;
  }
  CHECK(near_low == 1);
  CHECK(near_high == 1);
}

TEST_CASE("center selection is deterministic")
{
  Rng rng(7);
  Matrix pts(500, 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      pts(i, j) = normal(rng, 0, 1);
  for (auto method : { CenterMethod::KMeans, CenterMethod::Random })
    CHECK(select_centers(pts, 20, method, 8) == select_centers(pts, 20, method, 8));
}

TEST_CASE("fitted density orders near and far targets")
{
  Matrix X, Y;
  gaussian_data(2000, 0.1, 9, X, Y);
  LscdeParams p;
  p.k = 100;
  auto m = fit_lscde(X, Y, p);
  CHECK(density_at(m, 0.0, 0.0) > density_at(m, 0.0, 0.5));
  for (Eigen::Index i = 0; i < m.alpha().size(); ++i)
    CHECK(m.alpha()(i) >= 0.0);
  CHECK(m.alpha().maxCoeff() > 0.0);
}

TEST_CASE("fitted density is nonnegative and normalized over the data range")
{
  Matrix X, Y;
  gaussian_data(3000, 0.2, 10, X, Y);
  LscdeParams p;
  p.k = 100;
  auto m = fit_lscde(X, Y, p);
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    double x = uniform(rng, -5, 5), y = uniform(rng, -5, 5);
    CHECK(m.unnormalized(std::span<const double>(&x, 1), std::span<const double>(&y, 1)) >= 0.0);
    CHECK(density_at(m, x, y) >= 0.0);
  }
  for (double x : { -0.9, -0.3, 0.0, 0.4, 0.9 })
    CHECK(std::abs(grid_integral(m, x, -8.0, 8.0, 4000) - 1.0) < 0.01);
}

TEST_CASE("larger samples fit the analytic conditional better")
{
  Matrix Xs, Ys, Xl, Yl;
  gaussian_data(500, 0.2, 12, Xs, Ys);
  gaussian_data(5000, 0.2, 13, Xl, Yl);
  LscdeParams p;
  p.k = 100;
  p.sigma_x = 0.2;
  p.sigma_y = 0.1;
  CHECK(grid_error(fit_lscde(Xl, Yl, p), 0.2) < grid_error(fit_lscde(Xs, Ys, p), 0.2));
}

TEST_CASE("single center gives a Gaussian in y whatever its coefficient")
{
  KernelCenters c;
  c.centers = Matrix::Zero(1, 2);
  c.sigma_x = 1.0;
  c.sigma_y = 0.5;
  for (double alpha : { 1.0, 1e-3, 42.0 }) {
    LscdeModel m(c, Vector::Constant(1, alpha), 1, 1);
    for (double y : { -1.0, 0.0, 0.3 })
      CHECK(density_at(m, 0.7, y) == doctest::Approx(gaussian_pdf(y, 0.0, 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("coefficient scale does not change the conditional density")
{
  Matrix X, Y;
  gaussian_data(1000, 0.3, 14, X, Y);
  LscdeParams p;
  p.k = 50;
  auto m = fit_lscde(X, Y, p);
  Rng rng(15);
  for (double c : { 1e-6, 0.5, 3.0, 1e6 }) {
    auto s = m.scaled(c);
    for (int i = 0; i < 50; ++i) {
      double x = uniform(rng, -1, 1), y = uniform(rng, -1.5, 1.5);
      CHECK(density_at(s, x, y) == doctest::Approx(density_at(m, x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("model file round-trips")
{
  Matrix X, Y;
  gaussian_data(500, 0.3, 16, X, Y);
  LscdeParams p;
  p.k = 20;
  auto m = fit_lscde(X, Y, p);
  auto back = parse_model(serialize_model(m));
  CHECK(back.alpha() == m.alpha());
  CHECK(back.centers().centers == m.centers().centers);
  CHECK(back.centers().sigma_x == m.centers().sigma_x);
  CHECK(density_at(back, 0.1, 0.2) == density_at(m, 0.1, 0.2));
}

TEST_CASE("dimension mismatches and bad parameters are rejected")
{
  Matrix X, Y;
  gaussian_data(200, 0.3, 17, X, Y);
  LscdeParams p;
  p.k = 10;
  auto m = fit_lscde(X, Y, p);
  std::vector<double> two{ 0.0, 0.0 };
  double one = 0.0;
  CHECK_THROWS_AS(conditional_density(m, two, std::span<const double>(&one, 1)), Error);
  p.lambda = -1.0;
  CHECK_THROWS_AS(fit_lscde(X, Y, p), Error);
}

TEST_CASE("cross-validation with single-point grids returns that point")
{
  Matrix X, Y;
  gaussian_data(600, 0.1, 18, X, Y);
  CvGrid grid{ { 40 }, { 0.05 }, { 0.3 }, { 0.2 } };
  auto c = cross_validate(X, Y, grid, 3, 19);
  CHECK(c.k == 40);
  CHECK(c.lambda == 0.05);
  CHECK(c.sigma_x == 0.3);
  CHECK(c.sigma_y == 0.2);
}

TEST_CASE("cross-validation rejects gross over- and under-smoothing")
{
  Matrix X, Y;
  gaussian_data(1500, 0.1, 20, X, Y);
  CvGrid grid{ { 100 }, { 0.01 }, { 0.2 }, { 0.01, 0.1, 10.0 } };
  auto c = cross_validate(X, Y, grid, 3, 21);
  CHECK(std::abs(c.sigma_y - 0.1) < std::abs(c.sigma_y - 10.0));
  auto again = cross_validate(X, Y, grid, 3, 21);
  CHECK(again.sigma_y == c.sigma_y);
  CHECK(again.score == c.score);
}

TEST_CASE("cross-validation input errors")
{
  Matrix X, Y;
  gaussian_data(10, 0.1, 22, X, Y);
  CHECK_THROWS_AS(cross_validate(X, Y, { {}, { 0.1 }, { 1 }, { 1 } }, 2, 0), Error);
  CHECK_THROWS_AS(cross_validate(X, Y, { { 5 }, { 0.1 }, { 1 }, { 1 } }, 1, 0), Error);
  CHECK_THROWS_AS(cross_validate(X, Y, { { 5 }, { 0.1 }, { 1 }, { 1 } }, 20, 0), Error);
}
