#include "deconf/density/lscde.hpp"

#include "deconf/core/random.hpp"
#include "deconf/core/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace deconf::density {

namespace {

Matrix
take_rows(const Matrix& m, const std::vector<Eigen::Index>& rows)
{
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

} // namespace

CvChoice
cross_validate(const Matrix& X,
               const Matrix& Y,
               const CvGrid& grid,
               std::size_t folds,
               std::uint64_t seed,
               CenterMethod method)
{
  if (grid.k.empty() || grid.lambda.empty() || grid.sigma_x.empty() || grid.sigma_y.empty())
    throw Error("cross-validation grid has an empty axis");
  if (folds < 2)
    throw Error("cross-validation needs at least 2 folds");
  if (X.rows() != Y.rows())
    throw Error("conditioning and target samples differ in length");
  const auto n = static_cast<std::size_t>(X.rows());
  if (n < folds)
    throw Error("fewer samples than folds");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t nk = grid.k.size();
  const std::size_t nl = grid.lambda.size();
  const std::size_t nsx = grid.sigma_x.size();
  const std::size_t nsy = grid.sigma_y.size();
  std::vector<double> totals(nk * nl * nsx * nsy, 0.0);
  std::vector<bool> failed(totals.size(), false);
  auto slot = [&](std::size_t ik, std::size_t il, std::size_t ix, std::size_t iy) {
    return ((ik * nsx + ix) * nsy + iy) * nl + il;
  };

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < n; ++i)
      (i % folds == f ? test : train).push_back(order[i]);
    Matrix xtr = take_rows(X, train), ytr = take_rows(Y, train);
    Matrix xte = take_rows(X, test), yte = take_rows(Y, test);
    Matrix joint(xtr.rows(), xtr.cols() + ytr.cols());
    joint << xtr, ytr;

    for (std::size_t ik = 0; ik < nk; ++ik) {
      std::size_t k = std::min(grid.k[ik], train.size());
      Matrix centers = select_centers(joint, k, method, derive_seed(seed, 100 + f * nk + ik));
      for (std::size_t ix = 0; ix < nsx; ++ix) {
        for (std::size_t iy = 0; iy < nsy; ++iy) {
          KernelCenters kc{ centers, grid.sigma_x[ix], grid.sigma_y[iy] };
          auto sys_tr = build_system(xtr, ytr, kc);
          auto sys_te = build_system(xte, yte, kc);
          for (std::size_t il = 0; il < nl; ++il) {
            auto s = slot(ik, il, ix, iy);
            try {
              auto model = solve_system(sys_tr, kc, grid.lambda[il], xtr.cols(), ytr.cols());
              const Vector& a = model.alpha();
              totals[s] += 0.5 * a.dot(sys_te.H * a) - sys_te.h.dot(a);
            } catch (const Error&) {
              failed[s] = true;
            }
          }
        }
      }
    }
  }

  CvChoice best;
  best.score = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t ik = 0; ik < nk; ++ik)
    for (std::size_t ix = 0; ix < nsx; ++ix)
      for (std::size_t iy = 0; iy < nsy; ++iy)
        for (std::size_t il = 0; il < nl; ++il) {
          auto s = slot(ik, il, ix, iy);
          if (failed[s])
            continue;
          double score = totals[s] / static_cast<double>(folds);
          if (!found || score < best.score) {
            best = { grid.k[ik], grid.lambda[il], grid.sigma_x[ix], grid.sigma_y[iy], score };
            found = true;
          }
        }
  if (!found)
    throw Error("every cross-validation candidate failed to fit");
  return best;
}

} // namespace deconf::density
