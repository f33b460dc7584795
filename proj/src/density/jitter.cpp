#include "deconf/density/jitter.hpp"

namespace deconf::density {

double
jitter_with(double value, double eps, double beta_draw, const JitterConfig& cfg)
{
  return value + eps + cfg.theta * (beta_draw - 0.5);
}

double
jitter(double value, const JitterConfig& cfg, Rng& rng)
{
  double eps = uniform(rng, -0.5, 0.5);
  double b = beta(rng, cfg.v_beta, cfg.v_beta);
  return jitter_with(value, eps, b, cfg);
}

} // namespace deconf::density
