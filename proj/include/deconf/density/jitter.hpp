#pragma once

#include "deconf/core/random.hpp"

namespace deconf::density {

//! Continuous noise added to discrete codes so kernel estimators apply:
//! eps + theta * (B - 0.5), eps ~ U(-0.5, 0.5), B ~ Beta(v, v).
struct JitterConfig
{
  double theta = 0.5;
  double v_beta = 5.0;
};

// Noise with eps and the beta draw supplied by the caller.
double jitter_with(double value, double eps, double beta_draw, const JitterConfig& cfg);

double jitter(double value, const JitterConfig& cfg, Rng& rng);

} // namespace deconf::density
