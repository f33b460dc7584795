#include "deconf/weights/ratios.hpp"
#include "deconf/weights/tabular.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

using namespace deconf;
using namespace deconf::weights;

namespace {

Transition
frontdoor_row(int s, int a, int m, int s2, int r)
{
  Transition t;
  t.s = { double(s), 0.0, 0.0 };
  t.a = a;
  t.m = m;
  t.s_next = { double(s2), 0.0, 0.0 };
  t.r = r;
  return t;
}

Transition
backdoor_row(int s, int a, int u)
{
  Transition t;
  t.s = { double(s), 0.0, 0.0 };
  t.a = a;
  t.u = u;
  t.s_next = { 0.0, 0.0, 0.0 };
  return t;
}

// Brute-force ratio from the instance tables, written independently of the
// library oracle.
double
enumerate_ratio(const TabularCmdp& c, RatioKind kind, const Transition& t)
{
  auto s = static_cast<std::size_t>(t.s.x);
  auto p_a = [&](std::size_t a) {
    double p = 0.0;
    for (std::size_t w = 0; w < c.num_w; ++w)
      p += c.w_prob(s, w) * c.pi(s, w, a);
    return p;
  };
  if (kind == RatioKind::Backdoor) {
    double pu = 0.0, pua = 0.0;
    for (std::size_t w = 0; w < c.num_w; ++w)
      if (c.u_of_w[w] == *t.u) {
        pu += c.w_prob(s, w);
        pua += c.w_prob(s, w) * c.pi(s, w, std::size_t(t.a));
      }
    return pu / (pua / p_a(std::size_t(t.a)));
  }
  auto m = std::size_t(*t.m), s2 = std::size_t(t.s_next.x), r = std::size_t(t.r);
  auto outcome = [&](std::size_t a) {
    double p = 0.0;
    for (std::size_t w = 0; w < c.num_w; ++w) {
      double o = 0.0;
      for (std::size_t x2 = 0; x2 < c.num_states; ++x2)
        for (std::size_t xr = 0; xr < c.num_rewards; ++xr) {
          bool keep = (kind == RatioKind::Full && x2 == s2 && xr == r) || (kind == RatioKind::RewardOnly && xr == r) ||
                      (kind == RatioKind::NextStateOnly && x2 == s2);
          if (keep)
            o += c.outcome_prob(s, w, m, x2, xr);
        }
      p += c.w_prob(s, w) * c.pi(s, w, a) * o;
    }
    return p / p_a(a);
  };
  double num = 0.0;
  for (std::size_t b = 0; b < c.num_actions; ++b)
    num += outcome(b) * p_a(b);
  return num / outcome(std::size_t(t.a));
}

DensitySettings
tabular_settings()
{
  DensitySettings ds;
  ds.k = 200;
  ds.lambda = 0.01;
  ds.sigma_x = 0.4;
  ds.sigma_y = 0.45;
  ds.discrete_scale = 3.0;
  return ds;
}

} // namespace

TEST_CASE("postprocess with unbounded clip is the identity")
{
  auto w = postprocess_weights({ 0.0, 0.3, 7.0, 1e6 }, kNoClip);
  CHECK(w.clipped == w.raw);
  CHECK(w.fraction_clipped == 0.0);
}

TEST_CASE("postprocess clamps to the bounds and records metadata")
{
  auto w = postprocess_weights({ 0.1, 5.0, 1.0 }, { 0.2, 4.0 });
  CHECK(w.clipped == std::vector<double>{ 0.2, 4.0, 1.0 });
  CHECK(w.fraction_clipped == doctest::Approx(2.0 / 3.0));
  CHECK(w.mean_raw == doctest::Approx(6.1 / 3.0));
  CHECK(w.size() == 3);
}

TEST_CASE("clipped weights always lie within the bounds")
{
  Rng rng(11);
  std::vector<double> raw(1000);
  for (auto& x : raw)
    x = std::exp(normal(rng, 0.0, 3.0));
  auto w = postprocess_weights(raw, { 0.1, 10.0 });
  std::size_t outside = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(w.clipped[i] >= 0.1);
    CHECK(w.clipped[i] <= 10.0);
    outside += (raw[i] < 0.1 || raw[i] > 10.0);
  }
  CHECK(w.fraction_clipped == doctest::Approx(double(outside) / 1000.0));
}

TEST_CASE("resample distribution")
{
  SUBCASE("equal weights give uniform sampling")
  {
    auto dist = resample_distribution(postprocess_weights(std::vector<double>(7, 2.5), kNoClip));
    REQUIRE(std::holds_alternative<UniformSampling>(dist));
    CHECK(std::get<UniformSampling>(dist).n == 7);
  }
  SUBCASE("weights (1, 3)")
  {
    auto dist = resample_distribution(postprocess_weights({ 1.0, 3.0 }, kNoClip));
    auto& p = std::get<CategoricalSampling>(dist).probabilities;
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));
  }
  SUBCASE("scale invariance")
  {
    std::vector<double> raw{ 0.4, 1.7, 2.2, 0.9 }, scaled;
    for (double x : raw)
      scaled.push_back(x * 13.0);
    auto a = std::get<CategoricalSampling>(resample_distribution(postprocess_weights(raw, kNoClip))).probabilities;
    auto b = std::get<CategoricalSampling>(resample_distribution(postprocess_weights(scaled, kNoClip))).probabilities;
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  }
  SUBCASE("all-zero weights are rejected")
  {
    CHECK_THROWS_AS(resample_distribution(postprocess_weights({ 0.0, 0.0 }, kNoClip)), Error);
  }
}

TEST_CASE("weight file round-trip")
{
  auto w = postprocess_weights({ 0.05, 1.0 / 3.0, 12.5, 1.0 }, { 0.1, 10.0 }, RatioKind::NextStateOnly);
  w.flagged = 2;
  auto back = parse_weights(serialize_weights(w));
  CHECK(back.kind == w.kind);
  CHECK(back.raw == w.raw);
  CHECK(back.clipped == w.clipped);
  CHECK(back.bounds.low == w.bounds.low);
  CHECK(back.bounds.high == w.bounds.high);
  CHECK(back.mean_raw == w.mean_raw);
  CHECK(back.flagged == 2);
}

TEST_CASE("oracle matches independent enumeration and frozen fixtures")
{
  auto fd = frontdoor_instance();
  struct Fixture
  {
    RatioKind kind;
    Transition t;
    double value;
  };
  const Fixture fixtures[] = {
    { RatioKind::Full, frontdoor_row(0, 0, 0, 0, 0), 0.6284153005464481 },
    { RatioKind::Full, frontdoor_row(0, 1, 0, 1, 1), 0.6053811659192825 },
    { RatioKind::Full, frontdoor_row(1, 0, 1, 1, 0), 0.8811671087533158 },
    { RatioKind::Full, frontdoor_row(1, 1, 1, 0, 1), 1.8676056338028166 },
    { RatioKind::RewardOnly, frontdoor_row(0, 0, 0, 0, 0), 0.7333333333333333 },
    { RatioKind::RewardOnly, frontdoor_row(0, 1, 0, 1, 1), 0.6923076923076923 },
    { RatioKind::RewardOnly, frontdoor_row(1, 0, 1, 1, 0), 0.8120805369127517 },
    { RatioKind::RewardOnly, frontdoor_row(1, 1, 1, 0, 1), 0.6455696202531647 },
    { RatioKind::NextStateOnly, frontdoor_row(0, 0, 0, 0, 0), 0.7446808510638298 },
    { RatioKind::NextStateOnly, frontdoor_row(0, 1, 0, 1, 1), 0.7251908396946565 },
    { RatioKind::NextStateOnly, frontdoor_row(1, 0, 1, 1, 0), 1.2200873362445417 },
    { RatioKind::NextStateOnly, frontdoor_row(1, 1, 1, 0, 1), 2.5587628865979375 },
    { RatioKind::Backdoor, backdoor_row(0, 0, 0), 0.6707317073170731 },
    { RatioKind::Backdoor, backdoor_row(0, 1, 1), 0.625 },
    { RatioKind::Backdoor, backdoor_row(1, 0, 1), 2.1 },
    { RatioKind::Backdoor, backdoor_row(1, 1, 0), 2.32 },
  };
  auto bd = backdoor_instance();
  for (const auto& f : fixtures) {
    const auto& c = f.kind == RatioKind::Backdoor ? bd : fd;
    double got = exact_ratio_oracle(c, f.kind)(f.t);
    CHECK(got == doctest::Approx(f.value).epsilon(1e-12));
    CHECK(got == doctest::Approx(enumerate_ratio(c, f.kind, f.t)).epsilon(1e-12));
  }
  // Every frontdoor cell agrees with the enumeration.
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly }) {
    auto oracle = exact_ratio_oracle(fd, kind);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        for (int m = 0; m < 2; ++m)
          for (int s2 = 0; s2 < 2; ++s2)
            for (int r = 0; r < 2; ++r) {
              auto t = frontdoor_row(s, a, m, s2, r);
              CHECK(oracle(t) == doctest::Approx(enumerate_ratio(fd, kind, t)).epsilon(1e-12));
            }
  }
}

TEST_CASE("oracle is one without confounding")
{
  auto c = unconfounded_instance();
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly }) {
    auto oracle = exact_ratio_oracle(c, kind);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        for (int m = 0; m < 2; ++m)
          for (int s2 = 0; s2 < 2; ++s2)
            for (int r = 0; r < 2; ++r)
              CHECK(oracle(frontdoor_row(s, a, m, s2, r)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("oracle conditional mean is exactly one")
{
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly, RatioKind::Backdoor }) {
    auto c = kind == RatioKind::Backdoor ? backdoor_instance() : frontdoor_instance();
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t a = 0; a < 2; ++a)
        CHECK(std::abs(oracle_conditional_mean(c, kind, s, a) - 1.0) <= 1e-12);
  }
}

TEST_CASE("oracle rejects mismatched or unnormalized instances")
{
  CHECK_THROWS_AS(exact_ratio_oracle(frontdoor_instance(), RatioKind::Backdoor), Error);
  CHECK_THROWS_AS(exact_ratio_oracle(backdoor_instance(), RatioKind::Full), Error);
  auto c = frontdoor_instance();
  c.policy[0] = 0.95;
  CHECK_THROWS_AS(exact_ratio_oracle(c, RatioKind::Full), Error);
}

TEST_CASE("d2 arithmetic from fitted tables")
{
  // Laplace-smoothed counts giving P(u=1|s) = 2/4 and P(u=1|s,a=0) = 8/10.
  DensityBundle b;
  b.kind = RatioKind::Backdoor;
  b.num_actions = 2;
  b.u_partition = StatePartition::codes(1);
  b.u_given_s = DiscreteConditional(1, 1, 2);
  b.u_given_sa = DiscreteConditional(1, 2, 2);
  b.u_given_s->add(0, 0, 1);
  b.u_given_s->add(0, 0, 0);
  for (int i = 0; i < 7; ++i)
    b.u_given_sa->add(0, 0, 1);
  b.u_given_sa->add(0, 0, 0);

  OfflineDataset d;
  d.scenario = Scenario::Tabular;
  d.shape = { false, true };
  d.num_actions = 2;
  d.transitions = { backdoor_row(0, 0, 1) };
  auto w = estimate_d2(d, b, kNoClip);
  CHECK(w.raw[0] == doctest::Approx(0.625));
  CHECK(w.flagged == 0);

  d.transitions[0].u.reset();
  CHECK_THROWS_AS(estimate_d2(d, b, kNoClip), Error);
}

TEST_CASE("smoothed discrete conditional")
{
  DiscreteConditional t(2, 1, 3);
  t.add(0, 0, 2);
  t.add(0, 0, 2);
  CHECK(t.probability(0, 0, 2) == doctest::Approx(3.0 / 5.0));
  CHECK(t.probability(0, 0, 0) == doctest::Approx(1.0 / 5.0));
  CHECK(t.probability(1, 0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(t.add(0, 0, 3), Error);
}

TEST_CASE("single-action data gives unit ratios")
{
  OfflineDataset d;
  d.scenario = Scenario::Tabular;
  d.shape = { true, false };
  d.num_actions = 1;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i)
    d.transitions.push_back(
      frontdoor_row(int(uniform(rng, 0, 1) < 0.5), 0, 0, int(uniform(rng, 0, 1) < 0.3), int(uniform(rng, 0, 1) < 0.6)));
  DensitySettings ds = tabular_settings();
  ds.k = 16;
  for (auto kind : { RatioKind::Full, RatioKind::RewardOnly, RatioKind::NextStateOnly }) {
    auto w = estimate_weights(d, fit_density_bundle(d, kind, ds, 1), kNoClip);
    for (double x : w.raw)
      CHECK(x == 1.0);
  }
}

TEST_CASE("estimated d2 agrees with the oracle on the backdoor instance")
{
  auto c = backdoor_instance();
  auto d = generate_tabular_dataset(c, 50000, 0);
  auto w = estimate_weights(d, fit_density_bundle(d, RatioKind::Backdoor, tabular_settings(), 1), kNoClip);
  auto oracle = exact_ratio_oracle(c, RatioKind::Backdoor);
  std::size_t close = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double o = oracle(d.transitions[i]);
    close += std::abs(w.raw[i] - o) <= 0.1 * o;
  }
  CHECK(double(close) / double(d.size()) >= 0.9);
  CHECK(w.mean_raw == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("estimated reward-only ratios near one without confounding")
{
  auto d = generate_tabular_dataset(unconfounded_instance(), 20000, 2);
  auto w = estimate_weights(d, fit_density_bundle(d, RatioKind::RewardOnly, tabular_settings(), 1), kNoClip);
  auto raw = w.raw;
  std::nth_element(raw.begin(), raw.begin() + raw.size() / 2, raw.end());
  double median = raw[raw.size() / 2];
  CHECK(median >= 0.8);
  CHECK(median <= 1.25);
}

TEST_CASE("density bundle round-trip reproduces the weights")
{
  auto dir = std::filesystem::temp_directory_path() / "deconf_test_bundle";
  std::filesystem::remove_all(dir);
  SUBCASE("reward-only")
  {
    auto d = generate_tabular_dataset(frontdoor_instance(), 3000, 5);
    DensitySettings ds = tabular_settings();
    ds.k = 24;
    auto b = fit_density_bundle(d, RatioKind::RewardOnly, ds, 3);
    save_bundle(b, dir);
    auto loaded = load_bundle(dir);
    CHECK(estimate_weights(d, loaded).raw == estimate_weights(d, b).raw);
  }
  SUBCASE("backdoor")
  {
    auto d = generate_tabular_dataset(backdoor_instance(), 3000, 5);
    auto b = fit_density_bundle(d, RatioKind::Backdoor, tabular_settings(), 3);
    save_bundle(b, dir);
    CHECK(estimate_weights(d, load_bundle(dir)).raw == estimate_weights(d, b).raw);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("bundle kind must match the estimator")
{
  auto d = generate_tabular_dataset(backdoor_instance(), 500, 5);
  auto b = fit_density_bundle(d, RatioKind::Backdoor, tabular_settings(), 3);
  CHECK_THROWS_AS(estimate_d1(d, b), Error);
  auto fd = generate_tabular_dataset(frontdoor_instance(), 500, 5);
  DensitySettings ds = tabular_settings();
  ds.k = 8;
  auto fb = fit_density_bundle(fd, RatioKind::Full, ds, 3);
  CHECK_THROWS_AS(estimate_d2(fd, fb), Error);
  CHECK_THROWS_AS(fit_density_bundle(fd, RatioKind::Backdoor, ds, 3), Error);
}
