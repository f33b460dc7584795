#include "deconf/weights/tabular.hpp"

#include "deconf/core/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deconf::weights {

namespace {

void
check_distribution(const std::vector<double>& table, std::size_t block, const char* name)
{
  if (block == 0 || table.size() % block != 0)
    throw Error(std::string("tabular CMDP: ") + name + " has the wrong size");
  for (std::size_t start = 0; start < table.size(); start += block) {
    double total = 0.0;
    for (std::size_t i = start; i < start + block; ++i) {
      if (!std::isfinite(table[i]) || table[i] < 0.0)
        throw Error(std::string("tabular CMDP: ") + name + " has a negative or non-finite entry");
      total += table[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw Error(std::string("tabular CMDP: ") + name + " is not normalized");
  }
}

std::size_t
draw(const double* probs, std::size_t n, Rng& rng)
{
  double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += probs[i];
    if (u < acc)
      return i;
  }
  return n - 1;
}

// Product table P(s', r | s, w, m) from the two Bernoulli parameters.
void
fill_outcome(TabularCmdp& c, std::size_t s, std::size_t w, std::size_t m, double p_next, double p_reward)
{
  for (std::size_t s2 = 0; s2 < 2; ++s2)
    for (std::size_t r = 0; r < 2; ++r) {
      double ps = s2 == 1 ? p_next : 1.0 - p_next;
      double pr = r == 1 ? p_reward : 1.0 - p_reward;
      c.outcome[((((s * c.num_w + w) * c.num_actions + m) * c.num_states + s2) * c.num_rewards) + r] = ps * pr;
    }
}

TabularCmdp
binary_frame(std::size_t num_w)
{
  TabularCmdp c;
  c.num_w = num_w;
  c.mu0 = { 0.5, 0.5 };
  c.p_w.assign(c.num_states * num_w, 0.0);
  c.policy.assign(c.num_states * num_w * c.num_actions, 0.0);
  c.p_m.assign(c.num_actions * c.num_actions, 0.0);
  c.outcome.assign(c.num_states * num_w * c.num_actions * c.num_states * c.num_rewards, 0.0);
  c.u_of_w.assign(num_w, 0);
  return c;
}

// Observational P(w | s, a).
std::vector<double>
w_posterior(const TabularCmdp& c, std::size_t s, std::size_t a)
{
  std::vector<double> post(c.num_w);
  double total = 0.0;
  for (std::size_t w = 0; w < c.num_w; ++w) {
    post[w] = c.w_prob(s, w) * c.pi(s, w, a);
    total += post[w];
  }
  if (!(total > 0.0))
    throw Error("tabular CMDP: action has zero behavior probability in this state");
  for (auto& p : post)
    p /= total;
  return post;
}

double
action_prob(const TabularCmdp& c, std::size_t s, std::size_t a)
{
  double p = 0.0;
  for (std::size_t w = 0; w < c.num_w; ++w)
    p += c.w_prob(s, w) * c.pi(s, w, a);
  return p;
}

// Observational P(o | m, a, s) where o is (s', r), r or s' depending on kind.
double
outcome_given(const TabularCmdp& c, RatioKind kind, std::size_t s, std::size_t a, std::size_t m, std::size_t s2, std::size_t r)
{
  auto post = w_posterior(c, s, a);
  double p = 0.0;
  for (std::size_t w = 0; w < c.num_w; ++w) {
    double q = 0.0;
    switch (kind) {
      case RatioKind::Full:
        q = c.outcome_prob(s, w, m, s2, r);
        break;
      case RatioKind::RewardOnly:
        for (std::size_t x = 0; x < c.num_states; ++x)
          q += c.outcome_prob(s, w, m, x, r);
        break;
      case RatioKind::NextStateOnly:
        for (std::size_t x = 0; x < c.num_rewards; ++x)
          q += c.outcome_prob(s, w, m, s2, x);
        break;
      case RatioKind::Backdoor:
        throw Error("backdoor ratio has no outcome term");
    }
    p += post[w] * q;
  }
  return p;
}

double
frontdoor_ratio(const TabularCmdp& c, RatioKind kind, std::size_t s, std::size_t a, std::size_t m, std::size_t s2, std::size_t r)
{
  double numerator = 0.0;
  for (std::size_t b = 0; b < c.num_actions; ++b) {
    double pb = action_prob(c, s, b);
    if (pb > 0.0)
      numerator += outcome_given(c, kind, s, b, m, s2, r) * pb;
  }
  return numerator / outcome_given(c, kind, s, a, m, s2, r);
}

double
u_prob(const TabularCmdp& c, std::size_t s, std::optional<std::size_t> a, int u)
{
  std::vector<double> weights(c.num_w);
  if (a)
    weights = w_posterior(c, s, *a);
  else
    for (std::size_t w = 0; w < c.num_w; ++w)
      weights[w] = c.w_prob(s, w);
  double p = 0.0;
  for (std::size_t w = 0; w < c.num_w; ++w)
    if (c.u_of_w[w] == u)
      p += weights[w];
  return p;
}

std::size_t
code(double value, std::size_t bound, const char* what)
{
  long long v = std::llround(value);
  if (v < 0 || static_cast<std::size_t>(v) >= bound)
    throw Error(std::string("tabular transition: ") + what + " code out of range");
  return static_cast<std::size_t>(v);
}

} // namespace

double
TabularCmdp::outcome_prob(std::size_t s, std::size_t w, std::size_t m, std::size_t s2, std::size_t r) const
{
  return outcome[((((s * num_w + w) * num_actions + m) * num_states + s2) * num_rewards) + r];
}

void
TabularCmdp::validate() const
{
  check_distribution(mu0, num_states, "mu0");
  check_distribution(p_w, num_w, "P(w|s)");
  check_distribution(policy, num_actions, "pi_b(a|s,w)");
  check_distribution(p_m, num_actions, "P(m|a)");
  check_distribution(outcome, num_states * num_rewards, "P(s',r|s,w,m)");
  if (p_w.size() != num_states * num_w || policy.size() != num_states * num_w * num_actions ||
      p_m.size() != num_actions * num_actions ||
      outcome.size() != num_states * num_w * num_actions * num_states * num_rewards)
    throw Error("tabular CMDP: table sizes disagree with the declared spaces");
  if (u_of_w.size() != num_w)
    throw Error("tabular CMDP: u_of_w needs one code per confounder value");
  if (backdoor)
    for (std::size_t a = 0; a < num_actions; ++a)
      if (m_prob(a, a) != 1.0)
        throw Error("tabular CMDP: backdoor instances execute a directly");
}

TabularCmdp
frontdoor_instance()
{
  TabularCmdp c = binary_frame(2);
  c.p_w = { 0.5, 0.5, 0.7, 0.3 };
  // pi_b(a=1 | s, w=0) = 0.1 and pi_b(a=1 | s, w=1) = 0.9.
  c.policy = { 0.9, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.9 };
  c.p_m = { 0.85, 0.15, 0.15, 0.85 };
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t w = 0; w < 2; ++w)
      for (std::size_t m = 0; m < 2; ++m)
        fill_outcome(c,
                     s,
                     w,
                     m,
                     0.25 + 0.45 * static_cast<double>(w) + 0.15 * static_cast<double>(m) + 0.1 * static_cast<double>(s),
                     0.2 + 0.5 * static_cast<double>(w) + 0.2 * static_cast<double>(m) - 0.1 * static_cast<double>(s));
  c.validate();
  return c;
}

TabularCmdp
unconfounded_instance()
{
  TabularCmdp c = frontdoor_instance();
  c.policy = { 0.4, 0.6, 0.4, 0.6, 0.65, 0.35, 0.65, 0.35 };
  c.validate();
  return c;
}

TabularCmdp
reversal_instance()
{
  TabularCmdp c = frontdoor_instance();
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t w = 0; w < 2; ++w)
      for (std::size_t m = 0; m < 2; ++m)
        fill_outcome(c,
                     s,
                     w,
                     m,
                     0.3 + 0.2 * static_cast<double>(w) + 0.2 * static_cast<double>(s),
                     0.3 + 0.5 * static_cast<double>(w) - 0.25 * static_cast<double>(m));
  c.validate();
  return c;
}

TabularCmdp
backdoor_instance()
{
  // w index = 2 * w1 + w2; the outcome depends on w only through u = w2.
  TabularCmdp c = binary_frame(4);
  c.backdoor = true;
  c.u_of_w = { 0, 1, 0, 1 };
  const double p_w1[2] = { 0.4, 0.6 };
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t w = 0; w < 4; ++w) {
      std::size_t w1 = w / 2, w2 = w % 2;
      double pw1 = w1 ? p_w1[s] : 1.0 - p_w1[s];
      double pw2 = w2 ? (w1 ? 0.8 : 0.3) : (w1 ? 0.2 : 0.7);
      c.p_w[s * 4 + w] = pw1 * pw2;
      double a1 = 0.1 + 0.5 * static_cast<double>(w1) + 0.3 * static_cast<double>(w2);
      c.policy[(s * 4 + w) * 2 + 0] = 1.0 - a1;
      c.policy[(s * 4 + w) * 2 + 1] = a1;
      for (std::size_t m = 0; m < 2; ++m)
        fill_outcome(c,
                     s,
                     w,
                     m,
                     0.3 + 0.4 * static_cast<double>(w2) + 0.2 * static_cast<double>(m),
                     0.15 + 0.5 * static_cast<double>(w2) + 0.25 * static_cast<double>(m) + 0.05 * static_cast<double>(s));
    }
  c.p_m = { 1.0, 0.0, 0.0, 1.0 };
  c.validate();
  return c;
}

OfflineDataset
generate_tabular_dataset(const TabularCmdp& cmdp, std::size_t n, std::uint64_t seed)
{
  cmdp.validate();
  if (n == 0)
    throw Error("empty dataset");
  OfflineDataset d;
  d.scenario = Scenario::Tabular;
  d.shape = cmdp.backdoor ? FieldShape{ false, true } : FieldShape{ true, false };
  d.num_actions = cmdp.num_actions;
  d.seed = seed;
  d.generator_config_digest =
    text::digest("tabular;" + std::string(cmdp.backdoor ? "backdoor" : "frontdoor") + ";n=" + std::to_string(n));
  d.transitions.reserve(n);
  Rng rng(seed);
  std::size_t s = draw(cmdp.mu0.data(), cmdp.num_states, rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && i % cmdp.episode_len == 0)
      s = draw(cmdp.mu0.data(), cmdp.num_states, rng);
    std::size_t w = draw(&cmdp.p_w[s * cmdp.num_w], cmdp.num_w, rng);
    std::size_t a = draw(&cmdp.policy[(s * cmdp.num_w + w) * cmdp.num_actions], cmdp.num_actions, rng);
    std::size_t m = draw(&cmdp.p_m[a * cmdp.num_actions], cmdp.num_actions, rng);
    std::size_t o = draw(&cmdp.outcome[((s * cmdp.num_w + w) * cmdp.num_actions + m) * cmdp.num_states * cmdp.num_rewards],
                         cmdp.num_states * cmdp.num_rewards,
                         rng);
    std::size_t s2 = o / cmdp.num_rewards, r = o % cmdp.num_rewards;
    Transition t;
    t.s = { static_cast<double>(s), 0.0, 0.0 };
    t.a = static_cast<int>(a);
    if (cmdp.backdoor)
      t.u = cmdp.u_of_w[w];
    else
      t.m = static_cast<int>(m);
    t.s_next = { static_cast<double>(s2), 0.0, 0.0 };
    t.r = static_cast<double>(r);
    d.transitions.push_back(t);
    s = s2;
  }
  return d;
}

RatioOracle
exact_ratio_oracle(const TabularCmdp& cmdp, RatioKind kind)
{
  cmdp.validate();
  if ((kind == RatioKind::Backdoor) != cmdp.backdoor)
    throw Error("ratio kind does not match the instance (frontdoor ratios need m, backdoor needs u)");
  if (kind == RatioKind::Backdoor)
    return [cmdp](const Transition& t) {
      if (!t.u)
        throw Error("backdoor oracle needs u");
      auto s = code(t.s.x, cmdp.num_states, "state");
      auto a = code(t.a, cmdp.num_actions, "action");
      return u_prob(cmdp, s, std::nullopt, *t.u) / u_prob(cmdp, s, a, *t.u);
    };
  return [cmdp, kind](const Transition& t) {
    if (!t.m)
      throw Error("frontdoor oracle needs m");
    return frontdoor_ratio(cmdp,
                           kind,
                           code(t.s.x, cmdp.num_states, "state"),
                           code(t.a, cmdp.num_actions, "action"),
                           code(*t.m, cmdp.num_actions, "intermediate action"),
                           code(t.s_next.x, cmdp.num_states, "next state"),
                           code(t.r, cmdp.num_rewards, "reward"));
  };
}

double
oracle_conditional_mean(const TabularCmdp& cmdp, RatioKind kind, std::size_t s, std::size_t a)
{
  auto oracle = exact_ratio_oracle(cmdp, kind);
  auto post = w_posterior(cmdp, s, a);
  double mean = 0.0;
  Transition t;
  t.s = { static_cast<double>(s), 0.0, 0.0 };
  t.a = static_cast<int>(a);
  for (std::size_t w = 0; w < cmdp.num_w; ++w)
    for (std::size_t m = 0; m < cmdp.num_actions; ++m)
      for (std::size_t s2 = 0; s2 < cmdp.num_states; ++s2)
        for (std::size_t r = 0; r < cmdp.num_rewards; ++r) {
          double p = post[w] * cmdp.m_prob(a, m) * cmdp.outcome_prob(s, w, m, s2, r);
          if (p == 0.0)
            continue;
          if (cmdp.backdoor)
            t.u = cmdp.u_of_w[w];
          else
            t.m = static_cast<int>(m);
          t.s_next = { static_cast<double>(s2), 0.0, 0.0 };
          t.r = static_cast<double>(r);
          mean += p * oracle(t);
        }
  return mean;
}

double
offline_row_prob(const TabularCmdp& cmdp, const Transition& t)
{
  auto s = code(t.s.x, cmdp.num_states, "state");
  auto a = code(t.a, cmdp.num_actions, "action");
  auto s2 = code(t.s_next.x, cmdp.num_states, "next state");
  auto r = code(t.r, cmdp.num_rewards, "reward");
  double p = 0.0;
  for (std::size_t w = 0; w < cmdp.num_w; ++w) {
    double base = cmdp.w_prob(s, w) * cmdp.pi(s, w, a);
    if (cmdp.backdoor) {
      if (!t.u || cmdp.u_of_w[w] != *t.u)
        continue;
      p += base * cmdp.outcome_prob(s, w, a, s2, r);
    } else {
      auto m = code(t.m.value_or(-1), cmdp.num_actions, "intermediate action");
      p += base * cmdp.m_prob(a, m) * cmdp.outcome_prob(s, w, m, s2, r);
    }
  }
  return p;
}

InterventionalDraw
sample_interventional(const TabularCmdp& cmdp, std::size_t s, std::size_t a, Rng& rng)
{
  std::size_t w = draw(&cmdp.p_w[s * cmdp.num_w], cmdp.num_w, rng);
  std::size_t m = draw(&cmdp.p_m[a * cmdp.num_actions], cmdp.num_actions, rng);
  std::size_t o = draw(&cmdp.outcome[((s * cmdp.num_w + w) * cmdp.num_actions + m) * cmdp.num_states * cmdp.num_rewards],
                       cmdp.num_states * cmdp.num_rewards,
                       rng);
  return { m, o / cmdp.num_rewards, o % cmdp.num_rewards };
}

std::vector<double>
interventional_outcome(const TabularCmdp& cmdp, std::size_t s, std::size_t a)
{
  std::vector<double> out(cmdp.num_states * cmdp.num_rewards, 0.0);
  for (std::size_t w = 0; w < cmdp.num_w; ++w)
    for (std::size_t m = 0; m < cmdp.num_actions; ++m) {
      double p = cmdp.w_prob(s, w) * cmdp.m_prob(a, m);
      for (std::size_t s2 = 0; s2 < cmdp.num_states; ++s2)
        for (std::size_t r = 0; r < cmdp.num_rewards; ++r)
          out[s2 * cmdp.num_rewards + r] += p * cmdp.outcome_prob(s, w, m, s2, r);
    }
  return out;
}

namespace {

struct InterventionalModel
{
  std::vector<double> reward;     // [s][a]
  std::vector<double> transition; // [s][a][s']
};

InterventionalModel
interventional_model(const TabularCmdp& c)
{
  InterventionalModel m;
  m.reward.assign(c.num_states * c.num_actions, 0.0);
  m.transition.assign(c.num_states * c.num_actions * c.num_states, 0.0);
  for (std::size_t s = 0; s < c.num_states; ++s)
    for (std::size_t a = 0; a < c.num_actions; ++a) {
      auto table = interventional_outcome(c, s, a);
      for (std::size_t s2 = 0; s2 < c.num_states; ++s2)
        for (std::size_t r = 0; r < c.num_rewards; ++r) {
          double p = table[s2 * c.num_rewards + r];
          m.reward[s * c.num_actions + a] += p * static_cast<double>(r);
          m.transition[(s * c.num_actions + a) * c.num_states + s2] += p;
        }
    }
  return m;
}

} // namespace

double
interventional_value(const TabularCmdp& cmdp, const std::vector<std::size_t>& policy, double gamma)
{
  if (policy.size() != cmdp.num_states)
    throw Error("policy needs one action per state");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw Error("gamma must lie in [0,1)");
  auto model = interventional_model(cmdp);
  std::vector<double> v(cmdp.num_states, 0.0), next(cmdp.num_states);
  for (int iter = 0; iter < 100000; ++iter) {
    double delta = 0.0;
    for (std::size_t s = 0; s < cmdp.num_states; ++s) {
      std::size_t a = policy[s];
      double q = model.reward[s * cmdp.num_actions + a];
      for (std::size_t s2 = 0; s2 < cmdp.num_states; ++s2)
        q += gamma * model.transition[(s * cmdp.num_actions + a) * cmdp.num_states + s2] * v[s2];
      next[s] = q;
      delta = std::max(delta, std::abs(q - v[s]));
    }
    v.swap(next);
    if (delta < 1e-13)
      break;
  }
  return std::inner_product(cmdp.mu0.begin(), cmdp.mu0.end(), v.begin(), 0.0);
}

std::vector<std::size_t>
interventional_optimal_policy(const TabularCmdp& cmdp, double gamma)
{
  auto model = interventional_model(cmdp);
  std::vector<double> v(cmdp.num_states, 0.0), next(cmdp.num_states);
  std::vector<std::size_t> policy(cmdp.num_states, 0);
  for (int iter = 0; iter < 100000; ++iter) {
    double delta = 0.0;
    for (std::size_t s = 0; s < cmdp.num_states; ++s) {
      double best = -1e300;
      for (std::size_t a = 0; a < cmdp.num_actions; ++a) {
        double q = model.reward[s * cmdp.num_actions + a];
        for (std::size_t s2 = 0; s2 < cmdp.num_states; ++s2)
          q += gamma * model.transition[(s * cmdp.num_actions + a) * cmdp.num_states + s2] * v[s2];
        if (q > best) {
          best = q;
          policy[s] = a;
        }
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - v[s]));
    }
    v.swap(next);
    if (delta < 1e-13)
      break;
  }
  return policy;
}

} // namespace deconf::weights
