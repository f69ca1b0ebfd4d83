#include "tdop/policy.hpp"

#include <algorithm>
#include <cmath>

#include "tdop/errors.hpp"
#include "tdop/parallel.hpp"
#include "tdop/rng.hpp"

namespace tdop::policy {

namespace {

constexpr double kMeanEta = (1.0 + kEtaMax) / 2.0;

int clamp_count(double x) { return static_cast<int>(std::clamp(std::floor(x), 0.0, static_cast<double>(kEtaMax))); }

// sample from probs with one uniform draw
int sample_action(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  int last = kDepot;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

std::vector<bool> action_mask(const Env& env, const PolicyConfig& config) {
  const auto& inst = env.instance();
  std::vector<bool> ok(static_cast<std::size_t>(inst.n), false);
  ok[kDepot] = true;
  const Ticks budget = inst.budget_ticks();
  for (int i = 1; i < inst.n; ++i) {
    if (env.visited(i) || inst.low_ticks(i) > budget || inst.high_ticks(i) < env.elapsed()) continue;
    if (config.strict_mask && inst.low_ticks(i) + to_ticks(inst.dist(i, kDepot)) > budget) continue;
    ok[static_cast<std::size_t>(i)] = true;
  }
  return ok;
}

double expected_step_reward(const Env& env, int node) {
  const auto& inst = env.instance();
  const double n = inst.n;
  const double d = inst.dist(env.current(), node);
  const double elapsed = static_cast<double>(env.elapsed());
  const double budget = static_cast<double>(inst.budget_ticks());
  const double ret = kMeanEta * inst.dist(node, kDepot);
  if (node == kDepot) {
    // budget violation only
    int late = 0;
    for (int eta = 1; eta <= kEtaMax; ++eta) late += elapsed + d * eta > budget ? 1 : 0;
    return -n * late / kEtaMax;
  }
  const double low = static_cast<double>(inst.low_ticks(node));
  const double high = static_cast<double>(inst.high_ticks(node));
  const auto count_below = [&](double limit) {  // #eta with elapsed + d * eta <= limit
    if (d == 0) return elapsed <= limit ? kEtaMax : 0;
    return clamp_count((limit - elapsed) / d);
  };
  const int in_window = count_below(high);
  const int in_time = count_below(budget - ret);
  int ok = 0, miss = std::max(0, in_time - in_window);
  if (low + ret <= budget) ok = std::min(in_window, in_time);
  const int over = kEtaMax - ok - miss;
  const double prize = cents_to_double(inst.prize[static_cast<std::size_t>(node)]);
  return (prize * ok - 1.0 * miss - n * over) / kEtaMax;
}

std::vector<double> prior_policy(const Env& env, const PolicyConfig& config) {
  const auto& inst = env.instance();
  const auto mask = action_mask(env, config);
  std::vector<double> u(static_cast<std::size_t>(inst.n), 0.0);
  u[kDepot] = config.depot_weight;
  for (int i = 1; i < inst.n; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double travel = std::max(kMeanEta / 100.0 * inst.dist(env.current(), i), config.epsilon);
    u[static_cast<std::size_t>(i)] = std::max(expected_step_reward(env, i), 0.0) / travel;
  }
  double sum = 0.0;
  for (auto& v : u) {
    v = v > 0.0 ? std::pow(v, 1.0 / config.temperature) : 0.0;
    sum += v;
  }
  if (sum <= 0.0) {
    std::fill(u.begin(), u.end(), 0.0);
    u[kDepot] = 1.0;
    return u;
  }
  for (auto& v : u) v /= sum;
  return u;
}

int argmax_action(const std::vector<double>& probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::vector<int> top_actions(const std::vector<double>& probs, int k) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) idx.push_back(static_cast<int>(i));
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
  });
  if (static_cast<int>(idx.size()) > k) idx.resize(static_cast<std::size_t>(std::max(k, 0)));
  return idx;
}

double rollout_value(const Env& env, int action, const RolloutConfig& config, std::uint64_t policy_seed, int step) {
  if (config.rollouts < 1) throw InvalidInput("rollout count must be positive");
  std::vector<Cents> gain(static_cast<std::size_t>(config.rollouts));
  const auto step_tag = static_cast<std::uint64_t>(step);
  parallel_for(gain.size(), config.jobs, [&](std::size_t r) {
    Env sim = env.with_scenario(Scenario::sampled(derive_seed(policy_seed, {stream::rollout, step_tag, r})));
    Rng rng(derive_seed(policy_seed, {stream::action, step_tag, r}));
    const Cents start = sim.total_reward();
    sim.step(action);
    while (!sim.done()) sim.step(sample_action(prior_policy(sim, config.prior), rng));
    gain[r] = sim.total_reward() - start;
  });
  Cents total = 0;
  for (auto g : gain) total += g;
  return cents_to_double(total) / config.rollouts;
}

int mc_rollout_select(const Env& env, const RolloutConfig& config, std::uint64_t policy_seed, int step) {
  if (config.top_k < 1) throw InvalidInput("top-k must be positive");
  const auto probs = prior_policy(env, config.prior);
  const auto cand = top_actions(probs, config.top_k);
  if (cand.size() == 1) return cand.front();
  int best = cand.front();
  double best_value = -1e300;
  for (int a : cand) {
    const double v = rollout_value(env, a, config, policy_seed, step);
    if (v > best_value || (v == best_value && a < best)) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

Selector greedy_selector(PolicyConfig config) {
  return [config](const Env& env, int) { return argmax_action(prior_policy(env, config)); };
}

Selector rollout_selector(RolloutConfig config, std::uint64_t policy_seed) {
  return [config, policy_seed](const Env& env, int step) { return mc_rollout_select(env, config, policy_seed, step); };
}

Episode run_policy(const Instance& instance, const Selector& select, std::uint64_t sample_seed) {
  Env env = env_reset(instance, sample_seed);
  for (int step = 0; !env.done(); ++step) env.step(select(env, step));
  Episode e;
  const auto& p = env.partial_tour();
  std::vector<int> route;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] != kDepot) route.push_back(p[k]);
  }
  e.tour = tour_from_route(instance.n, route);
  e.reward = env.total_reward();
  e.feasible = env.feasible();
  return e;
}

}  // namespace tdop::policy
