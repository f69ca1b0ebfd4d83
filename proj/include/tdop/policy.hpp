#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tdop/instance.hpp"
#include "tdop/simulator.hpp"

namespace tdop::policy {

struct PolicyConfig {
  bool strict_mask = false;     // also mask nodes with l_i + d(i, depot) > T
  double epsilon = 0.01;        // floor of the expected travel time in the desirability ratio
  double depot_weight = 0.01;   // desirability of returning to the depot
  double temperature = 1.0;
};

// Node i is admissible unless visited, l_i > T or h_i < elapsed. The depot
// is always admissible.
std::vector<bool> action_mask(const Env& env, const PolicyConfig& config = {});

// Expected one-step reward of moving to `node`, exact over the travel-time
// noise; the return leg is charged at its mean.
double expected_step_reward(const Env& env, int node);

// Probabilities over nodes 0..n-1 (masked entries 0): p_i proportional to
// u_i^(1/temperature), u_i = max(expected step reward, 0) / max(E[t], eps).
std::vector<double> prior_policy(const Env& env, const PolicyConfig& config = {});

// Highest-probability action, ties to the lowest index.
int argmax_action(const std::vector<double>& probs);

// The k most probable actions, ties to the lowest index.
std::vector<int> top_actions(const std::vector<double>& probs, int k);

struct RolloutConfig {
  int top_k = 5;
  int rollouts = 64;
  int jobs = 1;
  PolicyConfig prior;
};

// Value of each of the top-k prior actions is the mean future reward of
// rollouts that take the action and then sample the prior. Rollout r of step
// `step` uses the same noise for every candidate.
int mc_rollout_select(const Env& env, const RolloutConfig& config, std::uint64_t policy_seed, int step);

// Mean future reward of rollouts starting with `action`.
double rollout_value(const Env& env, int action, const RolloutConfig& config, std::uint64_t policy_seed, int step);

using Selector = std::function<int(const Env&, int step)>;

Selector greedy_selector(PolicyConfig config = {});
Selector rollout_selector(RolloutConfig config, std::uint64_t policy_seed);

struct Episode {
  Tour tour;  // length n + 1, unvisited nodes after the closing depot
  Cents reward = 0;
  bool feasible = true;
};

Episode run_policy(const Instance& instance, const Selector& select, std::uint64_t sample_seed);

}  // namespace tdop::policy
