#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tdop/instance.hpp"
#include "tdop/rng.hpp"
#include "tdop/units.hpp"

namespace tdop {

// Travel times are d * eta / 100 with eta ~ U{1, 100}.
inline constexpr int kEtaMax = 100;

/// One realization of the travel-time noise.
///
/// A sampled scenario assigns every directed edge its own eta, derived from
/// the scenario seed and the edge endpoints. The same scenario therefore
/// yields the same travel time for an edge no matter which tour traverses it
/// or in which order edges are visited, which gives common random numbers
/// across compared tours and lets the full-tour and stepwise interfaces agree
/// exactly.
class Scenario {
 public:
  static Scenario sampled(std::uint64_t seed) { return Scenario(Kind::sampled, seed, 0, {}); }
  // Every edge uses the same eta (eta = 100 gives maximum travel times).
  static Scenario constant(int eta);
  // Explicit row-major n x n eta matrix; test fixtures use this.
  static Scenario from_matrix(int n, std::vector<int> etas);

  int eta(int from, int to) const noexcept;

 private:
  enum class Kind { sampled, constant, matrix };
  Scenario(Kind kind, std::uint64_t seed, int n, std::vector<int> etas)
      : kind_(kind), seed_(seed), n_(n), etas_(std::move(etas)) {}

  Kind kind_;
  std::uint64_t seed_;
  int n_;
  std::vector<int> etas_;
};

// Seed of Monte-Carlo sample `sample_index` of instance `instance_id`.
std::uint64_t derive_sample_stream(std::uint64_t base_seed, std::uint64_t instance_id,
                                   std::uint64_t sample_index) noexcept;

Ticks sample_travel_time(int max_travel_time, Rng& rng) noexcept;
Ticks travel_time(const Instance& instance, int from, int to, const Scenario& scenario) noexcept;

// A tour is depot + a permutation of all n nodes (so the depot appears twice).
using Tour = std::vector<int>;

// Throws InvalidInput when the tour is not of that shape.
void validate_tour(const Instance& instance, std::span<const int> tour);

// The tour up to and including its second depot visit.
std::span<const int> effective_prefix(std::span<const int> tour) noexcept;

// Builds a full tour from the visited nodes (depot excluded): depot, route,
// depot, then every unvisited node in index order.
Tour tour_from_route(int n, std::span<const int> route);

struct NodeVisit {
  int node = 0;
  Ticks arrival = 0;
  Ticks departure = 0;
  Cents reward = 0;
  Cents penalty = 0;
};

struct SimOutcome {
  Cents total_reward = 0;
  Ticks total_time = 0;
  std::vector<NodeVisit> per_node;
  bool feasible = true;
  std::optional<int> violation_node;  // where the budget penalty was charged
};

// Result of arriving at `node` at time `arrival`. Shared by every simulation
// path so that they cannot disagree.
struct Arrival {
  Ticks departure = 0;
  Cents reward = 0;
  Cents penalty = 0;
  bool window_miss = false;
  bool budget_violation = false;
};

Arrival resolve_arrival(const Instance& instance, int node, Ticks arrival) noexcept;

SimOutcome check_solution(const Instance& instance, std::span<const int> tour, const Scenario& scenario);

struct QuickOutcome {
  Cents reward = 0;
  bool feasible = true;
  Cents penalty = 0;
};

// check_solution without validation or per-node trace, for Monte-Carlo loops.
// `route` holds the visited nodes between the two depot visits.
QuickOutcome simulate_route(const Instance& instance, std::span<const int> route, const Scenario& scenario) noexcept;

// Trace CSV: node,arrival,departure,reward,penalty (1-based node ids).
void write_trace(const SimOutcome& outcome, std::ostream& out);

struct StepOutcome {
  Ticks last_leg_time = 0;
  Ticks elapsed = 0;
  Cents reward = 0;
  Cents penalty = 0;
  bool feasible = true;
  bool done = false;
};

/// Stepwise environment: the tour is built node by node and each leg's travel
/// time is revealed only when it is traversed. An episode ends when the depot
/// is chosen or when the budget is first exceeded.
class Env {
 public:
  Env(const Instance& instance, Scenario scenario);

  void reset();
  StepOutcome step(int next_node);

  // Same position in the episode, different noise. Used for rollouts.
  Env with_scenario(Scenario scenario) const;

  const Instance& instance() const noexcept { return *instance_; }
  int current() const noexcept { return current_; }
  Ticks elapsed() const noexcept { return elapsed_; }
  bool done() const noexcept { return done_; }
  bool feasible() const noexcept { return feasible_; }
  bool visited(int node) const noexcept { return visited_[static_cast<std::size_t>(node)]; }
  Cents total_reward() const noexcept { return total_reward_; }
  // Nodes in visiting order, starting with the depot.
  const std::vector<int>& partial_tour() const noexcept { return partial_; }

 private:
  const Instance* instance_;
  Scenario scenario_;
  int current_ = kDepot;
  Ticks elapsed_ = 0;
  bool done_ = false;
  bool feasible_ = true;
  Cents total_reward_ = 0;
  std::vector<bool> visited_;
  std::vector<int> partial_;
};

Env env_reset(const Instance& instance, std::uint64_t sample_seed);

}  // namespace tdop
