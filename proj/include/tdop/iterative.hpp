#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tdop/ea/cache.hpp"
#include "tdop/instance.hpp"
#include "tdop/rng.hpp"
#include "tdop/simulator.hpp"

namespace tdop::iter {

using Route = std::vector<int>;  // visited nodes, depot excluded
using ea::RouteHash;

/// Arc-penalty model: the value of depot -> route -> depot is the sum of the
/// rewards of the visited nodes plus the learned penalties of every arc but
/// the return arc. A route over k nodes uses k + 1 arcs.
struct SurrogateState {
  explicit SurrogateState(int n = 0);

  int n;
  std::vector<double> reward;                // r_i, depot 0
  std::vector<double> penalty_sum;           // row-major n x n
  std::vector<int> penalty_count;
  std::unordered_set<Route, RouteHash> cut_solutions;
  std::unordered_set<Route, RouteHash> cut_structures;  // forbidden route prefixes
  std::vector<bool> removed_node;
  std::vector<bool> removed_arc;             // row-major n x n
  int max_route_size = 2;

  double penalty(int i, int j) const;
  double arc_score(int i, int j, bool with_penalties = true) const;
  double value(std::span<const int> route, bool with_penalties = true) const;
};

struct ModelSolution {
  Route route;
  double value = 0.0;
  bool exhausted = false;  // no admissible non-empty route
  bool exact = true;       // false when the node limit stopped the search
  std::size_t expanded = 0;
};

struct SearchLimits {
  std::size_t max_expansions = 2'000'000;
};

// Best non-empty route with at most max_route_size arcs that avoids removed
// nodes and arcs, structure cuts and (if respect_solution_cuts) solution cuts.
ModelSolution solve_surrogate_model(const SurrogateState& state, bool with_penalties = true,
                                    bool respect_solution_cuts = true, SearchLimits limits = {});

// Optimum without penalties and without solution cuts.
double upper_bound(const SurrogateState& state, int max_route_size, SearchLimits limits = {});

// total_penalty is split evenly over the arcs of the route except the
// return arc; each arc keeps the running mean of its shares.
void update_arc_penalties(SurrogateState& state, std::span<const int> route, double total_penalty);

// Nodes that can never be served in time and arcs that always arrive late.
void apply_precuts(SurrogateState& state, const Instance& instance);

struct IterConfig {
  int max_iterations = 200;          // K
  int samples = 100;                 // M
  double feasibility_threshold = 0.9;
  double gap_threshold = 0.02;
  SearchLimits limits;
};

struct SimStats {
  double mean_reward = 0.0;
  double mean_penalty = 0.0;
  double feasible_fraction = 0.0;  // samples without any penalty
};

// Samples [0, m) of derive_sample_stream(seed, instance_id, j).
SimStats simulate_many(const Instance& instance, std::span<const int> route, int m, std::uint64_t seed,
                       std::uint64_t instance_id, int jobs);

struct IterLogRow {
  int iter = 0;
  int max_route_size = 0;
  double surrogate_value = 0.0;
  double upper_bound = 0.0;
  double feasible_fraction = 0.0;
  double best_mean = 0.0;
};

struct StoredSolution {
  Route route;
  double mean = 0.0;
};

struct IterResult {
  Route route;
  Tour tour;
  double mean = 0.0;           // in the search samples
  double validation_feasible = 1.0;
  std::vector<StoredSolution> stored;  // feasible solutions, best first
  std::vector<IterLogRow> log;
  int iterations = 0;
};

IterResult iterative_search(const Instance& instance, const IterConfig& config, std::uint64_t seed,
                            std::uint64_t instance_id = 0, int jobs = 1);

void write_iter_log(std::ostream& out, const std::vector<IterLogRow>& log);

// Child takes b's window [lo, hi] in place; the other positions receive the
// remaining nodes in the order they have in a.
std::vector<int> nwox_crossover(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi);
std::vector<int> nwox_crossover(std::span<const int> a, std::span<const int> b, Rng& rng);

struct GaConfig {
  int population = 512;
  int generations = 5;
  int samples = 100;
  int parents = 64;
  int elites = 8;
  int tournament = 3;
  int final_top = 20;
  int final_fidelity = 10000;
  bool random_fill = true;  // top up the seeds with random genomes
};

struct GaResult {
  Route route;
  Tour tour;
  double mean = 0.0;  // at final_fidelity
  std::vector<std::pair<int, double>> best_per_generation;
};

// Genome: permutation of all nodes where the prefix before the depot is the route.
std::vector<int> genome_of(std::span<const int> route, int n);

GaResult ga_improve(const Instance& instance, std::span<const Route> seeds, const GaConfig& config,
                    std::uint64_t seed, std::uint64_t instance_id = 0, int jobs = 1);

}  // namespace tdop::iter
