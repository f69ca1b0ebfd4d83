#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdop/ea/cache.hpp"
#include "tdop/ea/classifier.hpp"
#include "tdop/ea/operators.hpp"
#include "tdop/ea/surrogate.hpp"

namespace tdop::ea {

enum class Filter { none, classifier, surrogate, combined };

struct PhaseConfig {
  int fidelity = 1;
  int budget = 10000;  // offspring evaluations; cache hits count too
  Filter filter = Filter::none;
};

struct EaConfig {
  int population = 40;   // mu
  int offspring = 80;    // lambda
  std::vector<PhaseConfig> phases{
      {1, 10000, Filter::none},         {10, 10000, Filter::none},          {100, 10000, Filter::none},
      {100, 10000, Filter::classifier}, {100, 5000, Filter::surrogate},     {500, 5000, Filter::surrogate},
      {500, 5000, Filter::combined},
  };
  int reduce_repeats = 1000;
  double reduce_threshold = 0.1;   // nodes infeasible this often alone are dropped
  double veto_probability = 0.6;   // P(infeasible) above which an offspring is vetoed
  int veto_attempts = 20;
  double keep_fraction = 0.5;      // share of offspring surviving the model filter
  int refit_every = 20;            // generations between model refits
  int final_top = 250;
  int final_fidelity = 10000;
  int final_min_fidelity = 100;    // final candidates come from routes seen at least this often
  StrategyParams strategy;
  ClassifierParams classifier;
  SurrogateParams surrogate;
};

struct LogRow {
  int phase = 0;
  int generation = 0;
  double best_mean = 0.0;
  long long evals_used = 0;
};

struct EaResult {
  Route route;
  Tour tour;
  double mean = 0.0;  // at final_fidelity in the solver's own streams
  std::vector<int> active;
  std::vector<LogRow> log;
  std::size_t simulator_calls = 0;
};

// Active nodes (excluding the depot): those whose single-node tour fails in
// fewer than threshold * repeats of the first `repeats` sample streams.
std::vector<int> reduce_dimension(EvalCache& cache, int repeats, double threshold, int jobs = 1);

// Upper bound on simulator calls for a configuration on an n-node instance.
std::size_t simulator_call_bound(const EaConfig& config, int n);

// Sample streams come from (seed, instance_id, j); the evolutionary choices
// from a separate stream of seed.
EaResult solve(const Instance& instance, const EaConfig& config, std::uint64_t seed, std::uint64_t instance_id = 0,
               int jobs = 1);

struct RandomSearchConfig {
  std::size_t simulator_budget = 0;
  int fidelity = 100;
  int final_top = 250;
  int final_fidelity = 10000;
  int min_route_length = 2;
};

// Uniform random genomes over all nodes at a fixed fidelity, then the best
// final_top re-evaluated; stops before the re-evaluation reserve is touched.
EaResult random_search(const Instance& instance, const RandomSearchConfig& config, std::uint64_t seed,
                       std::uint64_t instance_id = 0, int jobs = 1);

void write_log(std::ostream& out, const std::vector<LogRow>& log);

}  // namespace tdop::ea
