#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "tdop/ea/cache.hpp"
#include "tdop/rng.hpp"

namespace tdop::ea {

// A genome is a permutation of the depot and the active nodes; the tour it
// encodes is depot + genome, so the visited route is the genome prefix before
// the depot and everything after it is the inactive part.
using Genome = std::vector<int>;

enum class Recombination { cycle, order, position, alternating_position };
enum class Mutation { swap, insert };

inline constexpr std::array kRecombinations{Recombination::cycle, Recombination::order, Recombination::position,
                                            Recombination::alternating_position};
inline constexpr std::array kMutations{Mutation::swap, Mutation::insert};

std::string_view name(Recombination r) noexcept;
std::string_view name(Mutation m) noexcept;

struct StrategyParams {
  double op_mutation_probability = 0.1;  // p
  double rate_min = 0.01;
  double rate_max = 0.5;
  double learning_rate = -1.0;           // tau; negative selects 1 / sqrt(2 * genome length)
  int min_route_length = 2;
};

struct EaIndividual {
  Genome genome;
  Recombination recombination = Recombination::order;
  Mutation mutation = Mutation::swap;
  double rate = 0.1;  // q
};

Route route_of(std::span<const int> genome);
std::size_t depot_position(std::span<const int> genome);

// Fewest visited nodes an operator may produce: min_route_length, capped by
// how many active nodes exist.
int route_floor(std::span<const int> genome, const StrategyParams& params) noexcept;

Genome random_genome(std::span<const int> active_nodes, int min_route_length, Rng& rng);

// Plain permutation crossovers, usable on any two permutations of one set.
std::vector<int> cycle_crossover(std::span<const int> a, std::span<const int> b);
std::vector<int> order_crossover(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi);
std::vector<int> position_crossover(std::span<const int> a, std::span<const int> b, const std::vector<bool>& keep);
std::vector<int> alternating_position_crossover(std::span<const int> a, std::span<const int> b);

// Swap / insert anchored in the active part: the first position lies within
// the visited route or on the closing depot.
void swap_mutation(Genome& g, Rng& rng);
void insert_mutation(Genome& g, Rng& rng);

// Self-adaptive mutation: operator genes resampled with probability p, rate
// q' = q exp(tau z), then the variation operator applied at least once and
// again with probability q each time. Offspring never fall below the route
// floor.
EaIndividual mutate(const EaIndividual& parent, const StrategyParams& params, Rng& rng);

// Operator genes picked from either parent, rate by intermediate crossover,
// genome by the child's recombination operator.
EaIndividual recombine(const EaIndividual& a, const EaIndividual& b, const StrategyParams& params, Rng& rng);

}  // namespace tdop::ea
