#include "tdop/ea/operators.hpp"

#include <algorithm>
#include <cmath>

#include "tdop/errors.hpp"

namespace tdop::ea {

std::string_view name(Recombination r) noexcept {
  switch (r) {
    case Recombination::cycle: return "cycle";
    case Recombination::order: return "order";
    case Recombination::position: return "position";
    case Recombination::alternating_position: return "alternating_position";
  }
  return "?";
}

std::string_view name(Mutation m) noexcept { return m == Mutation::swap ? "swap" : "insert"; }

std::size_t depot_position(std::span<const int> genome) {
  const auto it = std::find(genome.begin(), genome.end(), kDepot);
  if (it == genome.end()) throw InvalidInput("genome lacks the depot");
  return static_cast<std::size_t>(it - genome.begin());
}

Route route_of(std::span<const int> genome) {
  return Route(genome.begin(), genome.begin() + static_cast<std::ptrdiff_t>(depot_position(genome)));
}

int route_floor(std::span<const int> genome, const StrategyParams& params) noexcept {
  return std::min(params.min_route_length, static_cast<int>(genome.size()) - 1);
}

Genome random_genome(std::span<const int> active_nodes, int min_route_length, Rng& rng) {
  Genome g(active_nodes.begin(), active_nodes.end());
  g.push_back(kDepot);
  const int floor = std::min(min_route_length, static_cast<int>(active_nodes.size()));
  do {
    shuffle(g.begin(), g.end(), rng);
  } while (static_cast<int>(depot_position(g)) < floor);
  return g;
}

std::vector<int> cycle_crossover(std::span<const int> a, std::span<const int> b) {
  const auto n = a.size();
  std::vector<int> pos_in_a(n + 1);
  int max_v = 0;
  for (int v : a) max_v = std::max(max_v, v);
  pos_in_a.assign(static_cast<std::size_t>(max_v) + 1, -1);
  for (std::size_t i = 0; i < n; ++i) pos_in_a[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
  std::vector<int> child(n, -1);
  std::vector<bool> done(n, false);
  bool from_a = true;
  for (std::size_t start = 0; start < n; ++start) {
    if (done[start]) continue;
    std::size_t i = start;
    do {
      done[i] = true;
      child[i] = from_a ? a[i] : b[i];
      i = static_cast<std::size_t>(pos_in_a[static_cast<std::size_t>(b[i])]);
    } while (i != start);
    from_a = !from_a;
  }
  return child;
}

std::vector<int> order_crossover(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi) {
  const auto n = a.size();
  std::vector<int> child(n, -1);
  std::vector<int> taken;
  for (std::size_t i = lo; i <= hi; ++i) {
    child[i] = a[i];
    taken.push_back(a[i]);
  }
  std::size_t write = (hi + 1) % n;
  for (std::size_t k = 0; k < n; ++k) {
    const int v = b[(hi + 1 + k) % n];
    if (std::find(taken.begin(), taken.end(), v) != taken.end()) continue;
    child[write] = v;
    write = (write + 1) % n;
  }
  return child;
}

std::vector<int> position_crossover(std::span<const int> a, std::span<const int> b, const std::vector<bool>& keep) {
  const auto n = a.size();
  std::vector<int> child(n, -1);
  std::vector<int> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      child[i] = a[i];
      kept.push_back(a[i]);
    }
  }
  std::size_t write = 0;
  for (int v : b) {
    if (std::find(kept.begin(), kept.end(), v) != kept.end()) continue;
    while (child[write] != -1) ++write;
    child[write] = v;
  }
  return child;
}

std::vector<int> alternating_position_crossover(std::span<const int> a, std::span<const int> b) {
  const auto n = a.size();
  std::vector<int> child;
  child.reserve(n);
  const auto add = [&](int v) {
    if (std::find(child.begin(), child.end(), v) == child.end()) child.push_back(v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    add(a[i]);
    add(b[i]);
  }
  return child;
}

namespace {

// (anchor, other) with the anchor inside the visited route or on the depot.
std::pair<std::size_t, std::size_t> anchored_pair(const Genome& g, Rng& rng) {
  const auto depot = depot_position(g);
  const auto i = static_cast<std::size_t>(rng.below(depot + 1));
  auto j = static_cast<std::size_t>(rng.below(g.size() - 1));
  if (j >= i) ++j;
  return {i, j};
}

}  // namespace

void swap_mutation(Genome& g, Rng& rng) {
  if (g.size() < 2) return;
  const auto [i, j] = anchored_pair(g, rng);
  std::swap(g[i], g[j]);
}

void insert_mutation(Genome& g, Rng& rng) {
  if (g.size() < 2) return;
  const auto [i, j] = anchored_pair(g, rng);
  const int v = g[i];
  g.erase(g.begin() + static_cast<std::ptrdiff_t>(i));
  g.insert(g.begin() + static_cast<std::ptrdiff_t>(j), v);
}

namespace {

constexpr int kRepairAttempts = 16;

bool long_enough(const Genome& g, int floor) { return static_cast<int>(depot_position(g)) >= floor; }

void apply_mutation(Genome& g, Mutation m, Rng& rng) {
  if (m == Mutation::swap) {
    swap_mutation(g, rng);
  } else {
    insert_mutation(g, rng);
  }
}

}  // namespace

EaIndividual mutate(const EaIndividual& parent, const StrategyParams& params, Rng& rng) {
  EaIndividual child = parent;
  if (rng.bernoulli(params.op_mutation_probability)) {
    child.recombination = kRecombinations[rng.below(kRecombinations.size())];
  }
  if (rng.bernoulli(params.op_mutation_probability)) {
    child.mutation = kMutations[rng.below(kMutations.size())];
  }
  const double tau = params.learning_rate >= 0.0
                         ? params.learning_rate
                         : 1.0 / std::sqrt(2.0 * static_cast<double>(std::max<std::size_t>(child.genome.size(), 1)));
  child.rate = std::clamp(child.rate * std::exp(tau * rng.normal()), params.rate_min, params.rate_max);

  const int floor = route_floor(parent.genome, params);
  for (int attempt = 0; attempt < kRepairAttempts; ++attempt) {
    Genome g = parent.genome;
    do {
      apply_mutation(g, child.mutation, rng);
    } while (rng.bernoulli(child.rate));
    if (long_enough(g, floor)) {
      child.genome = std::move(g);
      return child;
    }
  }
  child.genome = parent.genome;
  return child;
}

EaIndividual recombine(const EaIndividual& a, const EaIndividual& b, const StrategyParams& params, Rng& rng) {
  EaIndividual child;
  child.recombination = rng.bernoulli(0.5) ? a.recombination : b.recombination;
  child.mutation = rng.bernoulli(0.5) ? a.mutation : b.mutation;
  child.rate = std::clamp(0.5 * (a.rate + b.rate), params.rate_min, params.rate_max);
  const auto n = a.genome.size();
  const int floor = route_floor(a.genome, params);
  for (int attempt = 0; attempt < kRepairAttempts; ++attempt) {
    Genome g;
    switch (child.recombination) {
      case Recombination::cycle:
        g = cycle_crossover(a.genome, b.genome);
        break;
      case Recombination::order: {
        auto lo = static_cast<std::size_t>(rng.below(n));
        auto hi = static_cast<std::size_t>(rng.below(n));
        if (lo > hi) std::swap(lo, hi);
        g = order_crossover(a.genome, b.genome, lo, hi);
        break;
      }
      case Recombination::position: {
        std::vector<bool> keep(n);
        for (std::size_t i = 0; i < n; ++i) keep[i] = rng.bernoulli(0.5);
        g = position_crossover(a.genome, b.genome, keep);
        break;
      }
      case Recombination::alternating_position:
        g = alternating_position_crossover(a.genome, b.genome);
        break;
    }
    if (long_enough(g, floor)) {
      child.genome = std::move(g);
      return child;
    }
  }
  child.genome = a.genome;
  return child;
}

}  // namespace tdop::ea
