#include "tdop/iterative.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "tdop/errors.hpp"
#include "tdop/parallel.hpp"
#include "tdop/units.hpp"

namespace tdop::iter {

namespace {

constexpr std::uint64_t kGaTag = 0x6761ULL;
constexpr double kGapEpsilon = 1e-9;

std::size_t at(int n, int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j); }

}  // namespace

SurrogateState::SurrogateState(int n_)
    : n(n_),
      reward(static_cast<std::size_t>(n_), 0.0),
      penalty_sum(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0),
      penalty_count(penalty_sum.size(), 0),
      removed_node(static_cast<std::size_t>(n_), false),
      removed_arc(penalty_sum.size(), false) {}

double SurrogateState::penalty(int i, int j) const {
  const auto k = at(n, i, j);
  return penalty_count[k] ? penalty_sum[k] / penalty_count[k] : 0.0;
}

double SurrogateState::arc_score(int i, int j, bool with_penalties) const {
  return reward[static_cast<std::size_t>(j)] + (with_penalties ? penalty(i, j) : 0.0);
}

double SurrogateState::value(std::span<const int> route, bool with_penalties) const {
  double v = 0.0;
  int prev = kDepot;
  for (int j : route) {
    v += arc_score(prev, j, with_penalties);
    prev = j;
  }
  return v + reward[kDepot];
}

void update_arc_penalties(SurrogateState& state, std::span<const int> route, double total_penalty) {
  if (route.empty()) return;
  const double share = total_penalty / static_cast<double>(route.size());
  int prev = kDepot;
  for (int j : route) {
    const auto k = at(state.n, prev, j);
    state.penalty_sum[k] += share;
    ++state.penalty_count[k];
    prev = j;
  }
}

void apply_precuts(SurrogateState& state, const Instance& inst) {
  const auto one = Scenario::constant(1);
  const Ticks budget = inst.budget_ticks();
  for (int j = 1; j < inst.n; ++j) {
    const Ticks arrive = travel_time(inst, kDepot, j, one);
    const Ticks leave = std::max(arrive, inst.low_ticks(j));
    if (inst.low_ticks(j) > budget || arrive > inst.high_ticks(j) || leave + travel_time(inst, j, kDepot, one) > budget) {
      state.removed_node[static_cast<std::size_t>(j)] = true;
    }
  }
  for (int i = 1; i < inst.n; ++i) {
    for (int j = 1; j < inst.n; ++j) {
      if (i == j) continue;
      if (inst.low_ticks(i) + travel_time(inst, i, j, one) > inst.high_ticks(j)) {
        state.removed_arc[at(inst.n, i, j)] = true;
      }
    }
  }
}

namespace {

struct BbNode {
  int parent;
  int last;
  int depth;  // visited nodes
  double value;
  double bound;
  bool complete;
  std::size_t id;
};

struct BbOrder {
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.complete != b.complete) return !a.complete;
    return a.id > b.id;
  }
};

ModelSolution branch_and_bound(const SurrogateState& s, int max_size, bool with_penalties, bool respect_cuts,
                               SearchLimits limits) {
  ModelSolution out;
  const int n = s.n;
  const auto allowed_arc = [&](int i, int j) {
    return !s.removed_node[static_cast<std::size_t>(j)] && !s.removed_arc[at(n, i, j)];
  };
  // best entering score per node, for the bound
  std::vector<std::pair<double, int>> best_in;
  for (int j = 1; j < n; ++j) {
    if (s.removed_node[static_cast<std::size_t>(j)]) continue;
    double b = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (i != j && (i == kDepot || !s.removed_node[static_cast<std::size_t>(i)]) && allowed_arc(i, j)) {
        b = std::max(b, s.arc_score(i, j, with_penalties));
      }
    }
    if (b > 0) best_in.emplace_back(b, j);
  }
  std::stable_sort(best_in.begin(), best_in.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<BbNode> arena;  // expanded open nodes, for path recovery
  const auto path_of = [&](int idx) {
    Route r;
    for (int k = idx; k >= 0; k = arena[static_cast<std::size_t>(k)].parent) r.push_back(arena[static_cast<std::size_t>(k)].last);
    r.pop_back();  // root is the depot
    std::reverse(r.begin(), r.end());
    return r;
  };
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  const auto bound_for = [&](double value, int depth, const std::vector<bool>& visited) {
    int remaining = max_size - depth - 1;
    double b = value;
    for (const auto& [score, j] : best_in) {
      if (remaining <= 0) break;
      if (visited[static_cast<std::size_t>(j)]) continue;
      b += score;
      --remaining;
    }
    return b + s.reward[kDepot];
  };

  std::priority_queue<BbNode, std::vector<BbNode>, BbOrder> open;
  std::size_t next_id = 0;
  double incumbent = -std::numeric_limits<double>::infinity();
  Route incumbent_route;
  bool have_incumbent = false;

  arena.push_back({-1, kDepot, 0, 0.0, 0.0, false, next_id++});
  open.push({0, kDepot, 0, 0.0, bound_for(0.0, 0, on_path), false, next_id++});
  // the root entry's parent field points at arena slot 0 via the convention below
  bool first = true;
  while (!open.empty()) {
    const BbNode cur = open.top();
    open.pop();
    if (have_incumbent && cur.bound <= incumbent && !cur.complete) continue;
    if (cur.complete) {
      out.route = path_of(cur.parent);
      out.value = cur.value;
      return out;
    }
    int self = 0;
    if (!first) {
      arena.push_back(cur);
      self = static_cast<int>(arena.size()) - 1;
    }
    first = false;
    if (++out.expanded > limits.max_expansions) break;

    const Route path = path_of(self);
    std::fill(on_path.begin(), on_path.end(), false);
    for (int v : path) on_path[static_cast<std::size_t>(v)] = true;

    if (cur.depth >= 1) {
      const bool cut = respect_cuts && s.cut_solutions.contains(path);
      if (!cut) {
        const double v = cur.value + s.reward[kDepot];
        open.push({self, cur.last, cur.depth, v, v, true, next_id++});
        if (v > incumbent) {
          incumbent = v;
          incumbent_route = path;
          have_incumbent = true;
        }
      }
    }
    if (cur.depth + 2 > max_size) continue;
    Route ext = path;
    ext.push_back(0);
    for (int j = 1; j < n; ++j) {
      if (on_path[static_cast<std::size_t>(j)] || !allowed_arc(cur.last, j)) continue;
      ext.back() = j;
      if (s.cut_structures.contains(ext)) continue;
      const double v = cur.value + s.arc_score(cur.last, j, with_penalties);
      on_path[static_cast<std::size_t>(j)] = true;
      const double b = bound_for(v, cur.depth + 1, on_path);
      on_path[static_cast<std::size_t>(j)] = false;
      if (have_incumbent && b <= incumbent) continue;
      open.push({self, j, cur.depth + 1, v, b, false, next_id++});
    }
  }
  if (have_incumbent) {
    out.route = incumbent_route;
    out.value = incumbent;
    out.exact = open.empty();
    return out;
  }
  out.exhausted = true;
  out.exact = open.empty();
  return out;
}

}  // namespace

ModelSolution solve_surrogate_model(const SurrogateState& state, bool with_penalties, bool respect_solution_cuts,
                                    SearchLimits limits) {
  if (state.max_route_size < 2) throw InvalidInput("max route size must be at least 2");
  return branch_and_bound(state, state.max_route_size, with_penalties, respect_solution_cuts, limits);
}

double upper_bound(const SurrogateState& state, int max_route_size, SearchLimits limits) {
  if (max_route_size < 2) throw InvalidInput("max route size must be at least 2");
  const auto s = branch_and_bound(state, max_route_size, false, false, limits);
  return s.exhausted ? state.reward[kDepot] : std::max(s.value, state.reward[kDepot]);
}

SimStats simulate_many(const Instance& inst, std::span<const int> route, int m, std::uint64_t seed,
                       std::uint64_t instance_id, int jobs) {
  if (m < 1) throw InvalidInput("sample count must be positive");
  std::vector<QuickOutcome> outs(static_cast<std::size_t>(m));
  parallel_for(outs.size(), jobs, [&](std::size_t j) {
    outs[j] = simulate_route(inst, route, Scenario::sampled(derive_sample_stream(seed, instance_id, j)));
  });
  Cents reward = 0, pen = 0;
  int ok = 0;
  for (const auto& o : outs) {
    reward += o.reward;
    pen += o.penalty;
    if (o.penalty == 0) ++ok;
  }
  return {cents_to_double(reward) / m, cents_to_double(pen) / m, static_cast<double>(ok) / m};
}

IterResult iterative_search(const Instance& inst, const IterConfig& cfg, std::uint64_t seed, std::uint64_t instance_id,
                            int jobs) {
  if (cfg.max_iterations < 0 || cfg.samples < 1) throw InvalidInput("iteration count and sample count must be positive");
  if (cfg.feasibility_threshold < 0 || cfg.feasibility_threshold > 1 || cfg.gap_threshold < 0) {
    throw InvalidInput("thresholds out of range");
  }
  SurrogateState state(inst.n);
  for (int i = 1; i < inst.n; ++i) state.reward[static_cast<std::size_t>(i)] = cents_to_double(inst.prize[static_cast<std::size_t>(i)]);
  apply_precuts(state, inst);
  int active = 0;
  for (int i = 1; i < inst.n; ++i) active += state.removed_node[static_cast<std::size_t>(i)] ? 0 : 1;
  const int max_size = active + 1;

  IterResult res;
  double best = 0.0;  // the immediate return
  int size = 2;
  int it = 0;
  while (max_size >= 2 && it < cfg.max_iterations) {
    state.max_route_size = size;
    const auto sol = solve_surrogate_model(state, true, true, cfg.limits);
    if (sol.exhausted) {
      if (size < max_size) {
        ++size;
        continue;
      }
      break;
    }
    ++it;
    const auto stats = simulate_many(inst, sol.route, cfg.samples, seed, instance_id, jobs);
    if (stats.feasible_fraction >= cfg.feasibility_threshold) {
      res.stored.push_back({sol.route, stats.mean_reward});
      state.cut_solutions.insert(sol.route);
      best = std::max(best, stats.mean_reward);
    } else {
      state.cut_structures.insert(sol.route);
    }
    update_arc_penalties(state, sol.route, stats.mean_penalty);
    const double ub = upper_bound(state, size, cfg.limits);
    const double gap = (ub - best) / std::max(std::abs(ub), kGapEpsilon);
    res.log.push_back({it, size, sol.value, ub, stats.feasible_fraction, best});
    if (gap < cfg.gap_threshold) {
      if (size >= max_size) break;
      ++size;
    }
  }
  res.iterations = it;
  std::stable_sort(res.stored.begin(), res.stored.end(), [](const auto& a, const auto& b) { return a.mean > b.mean; });

  // final answer must pass a fresh validation; the immediate return always does
  const auto vseed = derive_seed(seed, {stream::validation});
  res.route = {};
  res.mean = 0.0;
  res.validation_feasible = 1.0;
  for (const auto& s : res.stored) {
    if (s.mean <= 0.0) break;
    const auto v = simulate_many(inst, s.route, cfg.samples, vseed, instance_id, jobs);
    if (v.feasible_fraction >= cfg.feasibility_threshold) {
      res.route = s.route;
      res.mean = s.mean;
      res.validation_feasible = v.feasible_fraction;
      break;
    }
  }
  res.tour = tour_from_route(inst.n, res.route);
  return res;
}

void write_iter_log(std::ostream& out, const std::vector<IterLogRow>& log) {
  out << "iter,max_route_size,surrogate_value,upper_bound,feasible_fraction,best_mean\n";
  for (const auto& r : log) {
    out << r.iter << ',' << r.max_route_size << ',' << format_double(r.surrogate_value) << ','
        << format_double(r.upper_bound) << ',' << format_double(r.feasible_fraction) << ','
        << format_double(r.best_mean) << '\n';
  }
}

std::vector<int> nwox_crossover(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi) {
  if (a.size() != b.size() || lo > hi || hi >= a.size()) throw InvalidInput("bad crossover window");
  std::vector<int> child(a.size());
  std::vector<int> window(b.begin() + static_cast<std::ptrdiff_t>(lo), b.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  std::size_t k = 0;
  for (int v : a) {
    if (std::find(window.begin(), window.end(), v) != window.end()) continue;
    if (k == lo) k = hi + 1;
    child[k++] = v;
  }
  std::copy(window.begin(), window.end(), child.begin() + static_cast<std::ptrdiff_t>(lo));
  return child;
}

std::vector<int> nwox_crossover(std::span<const int> a, std::span<const int> b, Rng& rng) {
  auto lo = static_cast<std::size_t>(rng.below(a.size()));
  auto hi = static_cast<std::size_t>(rng.below(a.size()));
  if (lo > hi) std::swap(lo, hi);
  return nwox_crossover(a, b, lo, hi);
}

std::vector<int> genome_of(std::span<const int> route, int n) {
  std::vector<int> g(route.begin(), route.end());
  g.push_back(kDepot);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int v : route) used[static_cast<std::size_t>(v)] = true;
  for (int v = 1; v < n; ++v) {
    if (!used[static_cast<std::size_t>(v)]) g.push_back(v);
  }
  return g;
}

namespace {

Route route_part(const std::vector<int>& g) {
  return Route(g.begin(), std::find(g.begin(), g.end(), kDepot));
}

}  // namespace

GaResult ga_improve(const Instance& inst, std::span<const Route> seeds, const GaConfig& cfg, std::uint64_t seed,
                    std::uint64_t instance_id, int jobs) {
  if (cfg.population < 1 || cfg.samples < 1 || cfg.parents < 1 || cfg.tournament < 1) {
    throw InvalidInput("GA sizes must be positive");
  }
  Rng rng(derive_seed(seed, {stream::solver, kGaTag, instance_id}));
  ea::EvalCache cache(inst, seed, instance_id);
  std::vector<std::vector<int>> pop;
  for (const auto& s : seeds) {
    validate_tour(inst, tour_from_route(inst.n, s));
    pop.push_back(genome_of(s, inst.n));
  }
  if (cfg.random_fill) {
    std::vector<int> base(static_cast<std::size_t>(inst.n));
    for (int v = 0; v < inst.n; ++v) base[static_cast<std::size_t>(v)] = v;
    while (static_cast<int>(pop.size()) < cfg.population) {
      shuffle(base.begin(), base.end(), rng);
      pop.push_back(base);
    }
  }
  if (pop.empty()) pop.push_back(genome_of({}, inst.n));

  GaResult res;
  std::vector<Route> routes;
  std::vector<double> value;
  const auto evaluate = [&] {
    routes.clear();
    for (const auto& g : pop) routes.push_back(route_part(g));
    cache.estimate_batch(routes, cfg.samples, jobs);
    value.clear();
    for (const auto& r : routes) value.push_back(cache.find(r)->mean());
  };
  const auto ranking = [&] {
    std::vector<std::size_t> order(pop.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return value[x] > value[y]; });
    return order;
  };

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    evaluate();
    const auto order = ranking();
    std::vector<std::vector<int>> next;
    const auto elites = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.elites, 0)), pop.size());
    for (std::size_t k = 0; k < elites; ++k) next.push_back(pop[order[k]]);
    std::vector<std::size_t> parents;
    for (int p = 0; p < cfg.parents; ++p) {
      std::size_t w = rng.below(pop.size());
      for (int t = 1; t < cfg.tournament; ++t) {
        const std::size_t c = rng.below(pop.size());
        if (value[c] > value[w]) w = c;
      }
      parents.push_back(w);
    }
    const auto size = std::max(pop.size(), elites + 1);
    while (next.size() < size) {
      const auto& a = pop[parents[rng.below(parents.size())]];
      const auto& b = pop[parents[rng.below(parents.size())]];
      next.push_back(nwox_crossover(a, b, rng));
    }
    pop = std::move(next);
    res.best_per_generation.emplace_back(gen, value[order.front()]);
  }
  evaluate();

  // top distinct routes plus every seed, re-evaluated at the final fidelity
  std::vector<Route> cand;
  std::unordered_set<Route, RouteHash> seen;
  for (auto k : ranking()) {
    if (static_cast<int>(cand.size()) >= cfg.final_top) break;
    if (seen.insert(routes[k]).second) cand.push_back(routes[k]);
  }
  for (const auto& s : seeds) {
    if (seen.insert(s).second) cand.push_back(s);
  }
  cache.estimate_batch(cand, cfg.final_fidelity, jobs);
  res.mean = -std::numeric_limits<double>::infinity();
  for (const auto& c : cand) {
    const double v = cache.find(c)->mean();
    if (v > res.mean) {
      res.mean = v;
      res.route = c;
    }
  }
  res.tour = tour_from_route(inst.n, res.route);
  return res;
}

}  // namespace tdop::iter
