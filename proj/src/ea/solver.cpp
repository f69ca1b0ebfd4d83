#include "tdop/ea/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "tdop/errors.hpp"
#include "tdop/parallel.hpp"
#include "tdop/units.hpp"

namespace tdop::ea {

namespace {

constexpr std::uint64_t kRandomSearchTag = 0x72616e646f6dULL;

struct Member {
  EaIndividual ind;
  Route route;
  double value = 0.0;
};

// Best final_top routes seen at min_fidelity or more (all routes if none),
// plus the immediate return, re-evaluated at `fidelity`.
EaResult finalize(EvalCache& cache, int top, int min_fidelity, int fidelity, int jobs) {
  std::vector<const CacheEntry*> pool;
  for (const auto& e : cache.entries()) {
    if (e.count >= min_fidelity) pool.push_back(&e);
  }
  if (pool.empty()) {
    for (const auto& e : cache.entries()) pool.push_back(&e);
  }
  std::stable_sort(pool.begin(), pool.end(), [](const auto* a, const auto* b) { return a->mean() > b->mean(); });
  if (pool.size() > static_cast<std::size_t>(top)) pool.resize(static_cast<std::size_t>(top));
  std::vector<Route> cand{Route{}};
  for (const auto* e : pool) {
    if (!e->route.empty()) cand.push_back(e->route);
  }
  cache.estimate_batch(cand, fidelity, jobs);
  EaResult r;
  r.mean = cache.find(cand.front())->mean();
  r.route = cand.front();
  for (const auto& c : cand) {
    const double v = cache.find(c)->mean();
    if (v > r.mean) {
      r.mean = v;
      r.route = c;
    }
  }
  r.tour = tour_from_route(cache.instance().n, r.route);
  r.simulator_calls = cache.simulator_calls();
  return r;
}

void evaluate(EvalCache& cache, std::vector<Member>& members, int fidelity, int jobs) {
  std::vector<Route> routes;
  routes.reserve(members.size());
  for (const auto& m : members) routes.push_back(m.route);
  cache.estimate_batch(routes, fidelity, jobs);
  for (auto& m : members) m.value = cache.find(m.route)->mean();
}

// (mu + lambda) truncation preferring distinct routes.
void select(std::vector<Member>& pool, std::size_t mu) {
  std::stable_sort(pool.begin(), pool.end(), [](const Member& a, const Member& b) { return a.value > b.value; });
  std::vector<Member> next, dupes;
  std::unordered_set<Route, RouteHash> seen;
  for (auto& m : pool) {
    if (seen.insert(m.route).second) {
      next.push_back(std::move(m));
    } else {
      dupes.push_back(std::move(m));
    }
  }
  for (auto& m : dupes) {
    if (next.size() >= mu) break;
    next.push_back(std::move(m));
  }
  if (next.size() > mu) next.resize(mu);
  pool = std::move(next);
}

Member offspring(const std::vector<Member>& pop, const EaConfig& cfg, Rng& rng) {
  const auto& a = pop[rng.below(pop.size())].ind;
  const auto& b = pop[rng.below(pop.size())].ind;
  Member m;
  m.ind = mutate(recombine(a, b, cfg.strategy, rng), cfg.strategy, rng);
  m.route = route_of(m.ind.genome);
  return m;
}

}  // namespace

std::vector<int> reduce_dimension(EvalCache& cache, int repeats, double threshold, int jobs) {
  const int n = cache.instance().n;
  std::vector<Route> singles;
  for (int v = 1; v < n; ++v) singles.push_back(Route{v});
  cache.estimate_batch(singles, repeats, jobs);
  std::vector<int> active;
  for (const auto& s : singles) {
    if (cache.find(s)->infeasible_fraction() < threshold) active.push_back(s.front());
  }
  return active;
}

std::size_t simulator_call_bound(const EaConfig& config, int n) {
  std::size_t total = static_cast<std::size_t>(std::max(n - 1, 0)) * static_cast<std::size_t>(config.reduce_repeats);
  for (const auto& p : config.phases) {
    total += static_cast<std::size_t>(p.budget + config.population) * static_cast<std::size_t>(p.fidelity);
  }
  total += static_cast<std::size_t>(config.final_top + 1) * static_cast<std::size_t>(config.final_fidelity);
  return total;
}

EaResult solve(const Instance& instance, const EaConfig& cfg, std::uint64_t seed, std::uint64_t instance_id,
               int jobs) {
  if (cfg.population < 1 || cfg.offspring < 1) throw InvalidInput("population and offspring must be positive");
  EvalCache cache(instance, seed, instance_id);
  Rng rng(derive_seed(seed, {stream::solver, instance_id}));
  const auto active = reduce_dimension(cache, cfg.reduce_repeats, cfg.reduce_threshold, jobs);

  std::vector<LogRow> log;
  if (!active.empty()) {
    std::vector<Member> pop(static_cast<std::size_t>(cfg.population));
    for (auto& m : pop) {
      m.ind.genome = random_genome(active, cfg.strategy.min_route_length, rng);
      m.ind.recombination = kRecombinations[rng.below(kRecombinations.size())];
      m.ind.mutation = kMutations[rng.below(kMutations.size())];
      m.ind.rate = cfg.strategy.rate_min + (cfg.strategy.rate_max - cfg.strategy.rate_min) * rng.uniform01();
      m.route = route_of(m.ind.genome);
    }

    FeasibilityClassifier classifier;
    SurrogateEnsemble surrogate;
    for (std::size_t phase = 0; phase < cfg.phases.size(); ++phase) {
      const auto& pc = cfg.phases[phase];
      evaluate(cache, pop, pc.fidelity, jobs);
      select(pop, pop.size());
      const bool use_classifier = pc.filter == Filter::classifier || pc.filter == Filter::combined;
      const bool use_surrogate = pc.filter == Filter::surrogate || pc.filter == Filter::combined;
      long long used = 0;
      for (int gen = 0; used < pc.budget; ++gen) {
        if (gen % std::max(cfg.refit_every, 1) == 0) {
          if (use_classifier) classifier = train_classifier(cache, cfg.classifier);
          if (use_surrogate) surrogate = fit_surrogate(cache, cfg.surrogate);
        }
        std::vector<Member> kids;
        kids.reserve(static_cast<std::size_t>(cfg.offspring));
        for (int k = 0; k < cfg.offspring; ++k) {
          auto kid = offspring(pop, cfg, rng);
          if (use_classifier && pc.filter == Filter::classifier) {
            for (int t = 0; t < cfg.veto_attempts && classifier.predict_route(kid.route) > cfg.veto_probability; ++t) {
              kid = offspring(pop, cfg, rng);
            }
          }
          kids.push_back(std::move(kid));
        }
        if (use_surrogate) {
          std::vector<double> score(kids.size());
          parallel_for(kids.size(), jobs, [&](std::size_t k) {
            score[k] = surrogate.predict(kids[k].route).mean;
            if (use_classifier) score[k] -= classifier.predict_route(kids[k].route);
          });
          std::vector<std::size_t> order(kids.size());
          for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
          // the current best route is never filtered out
          const auto& best_route = pop.front().route;
          std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const bool ba = kids[a].route == best_route, bb = kids[b].route == best_route;
            if (ba != bb) return ba;
            return score[a] > score[b];
          });
          const auto keep = std::max<std::size_t>(
              1, static_cast<std::size_t>(std::ceil(cfg.keep_fraction * static_cast<double>(kids.size()))));
          std::vector<Member> kept;
          for (std::size_t k = 0; k < order.size(); ++k) {
            if (k < keep || kids[order[k]].route == best_route) kept.push_back(std::move(kids[order[k]]));
          }
          kids = std::move(kept);
        }
        if (static_cast<long long>(kids.size()) > pc.budget - used) {
          kids.resize(static_cast<std::size_t>(pc.budget - used));
        }
        evaluate(cache, kids, pc.fidelity, jobs);
        used += static_cast<long long>(kids.size());
        const auto mu = pop.size();
        for (auto& k : kids) pop.push_back(std::move(k));
        select(pop, mu);
        log.push_back({static_cast<int>(phase) + 1, gen + 1, pop.front().value, used});
      }
    }
  }

  auto result = finalize(cache, cfg.final_top, cfg.final_min_fidelity, cfg.final_fidelity, jobs);
  result.active = active;
  result.log = std::move(log);
  return result;
}

EaResult random_search(const Instance& instance, const RandomSearchConfig& cfg, std::uint64_t seed,
                       std::uint64_t instance_id, int jobs) {
  EvalCache cache(instance, seed, instance_id);
  Rng rng(derive_seed(seed, {stream::solver, kRandomSearchTag, instance_id}));
  std::vector<int> nodes;
  for (int v = 1; v < instance.n; ++v) nodes.push_back(v);
  const std::size_t reserve = static_cast<std::size_t>(cfg.final_top + 1) * static_cast<std::size_t>(cfg.final_fidelity);
  const auto fid = static_cast<std::size_t>(cfg.fidelity);
  constexpr int kBatch = 80;
  constexpr int kStallLimit = 100;
  std::vector<LogRow> log;
  int stall = 0;
  int gen = 0;
  double best = -1e300;
  while (!nodes.empty() && cache.simulator_calls() + fid + reserve <= cfg.simulator_budget && stall < kStallLimit) {
    const std::size_t room = (cfg.simulator_budget - reserve - cache.simulator_calls()) / fid;
    std::vector<Route> batch;
    std::unordered_set<Route, RouteHash> fresh;
    for (int k = 0; k < kBatch && batch.size() < room; ++k) {
      auto r = route_of(random_genome(nodes, cfg.min_route_length, rng));
      if (cache.has(r, cfg.fidelity) || !fresh.insert(r).second) continue;
      batch.push_back(std::move(r));
    }
    stall = batch.empty() ? stall + 1 : 0;
    cache.estimate_batch(batch, cfg.fidelity, jobs);
    for (const auto& r : batch) best = std::max(best, cache.find(r)->mean());
    log.push_back({1, ++gen, best, static_cast<long long>(cache.entries().size())});
  }
  auto result = finalize(cache, cfg.final_top, cfg.fidelity, cfg.final_fidelity, jobs);
  result.active = nodes;
  result.log = std::move(log);
  return result;
}

void write_log(std::ostream& out, const std::vector<LogRow>& log) {
  out << "phase,generation,best_mean,evals_used\n";
  for (const auto& r : log) {
    out << r.phase << ',' << r.generation << ',' << format_double(r.best_mean) << ',' << r.evals_used << '\n';
  }
}

}  // namespace tdop::ea
