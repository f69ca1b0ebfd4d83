#include "tdop/ea/cache.hpp"

#include <algorithm>

#include "tdop/errors.hpp"
#include "tdop/parallel.hpp"

namespace tdop::ea {

std::size_t RouteHash::operator()(const Route& r) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ r.size();
  for (int v : r) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

EvalCache::TopUp EvalCache::run_samples(const Route& route, int from, int to) const {
  TopUp t;
  for (int j = from; j < to; ++j) {
    const auto sc = Scenario::sampled(derive_sample_stream(base_seed_, instance_id_, static_cast<std::uint64_t>(j)));
    const auto out = simulate_route(*instance_, route, sc);
    t.sum += out.reward;
    if (!out.feasible) ++t.infeasible;
  }
  return t;
}

CacheEntry& EvalCache::slot(const Route& route) {
  auto [it, inserted] = index_.try_emplace(route, entries_.size());
  if (inserted) {
    CacheEntry e;
    e.route = route;
    entries_.push_back(std::move(e));
  }
  return entries_[it->second];
}

void EvalCache::apply(CacheEntry& e, const TopUp& t, int fidelity) {
  if (fidelity > e.count) {
    simulator_calls_ += static_cast<std::size_t>(fidelity - e.count);
    e.sum += t.sum;
    e.infeasible += t.infeasible;
    e.count = fidelity;
  }
  e.levels.try_emplace(fidelity, FidelityStats{e.mean(), e.infeasible_fraction()});
}

double EvalCache::estimate(const Route& route, int fidelity) {
  if (fidelity < 1) throw InvalidInput("fidelity must be at least 1");
  auto& e = slot(route);
  if (e.count >= fidelity) return e.mean();
  apply(e, run_samples(route, e.count, fidelity), fidelity);
  return e.mean();
}

std::size_t EvalCache::estimate_batch(std::span<const Route> routes, int fidelity, int jobs) {
  if (fidelity < 1) throw InvalidInput("fidelity must be at least 1");
  // Distinct routes that need samples, in first-seen order.
  std::vector<std::size_t> todo;
  for (const auto& r : routes) {
    auto& e = slot(r);
    const auto idx = index_.at(r);
    if (e.count < fidelity && (todo.empty() || std::find(todo.begin(), todo.end(), idx) == todo.end())) {
      todo.push_back(idx);
    }
  }
  std::vector<TopUp> results(todo.size());
  parallel_for(todo.size(), jobs, [&](std::size_t k) {
    const auto& e = entries_[todo[k]];
    results[k] = run_samples(e.route, e.count, fidelity);
  });
  for (std::size_t k = 0; k < todo.size(); ++k) apply(entries_[todo[k]], results[k], fidelity);
  return todo.size();
}

const CacheEntry* EvalCache::find(const Route& route) const {
  const auto it = index_.find(route);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool EvalCache::has(const Route& route, int fidelity) const {
  const auto* e = find(route);
  return e && e->count >= fidelity;
}

}  // namespace tdop::ea
