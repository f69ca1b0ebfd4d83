#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "tdop/instance.hpp"
#include "tdop/simulator.hpp"

namespace tdop::ea {

// Visited nodes between the two depot visits; the canonical form of a tour.
using Route = std::vector<int>;

struct RouteHash {
  std::size_t operator()(const Route& r) const noexcept;
};

struct FidelityStats {
  double mean = 0.0;
  double infeasible_fraction = 0.0;
};

struct CacheEntry {
  Route route;
  Cents sum = 0;       // over samples [0, count)
  int count = 0;
  int infeasible = 0;
  std::map<int, FidelityStats> levels;  // snapshot at every requested fidelity

  double mean() const { return count ? cents_to_double(sum) / count : 0.0; }
  double infeasible_fraction() const { return count ? static_cast<double>(infeasible) / count : 0.0; }
};

/// Memo of Monte-Carlo estimates per route and fidelity.
///
/// Sample j of every route uses derive_sample_stream(base_seed, instance_id, j),
/// so raising a route from fidelity f to f' runs exactly samples [f, f') and
/// the stored mean is always the mean of the first `count` samples.
class EvalCache {
 public:
  EvalCache(const Instance& instance, std::uint64_t base_seed, std::uint64_t instance_id = 0)
      : instance_(&instance), base_seed_(base_seed), instance_id_(instance_id) {}

  // Mean reward of `route` at (at least) `fidelity` samples.
  double estimate(const Route& route, int fidelity);

  // Tops up every route to `fidelity`; the sampling runs on up to `jobs`
  // threads and results are written back in input order. Returns the number
  // of routes that needed new samples.
  std::size_t estimate_batch(std::span<const Route> routes, int fidelity, int jobs);

  const CacheEntry* find(const Route& route) const;
  bool has(const Route& route, int fidelity) const;

  std::span<const CacheEntry> entries() const noexcept { return entries_; }
  std::size_t simulator_calls() const noexcept { return simulator_calls_; }
  const Instance& instance() const noexcept { return *instance_; }

 private:
  struct TopUp {
    Cents sum = 0;
    int infeasible = 0;
  };
  TopUp run_samples(const Route& route, int from, int to) const;
  CacheEntry& slot(const Route& route);
  void apply(CacheEntry& e, const TopUp& t, int fidelity);

  const Instance* instance_;
  std::uint64_t base_seed_;
  std::uint64_t instance_id_;
  std::vector<CacheEntry> entries_;
  std::unordered_map<Route, std::size_t, RouteHash> index_;
  std::size_t simulator_calls_ = 0;
};

}  // namespace tdop::ea
