#include "tdop/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "tdop/errors.hpp"

namespace tdop {

Scenario Scenario::constant(int eta) {
  if (eta < 1 || eta > kEtaMax) throw InvalidInput("eta must lie in 1..100");
  return Scenario(Kind::constant, 0, eta, {});
}

Scenario Scenario::from_matrix(int n, std::vector<int> etas) {
  if (n < 1 || etas.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw InvalidInput("eta matrix must be n x n");
  }
  for (int e : etas) {
    if (e < 1 || e > kEtaMax) throw InvalidInput("eta must lie in 1..100");
  }
  return Scenario(Kind::matrix, 0, n, std::move(etas));
}

int Scenario::eta(int from, int to) const noexcept {
  switch (kind_) {
    case Kind::constant:
      return n_;
    case Kind::matrix:
      return etas_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(to)];
    case Kind::sampled:
      break;
  }
  // Counter-based draw: SplitMix64 over the edge key, then Lemire rejection.
  std::uint64_t state = seed_ ^ mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
                                      static_cast<std::uint32_t>(to));
  constexpr std::uint64_t bound = kEtaMax;
  constexpr std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    state += 0x9e3779b97f4a7c15ULL;
    const auto m = static_cast<__uint128_t>(mix64(state)) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) return 1 + static_cast<int>(m >> 64);
  }
}

std::uint64_t derive_sample_stream(std::uint64_t base_seed, std::uint64_t instance_id,
                                   std::uint64_t sample_index) noexcept {
  return derive_seed(base_seed, {stream::sample, instance_id, sample_index});
}

Ticks sample_travel_time(int max_travel_time, Rng& rng) noexcept {
  return static_cast<Ticks>(max_travel_time) * rng.uniform_int(1, kEtaMax);
}

Ticks travel_time(const Instance& instance, int from, int to, const Scenario& scenario) noexcept {
  const int d = instance.dist(from, to);
  if (d == 0) return 0;
  return static_cast<Ticks>(d) * scenario.eta(from, to);
}

void validate_tour(const Instance& instance, std::span<const int> tour) {
  const auto n = static_cast<std::size_t>(instance.n);
  if (tour.size() != n + 1) {
    throw InvalidInput("tour must have " + std::to_string(n + 1) + " entries, found " + std::to_string(tour.size()));
  }
  if (tour.front() != kDepot) throw InvalidInput("tour must start at the depot");
  std::vector<bool> seen(n, false);
  for (std::size_t k = 1; k < tour.size(); ++k) {
    const int v = tour[k];
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvalidInput("tour contains unknown node " + std::to_string(v + 1));
    if (seen[static_cast<std::size_t>(v)]) throw InvalidInput("tour repeats node " + std::to_string(v + 1));
    seen[static_cast<std::size_t>(v)] = true;
  }
}

std::span<const int> effective_prefix(std::span<const int> tour) noexcept {
  for (std::size_t k = 1; k < tour.size(); ++k) {
    if (tour[k] == kDepot) return tour.first(k + 1);
  }
  return tour;
}

Tour tour_from_route(int n, std::span<const int> route) {
  Tour tour;
  tour.reserve(static_cast<std::size_t>(n) + 1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  tour.push_back(kDepot);
  for (int v : route) {
    tour.push_back(v);
    used[static_cast<std::size_t>(v)] = true;
  }
  tour.push_back(kDepot);
  for (int v = 1; v < n; ++v) {
    if (!used[static_cast<std::size_t>(v)]) tour.push_back(v);
  }
  return tour;
}

Arrival resolve_arrival(const Instance& instance, int node, Ticks arrival) noexcept {
  Arrival out;
  const Ticks budget = instance.budget_ticks();
  const Cents budget_penalty = -static_cast<Cents>(instance.n) * kHundredths;
  if (node == kDepot) {
    out.departure = arrival;
    if (arrival > budget) {
      out.budget_violation = true;
      out.penalty = budget_penalty;
    }
    return out;
  }
  if (arrival > instance.high_ticks(node)) {
    // Service skipped: no waiting at a missed window.
    out.window_miss = true;
    out.departure = arrival;
  } else {
    out.departure = std::max(arrival, instance.low_ticks(node));
  }
  if (out.departure > budget) {
    out.budget_violation = true;
    out.penalty = budget_penalty;
  } else if (out.window_miss) {
    out.penalty = -kHundredths;
  } else {
    out.reward = instance.prize[static_cast<std::size_t>(node)];
  }
  return out;
}

SimOutcome check_solution(const Instance& instance, std::span<const int> tour, const Scenario& scenario) {
  validate_tour(instance, tour);
  const auto prefix = effective_prefix(tour);
  SimOutcome out;
  Ticks time = 0;
  int current = kDepot;
  for (std::size_t k = 1; k < prefix.size(); ++k) {
    const int node = prefix[k];
    const Ticks arrival = time + travel_time(instance, current, node, scenario);
    const auto a = resolve_arrival(instance, node, arrival);
    out.per_node.push_back({node, arrival, a.departure, a.reward, a.penalty});
    out.total_reward += a.reward + a.penalty;
    time = a.departure;
    current = node;
    if (a.window_miss || a.budget_violation) out.feasible = false;
    if (a.budget_violation) {
      out.violation_node = node;
      break;
    }
  }
  out.total_time = time;
  return out;
}

QuickOutcome simulate_route(const Instance& instance, std::span<const int> route, const Scenario& scenario) noexcept {
  QuickOutcome out;
  Ticks time = 0;
  int current = kDepot;
  const auto visit = [&](int node) {
    const auto a = resolve_arrival(instance, node, time + travel_time(instance, current, node, scenario));
    out.reward += a.reward + a.penalty;
    out.penalty += a.penalty;
    if (a.window_miss || a.budget_violation) out.feasible = false;
    time = a.departure;
    current = node;
    return !a.budget_violation;
  };
  for (int node : route) {
    if (!visit(node)) return out;
  }
  visit(kDepot);
  return out;
}

void write_trace(const SimOutcome& outcome, std::ostream& out) {
  out << "node,arrival,departure,reward,penalty\n";
  for (const auto& v : outcome.per_node) {
    out << v.node + 1 << ',' << format_hundredths(v.arrival) << ',' << format_hundredths(v.departure) << ','
        << format_hundredths(v.reward) << ',' << format_hundredths(v.penalty) << '\n';
  }
}

Env::Env(const Instance& instance, Scenario scenario) : instance_(&instance), scenario_(std::move(scenario)) {
  reset();
}

void Env::reset() {
  current_ = kDepot;
  elapsed_ = 0;
  done_ = false;
  feasible_ = true;
  total_reward_ = 0;
  visited_.assign(static_cast<std::size_t>(instance_->n), false);
  visited_[kDepot] = true;
  partial_.assign(1, kDepot);
}

StepOutcome Env::step(int next_node) {
  if (done_) throw ProtocolError("episode already finished; call reset()");
  if (next_node < 0 || next_node >= instance_->n) {
    throw InvalidAction("unknown node " + std::to_string(next_node + 1));
  }
  if (next_node != kDepot && visited_[static_cast<std::size_t>(next_node)]) {
    throw InvalidAction("node " + std::to_string(next_node + 1) + " already visited");
  }
  StepOutcome out;
  out.last_leg_time = travel_time(*instance_, current_, next_node, scenario_);
  const auto a = resolve_arrival(*instance_, next_node, elapsed_ + out.last_leg_time);
  elapsed_ = a.departure;
  current_ = next_node;
  visited_[static_cast<std::size_t>(next_node)] = true;
  partial_.push_back(next_node);
  total_reward_ += a.reward + a.penalty;
  if (a.window_miss || a.budget_violation) feasible_ = false;
  done_ = next_node == kDepot || a.budget_violation;

  out.elapsed = elapsed_;
  out.reward = a.reward;
  out.penalty = a.penalty;
  out.feasible = feasible_;
  out.done = done_;
  return out;
}

Env Env::with_scenario(Scenario scenario) const {
  Env copy = *this;
  copy.scenario_ = std::move(scenario);
  return copy;
}

Env env_reset(const Instance& instance, std::uint64_t sample_seed) {
  return Env(instance, Scenario::sampled(sample_seed));
}

}  // namespace tdop
