#pragma once

#include <algorithm>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "tdop/instance.hpp"
#include "tdop/simulator.hpp"

namespace tdop::test {

inline constexpr const char* kFourNode =
    "CUSTNO XCOORD YCOORD TW_LOW TW_HIGH PRIZE MAX_T\n"
    "1 47 24 0 285 0.0 256\n"
    "2 38 15 102 198 0.19 256\n"
    "3 53 49 9 52 0.38 256\n"
    "4 116 23 30 137 1.0 256\n";

inline Instance four_node() {
  std::istringstream in(kFourNode);
  return read_instance(in);
}

// 1-based ids as written in files and in the literature -> internal tour.
inline Tour ids(std::initializer_list<int> one_based) {
  Tour t;
  for (int v : one_based) t.push_back(v - 1);
  return t;
}

// Builds an instance from explicit per-node data; coordinates define D.
inline Instance make_instance(std::vector<int> x, std::vector<int> y, std::vector<int> low,
                              std::vector<int> high, std::vector<Cents> prize, int max_time) {
  Instance inst;
  inst.n = static_cast<int>(x.size());
  inst.x = std::move(x);
  inst.y = std::move(y);
  inst.tw_low = std::move(low);
  inst.tw_high = std::move(high);
  inst.prize = std::move(prize);
  inst.max_time = max_time;
  inst.dist = compute_distance_matrix(inst.x, inst.y);
  return inst;
}

// Every structural invariant a generated instance must satisfy. Returns an
// empty string when all hold, otherwise a description of the first failure.
inline std::string generated_instance_violation(const Instance& inst, const GeneratorParams& params) {
  const auto n = static_cast<std::size_t>(inst.n);
  if (inst.x.size() != n || inst.y.size() != n || inst.tw_low.size() != n || inst.tw_high.size() != n ||
      inst.prize.size() != n) {
    return "field sizes";
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.x[i] < params.x_limits.lo || inst.x[i] > params.x_limits.hi) return "x out of limits";
    if (inst.y[i] < params.y_limits.lo || inst.y[i] > params.y_limits.hi) return "y out of limits";
  }
  for (int i = 0; i < inst.n; ++i) {
    if (inst.dist(i, i) != 0) return "nonzero diagonal";
    for (int j = 0; j < inst.n; ++j) {
      if (inst.dist(i, j) != inst.dist(j, i)) return "asymmetric D";
      if (inst.dist(i, j) < 0) return "negative distance";
    }
  }
  const auto tour = second_nearest_neighbor_tour(inst.dist);
  for (std::size_t k = 1; k < n; ++k) {
    const auto v = static_cast<std::size_t>(tour.order[k]);
    if (inst.tw_low[v] > tour.visit_time[k] || tour.visit_time[k] > inst.tw_high[v]) return "window misses 2nn time";
  }
  if (inst.tw_low[0] != 0) return "depot opens late";
  if (inst.tw_high[0] != tour.closing_time + params.window) return "depot closing time";
  if (inst.prize[0] != 0) return "depot prize";
  int far = 0;
  for (int j = 0; j < inst.n; ++j) far = std::max(far, inst.dist(0, j));
  for (int i = 1; i < inst.n; ++i) {
    const auto p = inst.prize[static_cast<std::size_t>(i)];
    if (p < 1 || p > 100) return "prize out of range";
    if (inst.dist(0, i) == far && p != 100) return "farthest node prize";
    if (p != 1 + 99 * inst.dist(0, i) / far) return "prize formula";
  }
  const auto bounds = budget_bounds(inst.dist);
  if (bounds.min != 2 * far) return "T_min";
  if (inst.max_time < bounds.min || inst.max_time > bounds.max) return "T out of bounds";
  return {};
}

}  // namespace tdop::test
