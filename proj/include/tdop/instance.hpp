#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "tdop/rng.hpp"
#include "tdop/units.hpp"

namespace tdop {

// Node indices are 0-based inside the library; node 0 is the depot. Files and
// submissions use the 1-based CUSTNO convention and are converted at the I/O
// boundary.
inline constexpr int kDepot = 0;

/// Symmetric matrix of maximum travel times (rounded Euclidean distances).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(int n, std::vector<int> values) : n_(n), values_(std::move(values)) {}

  int size() const noexcept { return n_; }
  int operator()(int i, int j) const noexcept {
    return values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<int> values_;
};

struct Instance {
  int n = 0;
  std::vector<int> x;
  std::vector<int> y;
  std::vector<int> tw_low;
  std::vector<int> tw_high;
  std::vector<Cents> prize;  // hundredths; depot is 0
  int max_time = 0;          // T
  DistanceMatrix dist;

  Ticks low_ticks(int i) const { return to_ticks(tw_low[static_cast<std::size_t>(i)]); }
  Ticks high_ticks(int i) const { return to_ticks(tw_high[static_cast<std::size_t>(i)]); }
  Ticks budget_ticks() const { return to_ticks(max_time); }
  Cents total_prize() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct GeneratorParams {
  int n = 20;
  IntRange x_limits{0, 200};
  IntRange y_limits{0, 50};
  int window = 60;
};

struct ConstructionTour {
  std::vector<int> order;       // visiting order, starts at the depot
  std::vector<int> visit_time;  // cumulative max travel time on arrival, per position
  int closing_time = 0;         // visit_time.back() plus the leg back to the depot
};

struct TimeWindows {
  std::vector<int> low;
  std::vector<int> high;
  DistanceMatrix dist;
};

struct BudgetBounds {
  int min = 0;
  int max = 0;
};

struct PrizesAndBudget {
  std::vector<Cents> prize;
  int max_time = 0;
};

bool is_allowed_window(int w) noexcept;

DistanceMatrix compute_distance_matrix(std::span<const int> x, std::span<const int> y);

// Construction heuristic that always moves to the second-closest unvisited
// node (the closest one when only one remains). Ties break on lower index.
ConstructionTour second_nearest_neighbor_tour(const DistanceMatrix& dist);

// Total cost of the closed nearest-neighbor tour from the depot.
int nearest_neighbor_cost(const DistanceMatrix& dist);

TimeWindows generate_time_windows(std::span<const int> x, std::span<const int> y, int w, Rng& rng);

std::vector<Cents> compute_prizes(const DistanceMatrix& dist);
BudgetBounds budget_bounds(const DistanceMatrix& dist);
PrizesAndBudget generate_prizes_and_budget(const DistanceMatrix& dist, Rng& rng);

// Coordinates, windows and budget each draw from their own substream of seed.
Instance generate_instance(const GeneratorParams& params, std::uint64_t seed);

Instance read_instance(std::istream& in);
Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, std::ostream& out);
void write_instance(const Instance& instance, const std::filesystem::path& path);

}  // namespace tdop
