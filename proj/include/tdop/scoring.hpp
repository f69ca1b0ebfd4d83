#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdop/instance.hpp"
#include "tdop/simulator.hpp"

namespace tdop {

struct ScoreReport {
  std::vector<Cents> alphas;  // instance-major, then sample index
  int instances = 0;
  int samples = 0;            // m, per instance
  Cents total = 0;

  // Exact sum divided once, so the mean does not depend on reduction order.
  double mean() const;
};

// Total reward of `tour` under one noise realization.
Cents tour_score(const Instance& instance, std::span<const int> tour, const Scenario& scenario);

ScoreReport evaluate_monte_carlo(const Instance& instance, std::span<const int> tour, int m,
                                 std::uint64_t base_seed, std::uint64_t instance_id = 0, int jobs = 1);

inline constexpr int kTrack1Samples = 10000;
inline constexpr int kTrack2Samples = 100;

struct Submission {
  int track = 1;
  int samples = 1;           // tours per instance (Track 2); 1 for Track 1
  std::vector<Tour> tours;   // instance-major, then sample index
};

// Track 1 scores the single tour on m samples of instances[0]; Track 2 scores
// tour (i, j) on sample j of instance i.
ScoreReport final_score(const Submission& submission, std::span<const Instance> instances, int m,
                        std::uint64_t base_seed, int jobs = 1);

// One tour per line, space-separated 1-based node ids. `m` is the number of
// samples per instance (ignored for Track 1). Blank lines and lines starting
// with '#' are skipped.
Submission parse_submission(std::istream& in, int track, std::span<const Instance> instances, int m);
Submission parse_submission(const std::filesystem::path& path, int track, std::span<const Instance> instances,
                            int m);
void write_submission(const Submission& submission, std::ostream& out);
void write_tour_line(std::span<const int> tour, std::ostream& out);

void write_score_csv(const ScoreReport& report, std::ostream& out);

struct TeamScore {
  std::string team;
  double score = 0.0;
};

struct RankedTeam {
  int rank = 0;
  std::string team;
  double score = 0.0;
};

// Descending by score; exact ties share a rank and the next rank skips.
// Input order is kept among ties.
std::vector<RankedTeam> rank_teams(std::vector<TeamScore> teams);
void write_leaderboard(std::span<const RankedTeam> board, std::ostream& out);

struct OracleResult {
  Tour tour;
  Cents total = 0;         // summed over all samples
  int fidelity = 0;
  std::size_t enumerated = 0;

  double mean() const { return cents_to_double(total) / fidelity; }
};

inline constexpr int kOracleMaxNodes = 9;

// Number of distinct effective prefixes for an n-node instance.
std::size_t count_effective_prefixes(int n);

// Exhaustive search over every effective prefix under common random numbers:
// sample j of every candidate uses derive_sample_stream(base_seed,
// instance_id, j), the same streams evaluate_monte_carlo uses. Ties keep the
// first prefix in enumeration order (shorter and lexicographically smaller
// first along each branch).
OracleResult brute_force_best_tour(const Instance& instance, int fidelity, std::uint64_t base_seed,
                                   std::uint64_t instance_id = 0, int jobs = 1);

}  // namespace tdop
