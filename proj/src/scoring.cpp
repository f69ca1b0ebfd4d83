#include "tdop/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "tdop/errors.hpp"
#include "tdop/parallel.hpp"

namespace tdop {

double ScoreReport::mean() const {
  const auto count = static_cast<double>(alphas.size());
  return count > 0 ? cents_to_double(total) / count : 0.0;
}

Cents tour_score(const Instance& instance, std::span<const int> tour, const Scenario& scenario) {
  return check_solution(instance, tour, scenario).total_reward;
}

namespace {

// Sums scores of `tour` on samples [0, m) of `instance_id` into alphas[offset..].
void score_samples(const Instance& instance, std::span<const int> tour, int m, std::uint64_t base_seed,
                   std::uint64_t instance_id, std::span<Cents> alphas, int jobs) {
  validate_tour(instance, tour);
  const auto prefix = effective_prefix(tour);
  const auto route = prefix.subspan(1, prefix.size() - 2);
  parallel_for(static_cast<std::size_t>(m), jobs, [&](std::size_t j) {
    const auto scenario = Scenario::sampled(derive_sample_stream(base_seed, instance_id, j));
    alphas[j] = simulate_route(instance, route, scenario).reward;
  });
}

}  // namespace

ScoreReport evaluate_monte_carlo(const Instance& instance, std::span<const int> tour, int m,
                                 std::uint64_t base_seed, std::uint64_t instance_id, int jobs) {
  if (m < 1) throw InvalidInput("sample count must be at least 1");
  ScoreReport report;
  report.instances = 1;
  report.samples = m;
  report.alphas.assign(static_cast<std::size_t>(m), 0);
  score_samples(instance, tour, m, base_seed, instance_id, report.alphas, jobs);
  for (auto a : report.alphas) report.total += a;
  return report;
}

ScoreReport final_score(const Submission& submission, std::span<const Instance> instances, int m,
                        std::uint64_t base_seed, int jobs) {
  if (m < 1) throw InvalidInput("sample count must be at least 1");
  if (instances.empty()) throw InvalidInput("no instances to score");
  ScoreReport report;
  report.samples = m;
  if (submission.track == 1) {
    if (submission.tours.size() != 1) throw InvalidInput("Track 1 submissions hold exactly one tour");
    report = evaluate_monte_carlo(instances.front(), submission.tours.front(), m, base_seed, 0, jobs);
    return report;
  }
  if (submission.track != 2) throw InvalidInput("track must be 1 or 2");
  const auto per_instance = static_cast<std::size_t>(m);
  if (submission.tours.size() != instances.size() * per_instance) {
    throw InvalidInput("Track 2 submission must hold one tour per instance and sample");
  }
  report.instances = static_cast<int>(instances.size());
  report.alphas.assign(submission.tours.size(), 0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t j = 0; j < per_instance; ++j) validate_tour(instances[i], submission.tours[i * per_instance + j]);
  }
  parallel_for(submission.tours.size(), jobs, [&](std::size_t k) {
    const std::size_t i = k / per_instance;
    const std::size_t j = k % per_instance;
    const auto prefix = effective_prefix(submission.tours[k]);
    const auto scenario = Scenario::sampled(derive_sample_stream(base_seed, i, j));
    report.alphas[k] = simulate_route(instances[i], prefix.subspan(1, prefix.size() - 2), scenario).reward;
  });
  for (auto a : report.alphas) report.total += a;
  return report;
}

Submission parse_submission(std::istream& in, int track, std::span<const Instance> instances, int m) {
  if (track != 1 && track != 2) throw InvalidInput("track must be 1 or 2");
  if (instances.empty()) throw InvalidInput("no instances given");
  Submission sub;
  sub.track = track;
  sub.samples = track == 1 ? 1 : m;
  const std::size_t expected = track == 1 ? 1 : instances.size() * static_cast<std::size_t>(m);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (sub.tours.size() == expected) {
      throw ValidationError(line_no, "unexpected extra tour (expected " + std::to_string(expected) + ")");
    }
    const std::size_t index = sub.tours.size();
    const auto& inst = instances[track == 1 ? 0 : index / static_cast<std::size_t>(m)];
    std::istringstream ss(line);
    std::string tok;
    Tour tour;
    while (ss >> tok) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ValidationError(line_no, "non-integer node '" + tok + "'");
      }
      tour.push_back(v - 1);
    }
    if (tour.size() != static_cast<std::size_t>(inst.n) + 1) {
      throw ValidationError(line_no, "tour length " + std::to_string(tour.size()) + ", expected " +
                                         std::to_string(inst.n + 1));
    }
    if (tour.front() != kDepot) throw ValidationError(line_no, "tour must start at node 1");
    std::vector<bool> seen(static_cast<std::size_t>(inst.n), false);
    for (std::size_t k = 1; k < tour.size(); ++k) {
      const int v = tour[k];
      if (v < 0 || v >= inst.n) throw ValidationError(line_no, "node " + std::to_string(v + 1) + " out of range");
      if (seen[static_cast<std::size_t>(v)]) {
        throw ValidationError(line_no, "node " + std::to_string(v + 1) + " repeated; not a permutation");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
    sub.tours.push_back(std::move(tour));
  }
  if (sub.tours.size() != expected) {
    const auto missing = sub.tours.size();
    std::string where;
    if (track == 2) {
      where = " (first missing: instance " + std::to_string(missing / static_cast<std::size_t>(m)) + ", sample " +
              std::to_string(missing % static_cast<std::size_t>(m)) + ")";
    }
    throw ValidationError(line_no + 1, "expected " + std::to_string(expected) + " tours, found " +
                                           std::to_string(sub.tours.size()) + where);
  }
  return sub;
}

Submission parse_submission(const std::filesystem::path& path, int track, std::span<const Instance> instances,
                            int m) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open submission " + path.string());
  return parse_submission(in, track, instances, m);
}

void write_tour_line(std::span<const int> tour, std::ostream& out) {
  for (std::size_t k = 0; k < tour.size(); ++k) out << (k ? " " : "") << tour[k] + 1;
  out << '\n';
}

void write_submission(const Submission& submission, std::ostream& out) {
  for (const auto& t : submission.tours) write_tour_line(t, out);
}

void write_score_csv(const ScoreReport& report, std::ostream& out) {
  out << "instance_id,sample_id,alpha\n";
  const auto m = static_cast<std::size_t>(report.samples);
  for (std::size_t k = 0; k < report.alphas.size(); ++k) {
    out << k / m << ',' << k % m << ',' << format_hundredths(report.alphas[k]) << '\n';
  }
}

std::vector<RankedTeam> rank_teams(std::vector<TeamScore> teams) {
  std::stable_sort(teams.begin(), teams.end(), [](const TeamScore& a, const TeamScore& b) { return a.score > b.score; });
  std::vector<RankedTeam> board;
  board.reserve(teams.size());
  for (std::size_t k = 0; k < teams.size(); ++k) {
    const int rank = (k > 0 && teams[k].score == teams[k - 1].score) ? board.back().rank : static_cast<int>(k) + 1;
    board.push_back({rank, std::move(teams[k].team), teams[k].score});
  }
  return board;
}

void write_leaderboard(std::span<const RankedTeam> board, std::ostream& out) {
  std::size_t width = 4;
  for (const auto& r : board) width = std::max(width, r.team.size());
  out << std::left << std::setw(6) << "RANK" << std::setw(static_cast<int>(width) + 2) << "TEAM"
      << "SCORE\n";
  for (const auto& r : board) {
    out << std::left << std::setw(6) << r.rank << std::setw(static_cast<int>(width) + 2) << r.team
        << format_double(r.score) << '\n';
  }
}

std::size_t count_effective_prefixes(int n) {
  // sum over k of (n-1)! / (n-1-k)!
  std::size_t total = 0;
  std::size_t perms = 1;
  for (int k = 0; k <= n - 1; ++k) {
    total += perms;
    perms *= static_cast<std::size_t>(n - 1 - k);
  }
  return total;
}

namespace {

struct PrefixNode {
  int parent = -1;
  int node = kDepot;
};

// Depth-first enumeration of all effective prefixes, carrying per-sample
// state so that each extension costs one leg per sample.
class PrefixEnumerator {
 public:
  PrefixEnumerator(const Instance& inst, std::span<const Scenario> scenarios, std::vector<Cents>& sums,
                   std::vector<PrefixNode>* tree)
      : inst_(inst), scenarios_(scenarios), sums_(sums), tree_(tree) {
    const auto n = static_cast<std::size_t>(inst.n);
    const auto s = scenarios.size();
    time_.assign(n, std::vector<Ticks>(s, 0));
    reward_.assign(n, std::vector<Cents>(s, 0));
    stopped_.assign(n, std::vector<char>(s, 0));
    used_.assign(n, false);
    used_[kDepot] = true;
  }

  void run() { visit(0, kDepot, -1); }

 private:
  void visit(std::size_t depth, int current, int parent_index) {
    const int index = static_cast<int>(counter_++);
    if (tree_) tree_->push_back({parent_index, current});
    const auto& time = time_[depth];
    const auto& reward = reward_[depth];
    const auto& stopped = stopped_[depth];
    Cents sum = 0;
    for (std::size_t j = 0; j < scenarios_.size(); ++j) {
      Cents r = reward[j];
      if (!stopped[j]) {
        const auto a = resolve_arrival(inst_, kDepot, time[j] + travel_time(inst_, current, kDepot, scenarios_[j]));
        r += a.penalty;
      }
      sum += r;
    }
    sums_[static_cast<std::size_t>(index)] += sum;
    for (int v = 1; v < inst_.n; ++v) {
      if (used_[static_cast<std::size_t>(v)]) continue;
      auto& nt = time_[depth + 1];
      auto& nr = reward_[depth + 1];
      auto& ns = stopped_[depth + 1];
      for (std::size_t j = 0; j < scenarios_.size(); ++j) {
        if (stopped[j]) {
          nt[j] = time[j];
          nr[j] = reward[j];
          ns[j] = 1;
          continue;
        }
        const auto a = resolve_arrival(inst_, v, time[j] + travel_time(inst_, current, v, scenarios_[j]));
        nt[j] = a.departure;
        nr[j] = reward[j] + a.reward + a.penalty;
        ns[j] = a.budget_violation ? 1 : 0;
      }
      used_[static_cast<std::size_t>(v)] = true;
      visit(depth + 1, v, index);
      used_[static_cast<std::size_t>(v)] = false;
    }
  }

  const Instance& inst_;
  std::span<const Scenario> scenarios_;
  std::vector<Cents>& sums_;
  std::vector<PrefixNode>* tree_;
  std::vector<std::vector<Ticks>> time_;
  std::vector<std::vector<Cents>> reward_;
  std::vector<std::vector<char>> stopped_;
  std::vector<bool> used_;
  std::size_t counter_ = 0;
};

}  // namespace

OracleResult brute_force_best_tour(const Instance& instance, int fidelity, std::uint64_t base_seed,
                                   std::uint64_t instance_id, int jobs) {
  if (instance.n < 2 || instance.n > kOracleMaxNodes) {
    throw InvalidInput("brute force oracle supports 2.." + std::to_string(kOracleMaxNodes) + " nodes");
  }
  if (fidelity < 1) throw InvalidInput("fidelity must be at least 1");
  const std::size_t prefixes = count_effective_prefixes(instance.n);
  const int chunks = std::max(1, std::min(jobs, fidelity));
  std::vector<std::vector<Cents>> partial(static_cast<std::size_t>(chunks), std::vector<Cents>(prefixes, 0));
  std::vector<PrefixNode> tree;
  tree.reserve(prefixes);
  parallel_for(static_cast<std::size_t>(chunks), jobs, [&](std::size_t c) {
    const auto begin = static_cast<std::size_t>(fidelity) * c / static_cast<std::size_t>(chunks);
    const auto end = static_cast<std::size_t>(fidelity) * (c + 1) / static_cast<std::size_t>(chunks);
    std::vector<Scenario> scenarios;
    scenarios.reserve(end - begin);
    for (auto j = begin; j < end; ++j) scenarios.push_back(Scenario::sampled(derive_sample_stream(base_seed, instance_id, j)));
    PrefixEnumerator e(instance, scenarios, partial[c], c == 0 ? &tree : nullptr);
    e.run();
  });
  std::vector<Cents> sums(prefixes, 0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < prefixes; ++k) sums[k] += p[k];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < prefixes; ++k) {
    if (sums[k] > sums[best]) best = k;
  }
  std::vector<int> route;
  for (int k = static_cast<int>(best); k > 0; k = tree[static_cast<std::size_t>(k)].parent) {
    route.push_back(tree[static_cast<std::size_t>(k)].node);
  }
  std::reverse(route.begin(), route.end());
  OracleResult out;
  out.tour = tour_from_route(instance.n, route);
  out.total = sums[best];
  out.fidelity = fidelity;
  out.enumerated = prefixes;
  return out;
}

}  // namespace tdop
