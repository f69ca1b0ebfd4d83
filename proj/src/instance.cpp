#include "tdop/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "tdop/errors.hpp"

namespace tdop {

namespace {

// Nearest integer to sqrt(s), s >= 0. sqrt of an integer is never exactly
// k + 0.5, so there are no ties; the integer check guards against libm error.
int rounded_sqrt(std::int64_t s) {
  auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(s))));
  while (k > 0 && (2 * k - 1) * (2 * k - 1) > 4 * s) --k;
  while ((2 * k + 1) * (2 * k + 1) <= 4 * s) ++k;
  return static_cast<int>(k);
}

const char* const kHeader[] = {"CUSTNO", "XCOORD", "YCOORD", "TW_LOW", "TW_HIGH", "PRIZE", "MAX_T"};
constexpr std::size_t kColumns = std::size(kHeader);

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int parse_int_field(const std::string& tok, std::size_t line, const char* column) {
  int value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("non-numeric ") + column + " '" + tok + "'");
  }
  return value;
}

}  // namespace

Cents Instance::total_prize() const { return std::accumulate(prize.begin(), prize.end(), Cents{0}); }

bool is_allowed_window(int w) noexcept { return w == 20 || w == 40 || w == 60 || w == 80 || w == 100; }

DistanceMatrix compute_distance_matrix(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) throw InvalidInput("coordinate lists differ in length");
  if (x.size() < 2) throw InvalidInput("at least two nodes are required");
  const auto n = x.size();
  std::vector<int> d(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t dx = x[i] - x[j];
      const std::int64_t dy = y[i] - y[j];
      const int v = rounded_sqrt(dx * dx + dy * dy);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return DistanceMatrix(static_cast<int>(n), std::move(d));
}

ConstructionTour second_nearest_neighbor_tour(const DistanceMatrix& dist) {
  const int n = dist.size();
  ConstructionTour tour;
  tour.order.reserve(static_cast<std::size_t>(n));
  tour.visit_time.reserve(static_cast<std::size_t>(n));
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  int current = kDepot;
  int elapsed = 0;
  visited[kDepot] = true;
  tour.order.push_back(kDepot);
  tour.visit_time.push_back(0);
  std::vector<int> candidates;
  for (int step = 1; step < n; ++step) {
    candidates.clear();
    for (int j = 0; j < n; ++j) {
      if (!visited[static_cast<std::size_t>(j)]) candidates.push_back(j);
    }
    const auto by_distance = [&](int a, int b) {
      const int da = dist(current, a);
      const int db = dist(current, b);
      return da != db ? da < db : a < b;
    };
    const std::size_t pick = candidates.size() >= 2 ? 1 : 0;
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(pick),
                     candidates.end(), by_distance);
    const int next = candidates[pick];
    elapsed += dist(current, next);
    visited[static_cast<std::size_t>(next)] = true;
    tour.order.push_back(next);
    tour.visit_time.push_back(elapsed);
    current = next;
  }
  tour.closing_time = elapsed + dist(current, kDepot);
  return tour;
}

int nearest_neighbor_cost(const DistanceMatrix& dist) {
  const int n = dist.size();
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  visited[kDepot] = true;
  int current = kDepot;
  int cost = 0;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (visited[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || dist(current, j) < dist(current, best)) best = j;
    }
    cost += dist(current, best);
    visited[static_cast<std::size_t>(best)] = true;
    current = best;
  }
  return cost + dist(current, kDepot);
}

TimeWindows generate_time_windows(std::span<const int> x, std::span<const int> y, int w, Rng& rng) {
  if (!is_allowed_window(w)) throw InvalidInput("window size must be one of 20, 40, 60, 80, 100");
  TimeWindows out;
  out.dist = compute_distance_matrix(x, y);
  const auto n = x.size();
  out.low.assign(n, 0);
  out.high.assign(n, 0);
  const auto tour = second_nearest_neighbor_tour(out.dist);
  // The depot stays open for the whole construction tour, return leg included.
  out.high[kDepot] = tour.closing_time + w;
  for (std::size_t j = 1; j < n; ++j) {
    const auto node = static_cast<std::size_t>(tour.order[j]);
    const int t = tour.visit_time[j];
    out.low[node] = static_cast<int>(rng.uniform_int(std::max(0, t - w), t));
    out.high[node] = static_cast<int>(rng.uniform_int(std::max(0, t), t + w));
  }
  return out;
}

std::vector<Cents> compute_prizes(const DistanceMatrix& dist) {
  const int n = dist.size();
  int far = 0;
  for (int j = 0; j < n; ++j) far = std::max(far, dist(kDepot, j));
  if (far == 0) throw DegenerateInstance("all nodes coincide with the depot");
  std::vector<Cents> prize(static_cast<std::size_t>(n), 0);
  for (int i = 1; i < n; ++i) {
    prize[static_cast<std::size_t>(i)] = 1 + (99 * static_cast<Cents>(dist(kDepot, i))) / far;
  }
  return prize;
}

BudgetBounds budget_bounds(const DistanceMatrix& dist) {
  int far = 0;
  for (int j = 0; j < dist.size(); ++j) far = std::max(far, dist(kDepot, j));
  const int t_min = 2 * far;
  const int nn = nearest_neighbor_cost(dist);
  return {t_min, std::max(2 * t_min, (nn + 1) / 2)};
}

PrizesAndBudget generate_prizes_and_budget(const DistanceMatrix& dist, Rng& rng) {
  PrizesAndBudget out;
  out.prize = compute_prizes(dist);
  const auto bounds = budget_bounds(dist);
  out.max_time = static_cast<int>(rng.uniform_int(bounds.min, bounds.max));
  return out;
}

Instance generate_instance(const GeneratorParams& params, std::uint64_t seed) {
  if (params.n < 2) throw InvalidInput("instance needs at least two nodes");
  if (params.x_limits.lo > params.x_limits.hi || params.y_limits.lo > params.y_limits.hi) {
    throw InvalidInput("coordinate limits are empty");
  }
  if (!is_allowed_window(params.window)) throw InvalidInput("window size must be one of 20, 40, 60, 80, 100");

  Instance inst;
  inst.n = params.n;
  Rng coord_rng(derive_seed(seed, {stream::coordinates}));
  inst.x.resize(static_cast<std::size_t>(params.n));
  inst.y.resize(static_cast<std::size_t>(params.n));
  for (int i = 0; i < params.n; ++i) {
    inst.x[static_cast<std::size_t>(i)] =
        static_cast<int>(coord_rng.uniform_int(params.x_limits.lo, params.x_limits.hi));
    inst.y[static_cast<std::size_t>(i)] =
        static_cast<int>(coord_rng.uniform_int(params.y_limits.lo, params.y_limits.hi));
  }

  Rng window_rng(derive_seed(seed, {stream::windows}));
  auto windows = generate_time_windows(inst.x, inst.y, params.window, window_rng);
  inst.tw_low = std::move(windows.low);
  inst.tw_high = std::move(windows.high);
  inst.dist = std::move(windows.dist);

  Rng budget_rng(derive_seed(seed, {stream::budget}));
  auto prizes = generate_prizes_and_budget(inst.dist, budget_rng);
  inst.prize = std::move(prizes.prize);
  inst.max_time = prizes.max_time;
  return inst;
}

Instance read_instance(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::map<int, std::vector<std::string>> rows;
  std::map<int, std::size_t> row_line;
  int first_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (!have_header) {
      if (fields.size() != kColumns || !std::equal(fields.begin(), fields.end(), std::begin(kHeader))) {
        throw ParseError(line_no, "expected header 'CUSTNO XCOORD YCOORD TW_LOW TW_HIGH PRIZE MAX_T'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != kColumns) {
      throw ParseError(line_no, "expected " + std::to_string(kColumns) + " columns, found " +
                                    std::to_string(fields.size()));
    }
    const int id = parse_int_field(fields[0], line_no, "CUSTNO");
    if (rows.contains(id)) throw ParseError(line_no, "duplicate CUSTNO " + std::to_string(id));
    if (first_id < 0) first_id = id;
    rows.emplace(id, fields);
    row_line.emplace(id, line_no);
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw ParseError(line_no, "instance needs at least two nodes");
  if (first_id != 1) throw ParseError(row_line.begin()->second, "depot (CUSTNO 1) must be the first row");
  if (rows.begin()->first != 1 || rows.rbegin()->first != n) {
    throw ParseError(line_no, "CUSTNO values must be exactly 1.." + std::to_string(n));
  }

  Instance inst;
  inst.n = n;
  inst.x.resize(static_cast<std::size_t>(n));
  inst.y.resize(static_cast<std::size_t>(n));
  inst.tw_low.resize(static_cast<std::size_t>(n));
  inst.tw_high.resize(static_cast<std::size_t>(n));
  inst.prize.resize(static_cast<std::size_t>(n));
  bool have_budget = false;
  for (const auto& [id, f] : rows) {
    const auto ln = row_line[id];
    const auto i = static_cast<std::size_t>(id - 1);
    inst.x[i] = parse_int_field(f[1], ln, "XCOORD");
    inst.y[i] = parse_int_field(f[2], ln, "YCOORD");
    inst.tw_low[i] = parse_int_field(f[3], ln, "TW_LOW");
    inst.tw_high[i] = parse_int_field(f[4], ln, "TW_HIGH");
    const auto prize = parse_hundredths(f[5]);
    if (!prize || *prize < 0) throw ParseError(ln, "PRIZE must be a non-negative decimal with at most two digits");
    inst.prize[i] = *prize;
    const int t = parse_int_field(f[6], ln, "MAX_T");
    if (have_budget && t != inst.max_time) throw ParseError(ln, "MAX_T differs between rows");
    inst.max_time = t;
    have_budget = true;
  }
  inst.dist = compute_distance_matrix(inst.x, inst.y);
  return inst;
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file " + path.string());
  return read_instance(in);
}

void write_instance(const Instance& instance, std::ostream& out) {
  for (std::size_t c = 0; c < kColumns; ++c) out << (c ? " " : "") << kHeader[c];
  out << '\n';
  for (int i = 0; i < instance.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << i + 1 << ' ' << instance.x[k] << ' ' << instance.y[k] << ' ' << instance.tw_low[k] << ' '
        << instance.tw_high[k] << ' ' << format_hundredths(instance.prize[k]) << ' ' << instance.max_time
        << '\n';
  }
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write instance file " + path.string());
  write_instance(instance, out);
}

}  // namespace tdop
