#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tdop/ea/solver.hpp"
#include "tdop/errors.hpp"
#include "tdop/instance.hpp"
#include "tdop/iterative.hpp"
#include "tdop/policy.hpp"
#include "tdop/scoring.hpp"
#include "tdop/units.hpp"

namespace tdop::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) throw InvalidInput("config " + key + ": not an integer: " + v);
  return x;
}

}  // namespace

void RunConfig::load(std::istream& in) {
  std::string line;
  bool output_file = false;  // a previous run's output: only its header counts
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.rfind("# command ", 0) == 0) output_file = true;
    if (t.rfind("# config ", 0) == 0) {
      t = trim(t.substr(9));
    } else if (output_file || t.empty() || t[0] == '#') {
      continue;
    }
    set_assignment(t);
  }
}

void RunConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  load(in);
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[trim(key)] = trim(value); }

void RunConfig::set_assignment(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || trim(kv.substr(0, eq)).empty()) throw InvalidInput("expected key = value: " + kv);
  set(kv.substr(0, eq), kv.substr(eq + 1));
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) {
  read_.insert(key);
  return values_.try_emplace(key, fallback).first->second;
}

int RunConfig::get_int(const std::string& key, int fallback) {
  return parse_integer<int>(key, get(key, std::to_string(fallback)));
}

long long RunConfig::get_long(const std::string& key, long long fallback) {
  return parse_integer<long long>(key, get(key, std::to_string(fallback)));
}

std::uint64_t RunConfig::get_seed(const std::string& key, std::uint64_t fallback) {
  return parse_integer<std::uint64_t>(key, get(key, std::to_string(fallback)));
}

double RunConfig::get_double(const std::string& key, double fallback) {
  const auto v = get(key, format_double(fallback));
  double x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) throw InvalidInput("config " + key + ": not a number: " + v);
  return x;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) {
  const auto v = get(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput("config " + key + ": not a boolean: " + v);
}

void RunConfig::check_consumed() const {
  for (const auto& [k, v] : values_) {
    if (!read_.contains(k)) throw InvalidInput("unknown config key: " + k);
  }
}

void RunConfig::write_header(std::ostream& out, const std::string& command) const {
  out << "# command " << command << '\n';
  for (const auto& [k, v] : values_) out << "# config " << k << " = " << v << '\n';
}

namespace {

// Output destinations never enter the header, so runs that differ only in
// where they write (or in --jobs) produce identical bytes.
struct Common {
  std::string config_file;
  std::vector<std::string> assignments;
  int jobs = 1;
  std::vector<std::pair<std::string, std::string>> flags;  // (key, value) sugar
};

struct Sink {
  std::ofstream file;
  std::ostream* stream;

  Sink(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw IoError("cannot write " + path);
      stream = &file;
    }
  }
  std::ostream& operator*() { return *stream; }
};

std::vector<fs::path> list_instances(RunConfig& cfg) {
  std::vector<fs::path> out;
  for (const auto& p : split(cfg.get("instance", ""), ',')) out.emplace_back(p);
  const auto dir = cfg.get("instance_dir", "");
  if (!dir.empty()) {
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    if (ec) throw IoError("cannot list " + dir);
    std::sort(files.begin(), files.end());
    out.insert(out.end(), files.begin(), files.end());
  }
  if (out.empty()) throw InvalidInput("no instance given (instance or instance_dir)");
  return out;
}

std::vector<Instance> load_instances(const std::vector<fs::path>& paths) {
  std::vector<Instance> out;
  for (const auto& p : paths) out.push_back(read_instance(p));
  return out;
}

int cmd_generate(RunConfig& cfg, const Common& c, const std::string& out_dir, std::ostream& out) {
  GeneratorParams base;
  const auto sizes = split(cfg.get("n", "20"), ',');
  base.window = cfg.get_int("window", base.window);
  base.x_limits.hi = cfg.get_int("x_max", base.x_limits.hi);
  base.y_limits.hi = cfg.get_int("y_max", base.y_limits.hi);
  const auto seed = cfg.get_seed("seed", 0);
  const int count = cfg.get_int("count", 1);
  cfg.check_consumed();
  (void)c;
  if (count < 1) throw InvalidInput("count must be positive");
  fs::create_directories(out_dir);
  for (const auto& s : sizes) {
    const int n = parse_integer<int>("n", s);
    for (int k = 0; k < count; ++k) {
      auto params = base;
      params.n = n;
      const auto inst = generate_instance(params, derive_seed(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)}));
      char name[64];
      std::snprintf(name, sizeof name, "n%03d_%04d.txt", n, k);
      const auto path = fs::path(out_dir) / name;
      std::ofstream f(path);
      if (!f) throw IoError("cannot write " + path.string());
      cfg.write_header(f, "generate");
      f << "# instance " << k << " of size " << n << '\n';
      write_instance(inst, f);
      out << path.string() << '\n';
    }
  }
  return kOk;
}

int cmd_evaluate(RunConfig& cfg, const Common& c, const std::string& csv, const std::string& trace, std::ostream& out) {
  const auto path = cfg.get("instance", "");
  const auto tour_path = cfg.get("tour", "");
  const int m = cfg.get_int("samples", kTrack1Samples);
  const auto seed = cfg.get_seed("seed", 0);
  const auto id = cfg.get_seed("instance_id", 0);
  const auto trace_sample = cfg.get_seed("trace_sample", 0);
  cfg.check_consumed();
  if (path.empty() || tour_path.empty()) throw InvalidInput("evaluate needs instance and tour");
  const std::vector<Instance> inst{read_instance(fs::path(path))};
  const auto sub = parse_submission(fs::path(tour_path), 1, inst, 1);
  const auto& tour = sub.tours.front();
  const auto rep = evaluate_monte_carlo(inst[0], tour, m, seed, id, c.jobs);
  cfg.write_header(out, "evaluate");
  out << "mean " << format_double(rep.mean()) << '\n' << "total " << format_hundredths(rep.total) << '\n';
  if (!csv.empty()) {
    Sink s(csv, out);
    write_score_csv(rep, *s);
  }
  if (!trace.empty()) {
    Sink s(trace, out);
    write_trace(check_solution(inst[0], tour, Scenario::sampled(derive_sample_stream(seed, id, trace_sample))), *s);
  }
  return kOk;
}

ea::Filter parse_filter(const std::string& s) {
  if (s == "none") return ea::Filter::none;
  if (s == "classifier") return ea::Filter::classifier;
  if (s == "surrogate") return ea::Filter::surrogate;
  if (s == "combined") return ea::Filter::combined;
  throw InvalidInput("unknown phase filter: " + s);
}

std::string filter_name(ea::Filter f) {
  switch (f) {
    case ea::Filter::none: return "none";
    case ea::Filter::classifier: return "classifier";
    case ea::Filter::surrogate: return "surrogate";
    case ea::Filter::combined: return "combined";
  }
  return "none";
}

ea::EaConfig read_ea_config(RunConfig& cfg) {
  ea::EaConfig e;
  e.population = cfg.get_int("ea.population", e.population);
  e.offspring = cfg.get_int("ea.offspring", e.offspring);
  std::string phases;
  for (const auto& p : e.phases) {
    if (!phases.empty()) phases += ',';
    phases += std::to_string(p.fidelity) + ':' + std::to_string(p.budget) + ':' + filter_name(p.filter);
  }
  e.phases.clear();
  for (const auto& item : split(cfg.get("ea.phases", phases), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw InvalidInput("ea.phases entries are fidelity:budget:filter");
    e.phases.push_back({parse_integer<int>("ea.phases", parts[0]), parse_integer<int>("ea.phases", parts[1]),
                        parse_filter(parts[2])});
  }
  e.reduce_repeats = cfg.get_int("ea.reduce_repeats", e.reduce_repeats);
  e.reduce_threshold = cfg.get_double("ea.reduce_threshold", e.reduce_threshold);
  e.veto_probability = cfg.get_double("ea.veto_probability", e.veto_probability);
  e.veto_attempts = cfg.get_int("ea.veto_attempts", e.veto_attempts);
  e.keep_fraction = cfg.get_double("ea.keep_fraction", e.keep_fraction);
  e.refit_every = cfg.get_int("ea.refit_every", e.refit_every);
  e.final_top = cfg.get_int("ea.final_top", e.final_top);
  e.final_fidelity = cfg.get_int("ea.final_fidelity", e.final_fidelity);
  e.final_min_fidelity = cfg.get_int("ea.final_min_fidelity", e.final_min_fidelity);
  e.strategy.op_mutation_probability = cfg.get_double("ea.op_mutation_probability", e.strategy.op_mutation_probability);
  e.strategy.rate_min = cfg.get_double("ea.rate_min", e.strategy.rate_min);
  e.strategy.rate_max = cfg.get_double("ea.rate_max", e.strategy.rate_max);
  e.strategy.learning_rate = cfg.get_double("ea.learning_rate", e.strategy.learning_rate);
  e.strategy.min_route_length = cfg.get_int("ea.min_route_length", e.strategy.min_route_length);
  e.classifier.rounds = cfg.get_int("ea.gbdt_rounds", e.classifier.rounds);
  e.classifier.max_depth = cfg.get_int("ea.gbdt_depth", e.classifier.max_depth);
  e.classifier.learning_rate = cfg.get_double("ea.gbdt_learning_rate", e.classifier.learning_rate);
  e.surrogate.cluster_cap = static_cast<std::size_t>(cfg.get_int("ea.cluster_cap", static_cast<int>(e.surrogate.cluster_cap)));
  e.surrogate.max_points = static_cast<std::size_t>(cfg.get_int("ea.surrogate_points", static_cast<int>(e.surrogate.max_points)));
  return e;
}

iter::IterConfig read_iter_config(RunConfig& cfg) {
  iter::IterConfig c;
  c.max_iterations = cfg.get_int("iter.max_iterations", c.max_iterations);
  c.samples = cfg.get_int("iter.samples", c.samples);
  c.feasibility_threshold = cfg.get_double("iter.feasibility_threshold", c.feasibility_threshold);
  c.gap_threshold = cfg.get_double("iter.gap_threshold", c.gap_threshold);
  c.limits.max_expansions = static_cast<std::size_t>(cfg.get_long("iter.max_expansions", static_cast<long long>(c.limits.max_expansions)));
  return c;
}

iter::GaConfig read_ga_config(RunConfig& cfg) {
  iter::GaConfig g;
  g.population = cfg.get_int("ga.population", g.population);
  g.generations = cfg.get_int("ga.generations", g.generations);
  g.samples = cfg.get_int("ga.samples", g.samples);
  g.parents = cfg.get_int("ga.parents", g.parents);
  g.elites = cfg.get_int("ga.elites", g.elites);
  g.tournament = cfg.get_int("ga.tournament", g.tournament);
  g.final_top = cfg.get_int("ga.final_top", g.final_top);
  g.final_fidelity = cfg.get_int("ga.final_fidelity", g.final_fidelity);
  g.random_fill = cfg.get_bool("ga.random_fill", g.random_fill);
  return g;
}

policy::RolloutConfig read_policy_config(RunConfig& cfg, int jobs) {
  policy::RolloutConfig r;
  r.top_k = cfg.get_int("policy.top_k", r.top_k);
  r.rollouts = cfg.get_int("policy.rollouts", r.rollouts);
  r.prior.strict_mask = cfg.get_bool("policy.strict_mask", r.prior.strict_mask);
  r.prior.epsilon = cfg.get_double("policy.epsilon", r.prior.epsilon);
  r.prior.depot_weight = cfg.get_double("policy.depot_weight", r.prior.depot_weight);
  r.prior.temperature = cfg.get_double("policy.temperature", r.prior.temperature);
  r.jobs = jobs;
  return r;
}

struct Solved {
  std::vector<Tour> tours;
  double mean = 0.0;
  bool exhausted = false;
};

int cmd_solve(RunConfig& cfg, const Common& c, const std::string& out_path, const std::string& log_path,
              std::ostream& out) {
  const auto paths = list_instances(cfg);
  const auto solver = cfg.get("solver", "ea");
  const auto seed = cfg.get_seed("seed", 0);
  const std::vector<std::string> known{"ea", "iterative", "policy-greedy", "policy-rollout", "random", "oracle"};
  if (std::find(known.begin(), known.end(), solver) == known.end()) throw InvalidInput("unknown solver: " + solver);

  ea::EaConfig ea_cfg;
  iter::IterConfig iter_cfg;
  iter::GaConfig ga_cfg;
  int ga_seeds = 0;
  ea::RandomSearchConfig rs_cfg;
  policy::RolloutConfig pol_cfg;
  int samples = 1;
  int oracle_fidelity = 0;
  if (solver == "ea") ea_cfg = read_ea_config(cfg);
  if (solver == "iterative") {
    iter_cfg = read_iter_config(cfg);
    ga_cfg = read_ga_config(cfg);
    ga_seeds = cfg.get_int("ga.seeds", 14);
  }
  if (solver == "random") {
    rs_cfg.simulator_budget = static_cast<std::size_t>(cfg.get_long("random.simulator_budget", 10'000'000));
    rs_cfg.fidelity = cfg.get_int("random.fidelity", rs_cfg.fidelity);
    rs_cfg.final_top = cfg.get_int("random.final_top", rs_cfg.final_top);
    rs_cfg.final_fidelity = cfg.get_int("random.final_fidelity", rs_cfg.final_fidelity);
  }
  if (solver == "oracle") oracle_fidelity = cfg.get_int("oracle.fidelity", kTrack1Samples);
  const bool track2 = solver.rfind("policy-", 0) == 0;
  if (track2) {
    pol_cfg = read_policy_config(cfg, c.jobs);
    samples = cfg.get_int("samples", kTrack2Samples);
    if (samples < 1) throw InvalidInput("samples must be positive");
  }
  cfg.check_consumed();
  const auto instances = load_instances(paths);

  Sink sub(out_path, out);
  std::ostringstream log;
  cfg.write_header(*sub, "solve");
  if (!log_path.empty()) cfg.write_header(log, "solve");
  bool exhausted = false;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto id = static_cast<std::uint64_t>(i);
    Solved s;
    if (!log_path.empty()) log << "# instance " << paths[i].string() << '\n';
    if (solver == "ea") {
      const auto r = ea::solve(inst, ea_cfg, seed, id, c.jobs);
      s = {{r.tour}, r.mean, r.route.empty()};
      if (!log_path.empty()) ea::write_log(log, r.log);
    } else if (solver == "random") {
      const auto r = ea::random_search(inst, rs_cfg, seed, id, c.jobs);
      s = {{r.tour}, r.mean, r.route.empty()};
      if (!log_path.empty()) ea::write_log(log, r.log);
    } else if (solver == "iterative") {
      const auto r = iter::iterative_search(inst, iter_cfg, seed, id, c.jobs);
      std::vector<iter::Route> seeds{r.route};
      for (const auto& st : r.stored) {
        if (static_cast<int>(seeds.size()) > ga_seeds) break;
        if (st.route != r.route) seeds.push_back(st.route);
      }
      const auto g = iter::ga_improve(inst, seeds, ga_cfg, seed, id, c.jobs);
      s = {{g.tour}, g.mean, g.route.empty()};
      if (!log_path.empty()) iter::write_iter_log(log, r.log);
    } else if (solver == "oracle") {
      const auto r = brute_force_best_tour(inst, oracle_fidelity, seed, id, c.jobs);
      s = {{r.tour}, r.mean(), effective_prefix(r.tour).size() <= 2};
    } else {
      const auto select = solver == "policy-greedy" ? policy::greedy_selector(pol_cfg.prior) : policy::Selector{};
      Cents total = 0;
      for (int j = 0; j < samples; ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        const auto sel = select ? select : policy::rollout_selector(pol_cfg, derive_seed(seed, {stream::rollout, id, ju}));
        const auto e = policy::run_policy(inst, sel, derive_sample_stream(seed, id, ju));
        s.tours.push_back(e.tour);
        total += e.reward;
      }
      s.mean = cents_to_double(total) / samples;
    }
    exhausted = exhausted || s.exhausted;
    *sub << "# instance " << paths[i].string() << " mean " << format_double(s.mean) << '\n';
    for (const auto& t : s.tours) write_tour_line(t, *sub);
  }
  if (!log_path.empty()) {
    Sink l(log_path, out);
    *l << log.str();
  }
  return exhausted ? kExhausted : kOk;
}

int cmd_score(RunConfig& cfg, const Common& c, const std::string& csv, std::ostream& out) {
  const int track = cfg.get_int("track", 1);
  if (track != 1 && track != 2) throw InvalidInput("track must be 1 or 2");
  const auto submission = cfg.get("submission", "");
  const auto paths = list_instances(cfg);
  const int m = cfg.get_int("samples", track == 1 ? kTrack1Samples : kTrack2Samples);
  const auto seed = cfg.get_seed("seed", 0);
  const auto team = cfg.get("team", "");
  cfg.check_consumed();
  if (submission.empty()) throw InvalidInput("score needs a submission");
  const auto instances = load_instances(paths);
  const auto sub = parse_submission(fs::path(submission), track, instances, m);
  const auto rep = final_score(sub, instances, m, seed, c.jobs);
  cfg.write_header(out, "score");
  out << (team.empty() ? "score" : team) << ' ' << format_double(rep.mean()) << '\n';
  if (!csv.empty()) {
    Sink s(csv, out);
    write_score_csv(rep, *s);
  }
  return kOk;
}

// Each non-comment line: team name, then score (last field).
int cmd_rank(const std::vector<std::string>& files, std::ostream& out) {
  if (files.empty()) throw InvalidInput("rank needs at least one score file");
  std::vector<TeamScore> teams;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw IoError("cannot open " + f);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto cut = t.find_last_of(" \t,");
      if (cut == std::string::npos) throw ParseError(no, "expected a team and a score");
      const auto name = trim(t.substr(0, cut));
      const auto value = t.substr(cut + 1);
      double score = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
      if (name.empty() || ec != std::errc{} || p != value.data() + value.size()) {
        throw ParseError(no, "expected a team and a score");
      }
      teams.push_back({name, score});
    }
  }
  write_leaderboard(rank_teams(std::move(teams)), out);
  return kOk;
}

int cmd_oracle(RunConfig& cfg, const Common& c, std::ostream& out) {
  const auto path = cfg.get("instance", "");
  const int fidelity = cfg.get_int("fidelity", kTrack1Samples);
  const auto seed = cfg.get_seed("seed", 0);
  const auto id = cfg.get_seed("instance_id", 0);
  cfg.check_consumed();
  if (path.empty()) throw InvalidInput("oracle needs an instance");
  const auto inst = read_instance(fs::path(path));
  const auto r = brute_force_best_tour(inst, fidelity, seed, id, c.jobs);
  cfg.write_header(out, "oracle");
  out << "# mean " << format_double(r.mean()) << " enumerated " << r.enumerated << '\n';
  write_tour_line(r.tour, out);
  return kOk;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "key = value config file (or a previous output header)");
  app->add_option("--set", c.assignments, "override, key=value")->take_all();
  app->add_option("--jobs", c.jobs, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
}

// --flag VALUE as sugar for --set key=VALUE
void add_key(CLI::App* app, Common& c, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&c, key](const std::string& v) { c.flags.emplace_back(key, v); }, help);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_file.empty()) cfg.load_file(c.config_file);
  for (const auto& [k, v] : c.flags) cfg.set(k, v);
  for (const auto& a : c.assignments) cfg.set_assignment(a);
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic orienteering benchmark harness", "tdop"};
  app.require_subcommand(1);

  Common gen_c, eval_c, solve_c, score_c, oracle_c;
  std::string out_dir = ".", eval_csv, eval_trace, solve_out, solve_log, score_csv;
  std::vector<std::string> rank_files;

  auto* gen = app.add_subcommand("generate", "write generated instances");
  add_common(gen, gen_c);
  add_key(gen, gen_c, "--n", "n", "comma-separated instance sizes");
  add_key(gen, gen_c, "--window", "window", "time-window width");
  add_key(gen, gen_c, "--seed", "seed", "root seed");
  add_key(gen, gen_c, "--count", "count", "instances per size");
  gen->add_option("--out-dir", out_dir, "output directory");

  auto* eval = app.add_subcommand("evaluate", "Monte-Carlo score of one tour");
  add_common(eval, eval_c);
  add_key(eval, eval_c, "--instance", "instance", "instance file");
  add_key(eval, eval_c, "--tour", "tour", "file holding one tour line");
  add_key(eval, eval_c, "--samples", "samples", "Monte-Carlo samples");
  add_key(eval, eval_c, "--seed", "seed", "root seed");
  add_key(eval, eval_c, "--instance-id", "instance_id", "instance index in the sample streams");
  eval->add_option("--csv", eval_csv, "per-sample CSV output");
  eval->add_option("--trace", eval_trace, "per-node trace CSV of one sample");

  auto* solve = app.add_subcommand("solve", "solve instances");
  add_common(solve, solve_c);
  add_key(solve, solve_c, "--instance", "instance", "comma-separated instance files");
  add_key(solve, solve_c, "--instance-dir", "instance_dir", "directory of instance files");
  add_key(solve, solve_c, "--solver", "solver", "ea | iterative | policy-greedy | policy-rollout | random | oracle");
  add_key(solve, solve_c, "--seed", "seed", "root seed");
  add_key(solve, solve_c, "--samples", "samples", "tours per instance for the policy solvers");
  solve->add_option("--out", solve_out, "tour / submission output");
  solve->add_option("--log", solve_log, "solver log CSV");

  auto* score = app.add_subcommand("score", "final score of a submission");
  add_common(score, score_c);
  add_key(score, score_c, "--track", "track", "1 or 2");
  add_key(score, score_c, "--submission", "submission", "submission file");
  add_key(score, score_c, "--instance", "instance", "comma-separated instance files");
  add_key(score, score_c, "--instance-dir", "instance_dir", "directory of instance files");
  add_key(score, score_c, "--samples", "samples", "samples per instance");
  add_key(score, score_c, "--seed", "seed", "root seed");
  add_key(score, score_c, "--team", "team", "label for the score line");
  score->add_option("--csv", score_csv, "per-sample CSV output");

  auto* rank = app.add_subcommand("rank", "leaderboard from score files");
  rank->add_option("files", rank_files, "files of 'team score' lines")->required();

  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for small instances");
  add_common(oracle, oracle_c);
  add_key(oracle, oracle_c, "--instance", "instance", "instance file");
  add_key(oracle, oracle_c, "--fidelity", "fidelity", "samples per candidate");
  add_key(oracle, oracle_c, "--seed", "seed", "root seed");
  add_key(oracle, oracle_c, "--instance-id", "instance_id", "instance index in the sample streams");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (gen->parsed()) {
      auto cfg = resolve(gen_c);
      return cmd_generate(cfg, gen_c, out_dir, out);
    }
    if (eval->parsed()) {
      auto cfg = resolve(eval_c);
      return cmd_evaluate(cfg, eval_c, eval_csv, eval_trace, out);
    }
    if (solve->parsed()) {
      auto cfg = resolve(solve_c);
      return cmd_solve(cfg, solve_c, solve_out, solve_log, out);
    }
    if (score->parsed()) {
      auto cfg = resolve(score_c);
      return cmd_score(cfg, score_c, score_csv, out);
    }
    if (rank->parsed()) return cmd_rank(rank_files, out);
    if (oracle->parsed()) {
      auto cfg = resolve(oracle_c);
      return cmd_oracle(cfg, oracle_c, out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const DegenerateInstance& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace tdop::cli
