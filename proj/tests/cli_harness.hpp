#pragma once

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace tdop::test {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tdop_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Small solver settings so a full command sweep stays in seconds.
inline std::vector<std::string> quick_solver_args(const std::string& solver) {
  if (solver == "ea") {
    return {"--set", "ea.phases=1:400:none,10:400:none,100:200:classifier,100:200:surrogate,100:200:combined",
            "--set", "ea.reduce_repeats=100", "--set", "ea.final_top=10", "--set", "ea.final_fidelity=500",
            "--set", "ea.population=10", "--set", "ea.offspring=20", "--set", "ea.surrogate_points=80"};
  }
  if (solver == "random") {
    return {"--set", "random.simulator_budget=30000", "--set", "random.final_top=5", "--set",
            "random.final_fidelity=1000"};
  }
  if (solver == "iterative") return {"--set", "iter.max_iterations=30", "--set", "ga.generations=2"};
  if (solver == "policy-rollout") return {"--samples", "3", "--set", "policy.rollouts=8"};
  if (solver == "policy-greedy") return {"--samples", "5"};
  if (solver == "oracle") return {"--set", "oracle.fidelity=300"};
  return {};
}

// Runs every command with --jobs 1 and --jobs 8 and compares all bytes
// written (stdout and files). Returns one line per mismatch or failure.
inline std::vector<std::string> jobs_invariance_failures(const std::filesystem::path& work) {
  std::vector<std::string> bad;
  namespace fs = std::filesystem;
  auto both = [&](const std::string& what, auto&& make_args, const std::vector<std::string>& files) {
    std::vector<std::string> outputs;
    for (const char* jobs : {"1", "8"}) {
      auto args = make_args(std::string(jobs));
      args.push_back("--jobs");
      args.push_back(jobs);
      const auto r = run_cli(args);
      if (r.code != 0) {
        bad.push_back(what + ": exit " + std::to_string(r.code) + " " + r.err);
        return;
      }
      std::string all = r.out;
      for (const auto& f : files) all += "\n@@" + f + "\n" + read_file(work / (f + "." + jobs));
      outputs.push_back(all);
    }
    if (outputs[0] != outputs[1]) bad.push_back(what + ": output differs between --jobs 1 and 8");
  };

  // generate: compare the written files, not the printed paths
  std::vector<std::string> gen_out;
  for (const char* jobs : {"1", "8"}) {
    const auto dir = work / (std::string("gen") + jobs);
    const auto r = run_cli({"generate", "--n", "6,20", "--count", "3", "--seed", "11", "--out-dir", dir.string(),
                            "--jobs", jobs});
    if (r.code != 0) {
      bad.push_back("generate: exit " + std::to_string(r.code));
      return bad;
    }
    std::string all;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.filename().string() + "\n" + read_file(f);
    gen_out.push_back(all);
  }
  if (gen_out[0] != gen_out[1]) bad.push_back("generate: files differ between --jobs 1 and 8");

  const auto small = (work / "gen1" / "n006_0000.txt").string();
  const auto big = (work / "gen1" / "n020_0000.txt").string();
  const auto big2 = (work / "gen1" / "n020_0001.txt").string();
  write_file(work / "tour.txt", "1 3 5 2 1 4 6\n");

  both("evaluate", [&](const std::string& j) {
    return std::vector<std::string>{"evaluate", "--instance", small, "--tour", (work / "tour.txt").string(),
                                    "--samples", "5000", "--seed", "3", "--csv", (work / ("eval.csv." + j)).string(),
                                    "--trace", (work / ("eval.trace." + j)).string()};
  }, {"eval.csv", "eval.trace"});

  for (const std::string solver : {"ea", "random", "iterative", "oracle", "policy-greedy", "policy-rollout"}) {
    const auto inst = solver == "oracle" ? small : (solver.rfind("policy", 0) == 0 ? big + "," + big2 : big);
    both("solve " + solver, [&](const std::string& j) {
      std::vector<std::string> a{"solve", "--instance", inst, "--solver", solver, "--seed", "5",
                                 "--out", (work / ("solve_" + solver + ".out." + j)).string()};
      if (solver != "oracle" && solver.rfind("policy", 0) != 0) {
        a.push_back("--log");
        a.push_back((work / ("solve_" + solver + ".log." + j)).string());
      }
      const auto extra = quick_solver_args(solver);
      a.insert(a.end(), extra.begin(), extra.end());
      return a;
    }, solver != "oracle" && solver.rfind("policy", 0) != 0
           ? std::vector<std::string>{"solve_" + solver + ".out", "solve_" + solver + ".log"}
           : std::vector<std::string>{"solve_" + solver + ".out"});
  }

  both("score track 1", [&](const std::string& j) {
    return std::vector<std::string>{"score", "--track", "1", "--instance", big, "--submission",
                                    (work / "solve_random.out.1").string(), "--seed", "9",
                                    "--csv", (work / ("score1.csv." + j)).string()};
  }, {"score1.csv"});
  both("score track 2", [&](const std::string& j) {
    return std::vector<std::string>{"score", "--track", "2", "--instance", big + "," + big2, "--samples", "3",
                                    "--submission", (work / "solve_policy-rollout.out.1").string(), "--seed", "5",
                                    "--csv", (work / ("score2.csv." + j)).string()};
  }, {"score2.csv"});
  both("oracle", [&](const std::string&) {
    return std::vector<std::string>{"oracle", "--instance", small, "--fidelity", "2000", "--seed", "2"};
  }, {});

  write_file(work / "teams.txt", "A 1.5\nB 2.5\nC 1.5\n");
  const auto r1 = run_cli({"rank", (work / "teams.txt").string()});
  const auto r2 = run_cli({"rank", (work / "teams.txt").string()});
  if (r1.code != 0 || r1.out != r2.out) bad.push_back("rank: not reproducible");
  return bad;
}

}  // namespace tdop::test
