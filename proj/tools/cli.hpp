#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tdop::cli {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kExhausted = 3, kIo = 4 };

/// Key-value run configuration. Every value a command reads is recorded, so
/// the header written at the top of each output lists the full resolved
/// configuration, defaults included.
class RunConfig {
 public:
  // `key = value` lines; '#' starts a comment, except header lines of the
  // form `# config key = value`, which are read back as settings.
  void load_file(const std::filesystem::path& path);
  void load(std::istream& in);
  void set(const std::string& key, const std::string& value);
  void set_assignment(const std::string& key_eq_value);

  std::string get(const std::string& key, const std::string& fallback);
  int get_int(const std::string& key, int fallback);
  long long get_long(const std::string& key, long long fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
  bool has(const std::string& key) const { return values_.contains(key); }

  // Keys given but never read are typos; reject them.
  void check_consumed() const;
  void write_header(std::ostream& out, const std::string& command) const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> read_;
};

// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdop::cli
