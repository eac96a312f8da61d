#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "campana/geometry.hpp"
#include "campana/points.hpp"

namespace campana::cli {

/// Bad user input. `key` names the offending config key or flag.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string key, const std::string& msg)
      : std::runtime_error("config key '" + key + "': " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

/// "key = value" lines; '#' starts a comment; blank lines ignored.
KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::filesystem::path& file);
/// File values overridden by flag values.
KeyValues merge(const KeyValues& file, const KeyValues& flags);

struct RunConfig {
  std::string model = "p1";
  std::optional<std::filesystem::path> model_file;
  std::vector<Weight> weights;  // empty = model defaults
  int n = 0;                    // dimension for pn_hyperplane / blowup_pn
  PrimeSet S;
  Height height = Height::naive;
  Kind kind = Kind::campana;
  std::vector<double> grid;
  int threads = 1;
  std::uint64_t prime_bound = 100000;
  std::string output;  // empty = stdout
  std::string format = "csv";
};

/// Known keys: model, model_file, weights, n, S, height, kind, T, T_min, T_max,
/// per_decade, threads, prime_bound, output, format. Unknown keys are rejected
/// unless listed in `extra`.
RunConfig build_run_config(const KeyValues& kv, const std::vector<std::string>& extra = {});

OrbifoldModel load_model(const RunConfig& cfg);

/// Throws UsageError naming the key when (model, kind, height, grid) cannot run.
void validate_for_counting(const OrbifoldModel& model, const RunConfig& cfg);

std::vector<std::uint64_t> parse_primes(const std::string& key, const std::string& text);
std::vector<double> parse_doubles(const std::string& key, const std::string& text);
double parse_double(const std::string& key, const std::string& text);
long long parse_int(const std::string& key, const std::string& text);

}  // namespace campana::cli
