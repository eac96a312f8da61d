#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "campana/arith.hpp"
#include "campana/model_io.hpp"
#include "campana/zoo.hpp"

namespace campana::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::vector<std::string> kKnownKeys = {"model", "model_file", "weights", "n",       "S",
                                             "height", "kind",      "T",       "T_min",   "T_max",
                                             "per_decade", "threads", "prime_bound", "output", "format"};

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config", "line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("config", "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

KeyValues merge(const KeyValues& file, const KeyValues& flags) {
  KeyValues out = file;
  for (const auto& [k, v] : flags) out[k] = v;
  return out;
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(key, "expected an integer, got '" + text + "'");
  }
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(key, "expected a number, got '" + text + "'");
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::uint64_t> parse_primes(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) {
    const long long v = parse_int(key, item);
    if (v < 2 || !is_prime(static_cast<std::uint64_t>(v))) throw UsageError(key, "'" + item + "' is not a prime");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RunConfig build_run_config(const KeyValues& kv, const std::vector<std::string>& extra) {
  for (const auto& [k, v] : kv) {
    const bool known = std::find(kKnownKeys.begin(), kKnownKeys.end(), k) != kKnownKeys.end() ||
                       std::find(extra.begin(), extra.end(), k) != extra.end();
    if (!known) throw UsageError(k, "unknown key");
  }
  RunConfig cfg;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() || it->second.empty() ? nullptr : &it->second;
  };
  if (auto v = get("model")) cfg.model = *v;
  if (auto v = get("model_file")) cfg.model_file = *v;
  if (auto v = get("weights")) {
    for (const auto& item : split_list(*v)) {
      try {
        cfg.weights.push_back(Weight::parse(item));
      } catch (const std::exception& e) {
        throw UsageError("weights", e.what());
      }
    }
  }
  if (auto v = get("n")) {
    cfg.n = static_cast<int>(parse_int("n", *v));
    if (cfg.n < 1 || cfg.n > 8) throw UsageError("n", "dimension must be in [1, 8]");
  }
  if (auto v = get("S")) cfg.S = parse_primes("S", *v);
  if (auto v = get("height")) {
    try {
      cfg.height = parse_height(*v);
    } catch (const std::exception& e) {
      throw UsageError("height", e.what());
    }
  }
  if (auto v = get("kind")) {
    try {
      cfg.kind = parse_kind(*v);
    } catch (const std::exception& e) {
      throw UsageError("kind", e.what());
    }
  }
  if (auto v = get("threads")) {
    const long long t = parse_int("threads", *v);
    if (t < 1 || t > 256) throw UsageError("threads", "must be in [1, 256]");
    cfg.threads = static_cast<int>(t);
  }
  if (auto v = get("prime_bound")) {
    const long long b = parse_int("prime_bound", *v);
    if (b < 1 || b > 100000000) throw UsageError("prime_bound", "must be in [1, 1e8]");
    cfg.prime_bound = static_cast<std::uint64_t>(b);
  }
  if (auto v = get("output")) cfg.output = *v;
  if (auto v = get("format")) {
    if (*v != "csv" && *v != "json") throw UsageError("format", "expected csv or json");
    cfg.format = *v;
  }
  if (kv.count("T")) {
    if (get("T_min") || get("T_max")) throw UsageError("T", "give either T or T_min/T_max, not both");
    cfg.grid = parse_doubles("T", kv.at("T"));  // empty value = empty grid
    for (double t : cfg.grid)
      if (!(t >= 1)) throw UsageError("T", "thresholds must be >= 1");
  } else if (get("T_min") || get("T_max")) {
    if (!get("T_min")) throw UsageError("T_min", "missing (T_max given)");
    if (!get("T_max")) throw UsageError("T_max", "missing (T_min given)");
    const double lo = parse_double("T_min", *get("T_min"));
    const double hi = parse_double("T_max", *get("T_max"));
    if (!(lo >= 1)) throw UsageError("T_min", "must be >= 1");
    if (!(hi >= lo)) throw UsageError("T_max", "must be >= T_min");
    int per = 4;
    if (auto v = get("per_decade")) {
      per = static_cast<int>(parse_int("per_decade", *v));
      if (per < 1 || per > 100) throw UsageError("per_decade", "must be in [1, 100]");
    }
    cfg.grid = geometric_grid(lo, hi, per);
  }
  return cfg;
}

OrbifoldModel load_model(const RunConfig& cfg) {
  OrbifoldModel model;
  if (cfg.model_file) {
    try {
      model = read_model_file(*cfg.model_file);
    } catch (const std::exception& e) {
      throw UsageError("model_file", e.what());
    }
    if (!cfg.weights.empty()) {
      try {
        model = with_weights(model, cfg.weights);
      } catch (const std::exception& e) {
        throw UsageError("weights", e.what());
      }
    }
    return model;
  }
  if (!parse_backend(cfg.model)) throw UsageError("model", "unknown model '" + cfg.model + "' (see `campana zoo`)");
  try {
    return make_zoo_model(cfg.model, cfg.weights, cfg.n);
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const bool about_n = what.find("n =") != std::string::npos || what.find("n <=") != std::string::npos;
    throw UsageError(about_n ? "n" : "weights", what);
  }
}

void validate_for_counting(const OrbifoldModel& model, const RunConfig& cfg) {
  double cap = 0;
  try {
    cap = certified_range(model, cfg.kind, cfg.height);
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    const std::string key = colon == std::string::npos ? "model" : what.substr(0, colon);
    throw UsageError(key == "height" || key == "kind" ? key : "model", what);
  }
  for (double t : cfg.grid)
    if (t > cap)
      throw UsageError("T", "threshold " + std::to_string(t) + " exceeds the certified range " + std::to_string(cap) +
                                " for " + model.name + " (" + to_string(cfg.kind) + ")");
}

}  // namespace campana::cli
