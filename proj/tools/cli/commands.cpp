#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "campana/euler.hpp"
#include "campana/fit.hpp"
#include "campana/geometry.hpp"
#include "campana/zoo.hpp"
#include "config.hpp"
#include "verify.hpp"

namespace campana::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCountHelp =
    "CSV columns: T,N,model,kind,height (one row per threshold).\n"
    "JSON: {schema: campana.count_series/1, model, kind, height, records: [{T, N}]}.";

/// Flags land in `flags` under their config key; `--config FILE` supplies defaults.
struct KeyedOptions {
  KeyValues flags;
  std::string config_file;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + key, [this, key](const std::string& v) { flags[key] = v; }, help);
  }
  KeyValues resolve() const {
    KeyValues file;
    if (!config_file.empty()) file = read_config_file(config_file);
    return merge(file, flags);
  }
};

void add_config(CLI::App* app, KeyedOptions& k) {
  app->add_option("--config", k.config_file, "key = value file; flags override its entries");
}

void add_model_keys(CLI::App* app, KeyedOptions& k) {
  k.add(app, "model", "zoo model name (see `campana zoo`)");
  k.add(app, "model_file", "model description file (overrides --model)");
  k.add(app, "weights", "per-component weights, e.g. 2,2,dlt");
  k.add(app, "n", "dimension for pn_hyperplane / blowup_pn");
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("output", "cannot write " + path);
  f << text;
}

std::string read_file(const std::string& key, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(key, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report_cache(std::ostream& err) {
  const auto diag = last_sieve_cache_diagnostic();
  if (!diag.empty()) err << "warning: sieve cache rejected (" << diag << "); rebuilt from scratch\n";
}

std::string weights_string(const OrbifoldModel& m) {
  std::string s;
  for (const auto& c : m.components) s += (s.empty() ? "" : ",") + c.weight.to_string();
  return s;
}

// ---- zoo ----

int cmd_zoo(bool as_json, std::ostream& out) {
  if (as_json) {
    json j;
    j["schema"] = "campana.zoo/1";
    j["models"] = json::array();
    for (const auto& e : zoo_catalogue()) {
      const auto m = make_zoo_model(e.name);
      json c;
      c["name"] = e.name;
      c["backend"] = backend_name(e.backend);
      c["summary"] = e.summary;
      c["coordinates"] = e.coordinates;
      c["default_weights"] = e.default_weights;
      c["default_dim"] = e.default_dim;
      c["components"] = m.ids();
      j["models"].push_back(c);
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& e : zoo_catalogue()) {
    out << e.name << "\n  " << e.summary << "\n  points: " << e.coordinates << "\n  defaults: weights "
        << e.default_weights << ", dim " << e.default_dim << "\n";
  }
  return kExitOk;
}

// ---- count ----

int cmd_count(const KeyValues& kv, std::ostream& out, std::ostream& err) {
  if (!kv.count("T") && !kv.count("T_min") && !kv.count("T_max"))
    throw UsageError("T", "missing; give T (list) or T_min/T_max");
  const RunConfig cfg = build_run_config(kv);
  const auto model = load_model(cfg);
  validate_for_counting(model, cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto series = count_series(model, cfg.grid, cfg.kind, cfg.S, cfg.height, cfg.threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_output(cfg.output, cfg.format == "json" ? series_json(series) : series_csv(series), out);
  std::uint64_t last = series.counts.empty() ? 0 : series.counts.back();
  err << "count: model=" << model.name << " kind=" << to_string(cfg.kind) << " height=" << to_string(cfg.height)
      << " thresholds=" << series.counts.size() << " N(T_max)=" << last << " elapsed=" << secs << "s\n";
  report_cache(err);
  return kExitOk;
}

// ---- invariants ----

int cmd_invariants(const KeyValues& kv, std::ostream& out) {
  const RunConfig cfg = build_run_config(kv, {"L"});
  auto model = load_model(cfg);
  std::string L = "model";
  if (auto it = kv.find("L"); it != kv.end() && !it->second.empty()) L = it->second;
  if (L == "log_anticanonical")
    model = with_log_anticanonical_L(model);
  else if (L != "model")
    throw UsageError("L", "expected 'model' or 'log_anticanonical', got '" + L + "'");
  std::vector<std::string> places = {"inf"};
  for (auto p : cfg.S) places.push_back(std::to_string(p));
  InvariantReport rep;
  try {
    rep = invariant_report(model, places);
  } catch (const std::exception& e) {
    throw UsageError(cfg.weights.empty() ? "L" : "weights", e.what());
  }
  json j;
  j["schema"] = "campana.invariants/1";
  j["model"] = model.name;
  j["weights"] = weights_string(model);
  j["L"] = L;
  j["places"] = places;
  j["a"] = to_string(rep.a);
  j["a_approx"] = to_double(rep.a);
  j["b_klt"] = rep.b_klt ? json(*rep.b_klt) : json(nullptr);
  j["b_dlt"] = rep.b_dlt ? json(*rep.b_dlt) : json(nullptr);
  j["b_conjectural"] = rep.b_conjectural;
  j["b_predicted"] = rep.b_predicted;
  j["b_source"] = rep.b_source;
  j["adjoint_support"] = std::vector<std::string>(rep.adjoint_support.begin(), rep.adjoint_support.end());
  json coeffs = json::object();
  for (const auto& [id, c] : rep.adjoint_coefficients) coeffs[id] = to_string(c);
  j["adjoint_coefficients"] = coeffs;
  j["adjoint_rigid"] = rep.adjoint_rigid;
  write_output(cfg.output, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---- euler ----

std::map<std::string, Complex> parse_s(const std::string& text, const OrbifoldModel& model) {
  std::map<std::string, Complex> s;
  if (text.find(':') == std::string::npos) {
    const double v = parse_double("s", text);
    for (const auto& c : model.components) s[c.id] = v;
    return s;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("s", "expected id:value, got '" + item + "'");
    const std::string id = item.substr(0, colon);
    bool known = false;
    for (const auto& c : model.components) known = known || c.id == id;
    if (!known) throw UsageError("s", "unknown component '" + id + "'");
    s[id] = parse_double("s", item.substr(colon + 1));
  }
  for (const auto& c : model.components)
    if (!s.count(c.id)) throw UsageError("s", "no value for component '" + c.id + "'");
  return s;
}

int cmd_euler(const KeyValues& kv, std::ostream& out) {
  const RunConfig cfg = build_run_config(kv, {"s", "quantity", "point_bound", "character_bound"});
  const auto model = load_model(cfg);
  auto get = [&](const std::string& k, const std::string& dflt) {
    auto it = kv.find(k);
    return it == kv.end() || it->second.empty() ? dflt : it->second;
  };
  const std::string quantity = get("quantity", "product");
  json j;
  if (quantity == "product") {
    if (!kv.count("s")) throw UsageError("s", "missing");
    const auto s = parse_s(kv.at("s"), model);
    StratumData data;
    try {
      data = zoo_stratum_data(model);
    } catch (const std::exception& e) {
      throw UsageError("model", e.what());
    }
    EulerEvaluation ev;
    try {
      ev = regularized_euler_product(data, s, cfg.prime_bound, cfg.threads);
    } catch (const std::domain_error& e) {
      throw UsageError("s", e.what());
    }
    j["schema"] = "campana.euler/1";
    j["model"] = model.name;
    json sj = json::object();
    for (const auto& [id, v] : ev.s) sj[id] = v.real();
    j["s"] = sj;
    j["prime_bound"] = ev.prime_bound;
    j["regularized_value"] = {{"re", ev.value.real()}, {"im", ev.value.imag()}};
    j["tail_estimate"] = std::isfinite(ev.tail_estimate) ? json(ev.tail_estimate) : json("inf");
    j["decay_C"] = ev.decay_C;
    j["decay_delta"] = ev.decay_delta;
    j["note"] = ev.truncation_note;
  } else if (quantity == "constant") {
    const Backend b = backend_of(model);
    if (model.components.size() != 1) throw UsageError("model", "constant not implemented for " + model.name);
    LeadingConstant lc;
    try {
      if (b == Backend::p1) {
        if (kv.count("height") && cfg.height != Height::euclidean)
          throw UsageError("height", "the p1 constant is computed for the euclidean height");
        lc = leading_constant_p1(model.components[0].weight, cfg.S, cfg.prime_bound);
      } else if (b == Backend::pn_hyperplane) {
        if (cfg.height != Height::naive) throw UsageError("height", "the pn constant is computed for the naive height");
        lc = leading_constant_pn(model.dim, model.components[0].weight, cfg.S, cfg.prime_bound);
      } else {
        throw UsageError("model", "constant not implemented for " + model.name);
      }
    } catch (const std::domain_error& e) {
      throw UsageError("S", e.what());
    }
    j["schema"] = "campana.constant/1";
    j["model"] = model.name;
    j["weights"] = weights_string(model);
    j["height"] = b == Backend::p1 ? "euclidean" : "naive";
    j["a"] = lc.a;
    j["c"] = lc.c;
    j["c_over_a"] = lc.c_over_a;
    j["tail_estimate"] = lc.tail_estimate;
    j["prime_bound"] = lc.prime_bound;
    j["note"] = lc.note;
  } else if (quantity == "poisson") {
    if (backend_of(model) != Backend::p1) throw UsageError("model", "the Poisson check is implemented for p1");
    if (!kv.count("s")) throw UsageError("s", "missing");
    const double s = parse_double("s", kv.at("s"));
    const long long B = parse_int("point_bound", get("point_bound", "2000"));
    const long long N = parse_int("character_bound", get("character_bound", "50"));
    if (B < 1 || B > 100000) throw UsageError("point_bound", "must be in [1, 1e5]");
    if (N < 0 || N > 10000) throw UsageError("character_bound", "must be in [0, 1e4]");
    PoissonCheck pc;
    try {
      pc = zeta_poisson_check(model.components[0].weight, s, static_cast<std::uint64_t>(B), static_cast<int>(N),
                              cfg.prime_bound);
    } catch (const std::domain_error& e) {
      throw UsageError("s", e.what());
    }
    j["schema"] = "campana.poisson/1";
    j["weight"] = model.components[0].weight.to_string();
    j["s"] = s;
    j["point_bound"] = pc.point_bound;
    j["character_bound"] = pc.character_bound;
    j["direct"] = pc.direct;
    j["poisson"] = pc.poisson;
    j["discrepancy"] = pc.discrepancy;
  } else {
    throw UsageError("quantity", "expected product, constant or poisson");
  }
  write_output(cfg.output, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---- fit ----

int cmd_fit(const KeyValues& kv, std::ostream& out) {
  KeyValues base;
  for (const auto& [k, v] : kv)
    if (k != "input" && k != "mode" && k != "a" && k != "b" && k != "min_T" && k != "tol_a" && k != "tol_b")
      base[k] = v;
  if (!base.count("format")) base["format"] = "json";
  const RunConfig cfg = build_run_config(base);
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  const auto input = get("input");
  if (!input) throw UsageError("input", "missing series file");
  CountSeries series;
  try {
    series = read_series(read_file("input", *input));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("input", e.what());
  }
  const double min_T = get("min_T") ? parse_double("min_T", *get("min_T")) : 0;
  const bool predict = kv.count("model") || kv.count("model_file");
  std::string text;
  if (predict) {
    const auto model = load_model(cfg);
    const auto rep = invariant_report(model);
    const double tol_a = get("tol_a") ? parse_double("tol_a", *get("tol_a")) : 0.05;
    std::optional<double> tol_b;
    if (get("tol_b")) tol_b = parse_double("tol_b", *get("tol_b"));
    Verdict v;
    try {
      v = compare_with_prediction(series, rep, tol_a, tol_b, min_T);
    } catch (const std::invalid_argument& e) {
      throw UsageError("input", e.what());
    }
    if (cfg.format == "csv")
      text = fit_csv(series, v.fit_a);
    else
      text = verdict_json(v);
  } else {
    FitMode mode = FitMode::free_a;
    if (get("mode")) {
      try {
        mode = parse_fit_mode(*get("mode"));
      } catch (const std::exception& e) {
        throw UsageError("mode", e.what());
      }
    }
    FitFixed fixed;
    if (get("a")) fixed.a = parse_double("a", *get("a"));
    if (get("b")) fixed.b = parse_double("b", *get("b"));
    if (mode != FitMode::free_a && !fixed.a) throw UsageError("a", "required by mode " + to_string(mode));
    if (mode == FitMode::fixed_ab && !fixed.b) throw UsageError("b", "required by mode fixed_ab");
    FitResult f;
    try {
      f = fit_series(series, mode, fixed, min_T);
    } catch (const std::invalid_argument& e) {
      throw UsageError("input", e.what());
    }
    text = cfg.format == "csv" ? fit_csv(series, f) : fit_json(f);
  }
  write_output(cfg.output, text, out);
  return kExitOk;
}

// ---- verify ----

int cmd_verify(const std::string& level, const KeyValues& kv, int criterion, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  if (level == "quick")
    opt.level = VerifyLevel::quick;
  else if (level == "full")
    opt.level = VerifyLevel::full;
  else
    throw UsageError("level", "expected quick or full, got '" + level + "'");
  const RunConfig cfg = build_run_config(kv);
  opt.threads = cfg.threads;
  std::vector<CriterionResult> results;
  if (criterion != 0) {
    if (criterion < 1 || criterion > kCriterionCount) throw UsageError("criterion", "must be in [1, 9]");
    results.push_back(run_criterion(criterion, opt));
    err << summary_line(results.back()) << "\n";
  } else {
    for (int id = 1; id <= kCriterionCount; ++id) {
      results.push_back(run_criterion(id, opt));
      err << summary_line(results.back()) << "\n";
    }
  }
  const auto diag = last_sieve_cache_diagnostic();
  report_cache(err);
  write_output(cfg.output, report_json(results, opt, diag), out);
  for (const auto& r : results)
    if (!r.informational && !r.pass) return kExitVerifyFailed;
  return kExitOk;
}

}  // namespace

CountSeries read_series(const std::string& text) {
  CountSeries s;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    s.model = j.value("model", "");
    s.kind = j.value("kind", "");
    s.height = j.value("height", "");
    for (const auto& rec : j.at("records")) {
      s.thresholds.push_back(rec.at("T").get<double>());
      s.counts.push_back(rec.at("N").get<std::uint64_t>());
    }
    return s;
  }
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("T,N", 0) == 0) continue;
    }
    std::stringstream ls(line);
    std::string T, N, model, kind, height;
    std::getline(ls, T, ',');
    std::getline(ls, N, ',');
    std::getline(ls, model, ',');
    std::getline(ls, kind, ',');
    std::getline(ls, height, ',');
    try {
      s.thresholds.push_back(std::stod(T));
      s.counts.push_back(std::stoull(N));
    } catch (const std::exception&) {
      throw UsageError("input", "line " + std::to_string(lineno) + ": expected T,N");
    }
    s.model = model;
    s.kind = kind;
    s.height = height;
  }
  return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Campana point counts, invariants, Euler products and fits", "campana"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "campana 0.1.0");

  bool zoo_json = false;
  auto* zoo = app.add_subcommand("zoo", "list built-in models");
  zoo->add_flag("--json", zoo_json, "machine-readable catalogue");

  KeyedOptions count_k;
  auto* count = app.add_subcommand("count", "count points on a threshold grid");
  count->footer(kCountHelp);
  add_config(count, count_k);
  add_model_keys(count, count_k);
  for (const auto& [key, help] : std::vector<std::pair<std::string, std::string>>{
           {"S", "primes in S, e.g. 2,3"},
           {"height", "naive or euclidean"},
           {"kind", "campana, weak or thin_filtered"},
           {"T", "comma separated thresholds"},
           {"T_min", "geometric grid start"},
           {"T_max", "geometric grid end"},
           {"per_decade", "grid points per decade (default 4)"},
           {"threads", "worker threads"},
           {"output", "output file (default stdout)"},
           {"format", "csv or json"}})
    count_k.add(count, key, help);

  KeyedOptions inv_k;
  auto* inv = app.add_subcommand("invariants", "a and b invariants as JSON");
  add_config(inv, inv_k);
  add_model_keys(inv, inv_k);
  inv_k.add(inv, "L", "model (declared lambda) or log_anticanonical");
  inv_k.add(inv, "S", "finite primes in S (adds their Clemens contributions)");
  inv_k.add(inv, "output", "output file");

  KeyedOptions eu_k;
  auto* eu = app.add_subcommand("euler", "regularized Euler product, leading constant or Poisson check (JSON)");
  add_config(eu, eu_k);
  add_model_keys(eu, eu_k);
  for (const auto& [key, help] : std::vector<std::pair<std::string, std::string>>{
           {"quantity", "product (default), constant or poisson"},
           {"s", "one value for all components or id:value,..."},
           {"prime_bound", "largest prime in the product (default 1e5)"},
           {"S", "primes in S (constant only)"},
           {"height", "height for the constant"},
           {"point_bound", "Poisson check: height bound of the direct sum"},
           {"character_bound", "Poisson check: |n| bound"},
           {"threads", "worker threads"},
           {"output", "output file"}})
    eu_k.add(eu, key, help);

  KeyedOptions fit_k;
  auto* fit = app.add_subcommand("fit", "fit N ~ c T^a (log T)^(b-1) to a count series");
  fit->footer("CSV output columns: T,N,fitted_N. With --model the result is a verdict against the predicted (a, b).");
  add_config(fit, fit_k);
  add_model_keys(fit, fit_k);
  for (const auto& [key, help] : std::vector<std::pair<std::string, std::string>>{
           {"input", "series file from `campana count` (CSV or JSON)"},
           {"mode", "free_a, fixed_ab or fixed_a_free_b"},
           {"a", "fixed a"},
           {"b", "fixed b"},
           {"min_T", "drop thresholds below this"},
           {"tol_a", "verdict tolerance on a (default 0.05)"},
           {"tol_b", "verdict tolerance on b (default: b not gated)"},
           {"format", "json (default) or csv"},
           {"output", "output file"}})
    fit_k.add(fit, key, help);

  KeyedOptions ver_k;
  std::string level = "quick";
  int criterion = 0;
  auto* ver = app.add_subcommand("verify", "run the acceptance suite; exit 1 on failure");
  ver->add_option("level", level, "quick (T capped at 1e4) or full");
  ver->add_option("--criterion", criterion, "run a single criterion (1-9)");
  add_config(ver, ver_k);
  ver_k.add(ver, "threads", "worker threads");
  ver_k.add(ver, "output", "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "campana 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run `campana --help` for usage\n";
    return kExitUsage;
  }

  if (const char* dir = std::getenv("CAMPANA_CACHE_DIR"); dir && *dir) set_sieve_cache_directory(dir);

  try {
    if (zoo->parsed()) return cmd_zoo(zoo_json, out);
    if (count->parsed()) return cmd_count(count_k.resolve(), out, err);
    if (inv->parsed()) return cmd_invariants(inv_k.resolve(), out);
    if (eu->parsed()) return cmd_euler(eu_k.resolve(), out);
    if (fit->parsed()) return cmd_fit(fit_k.resolve(), out);
    if (ver->parsed()) return cmd_verify(level, ver_k.resolve(), criterion, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace campana::cli
