#include "campana/points.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "internal.hpp"

namespace campana {

namespace detail {

namespace {
std::mutex g_sieve_mutex;
std::shared_ptr<const SieveTable> g_sieve;
std::filesystem::path g_cache_dir;
std::string g_cache_diag;
}  // namespace

std::shared_ptr<const SieveTable> shared_sieve(std::uint64_t limit) {
  std::lock_guard<std::mutex> lock(g_sieve_mutex);
  if (g_sieve && g_sieve->limit() >= limit) return g_sieve;
  // Grow geometrically so a count series does not rebuild at every step.
  std::uint64_t want = std::max<std::uint64_t>(limit, 1 << 16);
  if (g_sieve) want = std::max(want, 2 * g_sieve->limit());
  if (!g_cache_dir.empty()) {
    std::string diag;
    auto t = std::make_shared<const SieveTable>(SieveTable::load_or_build(g_cache_dir, want, &diag));
    if (!diag.empty()) g_cache_diag = diag;
    g_sieve = t;
  } else {
    g_sieve = std::make_shared<const SieveTable>(want);
  }
  return g_sieve;
}

std::vector<std::uint64_t> accepted_values(const Weight& w, const PrimeSet& S, std::uint64_t bound) {
  if (S.empty()) {
    if (w.is_dlt()) return bound >= 1 ? std::vector<std::uint64_t>{1} : std::vector<std::uint64_t>{};
    return m_full_list(bound, w.m());
  }
  const auto table = min_exponent_table(bound, S);
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 1; v <= bound; ++v)
    if (accepts_minexp(table[v], w)) out.push_back(v);
  return out;
}

std::vector<std::uint8_t> min_exponent_table(std::uint64_t limit, const PrimeSet& S) {
  auto sieve = shared_sieve(limit);
  std::vector<std::uint8_t> t(limit + 1, 255);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint64_t p = sieve->smallest_prime_factor(n);
    std::uint64_t r = n;
    int e = 0;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    const std::uint8_t here = in_set(S, p) ? 255 : static_cast<std::uint8_t>(std::min(e, 254));
    t[n] = std::min(here, t[r]);
  }
  return t;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

}  // namespace detail

void set_sieve_cache_directory(const std::filesystem::path& dir) {
  std::lock_guard<std::mutex> lock(detail::g_sieve_mutex);
  detail::g_cache_dir = dir;
  detail::g_sieve.reset();
  detail::g_cache_diag.clear();
}

std::string last_sieve_cache_diagnostic() {
  std::lock_guard<std::mutex> lock(detail::g_sieve_mutex);
  return detail::g_cache_diag;
}

PrimitivePoint::PrimitivePoint(std::vector<std::int64_t> c) : coords(std::move(c)) {
  std::uint64_t g = 0;
  std::int64_t first = 0;
  for (auto v : coords) {
    g = std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v));
    if (first == 0) first = v;
  }
  if (g == 0) throw std::invalid_argument("zero tuple is not a projective point");
  if (g != 1) throw std::invalid_argument("coordinates are not coprime");
  if (first < 0) throw std::invalid_argument("first nonzero coordinate must be positive");
}

PrimitivePoint PrimitivePoint::normalize(std::vector<std::int64_t> c) {
  std::uint64_t g = 0;
  std::int64_t first = 0;
  for (auto v : c) {
    g = std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v));
    if (first == 0) first = v;
  }
  if (g == 0) throw std::invalid_argument("zero tuple is not a projective point");
  const std::int64_t s = first < 0 ? -static_cast<std::int64_t>(g) : static_cast<std::int64_t>(g);
  for (auto& v : c) v /= s;
  return PrimitivePoint(std::move(c));
}

int IntersectionProfile::at(std::uint64_t p, const std::string& id) const {
  auto it = entries.find({p, id});
  return it == entries.end() ? 0 : it->second;
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::campana: return "campana";
    case Kind::weak: return "weak";
    case Kind::thin_filtered: return "thin-filtered";
  }
  return "?";
}

std::string to_string(Height h) { return h == Height::naive ? "naive" : "euclidean"; }

Kind parse_kind(std::string_view s) {
  if (s == "campana") return Kind::campana;
  if (s == "weak") return Kind::weak;
  if (s == "thin-filtered" || s == "thin") return Kind::thin_filtered;
  throw std::invalid_argument("unknown kind '" + std::string(s) + "'");
}

Height parse_height(std::string_view s) {
  if (s == "naive") return Height::naive;
  if (s == "euclidean") return Height::euclidean;
  throw std::invalid_argument("unknown height '" + std::string(s) + "'");
}

namespace {

std::uint64_t uabs(std::int64_t v) { return v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v); }

void expect_size(const OrbifoldModel& m, const PrimitivePoint& x, std::size_t n) {
  if (x.coords.size() != n)
    throw std::invalid_argument("model " + m.name + " expects " + std::to_string(n) + " coordinates");
}

[[noreturn]] void boundary(const OrbifoldModel& m) {
  throw std::domain_error("point lies on the boundary of " + m.name);
}

}  // namespace

namespace detail {

// The six gcd chains of the D5 model, in component order E1..E6.
// Returns false when x1 = 0 (outside the chart).
bool dp_d5_chains(std::int64_t x0, std::int64_t x1, std::uint64_t out[6]) {
  if (x1 == 0 || x0 == 0) return false;
  auto g = [x1](std::int64_t y) { return static_cast<std::int64_t>(std::gcd(uabs(y), uabs(x1))); };
  auto f = [&](std::int64_t y) { return y / g(y); };
  auto gg = [&](std::int64_t y) { return x1 / g(y); };
  const std::int64_t F1 = f(x0), F2 = f(F1), F3 = f(F2);
  const std::int64_t h = F3 - gg(F2);
  out[0] = std::gcd(uabs(F2), uabs(gg(h)));
  out[1] = std::gcd(uabs(h), uabs(gg(f(h))));
  out[2] = uabs(F3);
  out[3] = std::gcd(uabs(F1), uabs(gg(F2)));
  out[4] = std::gcd(uabs(x0), uabs(gg(F1)));
  out[5] = std::gcd(uabs(x1), uabs(f(h)));
  return true;
}

}  // namespace detail

namespace detail {

bool open_orbit_raw(Backend b, const std::int64_t* c) {
  switch (b) {
    case Backend::p1: return c[1] != 0;
    case Backend::pn_hyperplane:
    case Backend::blowup_pn: return c[0] != 0;
    case Backend::p2_three_lines:
    case Backend::dp_d5: return c[0] != 0 && c[1] != 0 && c[2] != 0;
    case Backend::by_four_lines: return c[0] != 0 && c[1] != 0 && c[2] != 0 && c[0] + c[1] + c[2] != 0;
  }
  return false;
}

std::size_t boundary_values_raw(Backend b, const std::int64_t* c, std::uint64_t* out) {
  switch (b) {
    case Backend::p1: out[0] = uabs(c[1]); return 1;
    case Backend::pn_hyperplane: out[0] = uabs(c[0]); return 1;
    case Backend::p2_three_lines:
      for (int i = 0; i < 3; ++i) out[i] = uabs(c[i]);
      return 3;
    case Backend::by_four_lines:
      for (int i = 0; i < 3; ++i) out[i] = uabs(c[i]);
      out[3] = uabs(c[0] + c[1] + c[2]);
      return 4;
    case Backend::blowup_pn: {
      const std::uint64_t g = std::gcd(uabs(c[0]), uabs(c[1]));
      out[0] = g;
      out[1] = uabs(c[0]) / g;
      return 2;
    }
    case Backend::dp_d5: dp_d5_chains(c[0], c[1], out); return 6;
  }
  return 0;
}

}  // namespace detail

bool in_open_orbit(const OrbifoldModel& model, const PrimitivePoint& x) {
  const Backend b = backend_of(model);
  const std::size_t want = b == Backend::p1 ? 2 : static_cast<std::size_t>(model.dim) + 1;
  expect_size(model, x, want);
  return detail::open_orbit_raw(b, x.coords.data());
}

std::vector<std::uint64_t> boundary_values(const OrbifoldModel& model, const PrimitivePoint& x) {
  if (!in_open_orbit(model, x)) boundary(model);
  std::uint64_t v[6];
  const std::size_t n = detail::boundary_values_raw(backend_of(model), x.coords.data(), v);
  return {v, v + n};
}

IntersectionProfile intersection_profile(const OrbifoldModel& model, const PrimitivePoint& x) {
  const auto values = boundary_values(model, x);
  IntersectionProfile prof;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& pp : factorize_any(values[i], nullptr).factors)
      prof.entries[{pp.prime, model.components[i].id}] = pp.exponent;
  }
  return prof;
}

bool is_campana(const OrbifoldModel& model, const PrimitivePoint& x, const PrimeSet& S) {
  const auto values = boundary_values(model, x);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!detail::accepts(values[i], model.components[i].weight, S, nullptr)) return false;
  return true;
}

bool is_weak_campana(const OrbifoldModel& model, const PrimitivePoint& x, const PrimeSet& S) {
  const auto prof = intersection_profile(model, x);
  // Work with eps scaled by L = lcm of the finite m's.
  std::int64_t L = 1;
  for (const auto& c : model.components)
    if (!c.weight.is_dlt()) L = std::lcm(L, static_cast<std::int64_t>(c.weight.m()));
  auto scaled_eps = [&](const Weight& w) { return w.is_dlt() ? L : L - L / w.m(); };
  std::map<std::uint64_t, std::pair<std::int64_t, std::int64_t>> per_prime;  // (sum eps n, sum n) over A_eps
  for (const auto& [key, n] : prof.entries) {
    const auto& [p, id] = key;
    if (detail::in_set(S, p)) continue;
    const auto& w = model.component(id).weight;
    const std::int64_t e = scaled_eps(w);
    if (e == 0) continue;
    auto& acc = per_prime[p];
    acc.first += e * n;
    acc.second += n;
  }
  for (const auto& [p, acc] : per_prime) {
    if (acc.first > 0 && acc.first > L * (acc.second - 1)) return false;
  }
  return true;
}

bool thin_filter_by(const PrimitivePoint& x) {
  if (x.coords.size() != 3) throw std::invalid_argument("thin filter expects three coordinates");
  const __int128 prod = static_cast<__int128>(x.coords[0]) * x.coords[1] * x.coords[2];
  const __int128 neg = -prod;
  if (neg < 0) return false;
  if (neg > static_cast<__int128>(INT64_MAX)) {
    // Fall back on long double root with exact correction.
    unsigned __int128 r = static_cast<unsigned __int128>(std::sqrt(static_cast<long double>(neg)));
    while (r * r > static_cast<unsigned __int128>(neg)) --r;
    while ((r + 1) * (r + 1) <= static_cast<unsigned __int128>(neg)) ++r;
    return r * r == static_cast<unsigned __int128>(neg);
  }
  return is_perfect_square(static_cast<std::int64_t>(neg));
}

double height_of(const PrimitivePoint& x, Height h) {
  if (h == Height::euclidean) {
    if (x.coords.size() != 2) throw std::invalid_argument("euclidean height is defined on P^1 only");
    return std::hypot(static_cast<double>(x.coords[0]), static_cast<double>(x.coords[1]));
  }
  std::uint64_t m = 0;
  for (auto v : x.coords) m = std::max(m, uabs(v));
  return static_cast<double>(m);
}

std::uint64_t count_weak_subfamily_A(std::uint64_t T) {
  if (T == 0) return 0;
  // x0 = s^2, x1 = g a^2, x2 = g b^2 with gcd(a, b) = 1 and gcd(s, g) = 1.
  const std::uint64_t root = isqrt(T);
  const auto phi = totients(root);
  std::vector<std::uint64_t> coprime_pairs(root + 1, 0);  // #{(a,b) in [1,M]^2 coprime}
  for (std::uint64_t M = 1; M <= root; ++M) coprime_pairs[M] = coprime_pairs[M - 1] + 2 * phi[M] - (M == 1 ? 1 : 0);
  auto sieve = detail::shared_sieve(T);
  std::uint64_t total = 0;
  for (std::uint64_t g = 1; g <= T; ++g) {
    const std::uint64_t M = isqrt(T / g);
    total += coprime_count(root, g, sieve.get()) * coprime_pairs[M];
  }
  return total;
}

CountSeries count_series(const OrbifoldModel& model, const std::vector<double>& grid, Kind kind, const PrimeSet& S,
                         Height height, int threads) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("count_series: grid must be strictly ascending");
  CountSeries s;
  s.model = model.name;
  s.height = to_string(height);
  s.kind = to_string(kind);
  if (!grid.empty()) detail::shared_sieve(static_cast<std::uint64_t>(grid.back()) + 1);
  for (double T : grid) {
    s.thresholds.push_back(T);
    s.counts.push_back(count_points(model, T, kind, S, height, threads));
  }
  return s;
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  if (lo <= 0 || per_decade < 1) throw std::invalid_argument("geometric_grid: need lo > 0 and per_decade >= 1");
  std::vector<double> out;
  const double l0 = std::log10(lo);
  for (int k = 0;; ++k) {
    double v = std::pow(10.0, l0 + static_cast<double>(k) / per_decade);
    const double r = std::round(v);
    if (std::fabs(v - r) < 1e-9 * std::max(1.0, r)) v = r;
    if (v > hi * (1 + 1e-12)) break;
    out.push_back(v);
  }
  return out;
}

std::string series_csv(const CountSeries& s) {
  std::ostringstream out;
  out << "T,N,model,kind,height\n";
  out.precision(17);
  for (std::size_t i = 0; i < s.counts.size(); ++i)
    out << s.thresholds[i] << "," << s.counts[i] << "," << s.model << "," << s.kind << "," << s.height << "\n";
  return out.str();
}

std::string series_json(const CountSeries& s) {
  nlohmann::ordered_json j;
  j["schema"] = "campana.count_series/1";
  j["model"] = s.model;
  j["kind"] = s.kind;
  j["height"] = s.height;
  j["records"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < s.counts.size(); ++i)
    j["records"].push_back({{"T", s.thresholds[i]}, {"N", s.counts[i]}});
  return j.dump(2) + "\n";
}

}  // namespace campana
