#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "campana/points.hpp"
#include "internal.hpp"

namespace campana {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 uabs(i64 v) { return v < 0 ? static_cast<u64>(-v) : static_cast<u64>(v); }

// Largest boundary value over the box [-B, B]^k.
u64 value_bound(Backend b, u64 B) {
  switch (b) {
    case Backend::by_four_lines: return 3 * B;
    case Backend::dp_d5: return 2 * B;
    default: return B;
  }
}

// Visits canonical primitive tuples of the box with the given naive bound.
template <class F>
void for_each_primitive(std::size_t k, u64 B, F&& f) {
  std::vector<i64> c(k, 0);
  const i64 b = static_cast<i64>(B);
  auto rec = [&](auto&& self, std::size_t i, bool leading_zero, u64 g) -> void {
    if (i == k) {
      if (!leading_zero && g == 1) f(c);
      return;
    }
    // While every earlier coordinate is zero this one must be >= 0.
    for (i64 v = leading_zero ? 0 : -b; v <= b; ++v) {
      c[i] = v;
      self(self, i + 1, leading_zero && v == 0, std::gcd(g, uabs(v)));
    }
  };
  rec(rec, 0, true, 0);
}

bool weak_ok(const std::vector<u64>& values, const OrbifoldModel& m, const PrimeSet& S, const SieveTable& t) {
  i64 L = 1;
  for (const auto& c : m.components)
    if (!c.weight.is_dlt()) L = std::lcm(L, static_cast<i64>(c.weight.m()));
  struct Hit {
    u64 p;
    i64 eps_n, n;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Weight& w = m.components[i].weight;
    const i64 e = w.is_dlt() ? L : L - L / w.m();
    if (e == 0) continue;
    u64 v = values[i];
    while (v > 1) {
      const u64 p = t.smallest_prime_factor(v);
      i64 n = 0;
      while (v % p == 0) {
        v /= p;
        ++n;
      }
      if (detail::in_set(S, p)) continue;
      auto it = std::find_if(hits.begin(), hits.end(), [p](const Hit& h) { return h.p == p; });
      if (it == hits.end()) hits.push_back({p, e * n, n});
      else {
        it->eps_n += e * n;
        it->n += n;
      }
    }
  }
  for (const auto& h : hits)
    if (h.eps_n > 0 && h.eps_n > L * (h.n - 1)) return false;
  return true;
}

}  // namespace

std::uint64_t count_points_bruteforce(const OrbifoldModel& model, double T, Kind kind, const PrimeSet& S,
                                      Height height) {
  const Backend b = backend_of(model);
  if (height == Height::euclidean && b != Backend::p1)
    throw std::invalid_argument("height: euclidean height is only defined for p1");
  if (T > 400) throw std::out_of_range("brute force is limited to T <= 400");
  const u64 B = static_cast<u64>(std::floor(T + 1e-9));
  const u64 T2 = static_cast<u64>(std::floor(static_cast<long double>(T) * T + 1e-9L));
  const std::size_t k = static_cast<std::size_t>(model.dim) + 1;
  const u64 vmax = value_bound(b, B);
  const auto sieve = detail::shared_sieve(vmax + 1);
  const auto minexp = detail::min_exponent_table(vmax + 1, S);
  u64 count = 0;
  for_each_primitive(k, B, [&](const std::vector<i64>& c) {
    if (height == Height::euclidean && static_cast<u64>(c[0] * c[0] + c[1] * c[1]) > T2) return;
    const PrimitivePoint x(c);
    if (!in_open_orbit(model, x)) return;
    const auto values = boundary_values(model, x);
    if (kind == Kind::weak) {
      if (!weak_ok(values, model, S, *sieve)) return;
    } else {
      for (std::size_t i = 0; i < values.size(); ++i)
        if (!detail::accepts_minexp(minexp[values[i]], model.components[i].weight)) return;
      if (kind == Kind::thin_filtered && thin_filter_by(x)) return;
    }
    ++count;
  });
  return count;
}

Census bruteforce_census(const OrbifoldModel& model, std::uint64_t T, const PrimeSet& S, Height height) {
  const Backend b = backend_of(model);
  if (height == Height::euclidean && b != Backend::p1)
    throw std::invalid_argument("height: euclidean height is only defined for p1");
  if (T > 400) throw std::out_of_range("brute force is limited to T <= 400");
  const std::size_t k = static_cast<std::size_t>(model.dim) + 1;
  const u64 vmax = value_bound(b, T);
  const auto minexp = detail::min_exponent_table(vmax + 1, S);
  // keys packed 3 bits per component (255 -> 7) while counting
  std::unordered_map<u64, std::vector<u64>> packed;
  u64 last_key = ~u64{0};
  std::vector<u64>* last_hist = nullptr;
  for_each_primitive(k, T, [&](const std::vector<i64>& c) {
    u64 h;
    if (height == Height::euclidean) {
      const u64 n2 = static_cast<u64>(c[0] * c[0] + c[1] * c[1]);
      h = isqrt(n2);
      if (h * h < n2) ++h;
      if (h > T) return;
    } else {
      h = 0;
      for (auto v : c) h = std::max(h, uabs(v));
    }
    if (!detail::open_orbit_raw(b, c.data())) return;
    u64 values[6];
    const std::size_t nv = detail::boundary_values_raw(b, c.data(), values);
    u64 key = 0;
    for (std::size_t i = 0; i < nv; ++i) {
      const std::uint8_t e = minexp[values[i]];
      key = key << 3 | (e == 255 ? 7u : std::min<std::uint8_t>(e, 4));
    }
    if (key != last_key) {
      auto& hist = packed[key];
      if (hist.empty()) hist.assign(T + 1, 0);
      last_key = key;
      last_hist = &hist;
    }
    ++(*last_hist)[h];
  });
  Census census;
  for (auto& [key, hist] : packed) {
    std::vector<std::uint8_t> v(model.components.size());
    u64 kk = key;
    for (std::size_t i = v.size(); i-- > 0; kk >>= 3) v[i] = (kk & 7) == 7 ? 255 : static_cast<std::uint8_t>(kk & 7);
    census[v] = std::move(hist);
  }
  return census;
}

std::uint64_t census_count(const Census& census, const std::vector<Weight>& weights, std::uint64_t T) {
  for (const auto& w : weights)
    if (!w.is_dlt() && w.m() > 4) throw std::invalid_argument("census_count supports m <= 4");
  u64 total = 0;
  for (const auto& [key, hist] : census) {
    if (key.size() != weights.size()) throw std::invalid_argument("census_count: weight count mismatch");
    bool ok = true;
    for (std::size_t i = 0; i < key.size() && ok; ++i) ok = detail::accepts_minexp(key[i], weights[i]);
    if (!ok) continue;
    for (u64 h = 0; h <= T && h < hist.size(); ++h) total += hist[h];
  }
  return total;
}

}  // namespace campana
