#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "campana/points.hpp"
#include "internal.hpp"

namespace campana {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

constexpr double kBruteForceCap = 200;

// Sum f(i) over i in [0, n). Work is cut into a fixed set of chunks so the
// result does not depend on the thread count.
template <class F>
u128 parallel_sum(std::size_t n, int threads, F f) {
  constexpr std::size_t kChunks = 64;
  std::vector<u128> partial(kChunks, 0);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = n * c / kChunks, hi = n * (c + 1) / kChunks;
    u128 acc = 0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[c] = acc;
  };
  if (threads <= 1 || n < 2 * kChunks) {
    for (std::size_t c = 0; c < kChunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(kChunks));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = static_cast<std::size_t>(t); c < kChunks; c += static_cast<std::size_t>(nt)) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }
  u128 total = 0;
  for (auto v : partial) total += v;
  return total;
}

u64 checked(u128 v) {
  if (v > std::numeric_limits<u64>::max()) throw std::overflow_error("count exceeds 64-bit range");
  return static_cast<u64>(v);
}

std::vector<u64> primes_of(u64 n, const SieveTable& t) {
  std::vector<u64> ps;
  while (n > 1) {
    const u64 p = t.smallest_prime_factor(n);
    ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  return ps;
}

u128 upow(u128 b, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) {
    if (b != 0 && r > std::numeric_limits<u128>::max() / b) throw std::overflow_error("count exceeds 128-bit range");
    r *= b;
  }
  return r;
}

// #{(y_1..y_k) in [-B,B]^k : gcd(g, y_1, ..., y_k) = 1}.
u128 primitive_completions(u64 g, u64 B, int k, const SieveTable& t) {
  if (k == 0) return g == 1 ? 1 : 0;
  i128 total = 0;
  for (const auto& [d, mu] : mobius_divisors(primes_of(g, t)))
    total += mu * static_cast<i128>(upow(2 * (B / d) + 1, k));
  return static_cast<u128>(total);
}

u64 floor_T(double T) { return static_cast<u64>(std::floor(T + 1e-9)); }

u128 count_p1(const OrbifoldModel& m, double T, const PrimeSet& S, Height h, int threads) {
  const u64 B = floor_T(T);
  const auto Q = detail::accepted_values(m.components[0].weight, S, B);
  const auto sieve = detail::shared_sieve(B);
  const u64 T2 = static_cast<u64>(std::floor(static_cast<long double>(T) * T + 1e-9L));
  return parallel_sum(Q.size(), threads, [&](std::size_t i) -> u128 {
    const u64 q = Q[i];
    const u64 P = h == Height::naive ? B : (q * q > T2 ? 0 : isqrt(T2 - q * q));
    if (h == Height::euclidean && q * q > T2) return 0;
    const auto ps = primes_of(q, *sieve);
    return 2 * static_cast<u128>(coprime_count_primes(P, ps)) + (q == 1 ? 1 : 0);
  });
}

u128 count_pn(const OrbifoldModel& m, double T, const PrimeSet& S, int threads) {
  const u64 B = floor_T(T);
  const auto X = detail::accepted_values(m.components[0].weight, S, B);
  const auto sieve = detail::shared_sieve(B);
  return parallel_sum(X.size(), threads,
                      [&](std::size_t i) { return primitive_completions(X[i], B, m.dim, *sieve); });
}

u128 count_p2(const OrbifoldModel& m, double T, const PrimeSet& S) {
  const u64 B = floor_T(T);
  const auto sieve = detail::shared_sieve(B);
  // A_i(d) = #{accepted values v <= B for component i with d | v}, d squarefree.
  std::vector<std::vector<u64>> A(3, std::vector<u64>(B + 1, 0));
  for (int i = 0; i < 3; ++i)
    for (u64 v : detail::accepted_values(m.components[i].weight, S, B))
      for (const auto& [d, mu] : mobius_divisors(primes_of(v, *sieve))) ++A[i][d];
  i128 total = 0;
  for (u64 d = 1; d <= B; ++d) {
    if (A[0][d] == 0 || A[1][d] == 0 || A[2][d] == 0) continue;
    u64 r = d;
    int mu = 1;
    bool sqfree = true;
    while (r > 1) {
      const u64 p = sieve->smallest_prime_factor(r);
      r /= p;
      if (r % p == 0) {
        sqfree = false;
        break;
      }
      mu = -mu;
    }
    if (!sqfree) continue;
    total += mu * static_cast<i128>(A[0][d]) * A[1][d] * A[2][d];
  }
  return 4 * static_cast<u128>(total);
}

struct ByLists {
  std::vector<u64> x0;        // positive accepted values for D0
  std::vector<i64> x1;        // signed accepted values for D1, ascending
  std::vector<char> ok2;      // ok2[|x2|] for D2, index <= B
  std::vector<i64> s;         // signed accepted values for D3 with |s| <= 3B, ascending
  u64 B;
};

ByLists by_lists(const OrbifoldModel& m, u64 B, const PrimeSet& S) {
  ByLists L;
  L.B = B;
  L.x0 = detail::accepted_values(m.components[0].weight, S, B);
  auto signed_list = [](const std::vector<u64>& v) {
    std::vector<i64> out;
    for (auto it = v.rbegin(); it != v.rend(); ++it) out.push_back(-static_cast<i64>(*it));
    for (u64 x : v) out.push_back(static_cast<i64>(x));
    return out;
  };
  L.x1 = signed_list(detail::accepted_values(m.components[1].weight, S, B));
  L.ok2.assign(B + 1, 0);
  for (u64 v : detail::accepted_values(m.components[2].weight, S, B)) L.ok2[v] = 1;
  L.s = signed_list(detail::accepted_values(m.components[3].weight, S, 3 * B));
  return L;
}

template <class Visit>
void by_scan_row(const ByLists& L, std::size_t i, Visit&& visit) {
  const i64 x0 = static_cast<i64>(L.x0[i]);
  const i64 B = static_cast<i64>(L.B);
  for (i64 x1 : L.x1) {
    const u64 g01 = std::gcd(static_cast<u64>(x0), static_cast<u64>(x1 < 0 ? -x1 : x1));
    // x2 = s - x0 - x1 must lie in [-B, B].
    const i64 lo = x0 + x1 - B, hi = x0 + x1 + B;
    for (auto it = std::lower_bound(L.s.begin(), L.s.end(), lo); it != L.s.end() && *it <= hi; ++it) {
      const i64 x2 = *it - x0 - x1;
      if (x2 == 0) continue;
      const u64 a2 = static_cast<u64>(x2 < 0 ? -x2 : x2);
      if (!L.ok2[a2] || std::gcd(g01, a2) != 1) continue;
      visit(x0, x1, x2);
    }
  }
}

u128 count_by(const OrbifoldModel& m, double T, const PrimeSet& S, bool thin_filter, int threads) {
  const ByLists L = by_lists(m, floor_T(T), S);
  return parallel_sum(L.x0.size(), threads, [&](std::size_t i) -> u128 {
    u128 c = 0;
    by_scan_row(L, i, [&](i64 x0, i64 x1, i64 x2) {
      if (thin_filter && thin_filter_by(PrimitivePoint({x0, x1, x2}))) return;
      ++c;
    });
    return c;
  });
}

// Exponent vector of n over its prime list, for divisor enumeration.
struct Factored {
  std::vector<u64> primes;
  std::vector<int> exps;
};

Factored factored(u64 n, const SieveTable& t) {
  Factored f;
  while (n > 1) {
    const u64 p = t.smallest_prime_factor(n);
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.primes.push_back(p);
    f.exps.push_back(e);
  }
  return f;
}

bool exponent_ok(int e, u64 p, const Weight& w, const PrimeSet& S) {
  if (e == 0 || detail::in_set(S, p)) return true;
  return !w.is_dlt() && e >= w.m();
}

u128 count_blowup(const OrbifoldModel& m, double T, const PrimeSet& S, int threads) {
  const u64 B = floor_T(T);
  const auto sieve = detail::shared_sieve(B);
  const Weight wE = m.components[0].weight, wD = m.components[1].weight;
  const int rest = m.dim - 1;  // coordinates x2..xn
  return parallel_sum(B, threads, [&](std::size_t idx) -> u128 {
    const u64 x0 = idx + 1;
    const Factored f = factored(x0, *sieve);
    u128 acc = 0;
    std::vector<int> a(f.primes.size(), 0);  // exponents of g
    for (;;) {
      bool ok = true;
      u64 g = 1;
      for (std::size_t k = 0; k < a.size() && ok; ++k) {
        ok = exponent_ok(a[k], f.primes[k], wE, S) && exponent_ok(f.exps[k] - a[k], f.primes[k], wD, S);
        for (int r = 0; r < a[k]; ++r) g *= f.primes[k];
      }
      if (ok) {
        const u64 co = x0 / g;
        std::vector<u64> co_primes;
        for (std::size_t k = 0; k < a.size(); ++k)
          if (f.exps[k] > a[k]) co_primes.push_back(f.primes[k]);
        const u128 c1 = 2 * static_cast<u128>(coprime_count_primes(B / g, co_primes)) + (co == 1 ? 1 : 0);
        acc += c1 * primitive_completions(g, B, rest, *sieve);
      }
      std::size_t k = 0;
      while (k < a.size() && a[k] == f.exps[k]) a[k++] = 0;
      if (k == a.size()) break;
      ++a[k];
    }
    return acc;
  });
}

u128 count_dp_d5(const OrbifoldModel& m, double T, const PrimeSet& S, int threads) {
  const u64 B = floor_T(T);
  const auto sieve = detail::shared_sieve(2 * B + 1);
  std::vector<Weight> w;
  for (const auto& c : m.components) w.push_back(c.weight);
  return parallel_sum(B, threads, [&](std::size_t idx) -> u128 {
    const i64 x0 = static_cast<i64>(idx) + 1;
    // Primes whose exponent in x0 is too small for E3 must divide x1, else
    // they survive in f^(3)(x0) with that exponent.
    u64 step = 1;
    const Factored f = factored(static_cast<u64>(x0), *sieve);
    for (std::size_t k = 0; k < f.primes.size(); ++k)
      if (!exponent_ok(f.exps[k], f.primes[k], w[2], S)) step *= f.primes[k];
    u128 acc = 0;
    for (i64 x1 = -static_cast<i64>(B - B % step); x1 <= static_cast<i64>(B); x1 += static_cast<i64>(step)) {
      if (x1 == 0) continue;
      std::uint64_t v[6];
      detail::dp_d5_chains(x0, x1, v);
      bool ok = true;
      for (int i = 0; i < 6 && ok; ++i) ok = detail::accepts(v[i], w[i], S, sieve.get());
      if (!ok) continue;
      const u64 g = std::gcd(static_cast<u64>(x0), static_cast<u64>(x1 < 0 ? -x1 : x1));
      acc += 2 * static_cast<u128>(coprime_count_primes(B, primes_of(g, *sieve)));
    }
    return acc;
  });
}

bool single_component(Backend b) { return b == Backend::p1 || b == Backend::pn_hyperplane; }

void check_supported(const OrbifoldModel& model, Kind kind, Height height) {
  const Backend b = backend_of(model);
  if (height == Height::euclidean && b != Backend::p1)
    throw std::invalid_argument("height: euclidean height is only defined for p1");
  if (kind == Kind::thin_filtered && b != Backend::by_four_lines)
    throw std::invalid_argument("kind: thin-filtered counts exist only for by_four_lines");
}

}  // namespace

double certified_range(const OrbifoldModel& model, Kind kind, Height height) {
  check_supported(model, kind, height);
  const Backend b = backend_of(model);
  if (kind == Kind::weak && !single_component(b)) return kBruteForceCap;
  switch (b) {
    case Backend::p1: return 2e7;
    case Backend::pn_hyperplane: return 1e6;
    case Backend::p2_three_lines: return 1e7;
    case Backend::by_four_lines: return 1e5;
    case Backend::blowup_pn: return 1e6;
    case Backend::dp_d5: return 1e5;
  }
  return 0;
}

std::uint64_t count_points(const OrbifoldModel& model, double T, Kind kind, const PrimeSet& S, Height height,
                           int threads) {
  if (!(T >= 1)) throw std::invalid_argument("T must be >= 1");
  const double cap = certified_range(model, kind, height);
  if (T > cap)
    throw std::out_of_range("T = " + std::to_string(T) + " exceeds the certified range " + std::to_string(cap) +
                            " of " + model.name + " (" + to_string(kind) + ")");
  const Backend b = backend_of(model);
  if (kind == Kind::weak && !single_component(b)) return count_points_bruteforce(model, T, kind, S, height);
  switch (b) {
    case Backend::p1: return checked(count_p1(model, T, S, height, threads));
    case Backend::pn_hyperplane: return checked(count_pn(model, T, S, threads));
    case Backend::p2_three_lines: return checked(count_p2(model, T, S));
    case Backend::by_four_lines: return checked(count_by(model, T, S, kind == Kind::thin_filtered, threads));
    case Backend::blowup_pn: return checked(count_blowup(model, T, S, threads));
    case Backend::dp_d5: return checked(count_dp_d5(model, T, S, threads));
  }
  return 0;
}

void for_each_by_point(const OrbifoldModel& model, std::uint64_t T, const PrimeSet& S,
                       const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& visit) {
  if (backend_of(model) != Backend::by_four_lines) throw std::invalid_argument("for_each_by_point needs by_four_lines");
  const ByLists L = by_lists(model, T, S);
  for (std::size_t i = 0; i < L.x0.size(); ++i) by_scan_row(L, i, visit);
}

}  // namespace campana
