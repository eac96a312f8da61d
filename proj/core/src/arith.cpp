#include "campana/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace campana {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr char kMagic[9] = {'C', 'M', 'P', 'S', 'I', 'E', 'V', 'E', '1'};

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  std::mt19937_64 rng(n);
  for (;;) {
    const u64 c = rng() % (n - 1) + 1;
    u64 x = rng() % n, y = x, d = 1;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    // Brent-style batching of gcds.
    u64 q = 1;
    int steps = 0;
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      q = mul_mod(q, x > y ? x - y : y - x, n);
      if (++steps % 64 == 0 || q == 0) {
        d = std::gcd(q == 0 ? (x > y ? x - y : y - x) : q, n);
        if (q == 0) break;
      }
    }
    if (d != 1 && d != n) return d;
  }
}

void split(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const u64 d = pollard_rho(n);
  split(d, out);
  split(n / d, out);
}

Factorization collect(u64 value, std::vector<u64>& primes) {
  std::sort(primes.begin(), primes.end());
  Factorization f;
  f.value = value;
  for (u64 p : primes) {
    if (!f.factors.empty() && f.factors.back().prime == p)
      ++f.factors.back().exponent;
    else
      f.factors.push_back({p, 1});
  }
  return f;
}

Factorization factor_with_table(u64 n, const SieveTable& t) {
  Factorization f;
  f.value = n;
  while (n > 1) {
    const u64 p = t.smallest_prime_factor(n);
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  return f;
}

Factorization factor_without_table(u64 n) {
  std::vector<u64> primes;
  const u64 value = n;
  for (u64 p : {2ULL, 3ULL, 5ULL}) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  // Wheel-30 trial division up to a small bound, then Pollard rho.
  static constexpr std::array<u64, 8> kWheel = {4, 2, 4, 2, 4, 6, 2, 6};
  u64 p = 7;
  for (std::size_t i = 0; p <= 2000 && p * p <= n; p += kWheel[i++ % 8]) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  split(n, primes);
  return collect(value, primes);
}

}  // namespace

SieveTable::SieveTable(std::uint64_t limit) : limit_(limit), spf_(limit + 1, 0) {
  if (limit >= (1ULL << 32)) throw std::invalid_argument("sieve limit too large");
  if (limit >= 1) spf_[1] = 1;
  for (u64 i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes_) {
      if (p > spf_[i] || static_cast<u64>(p) * i > limit) break;
      spf_[p * i] = p;
    }
  }
}

SieveTable::SieveTable(std::uint64_t limit, std::vector<std::uint32_t> spf)
    : limit_(limit), spf_(std::move(spf)) {
  collect_primes();
}

void SieveTable::collect_primes() {
  primes_.clear();
  for (u64 i = 2; i <= limit_; ++i)
    if (spf_[i] == i) primes_.push_back(static_cast<std::uint32_t>(i));
}

void SieveTable::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write sieve cache " + file.string());
  out.write(kMagic, sizeof kMagic);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(limit_ >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
  std::vector<unsigned char> body(spf_.size() * 4);
  for (std::size_t k = 0; k < spf_.size(); ++k)
    for (int i = 0; i < 4; ++i) body[4 * k + i] = static_cast<unsigned char>(spf_[k] >> (8 * i));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("short write to sieve cache " + file.string());
}

SieveTable SieveTable::load(const std::filesystem::path& file, std::uint64_t expected_limit) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sieve cache " + file.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("sieve cache has bad magic: " + file.string());
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("sieve cache truncated header");
  u64 limit = 0;
  for (int i = 0; i < 8; ++i) limit |= static_cast<u64>(buf[i]) << (8 * i);
  if (limit != expected_limit)
    throw std::runtime_error("sieve cache limit " + std::to_string(limit) + " != expected " +
                             std::to_string(expected_limit));
  std::vector<unsigned char> body((limit + 1) * 4);
  if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
    throw std::runtime_error("sieve cache truncated body");
  char extra;
  if (in.read(&extra, 1)) throw std::runtime_error("sieve cache has trailing bytes");
  std::vector<std::uint32_t> spf(limit + 1);
  for (u64 k = 0; k <= limit; ++k) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(body[4 * k + i]) << (8 * i);
    spf[k] = v;
  }
  // Cheap structural check: every entry must divide its index and be the
  // smallest such prime candidate recorded.
  if ((limit >= 1 && spf[1] != 1) || spf[0] != 0)
    throw std::runtime_error("sieve cache has corrupted sentinel entries");
  for (u64 k = 2; k <= limit; ++k) {
    const u64 p = spf[k];
    if (p < 2 || k % p != 0 || spf[p] != p || (k / p > 1 && spf[k / p] < p))
      throw std::runtime_error("sieve cache entry " + std::to_string(k) + " is corrupted");
  }
  return SieveTable(limit, std::move(spf));
}

SieveTable SieveTable::load_or_build(const std::filesystem::path& dir, std::uint64_t limit,
                                     std::string* diagnostic) {
  if (diagnostic) diagnostic->clear();
  const auto file = dir / ("sieve_" + std::to_string(limit) + ".bin");
  std::error_code ec;
  if (std::filesystem::exists(file, ec)) {
    try {
      return load(file, limit);
    } catch (const std::exception& e) {
      if (diagnostic) *diagnostic = e.what();
    }
  }
  SieveTable t(limit);
  std::filesystem::create_directories(dir, ec);
  try {
    t.save(file);
  } catch (const std::exception& e) {
    if (diagnostic && diagnostic->empty()) *diagnostic = e.what();
  }
  return t;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all n < 3.3e24.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

Factorization factorize(std::int64_t n, const SieveTable* table) {
  if (n <= 0) throw std::invalid_argument("factorize: n must be positive, got " + std::to_string(n));
  const u64 u = static_cast<u64>(n);
  if (table) {
    if (u > table->limit())
      throw std::out_of_range("factorize: " + std::to_string(n) + " exceeds sieve limit " +
                              std::to_string(table->limit()));
    return factor_with_table(u, *table);
  }
  return factor_without_table(u);
}

Factorization factorize_any(std::uint64_t n, const SieveTable* table) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive, got 0");
  if (table && n <= table->limit()) return factor_with_table(n, *table);
  return factor_without_table(n);
}

int valuation(std::uint64_t n, std::uint64_t p) {
  if (n == 0) throw std::invalid_argument("valuation of 0");
  int k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  return k;
}

bool is_m_full(std::int64_t n, int m, const SieveTable* table) {
  if (m < 1) throw std::invalid_argument("is_m_full: m must be >= 1");
  const Factorization f = factorize(n, table);
  return std::all_of(f.factors.begin(), f.factors.end(), [m](const PrimePower& pp) { return pp.exponent >= m; });
}

std::uint64_t isqrt(std::uint64_t n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t iroot(std::uint64_t n, int k) {
  if (k == 1) return n;
  if (k == 2) return isqrt(n);
  auto pow_le = [&](u64 r) {
    u128 acc = 1;
    for (int i = 0; i < k; ++i) {
      acc *= r;
      if (acc > n) return false;
    }
    return true;
  };
  u64 r = static_cast<u64>(std::pow(static_cast<long double>(n), 1.0L / k));
  while (r > 0 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

bool is_perfect_square(std::int64_t n) {
  if (n < 0) return false;
  const u64 r = isqrt(static_cast<u64>(n));
  return r * r == static_cast<u64>(n);
}

std::vector<std::uint64_t> m_full_list(std::uint64_t limit, int m) {
  if (m < 1) throw std::invalid_argument("m_full_list: m must be >= 1");
  std::vector<u64> out;
  if (limit == 0) return out;
  if (m == 1) {
    out.resize(limit);
    std::iota(out.begin(), out.end(), 1);
    return out;
  }
  // Every m-full n is uniquely a^m * prod_{k=m+1}^{2m-1} b_k^k with the b_k
  // squarefree and pairwise coprime.
  const u64 bmax = iroot(limit, m + 1);
  std::vector<char> squarefree(bmax + 1, 1);
  for (u64 p = 2; p * p <= bmax; ++p)
    for (u64 q = p * p; q <= bmax; q += p * p) squarefree[q] = 0;

  std::vector<u64> chosen;
  std::function<void(int, u64)> rec = [&](int k, u64 prod) {
    if (k == m) {
      const u64 amax = iroot(limit / prod, m);
      for (u64 a = 1; a <= amax; ++a) {
        u64 pw = 1;
        for (int i = 0; i < m; ++i) pw *= a;
        out.push_back(prod * pw);
      }
      return;
    }
    const u64 cap = iroot(limit / prod, k);
    for (u64 b = 1; b <= cap; ++b) {
      if (!squarefree[b]) continue;
      if (b > 1 && std::any_of(chosen.begin(), chosen.end(), [b](u64 c) { return std::gcd(b, c) != 1; }))
        continue;
      u64 pw = 1;
      for (int i = 0; i < k; ++i) pw *= b;
      chosen.push_back(b);
      rec(k - 1, prod * pw);
      chosen.pop_back();
    }
  };
  rec(2 * m - 1, 1);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::uint64_t, int>> mobius_divisors(std::span<const std::uint64_t> primes) {
  std::vector<std::pair<u64, int>> out{{1, 1}};
  out.reserve(std::size_t{1} << primes.size());
  for (u64 p : primes) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back({out[i].first * p, -out[i].second});
  }
  return out;
}

std::vector<std::pair<std::uint64_t, int>> mobius_divisors(const Factorization& f) {
  std::vector<u64> primes;
  for (const auto& pp : f.factors) primes.push_back(pp.prime);
  return mobius_divisors(primes);
}

std::uint64_t coprime_count_primes(std::uint64_t bound, std::span<const std::uint64_t> primes) {
  // Recursive inclusion-exclusion; prunes once the divisor exceeds the bound.
  std::function<std::int64_t(std::size_t, u64)> rec = [&](std::size_t i, u64 d) -> std::int64_t {
    std::int64_t total = static_cast<std::int64_t>(bound / d);
    for (std::size_t j = i; j < primes.size(); ++j) {
      const u64 nd = d * primes[j];
      if (nd > bound) continue;
      total -= rec(j + 1, nd);
    }
    return total;
  };
  return static_cast<u64>(rec(0, 1));
}

std::uint64_t coprime_count(std::uint64_t bound, std::uint64_t q, const SieveTable* table) {
  if (q == 0) throw std::invalid_argument("coprime_count: q must be >= 1");
  const Factorization f = factorize_any(q, table);
  std::vector<u64> primes;
  for (const auto& pp : f.factors) primes.push_back(pp.prime);
  return coprime_count_primes(bound, primes);
}

std::vector<std::uint64_t> totients(std::uint64_t limit) {
  std::vector<u64> phi(limit + 1);
  std::iota(phi.begin(), phi.end(), 0);
  for (u64 p = 2; p <= limit; ++p) {
    if (phi[p] != p) continue;
    for (u64 k = p; k <= limit; k += p) phi[k] -= phi[k] / p;
  }
  return phi;
}

}  // namespace campana
