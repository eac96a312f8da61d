#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace campana {

struct PrimePower {
  std::uint64_t prime;
  int exponent;
  bool operator==(const PrimePower&) const = default;
};

/// Canonical factorization: primes strictly increasing, exponents >= 1.
struct Factorization {
  std::uint64_t value = 1;
  std::vector<PrimePower> factors;
};

/// Smallest-prime-factor table on [0, limit]. Entry 1 is the sentinel 1.
class SieveTable {
 public:
  explicit SieveTable(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_[n]; }
  const std::vector<std::uint32_t>& entries() const { return spf_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  /// Binary cache: "CMPSIEVE1", u64 LE limit, then u32 LE entries for 0..limit.
  void save(const std::filesystem::path& file) const;
  /// Throws std::runtime_error on bad magic, wrong limit, truncation or bad entries.
  static SieveTable load(const std::filesystem::path& file, std::uint64_t expected_limit);

  /// Load `dir/sieve_<limit>.bin` if valid, otherwise build and rewrite it.
  /// A rejected cache is reported through `diagnostic` (empty when the cache was fine).
  static SieveTable load_or_build(const std::filesystem::path& dir, std::uint64_t limit,
                                  std::string* diagnostic = nullptr);

 private:
  SieveTable(std::uint64_t limit, std::vector<std::uint32_t> spf);
  void collect_primes();

  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

bool is_prime(std::uint64_t n);

/// Throws std::invalid_argument for n <= 0 and std::out_of_range when a table
/// is supplied but n exceeds its limit.
Factorization factorize(std::int64_t n, const SieveTable* table = nullptr);

/// Same, but silently falls back to trial division / Pollard rho above the table.
Factorization factorize_any(std::uint64_t n, const SieveTable* table);

int valuation(std::uint64_t n, std::uint64_t p);

bool is_m_full(std::int64_t n, int m, const SieveTable* table = nullptr);

/// Ascending m-full integers in [1, limit].
std::vector<std::uint64_t> m_full_list(std::uint64_t limit, int m);

/// Squarefree divisors d of rad(n) paired with mu(d).
std::vector<std::pair<std::uint64_t, int>> mobius_divisors(const Factorization& f);
std::vector<std::pair<std::uint64_t, int>> mobius_divisors(std::span<const std::uint64_t> primes);

/// #{1 <= k <= bound : gcd(k, q) = 1}.
std::uint64_t coprime_count(std::uint64_t bound, std::uint64_t q, const SieveTable* table = nullptr);
std::uint64_t coprime_count_primes(std::uint64_t bound, std::span<const std::uint64_t> primes);

std::uint64_t isqrt(std::uint64_t n);
/// Largest r with r^k <= n.
std::uint64_t iroot(std::uint64_t n, int k);
bool is_perfect_square(std::int64_t n);

/// Euler phi for 0..limit.
std::vector<std::uint64_t> totients(std::uint64_t limit);

}  // namespace campana
