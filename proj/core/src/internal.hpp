#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "campana/arith.hpp"
#include "campana/geometry.hpp"
#include "campana/points.hpp"
#include "campana/zoo.hpp"

namespace campana::detail {

/// Process-wide read-only sieve covering at least [0, limit].
std::shared_ptr<const SieveTable> shared_sieve(std::uint64_t limit);

inline bool in_set(const PrimeSet& S, std::uint64_t p) {
  for (auto q : S)
    if (q == p) return true;
  return false;
}

/// Does |value| satisfy the Campana condition for one component weight?
/// value must be >= 1. Uses the table when it covers value.
inline bool accepts(std::uint64_t value, const Weight& w, const PrimeSet& S, const SieveTable* table) {
  if (value == 1) return true;
  const Factorization f = factorize_any(value, table);
  for (const auto& pp : f.factors) {
    if (in_set(S, pp.prime)) continue;
    if (w.is_dlt()) return false;
    if (pp.exponent < w.m()) return false;
  }
  return true;
}

/// Accepted values in [1, bound], ascending.
std::vector<std::uint64_t> accepted_values(const Weight& w, const PrimeSet& S, std::uint64_t bound);

/// min over primes p not in S of v_p(n) for n <= limit; 255 when no such prime.
std::vector<std::uint8_t> min_exponent_table(std::uint64_t limit, const PrimeSet& S);

inline bool accepts_minexp(std::uint8_t e, const Weight& w) {
  if (e == 255) return true;
  return !w.is_dlt() && e >= w.m();
}

/// Allocation-free forms of in_open_orbit / boundary_values (coords of the right length).
bool open_orbit_raw(Backend b, const std::int64_t* c);
std::size_t boundary_values_raw(Backend b, const std::int64_t* c, std::uint64_t* out);

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b);

/// Six gcd-chain values of the D5 model (components E1..E6); false if x0 x1 = 0.
bool dp_d5_chains(std::int64_t x0, std::int64_t x1, std::uint64_t out[6]);

}  // namespace campana::detail
