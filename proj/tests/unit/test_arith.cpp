#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "campana/arith.hpp"

using namespace campana;

TEST_SUITE("arith") {

TEST_CASE("factorize small oracles") {
  const auto f72 = factorize(72);
  REQUIRE(f72.factors.size() == 2);
  CHECK(f72.factors[0] == PrimePower{2, 3});
  CHECK(f72.factors[1] == PrimePower{3, 2});
  const auto f97 = factorize(97);
  REQUIRE(f97.factors.size() == 1);
  CHECK(f97.factors[0] == PrimePower{97, 1});
  CHECK(factorize(1).factors.empty());
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
  CHECK_THROWS_AS(factorize(-5), std::invalid_argument);

  SieveTable t(1000);
  CHECK_THROWS_AS(factorize(1001, &t), std::out_of_range);
  CHECK(factorize_any(1001, &t).factors.size() == 3);  // 7 11 13
}

TEST_CASE("factorization reconstructs n, with and without a table") {
  SieveTable t(200000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(1, 200000);
  for (int it = 0; it < 2000; ++it) {
    const auto n = dist(rng);
    const auto a = factorize(n);
    const auto b = factorize(n, &t);
    std::uint64_t prod = 1;
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
      CHECK(is_prime(a.factors[i].prime));
      if (i) CHECK(a.factors[i - 1].prime < a.factors[i].prime);
      for (int e = 0; e < a.factors[i].exponent; ++e) prod *= a.factors[i].prime;
    }
    CHECK(prod == static_cast<std::uint64_t>(n));
    CHECK(a.factors == b.factors);
  }
  // large semiprime goes through the fallback path
  const std::uint64_t big = 999999937ULL * 999999929ULL;
  const auto f = factorize_any(big, &t);
  REQUIRE(f.factors.size() == 2);
  CHECK(f.factors[0].prime == 999999929ULL);
}

TEST_CASE("is_m_full") {
  CHECK(is_m_full(72, 2));
  CHECK_FALSE(is_m_full(24, 3));
  CHECK(is_m_full(1, 5));
  CHECK_THROWS(is_m_full(-8, 3));
  CHECK(is_m_full(12, 1));
  CHECK_FALSE(is_m_full(12, 2));
}

TEST_CASE("m_full_list oracles") {
  const std::vector<std::uint64_t> sq = {1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100};
  CHECK(m_full_list(100, 2) == sq);
  CHECK(m_full_list(7, 3) == std::vector<std::uint64_t>{1});
  CHECK(m_full_list(10, 1).size() == 10);
}

TEST_CASE("m_full_list matches the predicate") {
  const std::uint64_t N = 200000;
  SieveTable t(N);
  for (int m = 1; m <= 5; ++m) {
    std::vector<std::uint64_t> want;
    for (std::uint64_t n = 1; n <= N; ++n)
      if (is_m_full(static_cast<std::int64_t>(n), m, &t)) want.push_back(n);
    CHECK_MESSAGE(m_full_list(N, m) == want, "m = " << m);
  }
}

TEST_CASE("coprime_count") {
  CHECK(coprime_count(10, 4) == 5);
  CHECK(coprime_count(10, 9) == 7);
  CHECK(coprime_count(0, 6) == 0);
  CHECK(coprime_count(17, 1) == 17);
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    const std::uint64_t b = rng() % 500, q = 1 + rng() % 2000;
    std::uint64_t want = 0;
    for (std::uint64_t k = 1; k <= b; ++k) want += std::gcd(k, q) == 1;
    CHECK(coprime_count(b, q) == want);
  }
}

TEST_CASE("mobius divisors of rad") {
  const auto d = mobius_divisors(factorize(360));
  CHECK(d.size() == 8);
  long sum = 0;
  for (auto [v, mu] : d) {
    CHECK(360 % v == 0);
    sum += mu;
  }
  CHECK(sum == 0);
}

TEST_CASE("integer roots and squares") {
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(99) == 9);
  CHECK(isqrt(100) == 10);
  CHECK(isqrt(~0ULL) == 4294967295ULL);
  CHECK(iroot(1000, 3) == 10);
  CHECK(iroot(999, 3) == 9);
  CHECK(iroot(1ULL << 60, 5) == 4096);
  CHECK(is_perfect_square(36));
  CHECK_FALSE(is_perfect_square(35));
  CHECK_FALSE(is_perfect_square(-4));
  CHECK(valuation(96, 2) == 5);
  const auto phi = totients(12);
  CHECK(phi[1] == 1);
  CHECK(phi[12] == 4);
  CHECK(phi[7] == 6);
}

TEST_CASE("sieve cache round trip and rejection") {
  const auto dir = std::filesystem::temp_directory_path() / "campana_arith_cache";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::string diag;
  const auto a = SieveTable::load_or_build(dir, 5000, &diag);
  CHECK(diag.empty());
  const auto file = dir / "sieve_5000.bin";
  REQUIRE(std::filesystem::exists(file));
  const auto b = SieveTable::load(file, 5000);
  CHECK(a.entries() == b.entries());
  CHECK_THROWS(SieveTable::load(file, 4000));

  // flip one entry: 10 gets spf 3
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(9 + 8 + 4 * 10);
    const std::uint32_t bad = 3;
    f.write(reinterpret_cast<const char*>(&bad), 4);
  }
  CHECK_THROWS(SieveTable::load(file, 5000));
  const auto c = SieveTable::load_or_build(dir, 5000, &diag);
  CHECK_FALSE(diag.empty());
  CHECK(c.entries() == a.entries());
  CHECK_NOTHROW(SieveTable::load(file, 5000));

  // truncated file
  std::filesystem::resize_file(file, 100);
  const auto d = SieveTable::load_or_build(dir, 5000, &diag);
  CHECK_FALSE(diag.empty());
  CHECK(d.entries() == a.entries());
  std::filesystem::remove_all(dir);
}

}
