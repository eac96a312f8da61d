#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include <json.hpp>

#include "campana/arith.hpp"
#include "campana/points.hpp"
#include "campana/zoo.hpp"

using namespace campana;

namespace {

std::vector<Weight> klt(std::initializer_list<int> ms) {
  std::vector<Weight> w;
  for (int m : ms) w.push_back(Weight::klt(m));
  return w;
}

PrimitivePoint P(std::vector<std::int64_t> c) { return PrimitivePoint(std::move(c)); }

Weight random_weight(std::mt19937_64& rng) {
  const int k = static_cast<int>(rng() % 5);
  return k == 4 ? Weight::dlt() : Weight::klt(k + 1);
}

}  // namespace

TEST_SUITE("points") {

TEST_CASE("primitive points") {
  CHECK_THROWS(P({0, 0, 0}));
  CHECK_THROWS(P({2, 4, 6}));
  CHECK_THROWS(P({-1, 2, 3}));
  CHECK(PrimitivePoint::normalize({-2, 4, -6}).coords == std::vector<std::int64_t>{1, -2, 3});
  CHECK(PrimitivePoint::normalize({0, -3, 6}).coords == std::vector<std::int64_t>{0, 1, -2});
}

TEST_CASE("intersection profiles") {
  const auto p2 = make_zoo_model("p2_three_lines");
  const auto prof = intersection_profile(p2, P({1, 4, 9}));
  CHECK(prof.entries.size() == 2);
  CHECK(prof.at(2, "D1") == 2);
  CHECK(prof.at(3, "D2") == 2);
  CHECK(prof.at(5, "D0") == 0);

  const auto bl = make_zoo_model("blowup_p2");
  const auto pb = intersection_profile(bl, P({4, 8, 1}));
  CHECK(pb.at(2, "E") == 2);
  CHECK(pb.entries.size() == 1);

  CHECK_THROWS_AS(boundary_values(p2, P({0, 1, 1})), std::domain_error);
  CHECK_FALSE(in_open_orbit(p2, P({0, 1, 1})));
  CHECK_FALSE(in_open_orbit(make_zoo_model("by_four_lines"), P({1, 1, -2})));
}

TEST_CASE("membership examples") {
  const auto p2 = make_zoo_model("p2_three_lines", klt({2, 2, 2}));
  CHECK(is_campana(p2, P({1, 4, 9})));
  CHECK_FALSE(is_campana(p2, P({1, 2, 3})));
  CHECK(is_weak_campana(p2, P({1, 2, 2})));
  CHECK_FALSE(is_campana(p2, P({1, 2, 2})));
  CHECK(is_campana(p2, P({1, 2, 3}), {2, 3}));
  CHECK_FALSE(is_campana(p2, P({1, 2, 3}), {2}));
  CHECK(thin_filter_by(P({1, -9, 4})));
  CHECK_FALSE(thin_filter_by(P({1, 4, 4})));
  // dlt: no prime may divide
  const auto d = make_zoo_model("p2_three_lines", {Weight::dlt(), Weight::klt(2), Weight::klt(2)});
  CHECK(is_campana(d, P({1, 4, 9})));
  CHECK_FALSE(is_campana(d, P({2, 9, 25})));
  CHECK(is_campana(d, P({2, 9, 25}), {2}));
}

TEST_CASE("heights") {
  CHECK(height_of(P({3, -4}), Height::naive) == 4);
  CHECK(height_of(P({3, -4}), Height::euclidean) == doctest::Approx(5));
}

TEST_CASE("frozen counts") {
  CHECK(count_points(make_zoo_model("p1", klt({2})), 10, Kind::campana) == 55);
  CHECK(count_points(make_zoo_model("p2_three_lines", klt({2, 2, 2})), 10, Kind::campana) == 220);
  CHECK(count_points(make_zoo_model("p2_three_lines", klt({2, 2, 2})), 1e4, Kind::campana) == 18002596ULL);
  CHECK(count_weak_subfamily_A(1000000) == 5403916016ULL);
}

TEST_CASE("certified range is enforced") {
  const auto p2 = make_zoo_model("p2_three_lines");
  CHECK_THROWS_AS(count_points(p2, certified_range(p2, Kind::campana, Height::naive) * 2, Kind::campana),
                  std::out_of_range);
  CHECK_THROWS(count_points(p2, 0.5, Kind::campana));
  CHECK_THROWS(count_points(p2, 10, Kind::thin_filtered));
}

TEST_CASE("weak subfamily A against a triple loop") {
  for (std::uint64_t T : {1, 4, 10, 37, 100}) {
    std::uint64_t want = 0;
    for (std::uint64_t a = 1; a <= T; ++a) {
      if (!is_perfect_square(static_cast<std::int64_t>(a))) continue;
      for (std::uint64_t b = 1; b <= T; ++b)
        for (std::uint64_t c = 1; c <= T; ++c)
          if (std::gcd(a, std::gcd(b, c)) == 1 && is_perfect_square(static_cast<std::int64_t>(b * c))) ++want;
    }
    CHECK_MESSAGE(count_weak_subfamily_A(T) == want, "T = " << T);
  }
}

TEST_CASE("campana implies weak campana") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> coord(-400, 400);
  for (const char* name : {"p2_three_lines", "by_four_lines", "dp_d5", "blowup_p2"}) {
    const auto base = make_zoo_model(name);
    int tested = 0;
    for (int it = 0; it < 4000; ++it) {
      std::vector<std::int64_t> c(3);
      for (auto& v : c) v = coord(rng);
      // bias toward powerful coordinates so both predicates fire
      if (it % 2) for (auto& v : c) v = v * v * (v % 3 == 0 ? 1 : v);
      if (std::gcd(std::gcd(c[0], c[1]), c[2]) == 0) continue;
      const auto x = PrimitivePoint::normalize(c);
      if (!in_open_orbit(base, x)) continue;
      std::vector<Weight> w;
      for (std::size_t i = 0; i < base.components.size(); ++i) w.push_back(random_weight(rng));
      const auto m = with_weights(base, w);
      if (is_campana(m, x)) {
        CHECK(is_weak_campana(m, x));
        ++tested;
      }
    }
    CHECK(tested > 0);
  }
}

TEST_CASE("is_campana agrees with the intersection profile") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> coord(1, 3000);
  const auto base = make_zoo_model("by_four_lines");
  for (int it = 0; it < 3000; ++it) {
    std::vector<std::int64_t> c = {coord(rng), coord(rng) * (rng() % 2 ? 1 : -1), coord(rng) * (rng() % 2 ? 1 : -1)};
    if (it % 3 == 0) for (auto& v : c) v = v * std::abs(v) % 100000;
    if (c[0] == 0) c[0] = 1;
    const auto x = PrimitivePoint::normalize(c);
    if (!in_open_orbit(base, x)) continue;
    std::vector<Weight> w;
    for (int i = 0; i < 4; ++i) w.push_back(random_weight(rng));
    const auto m = with_weights(base, w);
    bool ok = true;
    for (const auto& [key, n] : intersection_profile(m, x).entries) {
      const auto& wt = m.component(key.second).weight;
      if (wt.is_dlt() || n < wt.m()) ok = false;
    }
    CHECK(is_campana(m, x) == ok);
  }
}

TEST_CASE("counts are monotone in T and in the weights") {
  const auto p2 = make_zoo_model("p2_three_lines");
  std::uint64_t last = 0;
  for (double T : geometric_grid(1, 5000, 8)) {
    const auto n = count_points(p2, T, Kind::campana);
    CHECK(n >= last);
    last = n;
  }
  for (double T : {50.0, 300.0, 2000.0}) {
    std::uint64_t prev = ~0ULL;
    for (int m = 1; m <= 4; ++m) {
      const auto n = count_points(make_zoo_model("p1", klt({m})), T, Kind::campana);
      CHECK(n <= prev);
      prev = n;
    }
    CHECK(count_points(make_zoo_model("p1", {Weight::dlt()}), T, Kind::campana) <= prev);
  }
}

TEST_CASE("p2_three_lines counts are symmetric in the weights") {
  for (auto w : std::vector<std::vector<int>>{{1, 2, 3}, {2, 2, 4}, {1, 3, 3}}) {
    std::sort(w.begin(), w.end());
    std::set<std::uint64_t> seen;
    do {
      const auto m = make_zoo_model("p2_three_lines", klt({w[0], w[1], w[2]}));
      seen.insert(count_points(m, 3000, Kind::campana));
    } while (std::next_permutation(w.begin(), w.end()));
    CHECK(seen.size() == 1);
  }
}

TEST_CASE("dp_d5 on x1 = 1 reduces to E3 fullness") {
  std::mt19937_64 rng(5);
  const auto base = make_zoo_model("dp_d5");
  for (int it = 0; it < 3000; ++it) {
    std::vector<Weight> w;
    for (int i = 0; i < 6; ++i) w.push_back(Weight::klt(1 + static_cast<int>(rng() % 4)));
    const auto m = with_weights(base, w);
    const std::int64_t x0 = 1 + static_cast<std::int64_t>(rng() % 5000);
    std::int64_t x2 = static_cast<std::int64_t>(rng() % 5000) - 2500;
    if (x2 == 0) x2 = 7;
    const auto x = P({x0, 1, x2});
    REQUIRE(in_open_orbit(m, x));
    CHECK(is_campana(m, x) == is_m_full(x0, w[2].m()));
  }
}

TEST_CASE("by_four_lines enumerator visits exactly the campana points") {
  const auto m = make_zoo_model("by_four_lines");
  const std::int64_t T = 60;
  std::set<std::vector<std::int64_t>> fast, slow;
  for_each_by_point(m, T, {}, [&](std::int64_t a, std::int64_t b, std::int64_t c) {
    CHECK(fast.insert(PrimitivePoint::normalize({a, b, c}).coords).second);
  });
  for (std::int64_t a = 0; a <= T; ++a)
    for (std::int64_t b = -T; b <= T; ++b)
      for (std::int64_t c = -T; c <= T; ++c) {
        if (std::gcd(std::gcd(a, b), c) != 1) continue;
        if (a == 0 && (b < 0 || (b == 0 && c < 0))) continue;
        const PrimitivePoint x({a, b, c});
        if (in_open_orbit(m, x) && is_campana(m, x)) slow.insert(x.coords);
      }
  CHECK(fast.size() == slow.size());
  CHECK(fast == slow);
  // thin filter removes exactly the square-test points
  std::uint64_t thin = 0;
  for (const auto& c : fast) thin += thin_filter_by(PrimitivePoint(c));
  CHECK(count_points(m, T, Kind::thin_filtered) == fast.size() - thin);
}

TEST_CASE("optimized counts equal the brute-force loop") {
  struct Case {
    const char* name;
    int n;
    std::vector<Weight> w;
    PrimeSet S;
    Height h;
    double T;
  };
  const std::vector<Case> cases = {
      {"p1", 0, klt({3}), {}, Height::euclidean, 150},
      {"p1", 0, {Weight::dlt()}, {2, 5}, Height::naive, 150},
      {"pn_hyperplane", 3, klt({2}), {}, Height::naive, 14},
      {"pn_hyperplane", 3, klt({3}), {3}, Height::naive, 14},
      {"p2_three_lines", 0, klt({1, 2, 3}), {2, 3}, Height::naive, 60},
      {"p2_three_lines", 0, {Weight::dlt(), Weight::klt(2), Weight::klt(2)}, {2}, Height::naive, 60},
      {"by_four_lines", 0, klt({2, 2, 2, 2}), {3}, Height::naive, 40},
      {"blowup_pn", 3, klt({2, 3}), {}, Height::naive, 12},
      {"dp_d5", 0, klt({2, 3, 2, 2, 1, 2}), {2}, Height::naive, 40},
  };
  for (const auto& c : cases) {
    const auto m = make_zoo_model(c.name, c.w, c.n);
    for (double T = 1; T <= c.T; T += std::max(1.0, c.T / 12))
      CHECK_MESSAGE(count_points(m, T, Kind::campana, c.S, c.h) == count_points_bruteforce(m, T, Kind::campana, c.S, c.h),
                    c.name << " T = " << T);
  }
  const auto p1 = make_zoo_model("p1", klt({2}));
  for (double T : {10.0, 77.0, 400.0}) CHECK(count_points(p1, T, Kind::weak) == count_points_bruteforce(p1, T, Kind::weak));
}

TEST_CASE("census reproduces counts for every weight choice") {
  const auto base = make_zoo_model("p2_three_lines");
  const PrimeSet S = {3};
  const auto census = bruteforce_census(base, 40, S);
  for (int a = 0; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      std::vector<Weight> w = {a ? Weight::klt(a) : Weight::dlt(), Weight::klt(b), Weight::klt(2)};
      for (std::uint64_t T : {5, 17, 40})
        CHECK(census_count(census, w, T) ==
              count_points_bruteforce(with_weights(base, w), static_cast<double>(T), Kind::campana, S));
    }
}

TEST_CASE("series and threads") {
  const auto grid = geometric_grid(10, 1e4, 4);
  REQUIRE(grid.size() == 13);
  CHECK(grid.front() == 10);
  CHECK(grid.back() == doctest::Approx(1e4));
  const auto m = make_zoo_model("by_four_lines");
  const auto one = count_series(m, {100, 1000, 3000}, Kind::campana, {}, Height::naive, 1);
  const auto four = count_series(m, {100, 1000, 3000}, Kind::campana, {}, Height::naive, 4);
  CHECK(one.counts == four.counts);
  CHECK(series_csv(one) == series_csv(four));
  CHECK(one.counts[1] == count_points(m, 1000, Kind::campana));
  const auto d = make_zoo_model("dp_d5");
  CHECK(count_points(d, 3000, Kind::campana, {}, Height::naive, 1) ==
        count_points(d, 3000, Kind::campana, {}, Height::naive, 3));

  const auto j = nlohmann::json::parse(series_json(one));
  CHECK(j["schema"] == "campana.count_series/1");
  CHECK(j["records"].size() == 3);
  CHECK(j["records"][1]["N"].get<std::uint64_t>() == one.counts[1]);
  CHECK(series_csv(one).rfind("T,N", 0) == 0);
}

}
