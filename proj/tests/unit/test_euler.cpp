#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "campana/arith.hpp"
#include "campana/euler.hpp"
#include "campana/zoo.hpp"

using namespace campana;

namespace {

constexpr double kPi = std::numbers::pi;

// int over |x| = p^i of psi(n x) dx: the Ramanujan sum c_{p^i}(n), by direct summation.
double ramanujan(std::uint64_t p, int i, std::int64_t n) {
  std::uint64_t pi = 1;
  for (int k = 0; k < i; ++k) pi *= p;
  double s = 0;
  for (std::uint64_t a = 1; a < pi; ++a)
    if (a % p) s += std::cos(2 * kPi * static_cast<double>((static_cast<std::uint64_t>(n) % pi) * a % pi) /
                             static_cast<double>(pi));
  return s;
}

// (1/p^N) sum over units x mod p^N of e(x^d / p^e), e = id - j <= N.
std::complex<double> riemann_gauss(std::uint64_t p, int d, int e, int N) {
  std::uint64_t pN = 1, pe = 1;
  for (int k = 0; k < N; ++k) pN *= p;
  for (int k = 0; k < e; ++k) pe *= p;
  std::complex<double> s = 0;
  for (std::uint64_t x = 1; x < pN; ++x) {
    if (x % p == 0) continue;
    std::uint64_t y = 1;
    for (int k = 0; k < d; ++k) y = y * x % pe;
    s += std::polar(1.0, 2 * kPi * static_cast<double>(y % pe) / static_cast<double>(pe));
  }
  return s / static_cast<double>(pN);
}

StratumData p2_one_line(const Weight& w) {
  StratumData d;
  d.dim = 2;
  d.strata = {{{}, {0, 0, 1}}, {{"L"}, {1, 1}}};
  d.components = {{"L", 3, w}};
  return d;
}

}  // namespace

TEST_SUITE("euler") {

TEST_CASE("interlude local factor examples") {
  CHECK(interlude1_local_factor(2, Weight::klt(2), 2.0, false) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(interlude1_local_factor_exact(2, Weight::klt(2), 2, false) == Rational(5, 4));
  CHECK(interlude1_local_factor_exact(3, Weight::klt(1), 3, false) == Rational(13, 12));
  CHECK(interlude1_local_factor(5, Weight::dlt(), 2.5, false) == 1);
  CHECK(interlude1_local_factor(5, Weight::klt(60), 2.5, false) == doctest::Approx(1).epsilon(1e-15));
  CHECK_THROWS(interlude1_local_factor(2, Weight::klt(2), 1.0, false));
  const Complex z = interlude1_local_factor(3, Weight::klt(2), Complex(2.0, 0), false);
  CHECK(z.real() == doctest::Approx(interlude1_local_factor(3, Weight::klt(2), 2.0, false)));
  CHECK(z.imag() == 0);
}

TEST_CASE("m = 1 factor is zeta_p(s-1)/zeta_p(s)") {
  for (std::uint64_t p : {2, 3, 5, 7, 11, 97})
    for (int s = 2; s <= 7; ++s) {
      Rational ps = 1;
      for (int k = 0; k < s; ++k) ps *= p;
      const Rational want = (1 - 1 / ps) / (1 - p / ps);
      CHECK(interlude1_local_factor_exact(p, Weight::klt(1), s, false) == want);
      CHECK(interlude1_local_factor_exact(p, Weight::klt(3), s, true) == want);
    }
}

TEST_CASE("archimedean factor") {
  const double rp = std::sqrt(kPi);
  CHECK(interlude1_arch_factor(3) == doctest::Approx(2 / rp).epsilon(1e-12));
  CHECK(interlude1_arch_factor(2) == doctest::Approx(rp).epsilon(1e-12));
  CHECK(interlude1_arch_factor(4) == doctest::Approx(rp / 2).epsilon(1e-12));
  CHECK(arch_height_integral(2) == doctest::Approx(kPi).epsilon(1e-12));  // int 1/(1+x^2)
  CHECK_THROWS(interlude1_arch_factor(1));
  for (double s : {2.5, 4.0})
    for (double n : {0.0, 1.0, 3.0, 7.0}) {
      const double a = arch_fourier_integral(s, n), b = arch_fourier_closed_form(s, n);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
    }
  CHECK(arch_fourier_closed_form(4, 0) == doctest::Approx(arch_height_integral(4)).epsilon(1e-12));
}

TEST_CASE("gauss integral closed forms") {
  for (std::uint64_t q : {2, 3, 5, 7}) {
    CHECK(*gauss_like_integral(q, 0, 1, 0) == 1 - Rational(1, static_cast<long long>(q)));
    CHECK(*gauss_like_integral(q, 1, 1, 0) == -Rational(1, static_cast<long long>(q)));
  }
  CHECK(*gauss_like_integral(3, 2, 1, 0) == 0);
  CHECK(*gauss_like_integral(5, 3, 1, 0) == 0);
  // v_2(2) = 1 leaves this one open; the true value is i/2
  CHECK_FALSE(gauss_like_integral(2, 2, 1, 0));
  CHECK(std::abs(riemann_gauss(2, 2, 2, 6) - std::complex<double>(0, 0.5)) < 1e-12);
}

TEST_CASE("gauss integrals against a Riemann sum") {
  int known = 0;
  for (std::uint64_t p : {2, 3, 5})
    for (int d = 0; d <= 4; ++d)
      for (int i = 1; i <= 3; ++i)
        for (int j = i * d - 2; j <= i * d + 2; ++j) {
          const auto v = gauss_like_integral(p, d, i, j);
          if (!v) continue;
          ++known;
          const int e = std::max(0, i * d - j);
          CHECK_MESSAGE(std::abs(to_double(*v) - riemann_gauss(p, d, e, e + 3)) < 1e-10,
                        "p=" << p << " d=" << d << " i=" << i << " j=" << j);
        }
  CHECK(known > 100);
}

TEST_CASE("p1 character factors against Ramanujan sums") {
  CHECK(p1_local_factor_character(3, Weight::klt(3), 2.0, 1, false) == Complex(1, 0));
  CHECK(p1_local_factor_character(7, Weight::klt(2), 2.0, 0, false) == Complex(1, 0));
  CHECK(p1_local_factor_character(7, Weight::dlt(), 2.0, 4, false) == Complex(1, 0));
  for (std::uint64_t p : {2, 3, 5}) {
    const double pd = static_cast<double>(p);
    CHECK(std::abs(p1_local_factor_character(p, Weight::klt(1), 2.0, 0, true) - Complex(1 - 1 / (pd * pd))) < 1e-14);
    for (int k = 0; k <= 3; ++k)
      for (int m = 1; m <= 4; ++m)
        for (bool in_S : {false, true})
          for (double s : {1.7, 2.0, 3.5}) {
            std::int64_t n = 1;
            for (int t = 0; t < k; ++t) n *= static_cast<std::int64_t>(p);
            n *= p == 2 ? 3 : 2;  // a unit part
            double want = 1;
            for (int i = in_S ? 1 : m; i <= k + 2; ++i) want += std::pow(pd, -i * s) * ramanujan(p, i, n);
            const Complex got = p1_local_factor_character(p, Weight::klt(m), s, k, in_S);
            CHECK_MESSAGE(std::abs(got - Complex(want)) < 1e-12, "p=" << p << " k=" << k << " m=" << m << " S=" << in_S);
          }
  }
}

TEST_CASE("Denef factor") {
  const auto p1 = zoo_stratum_data(make_zoo_model("p1", {Weight::klt(2)}));
  CHECK(denef_local_factor(p1, 2, {{"D", 2.0}}).real() == doctest::Approx(1.25).epsilon(1e-14));
  for (std::uint64_t p : {2, 3, 5, 31, 97})
    for (int m = 1; m <= 3; ++m)
      for (double s : {1.6, 2.0, 3.0}) {
        const auto d = zoo_stratum_data(make_zoo_model("p1", {Weight::klt(m)}));
        const double want = interlude1_local_factor(p, Weight::klt(m), s, false);
        CHECK(std::abs(denef_local_factor(d, p, {{"D", s}}).real() - want) < 1e-12 * want);
      }
  for (std::uint64_t q : {2, 3, 7, 125}) {
    const double qd = static_cast<double>(q);
    const double want = 1 + ((qd + 1) / qd) * (1 - 1 / qd) / qd / (1 - 1 / qd);
    CHECK(denef_local_factor(p2_one_line(Weight::klt(1)), q, {{"L", 3.0}}).real() == doctest::Approx(want));
    CHECK(denef_local_factor_exact(p2_one_line(Weight::klt(1)), q, {{"L", 3}}) ==
          1 + Rational(static_cast<long long>(q + 1), static_cast<long long>(q * q)));
  }
  StratumData open_only;
  open_only.dim = 2;
  open_only.strata = {{{}, {0, 0, 1}}};
  CHECK(denef_local_factor(open_only, 5, {}).real() == doctest::Approx(1));
  // dlt: no pole anywhere in t > -1
  for (double t : {-0.9, -0.5, 0.0, 0.4})
    CHECK(denef_local_factor(p2_one_line(Weight::dlt()), 3, {{"L", 2.0 + t}}).real() == doctest::Approx(1));
  CHECK_THROWS_AS(denef_local_factor(p2_one_line(Weight::klt(2)), 3, {{"L", 1.5}}), std::domain_error);
}

TEST_CASE("regularized products") {
  const auto d = zoo_stratum_data(make_zoo_model("p1", {Weight::klt(2)}));
  const auto empty = regularized_euler_product(d, {{"D", 1.5}}, 1);
  CHECK(empty.value == Complex(1, 0));
  const auto a = regularized_euler_product(d, {{"D", 1.5}}, 1000);
  const auto b = regularized_euler_product(d, {{"D", 1.5}}, 10000);
  const auto c = regularized_euler_product(d, {{"D", 1.5}}, 100000);
  CHECK(a.value.real() == doctest::Approx(1.11881013).epsilon(1e-7));
  CHECK(c.value.real() == doctest::Approx(1.12634655).epsilon(1e-7));
  // successive differences shrink
  CHECK(std::abs(c.value - b.value) < std::abs(b.value - a.value));
  CHECK(std::abs(c.value - b.value) < 2e-3);
  CHECK(b.decay_delta > 0.3);
  CHECK(b.tail_estimate > 0);
  // thread count only changes the work split
  const auto b4 = regularized_euler_product(d, {{"D", 1.5}}, 10000, 4);
  CHECK(b4.value == b.value);

  // m = 1 regularized factor at s = rho: (1 - 1/p)(zeta_p(1)/zeta_p(2) * ...) = 1 - 1/p^2
  const auto r = zoo_stratum_data(make_zoo_model("p1", {Weight::klt(1)}));
  const auto e = regularized_euler_product(r, {{"D", 2.0}}, 2000);
  double want = 1;
  for (std::uint64_t p = 2; p <= 2000; ++p)
    if (is_prime(p)) want *= 1 - 1.0 / static_cast<double>(p * p);
  CHECK(e.value.real() == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS(regularized_euler_product(d, {{"D", 0.9}}, 100));
}

TEST_CASE("leading constants") {
  const auto m1 = leading_constant_p1(Weight::klt(1), {});
  CHECK(m1.a == 2);
  CHECK(m1.c_over_a == doctest::Approx(3 / kPi).epsilon(1e-6));
  const auto pn = leading_constant_pn(1, Weight::klt(1), {});
  CHECK(pn.c_over_a == doctest::Approx(12 / (kPi * kPi)).epsilon(1e-6));
  const auto m2 = leading_constant_p1(Weight::klt(2), {}, 1000000);
  CHECK(m2.a == 1.5);
  CHECK(m2.c_over_a == doctest::Approx(1.96958).epsilon(1e-5));
  CHECK(m2.tail_estimate < 1e-3);
  // a coarser bound moves the value by about its own tail estimate
  const auto coarse = leading_constant_p1(Weight::klt(2), {}, 100000);
  CHECK(std::abs(coarse.c_over_a - m2.c_over_a) < 3 * coarse.tail_estimate * m2.c_over_a);
  const auto dl = leading_constant_p1(Weight::dlt(), {}, 100);
  CHECK(dl.a == 1);
  CHECK(dl.c_over_a == doctest::Approx(2));
  CHECK_THROWS(leading_constant_p1(Weight::dlt(), {2}, 100));
}

TEST_CASE("Poisson summation on p1") {
  const auto zero = zeta_poisson_check(Weight::klt(1), 4, 200, 0, 20000);
  // n = 0 term: sqrt(pi) Gamma(3/2)/Gamma(2) * zeta(3)/zeta(4)
  const double z3 = 1.2020569031595942, z4 = std::pow(kPi, 4) / 90;
  CHECK(zero.poisson == doctest::Approx(arch_height_integral(4) * z3 / z4).epsilon(1e-8));
  const auto small = zeta_poisson_check(Weight::klt(1), 4, 100, 10);
  const auto large = zeta_poisson_check(Weight::klt(1), 4, 400, 10);
  CHECK(small.direct < large.direct);
  CHECK(large.discrepancy < small.discrepancy);
  const auto good = zeta_poisson_check(Weight::klt(1), 4, 1000, 50);
  CHECK(good.discrepancy < 1e-3);
  CHECK_THROWS(zeta_poisson_check(Weight::klt(1), 1.5, 100, 5));
}

TEST_CASE("zoo stratum data") {
  for (const char* name : {"p1", "pn_hyperplane", "blowup_p2", "dp_d5"}) {
    const auto d = zoo_stratum_data(make_zoo_model(name));
    CHECK_NOTHROW(d.validate());
    // sum of stratum counts is #X(F_q)
    for (std::uint64_t q : {2, 3, 5}) {
      double total = 0;
      for (const auto& st : d.strata) {
        double v = 0, qk = 1;
        for (auto c : st.count_poly) {
          v += static_cast<double>(c) * qk;
          qk *= static_cast<double>(q);
        }
        total += v;
      }
      const double qd = static_cast<double>(q);
      const double want = d.dim == 1 ? qd + 1 : (std::string(name) == "pn_hyperplane" ? qd * qd + qd + 1
                                                 : std::string(name) == "blowup_p2" ? qd * qd + 2 * qd + 1
                                                                                    : qd * qd + 6 * qd + 1);
      CHECK_MESSAGE(total == want, name << " q=" << q);
    }
  }
  CHECK_THROWS(zoo_stratum_data(make_zoo_model("p2_three_lines")));
}

}
