#include "campana/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "campana/arith.hpp"
#include "campana/zoo.hpp"
#include "internal.hpp"

namespace campana {

namespace {

Complex qpow(std::uint64_t q, Complex z) { return std::exp(-z * std::log(static_cast<double>(q))); }  // q^{-z}

BigInt big_pow(std::uint64_t q, unsigned e) {
  BigInt r = 1;
  BigInt b = q;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational inv_pow(std::uint64_t q, unsigned e) { return Rational(BigInt(1), big_pow(q, e)); }

std::vector<std::uint64_t> primes_upto(std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  if (bound < 2) return out;
  auto table = detail::shared_sieve(bound);
  for (auto p : table->primes()) {
    if (p > bound) break;
    out.push_back(p);
  }
  return out;
}

struct TailFit {
  double tail = 0;
  double C = 0;
  double delta = 0;
  std::string note;
};

/// Fit |f_p - 1| ~ C p^{-sigma} on the top decade of primes and integrate the
/// omitted part: sum_{p > P} C p^{-sigma} ~ C P^{1-sigma} / ((sigma-1) ln P).
TailFit fit_tail(const std::vector<std::uint64_t>& primes, const std::vector<double>& dev) {
  TailFit out;
  if (primes.empty()) {
    out.note = "no primes below the bound; tail not estimated";
    return out;
  }
  const double P = static_cast<double>(primes.back());
  const double lo = std::max(2.0, P / 10);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (primes[i] < lo || !(dev[i] > 0)) continue;
    const double x = std::log(static_cast<double>(primes[i]));
    const double y = std::log(dev[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 8) {
    out.note = "prime bound too small for a tail fit; tail not estimated";
    return out;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) {
    out.note = "degenerate tail fit";
    return out;
  }
  const double slope = (n * sxy - sx * sy) / denom;
  const double sigma = -slope;
  out.C = std::exp((sy - slope * sx) / n);
  out.delta = sigma - 1;
  if (sigma <= 1) {
    out.tail = std::numeric_limits<double>::infinity();
    out.note = "local factors do not decay faster than 1/p; tail diverges";
    return out;
  }
  out.tail = out.C * std::pow(P, 1 - sigma) / ((sigma - 1) * std::log(P));
  out.note = "tail from fitted |factor - 1| ~ C p^-(1+delta) over primes in [P/10, P]";
  return out;
}

struct ProductResult {
  Complex value{1, 0};
  TailFit tail;
};

/// Ordered product over a fixed partition into blocks, so the result does not
/// depend on the thread count.
template <class F>
ProductResult euler_product(const std::vector<std::uint64_t>& primes, F factor, int threads) {
  constexpr std::size_t kBlocks = 64;
  const std::size_t n = primes.size();
  std::vector<Complex> values(n);
  std::vector<Complex> block(kBlocks, Complex(1, 0));
  auto run = [&](std::size_t b) {
    const std::size_t lo = n * b / kBlocks, hi = n * (b + 1) / kBlocks;
    Complex acc(1, 0);
    for (std::size_t i = lo; i < hi; ++i) {
      values[i] = factor(primes[i]);
      acc *= values[i];
    }
    block[b] = acc;
  };
  const int t = std::max(1, std::min<int>(threads, kBlocks));
  if (t == 1) {
    for (std::size_t b = 0; b < kBlocks; ++b) run(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < kBlocks; b += t) run(b);
      });
    for (auto& th : pool) th.join();
  }
  ProductResult out;
  for (const auto& v : block) out.value *= v;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(values[i] - 1.0);
  out.tail = fit_tail(primes, dev);
  return out;
}

std::vector<std::int64_t> bracket(int k) {  // 1 + q + ... + q^k
  return std::vector<std::int64_t>(static_cast<std::size_t>(std::max(k + 1, 0)), 1);
}

}  // namespace

// ---- p1 closed forms ----

Complex interlude1_local_factor(std::uint64_t p, const Weight& w, Complex s, bool in_S) {
  if (!(s.real() > 1)) throw std::domain_error("interlude1_local_factor: requires Re(s) > 1");
  if (!in_S && w.is_dlt()) return 1.0;
  const int m = in_S ? 1 : w.m();
  const Complex z = s - 1.0;
  return 1.0 + (1.0 - 1.0 / static_cast<double>(p)) * qpow(p, z * static_cast<double>(m)) / (1.0 - qpow(p, z));
}

double interlude1_local_factor(std::uint64_t p, const Weight& w, double s, bool in_S) {
  return interlude1_local_factor(p, w, Complex(s, 0), in_S).real();
}

Rational interlude1_local_factor_exact(std::uint64_t p, const Weight& w, int s, bool in_S) {
  if (s < 2) throw std::domain_error("interlude1_local_factor_exact: requires integer s >= 2");
  if (!in_S && w.is_dlt()) return Rational(1);
  const unsigned m = in_S ? 1u : static_cast<unsigned>(w.m());
  const unsigned t = static_cast<unsigned>(s - 1);
  const Rational pinv = Rational(1, static_cast<long long>(p));
  return 1 + (1 - pinv) * inv_pow(p, m * t) / (1 - inv_pow(p, t));
}

double interlude1_arch_factor(double s) {
  if (!(s > 1)) throw std::domain_error("interlude1_arch_factor: requires s > 1");
  return std::exp(std::lgamma((s - 1) / 2) - std::lgamma(s / 2));
}

double arch_height_integral(double s) { return std::sqrt(std::numbers::pi) * interlude1_arch_factor(s); }

double arch_fourier_integral(double s, double n) {
  if (!(s > 1)) throw std::domain_error("arch_fourier_integral: requires s > 1");
  if (n == 0) return arch_height_integral(s);
  const double omega = 2 * std::numbers::pi * std::abs(n);
  static thread_local boost::math::quadrature::ooura_fourier_cos<double> integrator(1e-12, 9);
  auto f = [s](double x) { return std::pow(1 + x * x, -s / 2); };
  auto [value, rel] = integrator.integrate(f, omega);
  (void)rel;
  return 2 * value;
}

double arch_fourier_closed_form(double s, double n) {
  if (n == 0) return arch_height_integral(s);
  const double nu = (s - 1) / 2;
  const double an = std::abs(n);
  const double pi = std::numbers::pi;
  return 2 * std::pow(pi, s / 2) * std::pow(an, nu) * std::cyl_bessel_k(nu, 2 * pi * an) / std::tgamma(s / 2);
}

std::optional<Rational> gauss_like_integral(std::uint64_t q, int d, int i, int j) {
  if (d < 0 || i < 1) throw std::invalid_argument("gauss_like_integral: requires d >= 0 and i >= 1");
  const Rational qinv(1, static_cast<long long>(q));
  const long long e = static_cast<long long>(i) * d - j;  // psi(pi^{-e} x^d)
  if (d == 0) {
    if (j >= 0) return 1 - qinv;
    return std::nullopt;
  }
  const int c = valuation(static_cast<std::uint64_t>(d), q);
  if (e <= 0) return 1 - qinv;
  if (c == 0) {
    if (e >= 2) return Rational(0);
    // e = 1: x -> x^d permutes F_q^x when gcd(d, q - 1) = 1
    if (std::gcd<std::uint64_t>(static_cast<std::uint64_t>(d), q - 1) == 1) return -qinv;
    return std::nullopt;
  }
  if (e >= c + 2) return Rational(0);
  return std::nullopt;
}

Complex p1_local_factor_character(std::uint64_t p, const Weight& w, Complex s, int k, bool in_S) {
  if (k < 0) throw std::invalid_argument("p1_local_factor_character: k must be >= 0");
  if (!in_S && w.is_dlt()) return 1.0;
  const int m = in_S ? 1 : w.m();
  Complex total(1, 0);
  for (int i = m; i <= k + 1; ++i) {
    const auto J = i <= k ? gauss_like_integral(p, 0, 1, 0) : gauss_like_integral(p, 1, i - k, 0);
    total += qpow(p, static_cast<double>(i) * (s - 1.0)) * to_double(*J);
  }
  return total;
}

// ---- stratum data ----

const StratumComponent& StratumData::component(const std::string& id) const {
  for (const auto& c : components)
    if (c.id == id) return c;
  throw std::invalid_argument("unknown stratum component '" + id + "'");
}

void StratumData::validate() const {
  bool open = false;
  for (const auto& st : strata) {
    if (st.count_poly.empty()) throw std::invalid_argument("stratum with empty point count");
    for (const auto& id : st.components) (void)component(id);
    if (st.components.empty()) {
      open = true;
      if (static_cast<int>(st.count_poly.size()) != dim + 1 || st.count_poly.back() != 1)
        throw std::invalid_argument("open stratum must have q^dim points");
    }
  }
  if (!open) throw std::invalid_argument("stratum data lacks the open stratum");
}

StratumData zoo_stratum_data(const OrbifoldModel& model) {
  const Backend b = backend_of(model);
  StratumData out;
  out.dim = model.dim;
  for (const auto& c : model.components) out.components.push_back({c.id, c.rho, c.weight});
  auto qn = [](int n) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(n + 1), 0);
    v.back() = 1;
    return v;
  };
  switch (b) {
    case Backend::p1:
      out.strata = {{{}, {0, 1}}, {{model.components[0].id}, {1}}};
      break;
    case Backend::pn_hyperplane:
      out.strata = {{{}, qn(model.dim)}, {{model.components[0].id}, bracket(model.dim - 1)}};
      break;
    case Backend::blowup_pn: {
      const int n = model.dim;
      const auto& E = model.components[0].id;
      const auto& D = model.components[1].id;
      auto e_open = bracket(n - 2);
      e_open.insert(e_open.begin(), 0);  // q (1 + ... + q^{n-2})
      out.strata = {{{}, qn(n)}, {{E}, e_open}, {{D}, qn(n - 1)}, {{E, D}, bracket(n - 2)}};
      break;
    }
    case Backend::dp_d5: {
      std::map<std::string, int> degree;
      std::vector<Stratum> edges;
      for (const auto& face : model.clemens_at("inf").faces) {
        if (face.size() != 2) continue;
        Stratum st{{face.begin(), face.end()}, {1}};
        for (const auto& id : face) ++degree[id];
        edges.push_back(st);
      }
      out.strata.push_back({{}, qn(2)});
      for (const auto& c : model.components) out.strata.push_back({{c.id}, {1 - degree[c.id], 1}});
      for (auto& e : edges) out.strata.push_back(std::move(e));
      break;
    }
    default:
      throw std::invalid_argument("stratum data is only available for the vector-group models "
                                  "(p1, pn_hyperplane, blowup_pn, dp_d5); got " + backend_name(b));
  }
  out.validate();
  return out;
}

// ---- Denef-type local factor ----

Complex denef_local_factor(const StratumData& data, std::uint64_t q, const std::map<std::string, Complex>& s_map) {
  const double qd = static_cast<double>(q);
  Complex total(0, 0);
  for (const auto& st : data.strata) {
    double count = 0, qk = 1;
    for (auto c : st.count_poly) {
      count += static_cast<double>(c) * qk;
      qk *= qd;
    }
    Complex term = count * std::pow(qd, -(data.dim - static_cast<int>(st.components.size())));
    for (const auto& id : st.components) {
      const auto& comp = data.component(id);
      if (comp.weight.is_dlt()) {
        term = 0;
        break;
      }
      auto it = s_map.find(id);
      if (it == s_map.end()) throw std::invalid_argument("s_map is missing component '" + id + "'");
      const Complex z = it->second - static_cast<double>(comp.rho) + 1.0;
      if (!(z.real() > 0))
        throw std::domain_error("pole of the geometric factor for component '" + id + "': Re(s - rho + 1) <= 0");
      term *= (1.0 - 1.0 / qd) * qpow(q, z * static_cast<double>(comp.weight.m())) / (1.0 - qpow(q, z));
    }
    total += term;
  }
  return total;
}

Rational denef_local_factor_exact(const StratumData& data, std::uint64_t q, const std::map<std::string, int>& s_map) {
  const Rational qinv(1, static_cast<long long>(q));
  Rational total = 0;
  for (const auto& st : data.strata) {
    BigInt count = 0, qk = 1;
    for (auto c : st.count_poly) {
      count += BigInt(c) * qk;
      qk *= q;
    }
    Rational term(count);
    const int codim = data.dim - static_cast<int>(st.components.size());
    term *= inv_pow(q, static_cast<unsigned>(codim));
    for (const auto& id : st.components) {
      const auto& comp = data.component(id);
      if (comp.weight.is_dlt()) {
        term = 0;
        break;
      }
      auto it = s_map.find(id);
      if (it == s_map.end()) throw std::invalid_argument("s_map is missing component '" + id + "'");
      const int t = it->second - comp.rho + 1;
      if (t <= 0) throw std::domain_error("exact factor requires s - rho + 1 >= 1 for component '" + id + "'");
      const unsigned ut = static_cast<unsigned>(t);
      term *= (1 - qinv) * inv_pow(q, ut * static_cast<unsigned>(comp.weight.m())) / (1 - inv_pow(q, ut));
    }
    total += term;
  }
  return total;
}

EulerEvaluation regularized_euler_product(const StratumData& data, const std::map<std::string, Complex>& s_map,
                                          std::uint64_t prime_bound, int threads) {
  data.validate();
  for (const auto& c : data.components) {
    if (c.weight.is_dlt()) continue;
    auto it = s_map.find(c.id);
    if (it == s_map.end()) throw std::invalid_argument("s_map is missing component '" + c.id + "'");
    if (!(it->second.real() - c.rho + 1 > 0))
      throw std::domain_error("s outside the regularized domain at component '" + c.id + "'");
  }
  const auto primes = primes_upto(prime_bound);
  auto factor = [&](std::uint64_t p) {
    Complex f = denef_local_factor(data, p, s_map);
    for (const auto& c : data.components) {
      if (c.weight.is_dlt()) continue;
      const Complex z = s_map.at(c.id) - static_cast<double>(c.rho) + 1.0;
      f *= 1.0 - qpow(p, z * static_cast<double>(c.weight.m()));
    }
    return f;
  };
  const auto prod = euler_product(primes, factor, threads);
  EulerEvaluation out;
  out.s = s_map;
  out.prime_bound = prime_bound;
  out.value = prod.value;
  out.tail_estimate = prod.tail.tail;
  out.decay_C = prod.tail.C;
  out.decay_delta = prod.tail.delta;
  out.truncation_note = prod.tail.note;
  return out;
}

// ---- leading constants ----

namespace {

LeadingConstant finish_constant(double a, double m_factor, double arch, const ProductResult& prod,
                                std::uint64_t bound) {
  LeadingConstant out;
  out.a = a;
  out.c = m_factor * arch * prod.value.real();
  out.c_over_a = out.c / a;
  out.tail_estimate = prod.tail.tail;
  out.prime_bound = bound;
  out.note = prod.tail.note;
  return out;
}

}  // namespace

LeadingConstant leading_constant_p1(const Weight& w, const PrimeSet& S, std::uint64_t prime_bound) {
  if (w.is_dlt()) {
    if (!S.empty()) throw std::domain_error("constant not implemented for dlt weight with S nonempty");
    LeadingConstant out;
    out.a = 1;
    out.c = 2;  // residue of the archimedean integral at s = 1
    out.c_over_a = 2;
    out.prime_bound = prime_bound;
    out.note = "integral points: all local factors are 1";
    return out;
  }
  const int m = w.m();
  const double a = 1 + 1.0 / m;
  const auto primes = primes_upto(prime_bound);
  auto factor = [&](std::uint64_t p) -> Complex {
    const bool in_S = detail::in_set(S, p);
    return (1 - 1.0 / static_cast<double>(p)) * interlude1_local_factor(p, w, a, in_S);
  };
  return finish_constant(a, 1.0 / m, arch_height_integral(a), euler_product(primes, factor, 1), prime_bound);
}

LeadingConstant leading_constant_pn(int n, const Weight& w, const PrimeSet& S, std::uint64_t prime_bound) {
  if (n < 1) throw std::invalid_argument("leading_constant_pn: n must be >= 1");
  const double two_n = std::ldexp(1.0, n);
  if (w.is_dlt()) {
    if (!S.empty()) throw std::domain_error("constant not implemented for dlt weight with S nonempty");
    LeadingConstant out;
    out.a = n;
    out.c = two_n * n;
    out.c_over_a = two_n;
    out.prime_bound = prime_bound;
    out.note = "integral points: all local factors are 1";
    return out;
  }
  const int m = w.m();
  const double a = n + 1.0 / m;
  const auto primes = primes_upto(prime_bound);
  auto factor = [&](std::uint64_t p) -> Complex {
    const double pd = static_cast<double>(p);
    const int me = detail::in_set(S, p) ? 1 : m;
    const double z = a - n;
    const double F = 1 + (1 - std::pow(pd, -n)) * std::pow(pd, -me * z) / (1 - std::pow(pd, -z));
    return (1 - 1 / pd) * F;
  };
  const double arch = two_n * a / (a - n);  // integral of max(1, |x|_inf)^{-a} over R^n
  return finish_constant(a, 1.0 / m, arch, euler_product(primes, factor, 1), prime_bound);
}

// ---- Poisson check ----

PoissonCheck zeta_poisson_check(const Weight& w, double s, std::uint64_t point_bound, int character_bound,
                                std::uint64_t prime_bound) {
  const double a = w.is_dlt() ? 1.0 : 1 + 1.0 / w.m();
  if (!(s > a)) throw std::domain_error("zeta_poisson_check: divergent parameter regime (need s > 1 + 1/m)");
  if (character_bound < 0) throw std::invalid_argument("zeta_poisson_check: character_bound must be >= 0");
  PoissonCheck out;
  out.point_bound = point_bound;
  out.character_bound = character_bound;

  // Direct side: x = u/q in lowest terms with q accepted, H = sqrt(u^2 + q^2) <= B.
  const std::uint64_t B = point_bound;
  const std::int64_t B2 = static_cast<std::int64_t>(B) * static_cast<std::int64_t>(B);
  long double direct = 0;
  const auto qs = detail::accepted_values(w, {}, B);
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) {  // small terms first
    const std::int64_t q = static_cast<std::int64_t>(*it);
    const std::int64_t umax = static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(B2 - q * q)));
    for (std::int64_t u = umax; u >= 0; --u) {
      if (detail::gcd64(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(q)) != 1) continue;
      const long double h2 = static_cast<long double>(u * u + q * q);
      const long double term = std::pow(h2, -static_cast<long double>(s) / 2);
      direct += u == 0 ? term : 2 * term;
    }
  }
  out.direct = static_cast<double>(direct);

  // Fourier side.
  const auto primes = primes_upto(prime_bound);
  double trivial = 1;
  for (auto p : primes) trivial *= interlude1_local_factor(p, w, s, false);
  const bool m_one = !w.is_dlt() && w.m() == 1;
  double unit_product = 1;  // product of the k = 0 factors
  if (m_one)
    for (auto p : primes) unit_product *= p1_local_factor_character(p, w, s, 0, false).real();
  long double poisson = arch_height_integral(s) * trivial;
  for (int n = character_bound; n >= 1; --n) {
    double local = unit_product;
    const auto f = factorize_any(static_cast<std::uint64_t>(n), nullptr);
    for (const auto& pp : f.factors) {
      if (pp.prime > prime_bound) continue;
      if (m_one) local /= p1_local_factor_character(pp.prime, w, s, 0, false).real();
      local *= p1_local_factor_character(pp.prime, w, s, pp.exponent, false).real();
    }
    poisson += 2.0L * arch_fourier_integral(s, n) * local;
  }
  out.poisson = static_cast<double>(poisson);
  out.discrepancy = std::abs(out.direct - out.poisson);
  return out;
}

}  // namespace campana
