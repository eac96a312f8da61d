#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "campana/geometry.hpp"
#include "campana/points.hpp"
#include "campana/rational.hpp"

namespace campana {

using Complex = std::complex<double>;

struct Stratum {
  std::vector<std::string> components;  // B; empty for the open stratum
  std::vector<std::int64_t> count_poly;  // #D°_B(F_q) = sum_k count_poly[k] q^k
};

struct StratumComponent {
  std::string id;
  int rho = 0;
  Weight weight = Weight::klt(1);
};

struct StratumData {
  int dim = 0;
  std::vector<Stratum> strata;
  std::vector<StratumComponent> components;

  const StratumComponent& component(const std::string& id) const;
  /// Open stratum has leading term q^dim; names are known.
  void validate() const;
};

/// Stratum point counts for the vector-group zoo models (p1, pn_hyperplane, blowup_pn, dp_d5).
StratumData zoo_stratum_data(const OrbifoldModel& model);

struct EulerEvaluation {
  std::map<std::string, Complex> s;
  std::uint64_t prime_bound = 0;
  Complex value{1, 0};
  double tail_estimate = 0;  // estimated |log| of the omitted factors
  double decay_C = 0;        // fitted |factor - 1| ~ C p^{-(1 + delta)}
  double decay_delta = 0;
  std::string truncation_note;
};

/// Local height integral with weight m; in_S drops the Campana condition at p.
double interlude1_local_factor(std::uint64_t p, const Weight& w, double s, bool in_S);
Complex interlude1_local_factor(std::uint64_t p, const Weight& w, Complex s, bool in_S);
/// Integer s >= 2, exact.
Rational interlude1_local_factor_exact(std::uint64_t p, const Weight& w, int s, bool in_S);

/// Gamma((s-1)/2) / Gamma(s/2), s > 1.
double interlude1_arch_factor(double s);
/// Integral of (1 + x^2)^(-s/2) over R: sqrt(pi) * interlude1_arch_factor(s).
double arch_height_integral(double s);
/// Integral of (1 + x^2)^(-s/2) cos(2 pi n x) over R, by oscillatory quadrature.
double arch_fourier_integral(double s, double n);
/// Same integral via the Bessel-K closed form (cross-check).
double arch_fourier_closed_form(double s, double n);

/// Exact value of int_{O^x} psi(pi^{-id+j} x^d) dx over Q_q, or nullopt where
/// the closed form does not determine it.
std::optional<Rational> gauss_like_integral(std::uint64_t q, int d, int i, int j);

/// Local Fourier coefficient for p1 at a character n with v_p(n) = k.
Complex p1_local_factor_character(std::uint64_t p, const Weight& w, Complex s, int k, bool in_S);

Complex denef_local_factor(const StratumData& data, std::uint64_t q, const std::map<std::string, Complex>& s_map);
/// All s_alpha - rho_alpha + 1 must be positive integers.
Rational denef_local_factor_exact(const StratumData& data, std::uint64_t q, const std::map<std::string, int>& s_map);

EulerEvaluation regularized_euler_product(const StratumData& data, const std::map<std::string, Complex>& s_map,
                                          std::uint64_t prime_bound = 100000, int threads = 1);

struct LeadingConstant {
  double a = 0;
  double c = 0;         // residue of the height zeta function at a
  double c_over_a = 0;  // N(T) ~ (c/a) T^a
  double tail_estimate = 0;
  std::uint64_t prime_bound = 0;
  std::string note;
};

/// p1, euclidean height.
LeadingConstant leading_constant_p1(const Weight& w, const PrimeSet& S, std::uint64_t prime_bound = 100000);
/// pn_hyperplane of dimension n, naive height.
LeadingConstant leading_constant_pn(int n, const Weight& w, const PrimeSet& S, std::uint64_t prime_bound = 100000);

struct PoissonCheck {
  double direct = 0;
  double poisson = 0;
  double discrepancy = 0;
  std::uint64_t point_bound = 0;
  int character_bound = 0;
};

/// Sum of H(x)^{-s} over p1 Campana points (euclidean height, S empty) against
/// the Fourier side truncated at |n| <= character_bound.
PoissonCheck zeta_poisson_check(const Weight& w, double s, std::uint64_t point_bound, int character_bound,
                                std::uint64_t prime_bound = 100000);

}  // namespace campana
