#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "campana/rational.hpp"

namespace campana {

/// Boundary weight: klt with multiplicity m (eps = 1 - 1/m) or dlt (eps = 1).
class Weight {
 public:
  static Weight klt(int m);
  static Weight dlt();
  /// "3" or "dlt".
  static Weight parse(std::string_view text);

  bool is_dlt() const { return m_ == 0; }
  /// Throws std::logic_error for dlt weights.
  int m() const;
  Rational epsilon() const;
  std::string to_string() const;

  bool operator==(const Weight&) const = default;

 private:
  explicit Weight(int m) : m_(m) {}
  int m_;  // 0 encodes dlt
};

struct BoundaryComponent {
  std::string id;
  Weight weight = Weight::klt(1);
  int rho = 0;                          // coefficient in -K_X
  Rational lambda;                      // coefficient in L
  std::vector<std::int64_t> pic_class;  // length pic_rank
};

/// Marked faces (nonempty subsets of component ids with local points).
struct ClemensSpec {
  std::set<std::set<std::string>> faces;
};

struct OrbifoldModel {
  std::string name;
  int dim = 0;
  std::vector<BoundaryComponent> components;
  int pic_rank = 0;
  std::vector<std::vector<std::int64_t>> eff_generators;
  /// Keyed by place tag: "inf", a prime such as "5", or "finite" as fallback for any prime.
  std::map<std::string, ClemensSpec> clemens;
  bool adjoint_rigid = false;
  std::string backend;

  std::size_t index_of(std::string_view id) const;
  const BoundaryComponent& component(std::string_view id) const;
  std::vector<std::string> ids() const;
  bool has_dlt() const;
  bool all_dlt() const;
  /// Component classes linearly independent and equal to the cone generators,
  /// so Eff is simplicial on the boundary (the vector-group situation).
  bool has_free_boundary() const;
  const ClemensSpec& clemens_at(std::string_view place) const;
  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;
};

struct FunctionalDivisorData {
  std::map<std::string, std::int64_t> d;
};

struct AdjointClass {
  std::map<std::string, Rational> coefficients;  // a*lambda - rho + eps
  std::vector<Rational> pic_class;               // the class in Pic
  std::set<std::string> support;
};

struct InvariantReport {
  Rational a;
  std::optional<int> b_klt;          // only for free boundaries with klt weights
  int b_conjectural = 0;
  std::optional<int> b_dlt;          // L log-anticanonical with a dlt component
  int b_predicted = 0;
  std::string b_source;              // "b_klt", "b_dlt" or "b_conjectural"
  std::set<std::string> adjoint_support;
  std::map<std::string, Rational> adjoint_coefficients;
  bool adjoint_rigid = false;
};

struct AlphaConstant {
  Rational chi;     // |det V| * prod 1/<L, v_i>
  Rational factor;  // prod (1 - eps) over components outside A(L)
  Rational value;   // chi * factor
  double approx = 0;
};

struct BlowUpData {
  std::vector<std::string> center;
  std::map<std::string, int> multiplicity;  // e_{E,alpha}; missing entries mean 1
  int rho_exceptional = 0;                  // supplied by the caller
  std::string exceptional_id = "E";
};

Rational fujita_invariant(const OrbifoldModel& model, bool skip_dlt = false);
int b_klt(const OrbifoldModel& model);
AdjointClass adjoint_class(const OrbifoldModel& model);
int b_conjectural(const OrbifoldModel& model);
Rational tilde_a(const OrbifoldModel& model);
int clemens_dimension(const ClemensSpec& spec);
ClemensSpec restrict_to(const ClemensSpec& spec, const std::set<std::string>& keep);
int b_local(const OrbifoldModel& model, std::string_view place);
int b_local_f(const OrbifoldModel& model, std::string_view place, const FunctionalDivisorData& f);
int b_dlt(const OrbifoldModel& model, const std::vector<std::string>& places);
AlphaConstant alpha_constant_simplicial(const std::vector<std::vector<Rational>>& dual_generators,
                                        const std::vector<Rational>& L_class,
                                        const std::vector<Rational>& eps_outside);
/// Weight of the exceptional divisor: max ceil(m_alpha / e_alpha), dlt if any center component is dlt.
Weight exceptional_weight(const OrbifoldModel& model, const BlowUpData& data);
OrbifoldModel blow_up_transform(const OrbifoldModel& model, const BlowUpData& data);
/// L := -(K + D_eps), i.e. lambda = rho - eps on every component.
OrbifoldModel with_log_anticanonical_L(OrbifoldModel model);
InvariantReport invariant_report(const OrbifoldModel& model, const std::vector<std::string>& places = {"inf"});

}  // namespace campana
