#include "campana/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "campana/lp.hpp"

namespace campana {

Weight Weight::klt(int m) {
  if (m < 1) throw std::invalid_argument("weight m must be >= 1, got " + std::to_string(m));
  return Weight(m);
}

Weight Weight::dlt() { return Weight(0); }

Weight Weight::parse(std::string_view text) {
  if (text == "dlt" || text == "inf") return dlt();
  int m = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad weight '" + std::string(text) + "'");
    m = m * 10 + (c - '0');
    if (m > 1000000) throw std::invalid_argument("weight too large: '" + std::string(text) + "'");
  }
  if (text.empty()) throw std::invalid_argument("empty weight");
  return klt(m);
}

int Weight::m() const {
  if (is_dlt()) throw std::logic_error("dlt weight has no finite m");
  return m_;
}

Rational Weight::epsilon() const { return is_dlt() ? Rational(1) : Rational(m_ - 1, m_); }

std::string Weight::to_string() const { return is_dlt() ? "dlt" : std::to_string(m_); }

std::size_t OrbifoldModel::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].id == id) return i;
  throw std::out_of_range("unknown component '" + std::string(id) + "' in model " + name);
}

const BoundaryComponent& OrbifoldModel::component(std::string_view id) const { return components[index_of(id)]; }

std::vector<std::string> OrbifoldModel::ids() const {
  std::vector<std::string> out;
  for (const auto& c : components) out.push_back(c.id);
  return out;
}

bool OrbifoldModel::has_dlt() const {
  return std::any_of(components.begin(), components.end(), [](const auto& c) { return c.weight.is_dlt(); });
}

bool OrbifoldModel::all_dlt() const {
  return std::all_of(components.begin(), components.end(), [](const auto& c) { return c.weight.is_dlt(); });
}

namespace {

std::vector<Rational> to_rational(const std::vector<std::int64_t>& v) {
  return std::vector<Rational>(v.begin(), v.end());
}

std::vector<std::vector<Rational>> generators_of(const OrbifoldModel& m) {
  std::vector<std::vector<Rational>> g;
  if (m.eff_generators.empty())
    for (const auto& c : m.components) g.push_back(to_rational(c.pic_class));
  else
    for (const auto& v : m.eff_generators) g.push_back(to_rational(v));
  return g;
}

// Sum over components of coef(c) * pic_class(c).
template <class F>
std::vector<Rational> pic_combination(const OrbifoldModel& m, F coef) {
  std::vector<Rational> out(static_cast<std::size_t>(m.pic_rank));
  for (const auto& c : m.components) {
    const Rational k = coef(c);
    for (int i = 0; i < m.pic_rank; ++i) out[i] += k * c.pic_class[i];
  }
  return out;
}

void check_downward_closed(const ClemensSpec& spec) {
  for (const auto& face : spec.faces) {
    if (face.empty()) throw std::invalid_argument("clemens spec contains the empty face");
    const std::vector<std::string> v(face.begin(), face.end());
    const std::size_t n = v.size();
    if (n > 20) throw std::invalid_argument("clemens face too large");
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
      std::set<std::string> sub;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) sub.insert(v[i]);
      if (!spec.faces.count(sub))
        throw std::invalid_argument("clemens spec is not downward closed: missing a subface of a " +
                                    std::to_string(n) + "-face");
    }
  }
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
  return "{" + out + "}";
}

}  // namespace

bool OrbifoldModel::has_free_boundary() const {
  if (static_cast<int>(components.size()) != pic_rank) return false;
  std::vector<std::vector<Rational>> rows;
  for (const auto& c : components) rows.push_back(to_rational(c.pic_class));
  if (lp::rank(rows) != pic_rank) return false;
  if (eff_generators.empty()) return true;
  std::set<std::vector<std::int64_t>> gens(eff_generators.begin(), eff_generators.end());
  std::set<std::vector<std::int64_t>> classes;
  for (const auto& c : components) classes.insert(c.pic_class);
  return gens == classes;
}

const ClemensSpec& OrbifoldModel::clemens_at(std::string_view place) const {
  auto it = clemens.find(std::string(place));
  if (it != clemens.end()) return it->second;
  if (place != "inf") {
    it = clemens.find("finite");
    if (it != clemens.end()) return it->second;
  }
  throw std::invalid_argument("missing clemens data for place '" + std::string(place) + "' in model " + name);
}

void OrbifoldModel::validate() const {
  if (components.empty()) throw std::invalid_argument("model " + name + " has no boundary components");
  if (pic_rank < 1) throw std::invalid_argument("model " + name + ": pic_rank must be >= 1");
  std::set<std::string> seen;
  for (const auto& c : components) {
    if (c.id.empty()) throw std::invalid_argument("component with empty id");
    if (!seen.insert(c.id).second) throw std::invalid_argument("duplicate component id " + c.id);
    if (c.lambda <= 0) throw std::invalid_argument("component " + c.id + ": lambda must be positive");
    if (static_cast<int>(c.pic_class.size()) != pic_rank)
      throw std::invalid_argument("component " + c.id + ": pic_class length != pic_rank");
  }
  for (const auto& g : eff_generators)
    if (static_cast<int>(g.size()) != pic_rank) throw std::invalid_argument("cone generator length != pic_rank");
  for (const auto& [place, spec] : clemens) {
    for (const auto& face : spec.faces)
      for (const auto& id : face)
        if (!seen.count(id)) throw std::invalid_argument("clemens[" + place + "] names unknown component " + id);
    check_downward_closed(spec);
  }
}

Rational fujita_invariant(const OrbifoldModel& model, bool skip_dlt) {
  if (model.components.empty()) throw std::invalid_argument("fujita_invariant: empty component list");
  if (model.has_free_boundary()) {
    std::optional<Rational> best;
    for (const auto& c : model.components) {
      if (skip_dlt && c.weight.is_dlt()) continue;
      const Rational r = (c.rho - c.weight.epsilon()) / c.lambda;
      if (!best || r > *best) best = r;
    }
    if (!best) throw std::invalid_argument("fujita_invariant: skip_dlt requested but no klt component");
    return *best;
  }
  // min t with t*L + K + D_eps in Eff: sum mu_j g_j - t L = -(-(K + D_eps)).
  const auto gens = generators_of(model);
  const auto ell = pic_combination(model, [](const auto& c) { return c.lambda; });
  const auto kappa = pic_combination(model, [](const auto& c) { return c.rho - c.weight.epsilon(); });
  const std::size_t r = static_cast<std::size_t>(model.pic_rank), k = gens.size();
  std::vector<std::vector<Rational>> A(r, std::vector<Rational>(k + 2));
  std::vector<Rational> b(r), cost(k + 2);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < k; ++j) A[i][j] = gens[j][i];
    A[i][k] = -ell[i];
    A[i][k + 1] = ell[i];
    b[i] = -kappa[i];
  }
  cost[k] = 1;
  cost[k + 1] = -1;
  const auto res = lp::minimize(A, b, cost);
  if (res.status != lp::Status::optimal)
    throw std::domain_error("fujita_invariant: adjoint class never effective (L not big?)");
  return res.objective;
}

int b_klt(const OrbifoldModel& model) {
  if (model.has_dlt()) throw std::invalid_argument("b_klt: dlt weight present");
  if (!model.has_free_boundary())
    throw std::domain_error("b_klt: boundary classes are not a basis of Pic; use b_conjectural");
  const Rational a = fujita_invariant(model);
  return static_cast<int>(std::count_if(model.components.begin(), model.components.end(), [&](const auto& c) {
    return (c.rho - c.weight.epsilon()) / c.lambda == a;
  }));
}

AdjointClass adjoint_class(const OrbifoldModel& model) {
  const Rational a = fujita_invariant(model);
  AdjointClass out;
  for (const auto& c : model.components) {
    const Rational k = a * c.lambda - c.rho + c.weight.epsilon();
    out.coefficients[c.id] = k;
    if (k > 0) out.support.insert(c.id);
  }
  out.pic_class = pic_combination(model, [&](const auto& c) { return out.coefficients.at(c.id); });
  return out;
}

int b_conjectural(const OrbifoldModel& model) {
  const AdjointClass adj = adjoint_class(model);
  const auto gens = generators_of(model);
  if (!lp::in_cone(gens, adj.pic_class)) throw std::domain_error("b_conjectural: adjoint class not in the cone");
  const auto support = lp::supporting_generators(gens, adj.pic_class);
  std::vector<std::vector<Rational>> face;
  for (int i : support) face.push_back(gens[i]);
  const int dim = face.empty() ? 0 : lp::rank(face);
  return model.pic_rank - dim;
}

Rational tilde_a(const OrbifoldModel& model) {
  if (model.components.empty()) throw std::invalid_argument("tilde_a: empty component set");
  std::optional<Rational> best;
  for (const auto& c : model.components) {
    const Rational r = Rational(c.rho - 1) / c.lambda;
    if (!best || r > *best) best = r;
  }
  return *best;
}

int clemens_dimension(const ClemensSpec& spec) {
  check_downward_closed(spec);
  int best = -1;
  for (const auto& f : spec.faces) best = std::max(best, static_cast<int>(f.size()) - 1);
  return best;
}

ClemensSpec restrict_to(const ClemensSpec& spec, const std::set<std::string>& keep) {
  ClemensSpec out;
  for (const auto& f : spec.faces)
    if (std::includes(keep.begin(), keep.end(), f.begin(), f.end())) out.faces.insert(f);
  return out;
}

namespace {
// Components with zero coefficient in tilde_a L + K + D_red.
std::set<std::string> local_boundary(const OrbifoldModel& model) {
  const Rational ta = tilde_a(model);
  std::set<std::string> keep;
  for (const auto& c : model.components)
    if (ta * c.lambda - c.rho + 1 == 0) keep.insert(c.id);
  return keep;
}
}  // namespace

int b_local(const OrbifoldModel& model, std::string_view place) {
  const ClemensSpec& spec = model.clemens_at(place);
  return 1 + clemens_dimension(restrict_to(spec, local_boundary(model)));
}

int b_local_f(const OrbifoldModel& model, std::string_view place, const FunctionalDivisorData& f) {
  const ClemensSpec& spec = model.clemens_at(place);
  std::set<std::string> keep;
  for (const auto& id : local_boundary(model)) {
    auto it = f.d.find(id);
    if (it == f.d.end()) throw std::invalid_argument("b_local_f: no d value for component " + id);
    if (it->second < 0) throw std::invalid_argument("b_local_f: negative d value for component " + id);
    if (it->second == 0) keep.insert(id);
  }
  return 1 + clemens_dimension(restrict_to(spec, keep));
}

int b_dlt(const OrbifoldModel& model, const std::vector<std::string>& places) {
  for (const auto& c : model.components)
    if (c.lambda != c.rho - c.weight.epsilon())
      throw std::invalid_argument("b_dlt: L is not log-anticanonical at component " + c.id);
  const int klt = static_cast<int>(
      std::count_if(model.components.begin(), model.components.end(), [](const auto& c) { return !c.weight.is_dlt(); }));
  int total = klt;
  for (const auto& v : places) total += b_local(model, v);
  return total;
}

AlphaConstant alpha_constant_simplicial(const std::vector<std::vector<Rational>>& dual_generators,
                                        const std::vector<Rational>& L_class,
                                        const std::vector<Rational>& eps_outside) {
  const std::size_t r = L_class.size();
  if (dual_generators.size() != r) throw std::invalid_argument("alpha_constant: cone is not simplicial");
  std::vector<std::vector<Rational>> m = dual_generators;
  Rational det = 1;
  for (std::size_t col = 0; col < r; ++col) {
    if (m[col].size() != r) throw std::invalid_argument("alpha_constant: generator length mismatch");
  }
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = col;
    while (piv < r && m[piv][col] == 0) ++piv;
    if (piv == r) throw std::invalid_argument("alpha_constant: generators are linearly dependent");
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t i = col + 1; i < r; ++i) {
      const Rational f = m[i][col] / m[col][col];
      for (std::size_t j = col; j < r; ++j) m[i][j] -= f * m[col][j];
    }
  }
  AlphaConstant out;
  out.chi = det < 0 ? Rational(-det) : det;
  for (const auto& v : dual_generators) {
    Rational pairing = 0;
    for (std::size_t j = 0; j < r; ++j) pairing += L_class[j] * v[j];
    if (pairing <= 0) throw std::invalid_argument("alpha_constant: nonpositive pairing <L, v>");
    out.chi /= pairing;
  }
  out.factor = 1;
  for (const auto& e : eps_outside) out.factor *= 1 - e;
  out.value = out.chi * out.factor;
  out.approx = to_double(out.value);
  return out;
}

Weight exceptional_weight(const OrbifoldModel& model, const BlowUpData& data) {
  int best = 0;
  for (const auto& id : data.center) {
    const auto& c = model.component(id);
    auto it = data.multiplicity.find(id);
    const int e = it == data.multiplicity.end() ? 1 : it->second;
    if (e <= 0) continue;
    if (c.weight.is_dlt()) return Weight::dlt();
    best = std::max(best, (c.weight.m() + e - 1) / e);
  }
  if (best == 0) throw std::invalid_argument("blow-up center has no component with positive multiplicity");
  return Weight::klt(best);
}

OrbifoldModel blow_up_transform(const OrbifoldModel& model, const BlowUpData& data) {
  const std::set<std::string> center(data.center.begin(), data.center.end());
  if (center.empty()) throw std::invalid_argument("blow-up center is empty");
  for (const auto& id : center) model.index_of(id);
  bool marked = false;
  for (const auto& [place, spec] : model.clemens) marked = marked || spec.faces.count(center);
  if (!marked) throw std::invalid_argument("blow-up center " + join(center) + " is not a marked clemens face");
  if (std::any_of(model.components.begin(), model.components.end(),
                  [&](const auto& c) { return c.id == data.exceptional_id; }))
    throw std::invalid_argument("exceptional id " + data.exceptional_id + " already used");

  auto mult = [&](const std::string& id) {
    if (!center.count(id)) return 0;
    auto it = data.multiplicity.find(id);
    return it == data.multiplicity.end() ? 1 : it->second;
  };

  OrbifoldModel out;
  out.name = model.name + "_blowup";
  out.dim = model.dim;
  out.pic_rank = model.pic_rank + 1;
  out.adjoint_rigid = model.adjoint_rigid;
  BoundaryComponent E;
  E.id = data.exceptional_id;
  E.weight = exceptional_weight(model, data);
  E.rho = data.rho_exceptional;
  E.lambda = 0;
  for (const auto& c : model.components) {
    BoundaryComponent nc = c;
    nc.pic_class.push_back(-mult(c.id));
    E.lambda += mult(c.id) * c.lambda;
    out.components.push_back(nc);
  }
  E.pic_class.assign(static_cast<std::size_t>(out.pic_rank), 0);
  E.pic_class.back() = 1;
  out.components.push_back(E);
  for (const auto& c : out.components) out.eff_generators.push_back(c.pic_class);

  // Stellar subdivision at the center face.
  for (const auto& [place, spec] : model.clemens) {
    ClemensSpec ns;
    if (!spec.faces.count(center)) {
      ns = spec;
    } else {
      for (const auto& f : spec.faces) {
        if (!std::includes(f.begin(), f.end(), center.begin(), center.end())) ns.faces.insert(f);
      }
      ns.faces.insert({E.id});
      for (const auto& f : spec.faces) {
        if (!std::includes(f.begin(), f.end(), center.begin(), center.end())) continue;
        // E joined with every subset of f not containing the whole center.
        const std::vector<std::string> v(f.begin(), f.end());
        for (std::size_t mask = 1; mask < (std::size_t{1} << v.size()); ++mask) {
          std::set<std::string> g;
          for (std::size_t i = 0; i < v.size(); ++i)
            if (mask >> i & 1) g.insert(v[i]);
          if (std::includes(g.begin(), g.end(), center.begin(), center.end())) continue;
          g.insert(E.id);
          ns.faces.insert(g);
        }
      }
    }
    out.clemens[place] = ns;
  }
  out.validate();
  return out;
}

OrbifoldModel with_log_anticanonical_L(OrbifoldModel model) {
  for (auto& c : model.components) c.lambda = c.rho - c.weight.epsilon();
  model.name += "_logac";
  return model;
}

InvariantReport invariant_report(const OrbifoldModel& model, const std::vector<std::string>& places) {
  model.validate();
  InvariantReport rep;
  rep.a = fujita_invariant(model);
  const AdjointClass adj = adjoint_class(model);
  rep.adjoint_support = adj.support;
  rep.adjoint_coefficients = adj.coefficients;
  rep.adjoint_rigid = model.adjoint_rigid;
  rep.b_conjectural = b_conjectural(model);
  if (!model.has_dlt() && model.has_free_boundary()) rep.b_klt = b_klt(model);
  if (model.has_dlt()) {
    const bool log_ac = std::all_of(model.components.begin(), model.components.end(),
                                    [](const auto& c) { return c.lambda == c.rho - c.weight.epsilon(); });
    if (log_ac) rep.b_dlt = b_dlt(model, places);
  }
  if (rep.b_dlt) {
    rep.b_predicted = *rep.b_dlt;
    rep.b_source = "b_dlt";
  } else if (rep.b_klt) {
    rep.b_predicted = *rep.b_klt;
    rep.b_source = "b_klt";
  } else {
    rep.b_predicted = rep.b_conjectural;
    rep.b_source = "b_conjectural";
  }
  return rep;
}

}  // namespace campana
