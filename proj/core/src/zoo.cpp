#include "campana/zoo.hpp"

#include <stdexcept>

namespace campana {

namespace {

BoundaryComponent comp(std::string id, int rho, Rational lambda, std::vector<std::int64_t> cls) {
  BoundaryComponent c;
  c.id = std::move(id);
  c.weight = Weight::klt(2);
  c.rho = rho;
  c.lambda = std::move(lambda);
  c.pic_class = std::move(cls);
  return c;
}

std::vector<std::int64_t> unit(int r, int i) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(r), 0);
  v[static_cast<std::size_t>(i)] = 1;
  return v;
}

ClemensSpec graph(const std::vector<std::string>& vertices,
                  const std::vector<std::pair<std::string, std::string>>& edges) {
  ClemensSpec s;
  for (const auto& v : vertices) s.faces.insert({v});
  for (const auto& [a, b] : edges) s.faces.insert({a, b});
  return s;
}

void same_everywhere(OrbifoldModel& m, const ClemensSpec& s) {
  m.clemens["inf"] = s;
  m.clemens["finite"] = s;
}

}  // namespace

const std::vector<ZooEntry>& zoo_catalogue() {
  static const std::vector<ZooEntry> kZoo = {
      {"p1", Backend::p1, "P^1 with one weighted point at infinity",
       "(p, q) = p/q, q > 0 the denominator; counted q != 0", "2", 1},
      {"pn_hyperplane", Backend::pn_hyperplane, "P^n with the weighted hyperplane x0 = 0",
       "(x0, ..., xn), x0 > 0", "2", 2},
      {"p2_three_lines", Backend::p2_three_lines, "P^2 with the three coordinate lines, L = H",
       "(x0, x1, x2), x0 x1 x2 != 0", "2,2,2", 2},
      {"by_four_lines", Backend::by_four_lines,
       "P^2 with x0, x1, x2, x0+x1+x2 = 0, all weights 2 (thin set -x0 x1 x2 = square)",
       "(x0, x1, x2), x0 x1 x2 (x0+x1+x2) != 0", "2,2,2,2", 2},
      {"blowup_pn", Backend::blowup_pn, "blow-up of P^n along x0 = x1 = 0; components E, D2 (strict x0 = 0)",
       "(x0, ..., xn), x0 > 0", "2,2", 2},
      {"dp_d5", Backend::dp_d5, "split quartic del Pezzo surface of type D5 as a G_a^2 compactification",
       "(x0, x1, x2), x0 > 0, x1 x2 != 0", "2,2,2,2,2,2", 2},
  };
  return kZoo;
}

std::string backend_name(Backend b) {
  for (const auto& e : zoo_catalogue())
    if (e.backend == b) return e.name;
  return "?";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "blowup_p2") return Backend::blowup_pn;
  for (const auto& e : zoo_catalogue())
    if (e.name == name) return e.backend;
  return std::nullopt;
}

OrbifoldModel make_zoo_model(std::string_view name, const std::vector<Weight>& weights, int n) {
  const auto backend = parse_backend(name);
  if (!backend) throw std::invalid_argument("unknown zoo model '" + std::string(name) + "'");
  if (name == "blowup_p2") {
    if (n != 0 && n != 2) throw std::invalid_argument("blowup_p2 has n = 2");
    n = 2;
  }
  OrbifoldModel m;
  m.backend = backend_name(*backend);
  m.adjoint_rigid = true;
  switch (*backend) {
    case Backend::p1:
      if (n != 0 && n != 1) throw std::invalid_argument("p1 has n = 1");
      m.name = "p1";
      m.dim = 1;
      m.pic_rank = 1;
      m.components = {comp("D", 2, 1, {1})};
      same_everywhere(m, graph({"D"}, {}));
      break;
    case Backend::pn_hyperplane: {
      if (n == 0) n = 2;
      if (n < 1 || n > 6) throw std::invalid_argument("pn_hyperplane supports 1 <= n <= 6");
      m.name = "pn_hyperplane";
      m.dim = n;
      m.pic_rank = 1;
      m.components = {comp("H", n + 1, 1, {1})};
      same_everywhere(m, graph({"H"}, {}));
      break;
    }
    case Backend::p2_three_lines:
      if (n != 0 && n != 2) throw std::invalid_argument("p2_three_lines has n = 2");
      m.name = "p2_three_lines";
      m.dim = 2;
      m.pic_rank = 1;
      m.components = {comp("D0", 1, Rational(1, 3), {1}), comp("D1", 1, Rational(1, 3), {1}),
                      comp("D2", 1, Rational(1, 3), {1})};
      m.eff_generators = {{1}};
      same_everywhere(m, graph({"D0", "D1", "D2"}, {{"D0", "D1"}, {"D0", "D2"}, {"D1", "D2"}}));
      break;
    case Backend::by_four_lines:
      if (n != 0 && n != 2) throw std::invalid_argument("by_four_lines has n = 2");
      m.name = "by_four_lines";
      m.dim = 2;
      m.pic_rank = 1;
      // -K = 3H written on the boundary as D0 + D1 + D2.
      m.components = {comp("D0", 1, Rational(1, 4), {1}), comp("D1", 1, Rational(1, 4), {1}),
                      comp("D2", 1, Rational(1, 4), {1}), comp("D3", 0, Rational(1, 4), {1})};
      m.eff_generators = {{1}};
      same_everywhere(m, graph({"D0", "D1", "D2", "D3"}, {{"D0", "D1"},
                                                          {"D0", "D2"},
                                                          {"D0", "D3"},
                                                          {"D1", "D2"},
                                                          {"D1", "D3"},
                                                          {"D2", "D3"}}));
      break;
    case Backend::blowup_pn: {
      if (n == 0) n = 2;
      if (n < 2 || n > 5) throw std::invalid_argument("blowup_pn supports 2 <= n <= 5");
      m.name = n == 2 ? "blowup_p2" : "blowup_pn";
      m.dim = n;
      m.pic_rank = 2;
      // H = D2 + E and -K = (n+1) H - E.
      m.components = {comp("E", n, 1, unit(2, 0)), comp("D2", n + 1, 1, unit(2, 1))};
      same_everywhere(m, graph({"E", "D2"}, {{"E", "D2"}}));
      break;
    }
    case Backend::dp_d5:
      if (n != 0 && n != 2) throw std::invalid_argument("dp_d5 has n = 2");
      m.name = "dp_d5";
      m.dim = 2;
      m.pic_rank = 6;
      // E1..E5 form the D5 configuration, E6 is the (-1)-curve; L is the
      // pull-back of a line, H = 3E1 + 3E2 + E3 + 2E4 + E5 + 3E6.
      m.components = {comp("E1", 6, 3, unit(6, 0)), comp("E2", 5, 3, unit(6, 1)), comp("E3", 3, 1, unit(6, 2)),
                      comp("E4", 4, 2, unit(6, 3)), comp("E5", 2, 1, unit(6, 4)), comp("E6", 4, 3, unit(6, 5))};
      same_everywhere(m, graph({"E1", "E2", "E3", "E4", "E5", "E6"},
                               {{"E5", "E4"}, {"E4", "E1"}, {"E1", "E2"}, {"E2", "E6"}, {"E3", "E1"}}));
      break;
  }
  if (!weights.empty()) m = with_weights(std::move(m), weights);
  m.validate();
  return m;
}

OrbifoldModel with_weights(OrbifoldModel model, const std::vector<Weight>& weights) {
  if (weights.size() != model.components.size())
    throw std::invalid_argument("model " + model.name + " needs " + std::to_string(model.components.size()) +
                                " weights, got " + std::to_string(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) model.components[i].weight = weights[i];
  return model;
}

std::vector<Weight> weights_of(const OrbifoldModel& model) {
  std::vector<Weight> w;
  for (const auto& c : model.components) w.push_back(c.weight);
  return w;
}

Backend backend_of(const OrbifoldModel& model) {
  const auto b = parse_backend(model.backend);
  if (!b) throw std::invalid_argument("model " + model.name + " has no enumeration backend");
  return *b;
}

}  // namespace campana
