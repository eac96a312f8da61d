#include <doctest.h>

#include <sstream>

#include "campana/geometry.hpp"
#include "campana/model_io.hpp"
#include "campana/zoo.hpp"

using namespace campana;

namespace {

Rational q(const char* s) { return parse_rational(s); }

struct Comp {
  const char* id;
  const char* weight;
  int rho;
  const char* lambda;
};

// Free boundary: component i has class e_i; every singleton (and the listed
// edges) carries real points.
OrbifoldModel free_model(const std::vector<Comp>& comps, const std::vector<std::pair<int, int>>& edges = {}) {
  std::ostringstream os;
  os << "name = hand\ndim = 2\npic_rank = " << comps.size() << "\n";
  for (std::size_t i = 0; i < comps.size(); ++i) {
    os << "[component " << comps[i].id << "]\nweight = " << comps[i].weight << "\nrho = " << comps[i].rho
       << "\nlambda = " << comps[i].lambda << "\npic_class =";
    for (std::size_t j = 0; j < comps.size(); ++j) os << ' ' << (i == j);
    os << "\n";
  }
  os << "[clemens inf]\n";
  for (const auto& c : comps) os << "face = " << c.id << "\n";
  for (auto [a, b] : edges) os << "face = " << comps[a].id << ' ' << comps[b].id << "\n";
  return parse_model(os.str());
}

OrbifoldModel p2_one_line(const char* weight, const char* lambda) {
  return parse_model(std::string("name = p2_line\ndim = 2\npic_rank = 1\n[component L]\nweight = ") + weight +
                     "\nrho = 3\nlambda = " + lambda + "\npic_class = 1\n[clemens inf]\nface = L\n");
}

std::vector<Weight> klt(std::initializer_list<int> ms) {
  std::vector<Weight> w;
  for (int m : ms) w.push_back(Weight::klt(m));
  return w;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("weights") {
  CHECK(Weight::klt(2).epsilon() == q("1/2"));
  CHECK(Weight::klt(1).epsilon() == 0);
  CHECK(Weight::dlt().epsilon() == 1);
  CHECK(Weight::parse("dlt").is_dlt());
  CHECK(Weight::parse("3") == Weight::klt(3));
  CHECK_THROWS(Weight::dlt().m());
  CHECK_THROWS(Weight::parse("0"));
  CHECK_THROWS(Weight::parse("x"));
}

TEST_CASE("fujita invariant") {
  CHECK(fujita_invariant(make_zoo_model("p2_three_lines", klt({2, 2, 2}))) == q("3/2"));
  for (int m = 1; m <= 5; ++m) CHECK(fujita_invariant(make_zoo_model("p1", klt({m}))) == 1 + Rational(1, m));
  for (const char* name : {"p1", "pn_hyperplane", "p2_three_lines", "blowup_p2", "dp_d5"})
    CHECK(fujita_invariant(with_log_anticanonical_L(make_zoo_model(name))) == 1);
  CHECK(fujita_invariant(make_zoo_model("by_four_lines")) == 1);
}

TEST_CASE("b_klt and the adjoint class") {
  const auto m = free_model({{"A", "2", 3, "1"}, {"B", "2", 2, "1"}});
  CHECK(fujita_invariant(m) == q("5/2"));
  CHECK(b_klt(m) == 1);
  const auto adj = adjoint_class(m);
  CHECK(adj.coefficients.at("A") == 0);
  CHECK(adj.coefficients.at("B") == 1);
  CHECK(adj.support == std::set<std::string>{"B"});
  CHECK(b_klt(make_zoo_model("p1")) == 1);
  CHECK_THROWS_AS(b_klt(make_zoo_model("p2_three_lines", {Weight::dlt(), Weight::klt(2), Weight::klt(2)})),
                  std::invalid_argument);
  for (const char* name : {"p1", "pn_hyperplane", "blowup_p2", "dp_d5"}) {
    const auto model = with_log_anticanonical_L(make_zoo_model(name));
    CHECK(b_klt(model) == static_cast<int>(model.components.size()));
    for (const auto& [id, c] : adjoint_class(model).coefficients) CHECK(c == 0);
  }
  const auto p2 = adjoint_class(make_zoo_model("p2_three_lines"));
  CHECK(p2.support.empty());
  for (const auto& [id, c] : p2.coefficients) CHECK(c == 0);
}

TEST_CASE("b_conjectural agrees with b_klt on free models") {
  CHECK(b_conjectural(make_zoo_model("p2_three_lines")) == 1);
  CHECK(b_conjectural(make_zoo_model("by_four_lines")) == 1);
  for (int m0 = 1; m0 <= 4; ++m0)
    for (int m1 = 1; m1 <= 4; ++m1)
      for (const char* l1 : {"1", "2", "1/2"}) {
        const auto model = free_model({{"A", std::to_string(m0).c_str(), 3, "1"}, {"B", std::to_string(m1).c_str(), 2, l1}});
        CHECK(b_conjectural(model) == b_klt(model));
      }
  for (const char* name : {"p1", "pn_hyperplane", "blowup_p2", "dp_d5"}) {
    const auto model = make_zoo_model(name);
    CHECK(b_conjectural(model) == b_klt(model));
  }
}

TEST_CASE("scaling L") {
  const auto m = free_model({{"A", "2", 3, "1"}, {"B", "3", 2, "2/3"}, {"C", "1", 1, "1/2"}});
  const auto a = fujita_invariant(m);
  for (const char* t : {"2", "1/3", "7/5"}) {
    auto s = m;
    for (auto& c : s.components) c.lambda *= q(t);
    CHECK(fujita_invariant(s) == a / q(t));
    CHECK(b_klt(s) == b_klt(m));
    CHECK(adjoint_class(s).support == adjoint_class(m).support);
    CHECK(b_local(s, "inf") == b_local(m, "inf"));
    CHECK(tilde_a(s) == tilde_a(m) / q(t));
  }
}

TEST_CASE("tilde_a") {
  CHECK(tilde_a(free_model({{"A", "2", 2, "1"}})) == 1);
  CHECK(tilde_a(free_model({{"A", "2", 3, "1"}, {"B", "2", 2, "1"}})) == 2);
  CHECK(tilde_a(make_zoo_model("p1")) == 1);
}

TEST_CASE("clemens dimension") {
  ClemensSpec s;
  CHECK(clemens_dimension(s) == -1);
  s.faces = {{"0"}};
  CHECK(clemens_dimension(s) == 0);
  s.faces = {{"0"}, {"1"}, {"0", "1"}};
  CHECK(clemens_dimension(s) == 1);
  ClemensSpec broken;
  broken.faces = {{"0", "1"}};
  CHECK_THROWS(clemens_dimension(broken));
  // monotone under adding faces
  ClemensSpec grow;
  int last = clemens_dimension(grow);
  for (auto f : std::vector<std::set<std::string>>{{"a"}, {"b"}, {"c"}, {"a", "b"}, {"b", "c"}, {"a", "c"}, {"a", "b", "c"}}) {
    grow.faces.insert(f);
    const int d = clemens_dimension(grow);
    CHECK(d >= last);
    last = d;
  }
  CHECK(last == 2);
  CHECK(restrict_to(s, {"1"}).faces == std::set<std::set<std::string>>{{"1"}});
}

TEST_CASE("local b-invariants") {
  CHECK(b_local(p2_one_line("1", "1"), "inf") == 1);
  const auto edge = free_model({{"A", "1", 2, "1"}, {"B", "1", 2, "1"}}, {{0, 1}});
  CHECK(adjoint_class(edge).support.empty());
  CHECK(b_local(edge, "inf") == 2);
  CHECK_THROWS(b_local(edge, "7"));

  FunctionalDivisorData zero{{{"A", 0}, {"B", 0}}};
  CHECK(b_local_f(edge, "inf", zero) == b_local(edge, "inf"));
  FunctionalDivisorData pos{{{"A", 1}, {"B", 2}}};
  CHECK(b_local_f(edge, "inf", pos) == 0);
  CHECK(b_local_f(p2_one_line("1", "1"), "inf", {{{"L", 1}}}) == 0);
}

TEST_CASE("local b-invariant after removing the adjoint support") {
  // tilde_a = -1 and every coefficient -lambda - rho + 1 vanishes
  auto shifted = free_model({{"A", "1", 1, "1"}, {"B", "1", 1, "1"}}, {{0, 1}});
  for (auto& c : shifted.components) c.rho = 0;
  CHECK(b_local(shifted, "inf") == 2);
  const auto three = free_model({{"A", "1", 1, "1"}, {"B", "1", 1, "1"}, {"C", "1", 3, "1"}}, {{0, 1}});
  // tilde_a = 2 from C, so A and B carry coefficient 2; only the vertex C is left
  CHECK(b_local(three, "inf") == 1);
  auto no_c = three;
  no_c.clemens["inf"].faces.erase({"C"});
  CHECK(b_local(no_c, "inf") == 0);
}

TEST_CASE("b_dlt") {
  const auto line = p2_one_line("dlt", "2");  // lambda = rho - eps
  CHECK(b_dlt(line, {"inf"}) == 1);
  const auto rep = invariant_report(line);
  REQUIRE(rep.b_dlt);
  CHECK(*rep.b_dlt == 1);
  CHECK(rep.a == 1);
  CHECK(rep.b_source == "b_dlt");
  CHECK_THROWS(b_dlt(p2_one_line("dlt", "3"), {"inf"}));

  // two places each contributing 1
  auto two = line;
  two.clemens["5"] = two.clemens.at("inf");
  CHECK(b_dlt(two, {"inf", "5"}) == 2);
  CHECK_THROWS(b_dlt(line, {"inf", "5"}));

  // all klt: reduces to the klt count plus local terms
  const auto k = with_log_anticanonical_L(make_zoo_model("pn_hyperplane", klt({2}), 2));
  CHECK(b_dlt(k, {"inf"}) == b_klt(k) + b_local(k, "inf"));
}

TEST_CASE("alpha constant, simplicial case") {
  const auto a = alpha_constant_simplicial({{1, 0}, {0, 1}}, {1, 1}, {});
  CHECK(a.value == 1);
  CHECK(alpha_constant_simplicial({{1}}, {2}, {}).value == q("1/2"));
  const auto b = alpha_constant_simplicial({{1}}, {2}, {q("1/2")});
  CHECK(b.value == q("1/4"));
  CHECK(b.approx == doctest::Approx(0.25));
  CHECK_THROWS(alpha_constant_simplicial({{1, 0}, {2, 0}}, {1, 1}, {}));
  CHECK_THROWS(alpha_constant_simplicial({{1, 0}, {0, 1}}, {1, -1}, {}));
}

TEST_CASE("blow-up weights and invariance") {
  for (int m0 = 1; m0 <= 3; ++m0)
    for (int m1 = 1; m1 <= 4; ++m1)
      for (int m2 = 1; m2 <= 4; ++m2) {
        const auto model = make_zoo_model("p2_three_lines", klt({m0, m1, m2}));
        BlowUpData data;
        data.center = {"D1", "D2"};
        data.rho_exceptional = 1;
        CHECK(exceptional_weight(model, data).m() == std::max(m1, m2));
      }
  {
    const auto model = make_zoo_model("p2_three_lines", klt({2, 4, 3}));
    BlowUpData data;
    data.center = {"D1", "D2"};
    data.multiplicity = {{"D1", 2}};
    CHECK(exceptional_weight(model, data).m() == 3);  // max(ceil(4/2), 3)
  }
  const auto dlt_center = make_zoo_model("p2_three_lines", {Weight::klt(2), Weight::dlt(), Weight::klt(2)});
  BlowUpData data;
  data.center = {"D1", "D2"};
  data.rho_exceptional = 1;
  CHECK(exceptional_weight(dlt_center, data).is_dlt());

  const auto model = make_zoo_model("p2_three_lines", {Weight::dlt(), Weight::klt(2), Weight::klt(2)});
  const auto blown = blow_up_transform(model, data);
  CHECK(blown.components.size() == 4);
  CHECK_NOTHROW(blown.validate());
  const auto& E = blown.component("E");
  CHECK(E.rho == 1);
  CHECK(E.weight == Weight::klt(2));
  CHECK(E.lambda == q("2/3"));
  CHECK(b_local(blown, "inf") == b_local(model, "inf"));
  CHECK(tilde_a(blown) == tilde_a(model));
  // the old edge D1 D2 is gone, E meets both
  const auto& faces = blown.clemens_at("inf").faces;
  CHECK_FALSE(faces.count({"D1", "D2"}));
  CHECK(faces.count({"D1", "E"}));
  CHECK(faces.count({"D2", "E"}));

  BlowUpData bad;
  bad.center = {"D0", "D9"};
  CHECK_THROWS(blow_up_transform(model, bad));
}

TEST_CASE("invariant reports for the zoo") {
  const auto p2 = invariant_report(make_zoo_model("p2_three_lines"));
  CHECK(p2.a == q("3/2"));
  CHECK(p2.b_predicted == 1);
  CHECK(p2.b_source == "b_conjectural");
  CHECK_FALSE(p2.b_klt);
  const auto by = invariant_report(make_zoo_model("by_four_lines"));
  CHECK(by.a == 1);
  CHECK(by.b_predicted == 1);
  const auto d5 = invariant_report(make_zoo_model("dp_d5"));
  CHECK(d5.a == q("5/2"));
  CHECK(d5.b_predicted == 1);
  CHECK(d5.b_source == "b_klt");
  const auto bl = invariant_report(make_zoo_model("blowup_p2"));
  CHECK(bl.a == q("5/2"));
  CHECK(bl.adjoint_support == std::set<std::string>{"E"});
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 4; ++m) {
      const auto r = invariant_report(make_zoo_model("pn_hyperplane", klt({m}), n));
      CHECK(r.a == n + 1 - Rational(m - 1, m));
      CHECK(r.b_predicted == 1);
    }
}

}
