#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "campana/model_io.hpp"
#include "campana/zoo.hpp"

using namespace campana;

TEST_SUITE("model_io") {

TEST_CASE("every zoo model survives a round trip") {
  for (const auto& e : zoo_catalogue()) {
    const auto m = make_zoo_model(e.name);
    const auto text = write_model(m);
    const auto back = parse_model(text);
    CHECK(write_model(back) == text);
    CHECK(back.name == m.name);
    CHECK(back.dim == m.dim);
    CHECK(back.pic_rank == m.pic_rank);
    CHECK(back.backend == m.backend);
    REQUIRE(back.components.size() == m.components.size());
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      CHECK(back.components[i].id == m.components[i].id);
      CHECK(back.components[i].weight == m.components[i].weight);
      CHECK(back.components[i].rho == m.components[i].rho);
      CHECK(back.components[i].lambda == m.components[i].lambda);
      CHECK(back.components[i].pic_class == m.components[i].pic_class);
    }
    CHECK(invariant_report(back).a == invariant_report(m).a);
  }
}

TEST_CASE("comments, blank lines and dlt weights") {
  const auto m = parse_model(R"(# a hand model
name = line   # trailing comment
dim = 2
pic_rank = 1

[component L]
weight = dlt
rho = 3
lambda = 2
pic_class = 1
[clemens inf]
face = L
)");
  CHECK(m.name == "line");
  CHECK(m.components.at(0).weight.is_dlt());
  CHECK(m.eff_generators.empty());  // defaults to the component classes
  CHECK(m.has_free_boundary());
}

TEST_CASE("errors carry the line number") {
  auto message = [](const std::string& text) {
    try {
      parse_model(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("name = x\ndim = two\n").find("line 2") != std::string::npos);
  CHECK(message("name = x\n[component A]\nweight = 2\nbogus = 1\n").find("line 4") != std::string::npos);
  CHECK(message("name = x\n[wat]\n").find("line 2") != std::string::npos);
  CHECK(message("just words\n").find("line 1") != std::string::npos);
  CHECK(message("name = x\ndim = 1\npic_rank = 1\n[component A]\nrho = 2\nlambda = 0\npic_class = 1\n") != "no error");
  CHECK(message("name = x\ndim = 1\npic_rank = 1\n[component A]\nrho = 2\nlambda = 1\npic_class = 1\n"
                "[clemens inf]\nface = A B\n") != "no error");
}

TEST_CASE("read_model_file") {
  const auto file = std::filesystem::temp_directory_path() / "campana_model_io.model";
  {
    std::ofstream f(file);
    f << write_model(make_zoo_model("dp_d5"));
  }
  const auto m = read_model_file(file);
  CHECK(m.components.size() == 6);
  std::filesystem::remove(file);
  CHECK_THROWS(read_model_file(file));
}

}
