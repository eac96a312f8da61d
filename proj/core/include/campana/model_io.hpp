#pragma once

#include <filesystem>
#include <string>

#include "campana/geometry.hpp"

namespace campana {

// Model file format (line oriented, '#' starts a comment):
//
//   name = p2_three_lines
//   dim = 2
//   pic_rank = 1
//   backend = p2_three_lines
//   adjoint_rigid = true
//
//   [component D0]
//   weight = 2          # or dlt
//   rho = 1
//   lambda = 1/3
//   pic_class = 1       # space separated integers
//
//   [cone]              # optional; defaults to the component classes
//   generator = 1
//
//   [clemens inf]       # one section per place tag ("inf", a prime, or "finite")
//   face = D0
//   face = D0 D1
//
// Errors are std::invalid_argument carrying "line N: ...".
OrbifoldModel parse_model(const std::string& text);
OrbifoldModel read_model_file(const std::filesystem::path& file);
std::string write_model(const OrbifoldModel& model);

}  // namespace campana
