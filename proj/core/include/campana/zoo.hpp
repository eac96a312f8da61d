#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "campana/geometry.hpp"

namespace campana {

enum class Backend { p1, pn_hyperplane, p2_three_lines, by_four_lines, blowup_pn, dp_d5 };

struct ZooEntry {
  std::string name;
  Backend backend;
  std::string summary;
  std::string coordinates;  // how points are written and which ones count
  std::string default_weights;
  int default_dim;
};

const std::vector<ZooEntry>& zoo_catalogue();
std::string backend_name(Backend b);
std::optional<Backend> parse_backend(std::string_view name);

/// Build a zoo model. `weights` (one per component, in component order) and
/// `n` (dimension, for pn_hyperplane and blowup_pn) fall back to defaults when empty/0.
/// "blowup_p2" is accepted as blowup_pn with n = 2.
OrbifoldModel make_zoo_model(std::string_view name, const std::vector<Weight>& weights = {}, int n = 0);
OrbifoldModel with_weights(OrbifoldModel model, const std::vector<Weight>& weights);
std::vector<Weight> weights_of(const OrbifoldModel& model);
/// Throws std::invalid_argument for models without an enumeration backend.
Backend backend_of(const OrbifoldModel& model);

}  // namespace campana
