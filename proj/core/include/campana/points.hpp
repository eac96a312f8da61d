#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "campana/geometry.hpp"
#include "campana/zoo.hpp"

namespace campana {

using PrimeSet = std::vector<std::uint64_t>;  // finite primes in S, sorted

/// Coprime integer coordinates with the first nonzero entry positive.
struct PrimitivePoint {
  std::vector<std::int64_t> coords;

  /// Throws std::invalid_argument for the zero tuple or a non-primitive tuple.
  explicit PrimitivePoint(std::vector<std::int64_t> c);
  /// Divide by the gcd and fix the sign.
  static PrimitivePoint normalize(std::vector<std::int64_t> c);
  bool operator==(const PrimitivePoint&) const = default;
};

/// (prime, component id) -> n_p > 0.
struct IntersectionProfile {
  std::map<std::pair<std::uint64_t, std::string>, int> entries;
  int at(std::uint64_t p, const std::string& id) const;
};

enum class Kind { campana, weak, thin_filtered };
enum class Height { naive, euclidean };

std::string to_string(Kind k);
std::string to_string(Height h);
Kind parse_kind(std::string_view s);
Height parse_height(std::string_view s);

struct CountSeries {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> counts;
  std::string model;
  std::string height;
  std::string kind;
};

/// |f_alpha(x)| for each component, so that n_p(D_alpha, x) = v_p of it.
/// Throws std::domain_error if the point lies on the boundary.
std::vector<std::uint64_t> boundary_values(const OrbifoldModel& model, const PrimitivePoint& x);
bool in_open_orbit(const OrbifoldModel& model, const PrimitivePoint& x);

IntersectionProfile intersection_profile(const OrbifoldModel& model, const PrimitivePoint& x);
bool is_campana(const OrbifoldModel& model, const PrimitivePoint& x, const PrimeSet& S = {});
bool is_weak_campana(const OrbifoldModel& model, const PrimitivePoint& x, const PrimeSet& S = {});
/// -x0 x1 x2 is a perfect square.
bool thin_filter_by(const PrimitivePoint& x);

/// Height of x as a real number.
double height_of(const PrimitivePoint& x, Height h);

/// Largest T a (model, kind) pair is certified for; count_points refuses beyond it.
double certified_range(const OrbifoldModel& model, Kind kind, Height height);

std::uint64_t count_points(const OrbifoldModel& model, double T, Kind kind, const PrimeSet& S = {},
                           Height height = Height::naive, int threads = 1);

/// Exhaustive loop over all primitive points of height <= T, testing membership
/// with the predicates above. Small T only.
std::uint64_t count_points_bruteforce(const OrbifoldModel& model, double T, Kind kind, const PrimeSet& S = {},
                                      Height height = Height::naive);

/// Oracle support: one exhaustive pass over primitive open-orbit points of
/// height <= T (integer). Key = per-component min exponent over primes outside S,
/// clipped to 4 (255 when no prime divides); value[h] = number of such points
/// whose height rounds up to h.
using Census = std::map<std::vector<std::uint8_t>, std::vector<std::uint64_t>>;
Census bruteforce_census(const OrbifoldModel& model, std::uint64_t T, const PrimeSet& S = {},
                         Height height = Height::naive);
/// Campana count for the census' model with the given weights (each m <= 3 or dlt).
std::uint64_t census_count(const Census& census, const std::vector<Weight>& weights, std::uint64_t T);

/// Calls `visit` for every by_four_lines Campana point of height <= T
/// (the optimized enumeration, before any thin filter).
void for_each_by_point(const OrbifoldModel& model, std::uint64_t T, const PrimeSet& S,
                       const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& visit);

/// #{coprime (x0, x1, x2) in [1, T]^3 : x0 square, x1 x2 square}.
std::uint64_t count_weak_subfamily_A(std::uint64_t T);

CountSeries count_series(const OrbifoldModel& model, const std::vector<double>& grid, Kind kind,
                         const PrimeSet& S = {}, Height height = Height::naive, int threads = 1);

/// Geometric grid lo, lo*r, ... <= hi with r = 10^(1/per_decade).
std::vector<double> geometric_grid(double lo, double hi, int per_decade = 4);

std::string series_csv(const CountSeries& s);
std::string series_json(const CountSeries& s);

}  // namespace campana

namespace campana {

/// Directory for the on-disk sieve cache used by the enumerators (empty = no cache).
void set_sieve_cache_directory(const std::filesystem::path& dir);
/// Message from the last rejected cache file, or empty.
std::string last_sieve_cache_diagnostic();

}  // namespace campana
