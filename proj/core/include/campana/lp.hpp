#pragma once

#include <vector>

#include "campana/rational.hpp"

namespace campana::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Rational objective;
  std::vector<Rational> x;
};

/// Exact two-phase simplex (Bland's rule): minimize c.x subject to A x = b, x >= 0.
Result minimize(std::vector<std::vector<Rational>> A, std::vector<Rational> b, const std::vector<Rational>& c);

/// Is `target` in the cone spanned by `generators`? Optionally returns a witness.
bool in_cone(const std::vector<std::vector<Rational>>& generators, const std::vector<Rational>& target,
             std::vector<Rational>* coefficients = nullptr);

/// Indices of generators that carry a positive coefficient in some
/// nonnegative representation of `target`. Empty if target is not in the cone.
std::vector<int> supporting_generators(const std::vector<std::vector<Rational>>& generators,
                                       const std::vector<Rational>& target);

/// Rank of a rational matrix (rows as vectors).
int rank(std::vector<std::vector<Rational>> rows);

}  // namespace campana::lp
