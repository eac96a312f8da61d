#include "campana/lp.hpp"

#include <optional>
#include <stdexcept>

namespace campana::lp {

namespace {

struct Tableau {
  std::vector<std::vector<Rational>> rows;  // each row: coefficients then rhs
  std::vector<int> basis;
  std::size_t ncols = 0;                    // number of variables

  void pivot(std::size_t r, std::size_t col) {
    const Rational piv = rows[r][col];
    for (auto& v : rows[r]) v /= piv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      const Rational f = rows[i][col];
      for (std::size_t j = 0; j <= ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    basis[r] = static_cast<int>(col);
  }

  // Returns false when unbounded. `allowed[j]` gates entering columns.
  bool optimize(const std::vector<Rational>& cost, const std::vector<char>& allowed) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < ncols && !enter; ++j) {
        if (!allowed[j]) continue;
        Rational red = cost[j];
        for (std::size_t i = 0; i < rows.size(); ++i) red -= cost[basis[i]] * rows[i][j];
        if (red < 0) enter = j;
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][*enter] <= 0) continue;
        const Rational ratio = rows[i][ncols] / rows[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }
};

}  // namespace

Result minimize(std::vector<std::vector<Rational>> A, std::vector<Rational> b, const std::vector<Rational>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("lp: row length mismatch");
  if (b.size() != m) throw std::invalid_argument("lp: rhs length mismatch");

  Tableau t;
  t.ncols = n + m;
  t.rows.assign(m, std::vector<Rational>(n + m + 1));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int sign = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = sign * A[i][j];
    t.rows[i][n + i] = 1;
    t.rows[i][n + m] = sign * b[i];
    t.basis[i] = static_cast<int>(n + i);
  }

  std::vector<Rational> phase1(n + m);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1;
  std::vector<char> all(n + m, 1);
  t.optimize(phase1, all);
  Rational infeas = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (static_cast<std::size_t>(t.basis[i]) >= n) infeas += t.rows[i][n + m];
  Result res;
  if (infeas > 0) return res;

  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < t.rows.size();) {
    if (static_cast<std::size_t>(t.basis[i]) < n) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n && !col; ++j)
      if (t.rows[i][j] != 0) col = j;
    if (col) {
      t.pivot(i, *col);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  std::vector<Rational> cost(n + m);
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
  std::vector<char> allowed(n + m, 0);
  for (std::size_t j = 0; j < n; ++j) allowed[j] = 1;
  if (!t.optimize(cost, allowed)) {
    res.status = Status::unbounded;
    return res;
  }
  res.status = Status::optimal;
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i) res.x[t.basis[i]] = t.rows[i][n + m];
  res.objective = 0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

namespace {
std::vector<std::vector<Rational>> columns_as_rows(const std::vector<std::vector<Rational>>& gens,
                                                   std::size_t dim) {
  std::vector<std::vector<Rational>> A(dim, std::vector<Rational>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    if (gens[j].size() != dim) throw std::invalid_argument("cone generator has wrong length");
    for (std::size_t i = 0; i < dim; ++i) A[i][j] = gens[j][i];
  }
  return A;
}
}  // namespace

bool in_cone(const std::vector<std::vector<Rational>>& generators, const std::vector<Rational>& target,
             std::vector<Rational>* coefficients) {
  const auto A = columns_as_rows(generators, target.size());
  const Result r = minimize(A, target, std::vector<Rational>(generators.size()));
  if (r.status != Status::optimal) return false;
  if (coefficients) *coefficients = r.x;
  return true;
}

std::vector<int> supporting_generators(const std::vector<std::vector<Rational>>& generators,
                                       const std::vector<Rational>& target) {
  std::vector<int> out;
  const auto A = columns_as_rows(generators, target.size());
  if (!in_cone(generators, target)) return out;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    std::vector<Rational> c(generators.size());
    c[k] = -1;  // maximize the k-th coefficient
    const Result r = minimize(A, target, c);
    if (r.status == Status::unbounded || (r.status == Status::optimal && r.objective < 0))
      out.push_back(static_cast<int>(k));
  }
  return out;
}

int rank(std::vector<std::vector<Rational>> rows) {
  int r = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < ncols && r < static_cast<int>(rows.size()); ++col) {
    std::size_t piv = static_cast<std::size_t>(r);
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == static_cast<std::size_t>(r) || rows[i][col] == 0) continue;
      const Rational f = rows[i][col] / rows[r][col];
      for (std::size_t j = col; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

}  // namespace campana::lp
