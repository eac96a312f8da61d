#include "campana/fit.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace campana {

std::string to_string(FitMode m) {
  switch (m) {
    case FitMode::free_a: return "free_a";
    case FitMode::fixed_ab: return "fixed_ab";
    case FitMode::fixed_a_free_b: return "fixed_a_free_b";
  }
  return "?";
}

FitMode parse_fit_mode(std::string_view s) {
  if (s == "free_a") return FitMode::free_a;
  if (s == "fixed_ab") return FitMode::fixed_ab;
  if (s == "fixed_a_free_b") return FitMode::fixed_a_free_b;
  throw std::invalid_argument("unknown fit mode '" + std::string(s) + "' (free_a, fixed_ab, fixed_a_free_b)");
}

namespace {

struct Sample {
  double T, logT, loglogT, logN;
};

std::vector<Sample> usable(const CountSeries& series, double min_T) {
  if (series.thresholds.size() != series.counts.size())
    throw std::invalid_argument("count series has mismatched thresholds and counts");
  std::vector<Sample> out;
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    const double T = series.thresholds[i];
    if (T < 3 || T < min_T || series.counts[i] < 1) continue;
    const double lt = std::log(T);
    out.push_back({T, lt, std::log(lt), std::log(static_cast<double>(series.counts[i]))});
  }
  if (out.size() < 3) throw std::invalid_argument("fit needs at least 3 samples with N >= 1 and T >= 3");
  return out;
}

/// Ordinary least squares y ~ x * beta (one or two regressors plus intercept).
/// Returns beta (last entry the intercept), standard errors and residuals.
struct Ols {
  std::vector<double> beta, se, residuals;
};

Ols ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  const std::size_t n = y.size(), k = X.empty() ? 0 : X[0].size();
  // normal equations, k <= 2
  std::array<std::array<double, 2>, 2> A{};
  std::array<double, 2> r{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < k; ++a) {
      r[a] += X[i][a] * y[i];
      for (std::size_t b = 0; b < k; ++b) A[a][b] += X[i][a] * X[i][b];
    }
  std::array<std::array<double, 2>, 2> inv{};
  if (k == 1) {
    if (!(A[0][0] > 0)) throw std::invalid_argument("degenerate design matrix");
    inv[0][0] = 1 / A[0][0];
  } else {
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    const double scale = std::abs(A[0][0] * A[1][1]);
    if (!(std::abs(det) > 1e-12 * scale)) throw std::invalid_argument("degenerate design matrix");
    inv = {{{A[1][1] / det, -A[0][1] / det}, {-A[1][0] / det, A[0][0] / det}}};
  }
  Ols out;
  out.beta.assign(k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out.beta[a] += inv[a][b] * r[b];
  double rss = 0;
  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0;
    for (std::size_t a = 0; a < k; ++a) fit += X[i][a] * out.beta[a];
    out.residuals[i] = y[i] - fit;
    rss += out.residuals[i] * out.residuals[i];
  }
  const double sigma2 = n > k ? rss / static_cast<double>(n - k) : 0;
  out.se.resize(k);
  for (std::size_t a = 0; a < k; ++a) out.se[a] = std::sqrt(std::max(0.0, sigma2 * inv[a][a]));
  return out;
}

double rms(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

FitResult fit_series(const CountSeries& series, FitMode mode, const FitFixed& fixed, double min_T) {
  const auto S = usable(series, min_T);
  FitResult out;
  out.mode = mode;
  out.samples = S.size();
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  switch (mode) {
    case FitMode::free_a: {
      const double b = fixed.b.value_or(1.0);
      for (const auto& s : S) {
        X.push_back({s.logT, 1.0});
        y.push_back(s.logN - (b - 1) * s.loglogT);
      }
      const auto r = ols(X, y);
      out.a_hat = r.beta[0];
      out.log_exponent_hat = b - 1;
      out.c_hat = std::exp(r.beta[1]);
      out.se_a = r.se[0];
      out.se_log_c = r.se[1];
      out.residual_rms = rms(r.residuals);
      break;
    }
    case FitMode::fixed_ab: {
      if (!fixed.a || !fixed.b) throw std::invalid_argument("fixed_ab needs both a and b");
      for (const auto& s : S) {
        X.push_back({1.0});
        y.push_back(s.logN - *fixed.a * s.logT - (*fixed.b - 1) * s.loglogT);
      }
      const auto r = ols(X, y);
      out.a_hat = *fixed.a;
      out.log_exponent_hat = *fixed.b - 1;
      out.c_hat = std::exp(r.beta[0]);
      out.se_log_c = r.se[0];
      out.residual_rms = rms(r.residuals);
      break;
    }
    case FitMode::fixed_a_free_b: {
      if (!fixed.a) throw std::invalid_argument("fixed_a_free_b needs a");
      for (const auto& s : S) {
        X.push_back({s.loglogT, 1.0});
        y.push_back(s.logN - *fixed.a * s.logT);
      }
      const auto r = ols(X, y);
      out.a_hat = *fixed.a;
      out.log_exponent_hat = r.beta[0];
      out.c_hat = std::exp(r.beta[1]);
      out.se_log_exponent = r.se[0];
      out.se_log_c = r.se[1];
      out.residual_rms = rms(r.residuals);
      break;
    }
  }
  return out;
}

double residual_trend(const CountSeries& series, const FitResult& fit, double min_T) {
  const auto S = usable(series, min_T);
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  const double logc = std::log(fit.c_hat);
  for (const auto& s : S) {
    X.push_back({s.logT, 1.0});
    y.push_back(s.logN - fit.a_hat * s.logT - fit.log_exponent_hat * s.loglogT - logc);
  }
  return ols(X, y).beta[0];
}

Verdict compare_with_prediction(const CountSeries& series, double a_predicted, double b_predicted, double tol_a,
                                std::optional<double> tol_b, double min_T) {
  Verdict v;
  v.a_predicted = a_predicted;
  v.b_predicted = b_predicted;
  v.tol_a = tol_a;
  v.tol_b = tol_b;
  v.fit_a = fit_series(series, FitMode::free_a, {std::nullopt, b_predicted}, min_T);
  v.fit_b = fit_series(series, FitMode::fixed_a_free_b, {a_predicted, std::nullopt}, min_T);
  v.a_deviation = v.fit_a.a_hat - a_predicted;
  v.b_deviation = v.fit_b.b_hat() - b_predicted;
  v.pass = std::abs(v.a_deviation) <= tol_a && (!tol_b || std::abs(v.b_deviation) <= *tol_b);
  return v;
}

Verdict compare_with_prediction(const CountSeries& series, const InvariantReport& report, double tol_a,
                                std::optional<double> tol_b, double min_T) {
  return compare_with_prediction(series, to_double(report.a), report.b_predicted, tol_a, tol_b, min_T);
}

namespace {

nlohmann::ordered_json fit_object(const FitResult& f) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(f.mode);
  j["a_hat"] = f.a_hat;
  j["log_exponent_hat"] = f.log_exponent_hat;
  j["b_hat"] = f.b_hat();
  j["c_hat"] = f.c_hat;
  j["residual_rms"] = f.residual_rms;
  j["se_a"] = f.se_a;
  j["se_log_exponent"] = f.se_log_exponent;
  j["se_log_c"] = f.se_log_c;
  j["samples"] = f.samples;
  return j;
}

}  // namespace

std::string fit_json(const FitResult& f) {
  nlohmann::ordered_json j;
  j["schema"] = "campana.fit/1";
  j.update(fit_object(f));
  return j.dump(2) + "\n";
}

std::string verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["schema"] = "campana.verdict/1";
  j["a_predicted"] = v.a_predicted;
  j["b_predicted"] = v.b_predicted;
  j["a_deviation"] = v.a_deviation;
  j["b_deviation"] = v.b_deviation;
  j["tol_a"] = v.tol_a;
  j["tol_b"] = v.tol_b ? nlohmann::ordered_json(*v.tol_b) : nlohmann::ordered_json(nullptr);
  j["fit_a"] = fit_object(v.fit_a);
  j["fit_b"] = fit_object(v.fit_b);
  j["pass"] = v.pass;
  return j.dump(2) + "\n";
}

std::string fit_csv(const CountSeries& series, const FitResult& f) {
  std::ostringstream os;
  os.precision(12);
  os << "T,N,fitted_N\n";
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    const double T = series.thresholds[i];
    double fitted = 0;
    if (T >= 3) fitted = f.c_hat * std::pow(T, f.a_hat) * std::pow(std::log(T), f.log_exponent_hat);
    os << T << ',' << series.counts[i] << ',' << fitted << '\n';
  }
  return os.str();
}

}  // namespace campana
