#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "campana/geometry.hpp"
#include "campana/points.hpp"

namespace campana {

enum class FitMode { free_a, fixed_ab, fixed_a_free_b };

std::string to_string(FitMode m);
FitMode parse_fit_mode(std::string_view s);

struct FitFixed {
  std::optional<double> a;
  std::optional<double> b;
};

struct FitResult {
  FitMode mode = FitMode::free_a;
  double a_hat = 0;
  double log_exponent_hat = 0;  // b - 1
  double c_hat = 0;
  double residual_rms = 0;
  double se_a = 0;  // 0 for fixed parameters
  double se_log_exponent = 0;
  double se_log_c = 0;
  std::size_t samples = 0;
  double b_hat() const { return log_exponent_hat + 1; }
};

/// Least squares on log N = a log T + (b-1) log log T + log c.
/// free_a fits (a, log c) with b fixed (fixed.b, default 1); fixed_ab fits log c;
/// fixed_a_free_b fits (b, log c). Samples with T < min_T, T < 3 or N < 1 are dropped.
FitResult fit_series(const CountSeries& series, FitMode mode, const FitFixed& fixed = {}, double min_T = 0);

/// OLS slope of the residuals of `fit` against log T.
double residual_trend(const CountSeries& series, const FitResult& fit, double min_T = 0);

struct Verdict {
  double a_predicted = 0;
  double b_predicted = 0;
  FitResult fit_a;  // free_a with b at its prediction
  FitResult fit_b;  // fixed_a_free_b with a at its prediction
  double a_deviation = 0;
  double b_deviation = 0;
  double tol_a = 0.05;
  std::optional<double> tol_b;  // b is only gated when set
  bool pass = false;
};

Verdict compare_with_prediction(const CountSeries& series, double a_predicted, double b_predicted,
                                double tol_a = 0.05, std::optional<double> tol_b = {}, double min_T = 0);
Verdict compare_with_prediction(const CountSeries& series, const InvariantReport& report, double tol_a = 0.05,
                                std::optional<double> tol_b = {}, double min_T = 0);

std::string fit_json(const FitResult& f);
std::string verdict_json(const Verdict& v);
/// Columns T,N,fitted_N.
std::string fit_csv(const CountSeries& series, const FitResult& f);

}  // namespace campana
