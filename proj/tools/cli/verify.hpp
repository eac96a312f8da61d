#pragma once

#include <map>
#include <string>
#include <vector>

namespace campana::cli {

enum class VerifyLevel { quick, full };

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  bool informational = false;  // reported, never gating
  std::string detail;
  std::map<std::string, double> metrics;
  double seconds = 0;
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::full;
  int threads = 1;
};

constexpr int kCriterionCount = 9;

/// Throws std::out_of_range for ids outside [1, kCriterionCount].
CriterionResult run_criterion(int id, const VerifyOptions& opt);
std::vector<CriterionResult> run_all(const VerifyOptions& opt);
/// One line: "criterion N [title]: PASS|FAIL|INFO detail".
std::string summary_line(const CriterionResult& r);
std::string report_json(const std::vector<CriterionResult>& results, const VerifyOptions& opt,
                        const std::string& cache_diagnostic);

}  // namespace campana::cli
