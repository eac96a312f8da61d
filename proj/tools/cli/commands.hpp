#pragma once

#include <iosfwd>
#include <string>

#include "campana/points.hpp"

namespace campana::cli {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

/// Entry point of the `campana` executable; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Reads a series written by `campana count` (CSV or JSON).
CountSeries read_series(const std::string& text);

}  // namespace campana::cli
