#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vvcm/engine.hpp"
#include "vvcm/oracle.hpp"

namespace vvcm {

/// "%.9g"; the decimal form used in every emitted file.
std::string format_number(double value);

/// `value` rounded to 9 significant digits.
double round9(double value);

struct ReportOptions {
  bool timing = false;  // wall time is left out by default so output is reproducible
  std::optional<std::vector<std::vector<std::size_t>>> clusters;
  std::optional<std::vector<Equilibrium>> oracle;
};

/// { "solutions": [ {taut_set, v_o_m, p_o_m, energy_J, k1, pivot, stability,
///   margins, tensions}, ... ], "stats": {counts, by_k, schur_singular},
///   optional "clusters" and "oracle" }. Taut sets and pivots are 1-based.
std::string results_json(const std::vector<Solution>& solutions, const StepStats& stats,
                         const ReportOptions& options = {});

/// One row per solution under a fixed header; list-valued cells are
/// space-separated.
std::string results_csv(const std::vector<Solution>& solutions, const ReportOptions& options = {});

extern const char* const kCsvHeader;

/// Human-readable per-step counts.
std::string stats_text(const StepStats& stats, bool timing = false);

}  // namespace vvcm
