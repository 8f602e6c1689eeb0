#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curvednet {

struct GradCheckSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t points = 10;
  std::size_t min_coordinates = 50;
  double eps = 1e-5;
  /// Points whose tape came within this distance of a clamp, clip or kink
  /// are discarded and redrawn.
  double boundary_margin = 1e-3;
  std::size_t max_attempts_per_point = 50;
};

struct GradCheckCaseResult {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t points = 0;
  std::size_t resampled = 0;
  /// Smallest per-point coordinate count.
  std::size_t coordinates_per_point = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

std::vector<std::string> gradcheck_case_names();

/// Throws ConfigError for an unknown name, InvariantViolation if no point
/// clear of boundaries could be drawn.
GradCheckCaseResult run_gradcheck_case(std::string_view name, const GradCheckSuiteOptions& opts);

std::vector<GradCheckCaseResult> run_gradcheck_suite(const GradCheckSuiteOptions& opts);

}  // namespace curvednet
