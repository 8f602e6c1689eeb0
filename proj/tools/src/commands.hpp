#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvednet/error.hpp"
#include "curvednet/score_set.hpp"
#include "run_config.hpp"

namespace curvednet::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kDivergence = 3,
  kMetricPrecondition = 4,
  kGradcheckFail = 5,
};

/// Exit code for a library error.
int exit_code_for(ErrorCode code) noexcept;

/// One row of a scores file.
struct ScoreRow {
  std::string id;
  Split split = Split::test_id;
  double z = 0.0;
  double as = 0.0;
};

void write_scores(std::ostream& out, const std::vector<ScoreRow>& rows);
/// Throws ParseError with the offending line number.
std::vector<ScoreRow> read_scores(std::istream& in);
ScoreSet to_score_set(const std::vector<ScoreRow>& rows);

struct DensityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count_id = 0;
  std::size_t count_ood = 0;
};

/// Equal-width histogram of AS over the observed range; the last bin is
/// closed. A constant input gets the unit-width range [v, v + 1).
std::vector<DensityBin> density_report(const std::vector<ScoreRow>& rows, std::size_t bins = 50);

/// True when more than 99% of z values are exactly zero.
bool degenerate_scores(const std::vector<ScoreRow>& rows);

struct Paths {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-4;
};

// Each command returns an exit code; diagnostics go to `err`, results to
// `out` unless a file is requested.
int cmd_gen_data(const Paths& p, std::ostream& out, std::ostream& err);
int cmd_train(const Paths& p, std::ostream& out, std::ostream& err);
int cmd_score(const Paths& p, std::ostream& out, std::ostream& err);
int cmd_eval(const Paths& p, std::ostream& out, std::ostream& err);
int cmd_report(const Paths& p, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const Paths& p, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvednet::cli
