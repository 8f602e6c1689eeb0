#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvednet/data.hpp"
#include "curvednet/metrics.hpp"
#include "curvednet/models.hpp"

namespace curvednet::cli {

enum class DataSource { synthetic, embeddings };

/// Declarative run description. Every field maps to one `key = value` line.
struct RunConfig {
  std::string architecture = "baseline";
  double curvature_s = 1.0;
  double curvature_h = -1.0;
  /// Components of mio / mit, e.g. {"spherical", "hyperbolic"}.
  std::vector<std::string> mixed_components = {"spherical", "hyperbolic"};
  std::size_t embed_dim = 8;
  std::vector<std::size_t> extractor_hidden = {64, 64};
  std::size_t epochs = 30;
  double lr = 0.05;
  std::size_t batch_size = 32;
  double max_grad_norm = 1.0;
  std::uint64_t seed = 0;
  double xi = kDefaultXi;
  InitMode init = InitMode::random;
  bool standardize = false;
  DetectionErrorMode detection_error_mode = DetectionErrorMode::min_over_thresholds;
  PositiveClass aupr_positive = PositiveClass::ood;
  DataSource data_source = DataSource::synthetic;
  HierarchySpec synthetic;

  /// Throws ConfigError on architecture/geometry inconsistencies.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and malformed values are ConfigError with the line number.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form, one `key = value` per line in a fixed order.
std::string to_text(const RunConfig& cfg);

/// Model configuration for data of the given width and class count.
ModelConfig model_config(const RunConfig& cfg, std::size_t input_dim, std::size_t classes);

TrainConfig train_config(const RunConfig& cfg);
MetricsOptions metrics_options(const RunConfig& cfg);

}  // namespace curvednet::cli
