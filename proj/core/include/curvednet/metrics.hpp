#pragma once

#include <string_view>

#include "curvednet/score_set.hpp"

namespace curvednet {

// Threshold-free OOD metrics. Anomalous entries are positives and a higher
// score means more anomalous; "score >= tau" is flagged at threshold tau, and
// thresholds range over every distinct score plus +inf. Geometric anomaly
// scores 1 - tanh(z) can exceed 1 when z < 0 (spherical models); nothing
// here depends on the score range, only on its order.

enum class PositiveClass { ood, id };
enum class DetectionErrorMode {
  min_over_thresholds,  // min_tau 0.5 (1 - TPR) + 0.5 FPR
  at_95_tpr,            // 0.5 (1 - 0.95) + 0.5 FPR@95
};

std::string_view to_string(PositiveClass p) noexcept;
std::string_view to_string(DetectionErrorMode m) noexcept;

double auroc(const ScoreSet& s);
double fpr_at_tpr(const ScoreSet& s, double target_tpr = 0.95);
double detection_error(const ScoreSet& s,
                       DetectionErrorMode mode = DetectionErrorMode::min_over_thresholds);
double aupr(const ScoreSet& s, PositiveClass positive = PositiveClass::ood);

struct MetricsOptions {
  DetectionErrorMode detection_error_mode = DetectionErrorMode::min_over_thresholds;
  PositiveClass aupr_positive = PositiveClass::ood;
};

struct MetricsReport {
  double auroc = 0.0;
  double fpr_at_95_tpr = 0.0;
  double detection_error = 0.0;
  double aupr = 0.0;
  PositiveClass positive_class = PositiveClass::ood;
  DetectionErrorMode detection_error_mode = DetectionErrorMode::min_over_thresholds;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
};

/// Throws OneClassOnly unless both ID and OOD entries are present.
MetricsReport evaluate(const ScoreSet& s, const MetricsOptions& options = {});

/// Same entries with labels flipped and scores negated.
ScoreSet flipped(const ScoreSet& s);

}  // namespace curvednet
