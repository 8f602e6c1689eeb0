#pragma once

// Brute-force references, written from the definitions and sharing no code
// with the modules they check. Used by the tests and by the gradcheck command.

#include <functional>
#include <vector>

#include "curvednet/score_set.hpp"

namespace curvednet::oracles {

/// Literal pair counting: P(score_ood > score_id) + 0.5 P(tie).
double auroc_bruteforce(const ScoreSet& s);

struct ThresholdRow {
  double tau = 0.0;  // score >= tau is flagged; the last row is +inf
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// One row per distinct score in increasing order, then +inf.
std::vector<ThresholdRow> threshold_scan(const ScoreSet& s);

double fpr_at_tpr_scan(const ScoreSet& s, double target_tpr = 0.95);
double detection_error_scan(const ScoreSet& s);
/// Step-wise area under precision-recall with anomalous samples positive.
double aupr_sweep(const ScoreSet& s);

/// (a + b) / (1 + |k| a b), the one-dimensional Moebius sum.
double mobius_1d_reference(double a, double b, double k);

/// (f(x + eps) - f(x - eps)) / (2 eps).
double central_difference(const std::function<double(double)>& f, double x, double eps);

}  // namespace curvednet::oracles
