#include "curvednet/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvednet/error.hpp"

namespace curvednet::oracles {

namespace {

void require_both_classes(const ScoreSet& s) {
  bool any_pos = false;
  bool any_neg = false;
  for (const auto& e : s.entries) (e.is_anomalous ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg) {
    throw Error(ErrorCode::OneClassOnly, "score set needs both ID and OOD entries");
  }
}

}  // namespace

double auroc_bruteforce(const ScoreSet& s) {
  require_both_classes(s);
  std::uint64_t twice_wins = 0;
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (const auto& a : s.entries) {
    if (a.is_anomalous) ++pos; else ++neg;
  }
  for (const auto& a : s.entries) {
    if (!a.is_anomalous) continue;
    for (const auto& b : s.entries) {
      if (b.is_anomalous) continue;
      if (a.score > b.score) twice_wins += 2;
      else if (a.score == b.score) twice_wins += 1;
    }
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<ThresholdRow> threshold_scan(const ScoreSet& s) {
  require_both_classes(s);
  std::vector<double> taus;
  for (const auto& e : s.entries) taus.push_back(e.score);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  taus.push_back(std::numeric_limits<double>::infinity());

  const std::size_t pos = s.anomalous_count();
  const std::size_t neg = s.normal_count();
  std::vector<ThresholdRow> rows;
  for (double tau : taus) {
    ThresholdRow row;
    row.tau = tau;
    for (const auto& e : s.entries) {
      if (e.score >= tau) (e.is_anomalous ? row.true_positives : row.false_positives) += 1;
    }
    row.tpr = static_cast<double>(row.true_positives) / static_cast<double>(pos);
    row.fpr = static_cast<double>(row.false_positives) / static_cast<double>(neg);
    rows.push_back(row);
  }
  return rows;
}

double fpr_at_tpr_scan(const ScoreSet& s, double target_tpr) {
  double best = 1.0;
  for (const auto& row : threshold_scan(s)) {
    if (row.tpr >= target_tpr) best = std::min(best, row.fpr);
  }
  return best;
}

double detection_error_scan(const ScoreSet& s) {
  double best = 1.0;
  for (const auto& row : threshold_scan(s)) {
    best = std::min(best, 0.5 * (1.0 - row.tpr) + 0.5 * row.fpr);
  }
  return best;
}

double aupr_sweep(const ScoreSet& s) {
  const auto rows = threshold_scan(s);
  const std::size_t pos = s.anomalous_count();
  double area = 0.0;
  std::size_t prev_tp = 0;
  // Walk from the strictest threshold (+inf) down to the loosest.
  for (std::size_t k = rows.size(); k-- > 0;) {
    const std::size_t tp = rows[k].true_positives;
    const std::size_t fp = rows[k].false_positives;
    if (tp > prev_tp) {
      area += (static_cast<double>(tp - prev_tp) / static_cast<double>(pos)) *
              (static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    prev_tp = tp;
  }
  return area;
}

double mobius_1d_reference(double a, double b, double k) {
  return (a + b) / (1.0 + std::abs(k) * a * b);
}

double central_difference(const std::function<double(double)>& f, double x, double eps) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

}  // namespace curvednet::oracles
