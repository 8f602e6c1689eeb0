#include "curvednet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "curvednet/error.hpp"

namespace curvednet {

std::string_view to_string(PositiveClass p) noexcept { return p == PositiveClass::id ? "id" : "ood"; }

std::string_view to_string(DetectionErrorMode m) noexcept {
  return m == DetectionErrorMode::at_95_tpr ? "tpr95" : "min";
}

namespace {

/// Tied scores collapsed into one group each, in descending score order.
struct Group {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct Sweep {
  std::vector<Group> groups;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Sweep descending_groups(const ScoreSet& s) {
  Sweep sweep;
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  for (const auto& e : s.entries) {
    if (!std::isfinite(e.score)) throw Error(ErrorCode::InvariantViolation, "non-finite score");
    (e.is_anomalous ? sweep.positives : sweep.negatives) += 1;
  }
  if (sweep.positives == 0 || sweep.negatives == 0) {
    throw Error(ErrorCode::OneClassOnly, "metrics need both ID and OOD entries");
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.entries[a].score > s.entries[b].score; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& e = s.entries[order[i]];
    if (i == 0 || e.score != s.entries[order[i - 1]].score) sweep.groups.emplace_back();
    (e.is_anomalous ? sweep.groups.back().positives : sweep.groups.back().negatives) += 1;
  }
  return sweep;
}

}  // namespace

double auroc(const ScoreSet& s) {
  const Sweep sweep = descending_groups(s);
  // Twice the Mann-Whitney U: 2 per ordered pair, 1 per tie.
  std::uint64_t twice_wins = 0;
  std::uint64_t negatives_below = sweep.negatives;
  for (const Group& g : sweep.groups) {
    negatives_below -= g.negatives;
    twice_wins += 2 * g.positives * negatives_below + g.positives * g.negatives;
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(sweep.positives) * static_cast<double>(sweep.negatives));
}

double fpr_at_tpr(const ScoreSet& s, double target_tpr) {
  const Sweep sweep = descending_groups(s);
  const auto pos = static_cast<double>(sweep.positives);
  const auto neg = static_cast<double>(sweep.negatives);
  double best = 1.0;
  if (0.0 >= target_tpr) best = 0.0;  // the +inf threshold
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const Group& g : sweep.groups) {
    tp += g.positives;
    fp += g.negatives;
    if (static_cast<double>(tp) / pos >= target_tpr) best = std::min(best, static_cast<double>(fp) / neg);
  }
  return best;
}

double detection_error(const ScoreSet& s, DetectionErrorMode mode) {
  if (mode == DetectionErrorMode::at_95_tpr) return 0.5 * (1.0 - 0.95) + 0.5 * fpr_at_tpr(s, 0.95);
  const Sweep sweep = descending_groups(s);
  const auto pos = static_cast<double>(sweep.positives);
  const auto neg = static_cast<double>(sweep.negatives);
  double best = std::min(1.0, 0.5 * (1.0 - 0.0) + 0.5 * 0.0);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const Group& g : sweep.groups) {
    tp += g.positives;
    fp += g.negatives;
    const double tpr = static_cast<double>(tp) / pos;
    const double fpr = static_cast<double>(fp) / neg;
    best = std::min(best, 0.5 * (1.0 - tpr) + 0.5 * fpr);
  }
  return best;
}

double aupr(const ScoreSet& s, PositiveClass positive) {
  if (positive == PositiveClass::id) return aupr(flipped(s), PositiveClass::ood);
  const Sweep sweep = descending_groups(s);
  const auto pos = static_cast<double>(sweep.positives);
  double area = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const Group& g : sweep.groups) {
    const std::size_t prev_tp = tp;
    tp += g.positives;
    fp += g.negatives;
    if (tp > prev_tp) {
      area += (static_cast<double>(tp - prev_tp) / pos) *
              (static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
  }
  return area;
}

ScoreSet flipped(const ScoreSet& s) {
  ScoreSet out;
  out.entries.reserve(s.size());
  for (const auto& e : s.entries) out.add(e.id, !e.is_anomalous, -e.score);
  return out;
}

MetricsReport evaluate(const ScoreSet& s, const MetricsOptions& options) {
  MetricsReport r;
  r.auroc = auroc(s);
  r.fpr_at_95_tpr = fpr_at_tpr(s, 0.95);
  r.detection_error = detection_error(s, options.detection_error_mode);
  r.aupr = aupr(s, options.aupr_positive);
  r.positive_class = options.aupr_positive;
  r.detection_error_mode = options.detection_error_mode;
  r.n_ood = s.anomalous_count();
  r.n_id = s.normal_count();
  return r;
}

}  // namespace curvednet
