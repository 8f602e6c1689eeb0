#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "curvednet/heads.hpp"
#include "curvednet/manifold.hpp"
#include "curvednet/models.hpp"

namespace curvednet {

enum class ScoreKind { z_E, z_S, z_H, z_M, z_ES, z_EH, z_EM };

std::string_view to_string(ScoreKind kind) noexcept;

struct GeometricScore {
  ScoreKind kind = ScoreKind::z_E;
  double value = 0.0;
};

/// Higher means more anomalous.
struct AnomalyScore {
  double value = 0.0;
};

/// Largest angular logit.
GeometricScore score_spherical(const SpherePoint& e_s, const AngularHead& head);
/// Geodesic distance of e_h from the ball origin.
GeometricScore score_hyperbolic(const BallPoint& e_h);
/// Root-sum-square over the component scores.
GeometricScore score_product(std::span<const GeometricScore> components);
/// sum_i p_i log(p_i / q_i), q floored at 1e-300 and 0 log 0 = 0.
double kl_divergence(const ConfidenceVec& p, const ConfidenceVec& q);
/// KL(softmax(e_E) || softmax(e_G)) on raw embedding coordinates.
GeometricScore score_git(std::span<const double> e_e, const SpherePoint& e_g);
GeometricScore score_git(std::span<const double> e_e, const BallPoint& e_g);
GeometricScore score_git_mixed(std::span<const GeometricScore> components);
/// 1 - tanh(z), evaluated without cancellation for large z.
AnomalyScore anomaly_score(const GeometricScore& z);
/// 1 - max(c_E), summed from the remaining entries.
AnomalyScore msp_anomaly_score(const ConfidenceVec& c_e);

struct SampleScore {
  ScoreKind kind = ScoreKind::z_E;
  double z = 0.0;
  double as = 0.0;
};

/// Geometric and anomaly score of one input under the model's own rule:
/// MSP for the baseline, 1 - tanh(z) for GiO and GiT.
SampleScore score_sample(const Model& model, std::span<const double> input);
std::vector<SampleScore> score_dataset(const Model& model, const Dataset& ds);

}  // namespace curvednet
