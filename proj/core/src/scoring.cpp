#include "curvednet/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace curvednet {

std::string_view to_string(ScoreKind kind) noexcept {
  switch (kind) {
    case ScoreKind::z_E: return "z_E";
    case ScoreKind::z_S: return "z_S";
    case ScoreKind::z_H: return "z_H";
    case ScoreKind::z_M: return "z_M";
    case ScoreKind::z_ES: return "z_ES";
    case ScoreKind::z_EH: return "z_EH";
    case ScoreKind::z_EM: return "z_EM";
  }
  return "z_E";
}

namespace {

double root_sum_square(std::span<const GeometricScore> components) {
  if (components.empty()) throw Error(ErrorCode::EmptyComponents, "no component scores");
  double s = 0.0;
  for (const auto& c : components) s += c.value * c.value;
  return std::sqrt(s);
}

double kl_of_embeddings(std::span<const double> e_e, std::span<const double> e_g) {
  if (e_e.size() != e_g.size()) {
    throw Error(ErrorCode::DimMismatch, "euclidean and geometric embeddings differ in dim");
  }
  return kl_divergence(softmax(e_e), softmax(e_g));
}

}  // namespace

GeometricScore score_spherical(const SpherePoint& e_s, const AngularHead& head) {
  if (e_s.dim() != head.dim()) throw Error(ErrorCode::DimMismatch, "embedding and head dims differ");
  const auto logits = angular_logits(e_s, head);
  double best = logits.front();
  for (double l : logits) best = std::max(best, l);
  return {ScoreKind::z_S, best};
}

GeometricScore score_hyperbolic(const BallPoint& e_h) {
  return {ScoreKind::z_H, kernels::distance_to_origin<double>(e_h.coords(), e_h.curvature().value())};
}

GeometricScore score_product(std::span<const GeometricScore> components) {
  return {ScoreKind::z_M, root_sum_square(components)};
}

double kl_divergence(const ConfidenceVec& p, const ConfidenceVec& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "distributions differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    total += p[i] * std::log(p[i] / std::max(q[i], 1e-300));
  }
  // Gibbs: the true value is >= 0; only rounding can push the sum below.
  return std::max(total, 0.0);
}

GeometricScore score_git(std::span<const double> e_e, const SpherePoint& e_g) {
  return {ScoreKind::z_ES, kl_of_embeddings(e_e, e_g.coords())};
}

GeometricScore score_git(std::span<const double> e_e, const BallPoint& e_g) {
  return {ScoreKind::z_EH, kl_of_embeddings(e_e, e_g.coords())};
}

GeometricScore score_git_mixed(std::span<const GeometricScore> components) {
  return {ScoreKind::z_EM, root_sum_square(components)};
}

// 1 - tanh(z) = 2 e^{-2z} / (1 + e^{-2z}); the right-hand side keeps full
// relative precision where the subtraction would round to zero (z > ~19).
AnomalyScore anomaly_score(const GeometricScore& z) {
  if (z.value <= 0.0) return {1.0 - std::tanh(z.value)};
  const double e = std::exp(-2.0 * z.value);
  return {2.0 * e / (1.0 + e)};
}

// 1 - max(c) summed from the other entries, so confident samples do not
// collapse onto an exact zero.
AnomalyScore msp_anomaly_score(const ConfidenceVec& c_e) {
  const std::size_t top = c_e.argmax();
  double rest = 0.0;
  for (std::size_t j = 0; j < c_e.size(); ++j) {
    if (j != top) rest += c_e[j];
  }
  return {rest};
}

SampleScore score_sample(const Model& model, std::span<const double> input) {
  const ForwardResult out = forward(model, input);
  const ModelConfig& cfg = model.config();

  if (cfg.architecture == Architecture::baseline) {
    const auto& conf = out.branches.front().confidence;
    return {ScoreKind::z_E, conf.max(), msp_anomaly_score(conf).value};
  }

  std::vector<GeometricScore> parts;
  for (const auto& b : out.branches) {
    if (cfg.architecture == Architecture::gio) {
      switch (b.geometry) {
        case Geometry::euclidean:
          parts.push_back({ScoreKind::z_E, b.confidence.max()});
          break;
        case Geometry::spherical: {
          const double best = *std::max_element(b.logits.begin(), b.logits.end());
          parts.push_back({ScoreKind::z_S, best});
          break;
        }
        case Geometry::hyperbolic:
          parts.push_back({ScoreKind::z_H, kernels::distance_to_origin<double>(b.embedding, b.curvature)});
          break;
      }
    } else if (b.geometry != Geometry::euclidean) {
      const double z = kl_of_embeddings(out.embedding, b.embedding);
      parts.push_back({b.geometry == Geometry::spherical ? ScoreKind::z_ES : ScoreKind::z_EH, z});
    }
  }

  GeometricScore z = parts.front();
  if (parts.size() > 1) {
    z = cfg.architecture == Architecture::gio ? score_product(parts) : score_git_mixed(parts);
  }
  return {z.kind, z.value, anomaly_score(z).value};
}

std::vector<SampleScore> score_dataset(const Model& model, const Dataset& ds) {
  if (ds.dim != model.config().input_dim) {
    throw Error(ErrorCode::ModelDataDimMismatch,
                "data dim " + std::to_string(ds.dim) + " does not match model input dim " +
                    std::to_string(model.config().input_dim));
  }
  std::vector<SampleScore> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(score_sample(model, ds.row(i)));
  return out;
}

}  // namespace curvednet
