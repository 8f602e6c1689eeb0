#include "curvednet/heads.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvednet {

ConfidenceVec::ConfidenceVec(std::vector<double> probs) : probs_(std::move(probs)) {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvariantViolation, "probability outside [0,1]");
    total += p;
  }
  if (probs_.empty() || std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvariantViolation, "probabilities do not sum to one");
  }
}

double ConfidenceVec::max() const { return *std::max_element(probs_.begin(), probs_.end()); }

std::size_t ConfidenceVec::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

AngularHead::AngularHead(Matrix prototypes, Curvature k)
    : prototypes_(std::move(prototypes)), curvature_(k) {
  if (!k.is_spherical()) throw Error(ErrorCode::BadCurvature, "angular head needs k > 0");
  for (std::size_t j = 0; j < prototypes_.rows(); ++j) {
    if (!satisfies_sphere_invariant(prototypes_.row(j), k.value())) {
      throw Error(ErrorCode::InvariantViolation, "prototype " + std::to_string(j) + " is off the sphere");
    }
  }
}

HyperbolicMLRHead::HyperbolicMLRHead(Matrix offsets, Matrix normals, Curvature k, double xi)
    : offsets_(std::move(offsets)), normals_(std::move(normals)), curvature_(k), xi_(xi) {
  if (!k.is_hyperbolic()) throw Error(ErrorCode::BadCurvature, "MLR head needs k < 0");
  if (offsets_.rows() != normals_.rows() || offsets_.cols() != normals_.cols()) {
    throw Error(ErrorCode::DimMismatch, "MLR offsets and normals differ in shape");
  }
  for (std::size_t j = 0; j < offsets_.rows(); ++j) {
    if (!satisfies_ball_invariant(offsets_.row(j), k.value())) {
      throw Error(ErrorCode::OutsideBall, "MLR offset " + std::to_string(j) + " outside the ball");
    }
    if (std::sqrt(dot(normals_.row(j), normals_.row(j))) < 1e-12) {
      throw Error(ErrorCode::InvariantViolation, "MLR normal " + std::to_string(j) + " is zero");
    }
  }
}

std::vector<double> angular_logits(const SpherePoint& x, const AngularHead& head) {
  if (x.curvature() != head.curvature()) {
    throw Error(ErrorCode::CurvatureMismatch, "point and prototypes differ in curvature");
  }
  return kernels::angular_logits<double>(x.coords(), head.prototypes().view());
}

double angular_loss(const Matrix& logits_batch, std::span<const std::size_t> labels) {
  if (logits_batch.rows() != labels.size()) {
    throw Error(ErrorCode::DimMismatch, "one label per logits row required");
  }
  if (labels.empty()) throw Error(ErrorCode::EmptyDataset, "empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += logits_cross_entropy(logits_batch.row(i), labels[i]);
  }
  return total / static_cast<double>(labels.size());
}

std::vector<double> hyperbolic_mlr_logits(const BallPoint& x, const HyperbolicMLRHead& head) {
  if (x.curvature() != head.curvature()) {
    throw Error(ErrorCode::CurvatureMismatch, "point and MLR head differ in curvature");
  }
  return kernels::hyperbolic_mlr_logits<double>(x.coords(), head.offsets().view(),
                                                head.normals().view(), head.curvature().value());
}

std::vector<double> euclidean_logits(std::span<const double> x, const EuclideanHead& head) {
  return kernels::euclidean_logits<double, double>(x, head.weight.view(), head.bias);
}

ConfidenceVec softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorCode::DimMismatch, "softmax of an empty vector");
  const double shift = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - shift);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return ConfidenceVec(std::move(p));
}

double cross_entropy(const ConfidenceVec& conf, std::size_t label) {
  if (label >= conf.size()) {
    throw Error(ErrorCode::BadLabel, "label " + std::to_string(label) + " outside [0, " +
                                         std::to_string(conf.size()) + ")");
  }
  return -std::log(std::max(conf[label], 1e-300));
}

double logits_cross_entropy(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw Error(ErrorCode::BadLabel, "label " + std::to_string(label) + " outside [0, " +
                                         std::to_string(logits.size()) + ")");
  }
  const double shift = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - shift);
  return shift + std::log(sum) - logits[label];
}

EuclideanHead init_euclidean_head(std::size_t classes, std::size_t dim, Rng& rng) {
  const double half = 1.0 / std::sqrt(static_cast<double>(dim));
  EuclideanHead head{Matrix(classes, dim), std::vector<double>(classes, 0.0)};
  for (double& w : head.weight.data()) w = rng.uniform(-half, half);
  return head;
}

AngularHead init_angular_head(std::size_t classes, std::size_t dim, Curvature k, Rng& rng) {
  Matrix protos(classes, dim);
  for (std::size_t j = 0; j < classes; ++j) {
    auto row = protos.row(j);
    for (double& v : row) v = rng.normal();
    const auto projected = kernels::sphere_project<double>(row, k.value());
    std::copy(projected.begin(), projected.end(), row.begin());
  }
  return AngularHead(std::move(protos), k);
}

HyperbolicMLRHead init_mlr_head(std::size_t classes, std::size_t dim, Curvature k, Rng& rng,
                                double xi) {
  const double half = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix normals(classes, dim);
  for (double& w : normals.data()) w = rng.uniform(-half, half);
  return HyperbolicMLRHead(Matrix(classes, dim), std::move(normals), k, xi);
}

}  // namespace curvednet
