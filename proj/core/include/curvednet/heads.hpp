#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curvednet/manifold.hpp"
#include "curvednet/matrix.hpp"
#include "curvednet/rng.hpp"

namespace curvednet {

/// Probability vector: entries in [0, 1] summing to one.
class ConfidenceVec {
 public:
  /// Validates the simplex invariant to 1e-9.
  explicit ConfidenceVec(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double max() const;
  std::size_t argmax() const;

 private:
  std::vector<double> probs_;
};

/// Linear classifier W x + b with W of shape C x n.
struct EuclideanHead {
  Matrix weight;
  std::vector<double> bias;

  std::size_t classes() const noexcept { return weight.rows(); }
  std::size_t dim() const noexcept { return weight.cols(); }
};

/// C class prototypes on the sphere of curvature k, one per row.
class AngularHead {
 public:
  /// Throws InvariantViolation if a prototype is off the sphere.
  AngularHead(Matrix prototypes, Curvature k);

  const Matrix& prototypes() const noexcept { return prototypes_; }
  Curvature curvature() const noexcept { return curvature_; }
  std::size_t classes() const noexcept { return prototypes_.rows(); }
  std::size_t dim() const noexcept { return prototypes_.cols(); }

 private:
  Matrix prototypes_;
  Curvature curvature_;
};

/// Hyperbolic MLR: per class an offset p_j in the ball and a normal W_j.
class HyperbolicMLRHead {
 public:
  HyperbolicMLRHead(Matrix offsets, Matrix normals, Curvature k, double xi = kDefaultXi);

  const Matrix& offsets() const noexcept { return offsets_; }
  const Matrix& normals() const noexcept { return normals_; }
  Curvature curvature() const noexcept { return curvature_; }
  double xi() const noexcept { return xi_; }
  std::size_t classes() const noexcept { return offsets_.rows(); }
  std::size_t dim() const noexcept { return offsets_.cols(); }

 private:
  Matrix offsets_;
  Matrix normals_;
  Curvature curvature_;
  double xi_;
};

std::vector<double> angular_logits(const SpherePoint& x, const AngularHead& head);

/// Mean over the batch of -log softmax(logits_i)[label_i]; one row per sample.
double angular_loss(const Matrix& logits_batch, std::span<const std::size_t> labels);

std::vector<double> hyperbolic_mlr_logits(const BallPoint& x, const HyperbolicMLRHead& head);

std::vector<double> euclidean_logits(std::span<const double> x, const EuclideanHead& head);

ConfidenceVec softmax(std::span<const double> logits);

/// -log(conf[label]) with conf[label] floored at 1e-300.
double cross_entropy(const ConfidenceVec& conf, std::size_t label);
/// -log softmax(logits)[label] by log-sum-exp; exact where the softmax underflows.
double logits_cross_entropy(std::span<const double> logits, std::size_t label);

// Seeded initialisers.
EuclideanHead init_euclidean_head(std::size_t classes, std::size_t dim, Rng& rng);
AngularHead init_angular_head(std::size_t classes, std::size_t dim, Curvature k, Rng& rng);
HyperbolicMLRHead init_mlr_head(std::size_t classes, std::size_t dim, Curvature k, Rng& rng,
                                double xi = kDefaultXi);

}  // namespace curvednet
