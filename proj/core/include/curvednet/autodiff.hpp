#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curvednet/kernels.hpp"
#include "curvednet/tape.hpp"

namespace curvednet {

/// How a parameter tensor is re-projected after an update; rows are points.
enum class Constraint { none, sphere_rows, ball_rows };

struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;  // {n} or {rows, cols}
  std::vector<double> value;
  std::vector<double> grad;
  Constraint constraint = Constraint::none;
  double curvature = 0.0;
  double xi = kDefaultXi;

  std::size_t rows() const noexcept { return shape.size() == 2 ? shape[0] : 1; }
  std::size_t cols() const noexcept { return shape.empty() ? 0 : shape.back(); }
};

/// Named parameter tensors with gradient buffers of identical shape.
class ParamSet {
 public:
  /// Appends a tensor with a zeroed gradient; returns its index.
  std::size_t add(std::string name, std::vector<std::size_t> shape, std::vector<double> value,
                  Constraint constraint = Constraint::none, double curvature = 0.0,
                  double xi = kDefaultXi);

  std::size_t size() const noexcept { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  /// Throws ConfigError when absent.
  std::size_t index_of(const std::string& name) const;
  bool contains(const std::string& name) const;
  Parameter& at(const std::string& name) { return params_[index_of(name)]; }
  const Parameter& at(const std::string& name) const { return params_[index_of(name)]; }

  std::size_t total_coordinates() const;
  void zero_grad();
  /// Applies each tensor's constraint to its current value.
  void project();

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

/// Leaf variables on one tape, one VarVec per parameter tensor.
class Bindings {
 public:
  Bindings(ad::Tape& tape, const ParamSet& params);

  std::span<const ad::Var> operator[](std::size_t i) const { return leaves_[i]; }
  MatView<ad::Var> matrix(std::size_t i) const;

  /// Adds the adjoints of every leaf into the parameters' gradient buffers.
  void accumulate(std::span<const double> adjoints, ParamSet& params) const;

 private:
  std::vector<std::vector<ad::Var>> leaves_;
  std::vector<std::vector<std::size_t>> shapes_;
};

/// p <- p - lr * g, then re-project the constrained rows that moved and zero gradients.
/// Throws NonFiniteGradient before touching anything if a gradient is not finite.
void sgd_step(ParamSet& params, double lr);

using LossFn = std::function<ad::Var(ad::Tape&, const Bindings&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates_checked = 0;
  /// Closest approach of any clamp, clip or kink at the checked point.
  double min_boundary_distance = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares reverse-mode gradients with central differences on a seeded
/// subsample of at least `min_coordinates` coordinates (all of them if there
/// are fewer). Relative error uses max(|analytic|, |numeric|, 1e-8).
GradCheckResult grad_check(const LossFn& loss_fn, const ParamSet& params, std::uint64_t seed,
                           double eps = 1e-5, std::size_t min_coordinates = 50);

}  // namespace curvednet
