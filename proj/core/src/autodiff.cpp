#include "curvednet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvednet/oracles.hpp"
#include "curvednet/rng.hpp"

namespace curvednet {

std::size_t ParamSet::add(std::string name, std::vector<std::size_t> shape,
                          std::vector<double> value, Constraint constraint, double curvature,
                          double xi) {
  std::size_t expected = 1;
  for (std::size_t d : shape) expected *= d;
  if (shape.empty() || shape.size() > 2 || expected != value.size()) {
    throw Error(ErrorCode::DimMismatch, "parameter '" + name + "' shape does not match its data");
  }
  if (contains(name)) throw Error(ErrorCode::ConfigError, "duplicate parameter '" + name + "'");
  Parameter p;
  p.name = std::move(name);
  p.shape = std::move(shape);
  p.grad.assign(value.size(), 0.0);
  p.value = std::move(value);
  p.constraint = constraint;
  p.curvature = curvature;
  p.xi = xi;
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

std::size_t ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw Error(ErrorCode::ConfigError, "no parameter named '" + name + "'");
}

bool ParamSet::contains(const std::string& name) const {
  return std::any_of(params_.begin(), params_.end(),
                     [&](const Parameter& p) { return p.name == name; });
}

std::size_t ParamSet::total_coordinates() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamSet::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

void ParamSet::project() {
  for (auto& p : params_) {
    if (p.constraint == Constraint::none) continue;
    const std::size_t cols = p.cols();
    for (std::size_t r = 0; r < p.rows(); ++r) {
      std::span<double> row(p.value.data() + r * cols, cols);
      const auto fixed = p.constraint == Constraint::sphere_rows
                             ? kernels::sphere_project<double>(row, p.curvature)
                             : kernels::ball_clip<double>(row, p.curvature, p.xi);
      std::copy(fixed.begin(), fixed.end(), row.begin());
    }
  }
}

Bindings::Bindings(ad::Tape& tape, const ParamSet& params) {
  leaves_.reserve(params.size());
  for (const auto& p : params) {
    std::vector<ad::Var> leaves;
    leaves.reserve(p.value.size());
    for (double v : p.value) leaves.push_back(tape.leaf(v));
    leaves_.push_back(std::move(leaves));
    shapes_.push_back(p.shape);
  }
}

MatView<ad::Var> Bindings::matrix(std::size_t i) const {
  const auto& shape = shapes_[i];
  const std::size_t rows = shape.size() == 2 ? shape[0] : 1;
  return {leaves_[i], rows, shape.back()};
}

void Bindings::accumulate(std::span<const double> adjoints, ParamSet& params) const {
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    auto& grad = params[i].grad;
    for (std::size_t j = 0; j < leaves_[i].size(); ++j) grad[j] += adjoints[leaves_[i][j].index()];
  }
}

void sgd_step(ParamSet& params, double lr) {
  for (const auto& p : params) {
    for (double g : p.grad) {
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient in '" + p.name + "'");
      }
    }
  }
  for (auto& p : params) {
    const std::size_t cols = p.cols();
    for (std::size_t r = 0; r < p.rows(); ++r) {
      bool moved = false;
      for (std::size_t j = r * cols; j < (r + 1) * cols; ++j) {
        const double next = p.value[j] - lr * p.grad[j];
        moved = moved || next != p.value[j];
        p.value[j] = next;
      }
      // Rows the step left alone are already on their manifold; re-projecting
      // them would only add rounding drift.
      if (moved && p.constraint != Constraint::none) {
        std::span<double> row(p.value.data() + r * cols, cols);
        const auto fixed = p.constraint == Constraint::sphere_rows
                               ? kernels::sphere_project<double>(row, p.curvature)
                               : kernels::ball_clip<double>(row, p.curvature, p.xi);
        std::copy(fixed.begin(), fixed.end(), row.begin());
      }
    }
  }
  params.zero_grad();
}

GradCheckResult grad_check(const LossFn& loss_fn, const ParamSet& params, std::uint64_t seed,
                           double eps, std::size_t min_coordinates) {
  GradCheckResult result;
  ParamSet work = params;
  work.zero_grad();
  {
    ad::Tape tape;
    const Bindings bindings(tape, work);
    const ad::Var loss = loss_fn(tape, bindings);
    bindings.accumulate(tape.backward(loss), work);
    result.min_boundary_distance = tape.min_boundary_distance();
  }

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (std::size_t j = 0; j < work[i].value.size(); ++j) coords.emplace_back(i, j);
  }
  if (coords.size() > min_coordinates) {
    Rng rng(seed);
    rng.shuffle(std::span(coords));
    coords.resize(min_coordinates);
  }

  for (const auto& [i, j] : coords) {
    const double original = work[i].value[j];
    const auto f = [&](double v) {
      work[i].value[j] = v;
      ad::Tape tape;
      const Bindings bindings(tape, work);
      return loss_fn(tape, bindings).value();
    };
    const double numeric = oracles::central_difference(f, original, eps);
    work[i].value[j] = original;
    const double analytic = work[i].grad[j];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    if (rel > result.max_rel_error || result.coordinates_checked == 0) {
      result.max_rel_error = std::max(rel, result.max_rel_error);
      result.worst_parameter = work[i].name;
      result.worst_index = j;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
    ++result.coordinates_checked;
  }
  return result;
}

}  // namespace curvednet
