#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace curvednet::ad {

enum class Op : std::uint8_t {
  leaf,
  constant,
  add,
  sub,
  mul,
  div,
  neg,
  tanh,
  atanh,
  asinh,
  exp,
  log,
  sqrt,
  dot,
  sum,
  affine,
  select_max,
  softmax,
  cross_entropy,
};

class Tape;

/// Handle to one scalar node on a Tape. Carries a copy of the forward value.
class Var {
 public:
  Var() = default;

  double value() const noexcept { return value_; }
  std::uint32_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

/// Append-only record of scalar operations.
///
/// Node i stores its value, an op tag and a compressed list of
/// (input index, local partial) pairs. Inputs always precede consumers, so a
/// single reverse sweep visits every reachable node once.
class Tape {
 public:
  Tape() { offsets_.push_back(0); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(double value) { return push(Op::leaf, value, {}, {}); }
  Var constant(double value) { return push(Op::constant, value, {}, {}); }

  Var push(Op op, double value, std::span<const std::uint32_t> inputs,
           std::span<const double> partials);
  Var unary(Op op, const Var& a, double value, double da);
  Var binary(Op op, const Var& a, const Var& b, double value, double da, double db);

  std::size_t size() const noexcept { return values_.size(); }
  double value(std::uint32_t node) const { return values_[node]; }
  Op op(std::uint32_t node) const { return ops_[node]; }
  std::span<const std::uint32_t> inputs(std::uint32_t node) const;
  std::span<const double> partials(std::uint32_t node) const;

  /// Adjoints of every node with respect to `output`.
  std::vector<double> backward(const Var& output) const;
  /// Throws NonScalarOutput unless exactly one output is given.
  std::vector<double> backward(std::span<const Var> outputs) const;

  void clear();

  /// Smallest distance to a clamp, clip or rectifier kink seen while
  /// recording. Finite differences are unreliable when this is small.
  void note_boundary_distance(double distance) noexcept {
    if (distance < min_boundary_distance_) min_boundary_distance_ = distance;
  }
  double min_boundary_distance() const noexcept { return min_boundary_distance_; }

 private:
  std::vector<double> values_;
  std::vector<Op> ops_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> inputs_;
  std::vector<double> partials_;
  double min_boundary_distance_ = std::numeric_limits<double>::infinity();
};

using VarVec = std::vector<Var>;

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(const Var& a, double b);
Var operator*(double a, const Var& b);
Var operator/(const Var& a, double b);
Var operator/(double a, const Var& b);

Var tanh(const Var& a);
Var atanh(const Var& a);
Var asinh(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);

Var dot(std::span<const Var> a, std::span<const Var> b);
Var dot(std::span<const Var> a, std::span<const double> b);
Var sum(std::span<const Var> a);
/// bias + <weights, x> as one node.
Var affine(std::span<const Var> weights, std::span<const Var> x, const Var& bias);
Var affine(std::span<const Var> weights, std::span<const double> x, const Var& bias);
/// Passes through the largest input; ties resolve to the lowest index.
Var select_max(std::span<const Var> a);
/// Shift-stabilised softmax; output j depends on every input.
VarVec softmax(std::span<const Var> logits);
/// -log softmax(logits)[label], fused and log-sum-exp stabilised.
Var softmax_cross_entropy(std::span<const Var> logits, std::size_t label);

}  // namespace curvednet::ad
