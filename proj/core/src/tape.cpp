#include "curvednet/tape.hpp"

#include <algorithm>
#include <cmath>

#include "curvednet/error.hpp"

namespace curvednet::ad {

Var Tape::push(Op op, double value, std::span<const std::uint32_t> inputs,
               std::span<const double> partials) {
  const auto index = static_cast<std::uint32_t>(values_.size());
  values_.push_back(value);
  ops_.push_back(op);
  inputs_.insert(inputs_.end(), inputs.begin(), inputs.end());
  partials_.insert(partials_.end(), partials.begin(), partials.end());
  offsets_.push_back(inputs_.size());
  return Var(this, index, value);
}

Var Tape::unary(Op op, const Var& a, double value, double da) {
  const std::uint32_t in[1] = {a.index()};
  const double d[1] = {da};
  return push(op, value, in, d);
}

Var Tape::binary(Op op, const Var& a, const Var& b, double value, double da, double db) {
  const std::uint32_t in[2] = {a.index(), b.index()};
  const double d[2] = {da, db};
  return push(op, value, in, d);
}

std::span<const std::uint32_t> Tape::inputs(std::uint32_t node) const {
  return {inputs_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
}

std::span<const double> Tape::partials(std::uint32_t node) const {
  return {partials_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
}

std::vector<double> Tape::backward(const Var& output) const {
  std::vector<double> adjoint(values_.size(), 0.0);
  if (output.tape() != this || output.index() >= values_.size()) {
    throw Error(ErrorCode::NonScalarOutput, "output node does not belong to this tape");
  }
  adjoint[output.index()] = 1.0;
  for (std::size_t node = output.index() + 1; node-- > 0;) {
    const double a = adjoint[node];
    if (a == 0.0) continue;
    const std::size_t begin = offsets_[node];
    const std::size_t end = offsets_[node + 1];
    for (std::size_t k = begin; k < end; ++k) adjoint[inputs_[k]] += a * partials_[k];
  }
  return adjoint;
}

std::vector<double> Tape::backward(std::span<const Var> outputs) const {
  if (outputs.size() != 1) {
    throw Error(ErrorCode::NonScalarOutput,
                "backward needs one scalar output, got " + std::to_string(outputs.size()));
  }
  return backward(outputs.front());
}

void Tape::clear() {
  values_.clear();
  ops_.clear();
  offsets_.assign(1, 0);
  inputs_.clear();
  partials_.clear();
  min_boundary_distance_ = std::numeric_limits<double>::infinity();
}

Var operator+(const Var& a, const Var& b) {
  return a.tape()->binary(Op::add, a, b, a.value() + b.value(), 1.0, 1.0);
}
Var operator-(const Var& a, const Var& b) {
  return a.tape()->binary(Op::sub, a, b, a.value() - b.value(), 1.0, -1.0);
}
Var operator*(const Var& a, const Var& b) {
  return a.tape()->binary(Op::mul, a, b, a.value() * b.value(), b.value(), a.value());
}
Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  return a.tape()->binary(Op::div, a, b, q, 1.0 / b.value(), -q / b.value());
}
Var operator-(const Var& a) { return a.tape()->unary(Op::neg, a, -a.value(), -1.0); }

Var operator+(const Var& a, double b) { return a.tape()->unary(Op::add, a, a.value() + b, 1.0); }
Var operator+(double a, const Var& b) { return b + a; }
Var operator-(const Var& a, double b) { return a.tape()->unary(Op::sub, a, a.value() - b, 1.0); }
Var operator-(double a, const Var& b) { return b.tape()->unary(Op::sub, b, a - b.value(), -1.0); }
Var operator*(const Var& a, double b) { return a.tape()->unary(Op::mul, a, a.value() * b, b); }
Var operator*(double a, const Var& b) { return b * a; }
Var operator/(const Var& a, double b) { return a.tape()->unary(Op::div, a, a.value() / b, 1.0 / b); }
Var operator/(double a, const Var& b) {
  const double q = a / b.value();
  return b.tape()->unary(Op::div, b, q, -q / b.value());
}

Var tanh(const Var& a) {
  const double t = std::tanh(a.value());
  return a.tape()->unary(Op::tanh, a, t, 1.0 - t * t);
}
Var atanh(const Var& a) {
  const double x = a.value();
  return a.tape()->unary(Op::atanh, a, std::atanh(x), 1.0 / (1.0 - x * x));
}
Var asinh(const Var& a) {
  const double x = a.value();
  return a.tape()->unary(Op::asinh, a, std::asinh(x), 1.0 / std::sqrt(x * x + 1.0));
}
Var exp(const Var& a) {
  const double e = std::exp(a.value());
  return a.tape()->unary(Op::exp, a, e, e);
}
Var log(const Var& a) {
  return a.tape()->unary(Op::log, a, std::log(a.value()), 1.0 / a.value());
}
Var sqrt(const Var& a) {
  const double s = std::sqrt(a.value());
  return a.tape()->unary(Op::sqrt, a, s, 0.5 / s);
}

namespace {

Tape* tape_of(std::span<const Var> a) {
  if (a.empty() || a.front().tape() == nullptr) {
    throw Error(ErrorCode::DimMismatch, "vector op on an empty or unbound operand");
  }
  return a.front().tape();
}

// Scratch buffers reused across calls on the same thread.
thread_local std::vector<std::uint32_t> scratch_inputs;
thread_local std::vector<double> scratch_partials;

void reset_scratch(std::size_t n) {
  scratch_inputs.clear();
  scratch_partials.clear();
  scratch_inputs.reserve(n);
  scratch_partials.reserve(n);
}

}  // namespace

Var dot(std::span<const Var> a, std::span<const Var> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "dot operands differ in length");
  Tape* tape = tape_of(a);
  reset_scratch(2 * a.size());
  double value = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    value += a[i].value() * b[i].value();
    scratch_inputs.push_back(a[i].index());
    scratch_partials.push_back(b[i].value());
    scratch_inputs.push_back(b[i].index());
    scratch_partials.push_back(a[i].value());
  }
  return tape->push(Op::dot, value, scratch_inputs, scratch_partials);
}

Var dot(std::span<const Var> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "dot operands differ in length");
  Tape* tape = tape_of(a);
  reset_scratch(a.size());
  double value = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    value += a[i].value() * b[i];
    scratch_inputs.push_back(a[i].index());
    scratch_partials.push_back(b[i]);
  }
  return tape->push(Op::dot, value, scratch_inputs, scratch_partials);
}

Var sum(std::span<const Var> a) {
  Tape* tape = tape_of(a);
  reset_scratch(a.size());
  double value = 0.0;
  for (const Var& v : a) {
    value += v.value();
    scratch_inputs.push_back(v.index());
    scratch_partials.push_back(1.0);
  }
  return tape->push(Op::sum, value, scratch_inputs, scratch_partials);
}

Var affine(std::span<const Var> weights, std::span<const Var> x, const Var& bias) {
  if (weights.size() != x.size()) throw Error(ErrorCode::DimMismatch, "affine row/input length");
  Tape* tape = bias.tape();
  reset_scratch(2 * x.size() + 1);
  double value = bias.value();
  scratch_inputs.push_back(bias.index());
  scratch_partials.push_back(1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += weights[i].value() * x[i].value();
    scratch_inputs.push_back(weights[i].index());
    scratch_partials.push_back(x[i].value());
    scratch_inputs.push_back(x[i].index());
    scratch_partials.push_back(weights[i].value());
  }
  return tape->push(Op::affine, value, scratch_inputs, scratch_partials);
}

Var affine(std::span<const Var> weights, std::span<const double> x, const Var& bias) {
  if (weights.size() != x.size()) throw Error(ErrorCode::DimMismatch, "affine row/input length");
  Tape* tape = bias.tape();
  reset_scratch(x.size() + 1);
  double value = bias.value();
  scratch_inputs.push_back(bias.index());
  scratch_partials.push_back(1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    value += weights[i].value() * x[i];
    scratch_inputs.push_back(weights[i].index());
    scratch_partials.push_back(x[i]);
  }
  return tape->push(Op::affine, value, scratch_inputs, scratch_partials);
}

Var select_max(std::span<const Var> a) {
  Tape* tape = tape_of(a);
  std::size_t best = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i].value() > a[best].value()) best = i;
  }
  return tape->unary(Op::select_max, a[best], a[best].value(), 1.0);
}

VarVec softmax(std::span<const Var> logits) {
  Tape* tape = tape_of(logits);
  const std::size_t n = logits.size();
  double shift = logits[0].value();
  for (const Var& v : logits) shift = std::max(shift, v.value());
  std::vector<double> s(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::exp(logits[i].value() - shift);
    total += s[i];
  }
  for (double& v : s) v /= total;

  VarVec out;
  out.reserve(n);
  std::vector<std::uint32_t> in(n);
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = logits[j].index();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[j] = s[i] * ((i == j ? 1.0 : 0.0) - s[j]);
    out.push_back(tape->push(Op::softmax, s[i], in, d));
  }
  return out;
}

Var softmax_cross_entropy(std::span<const Var> logits, std::size_t label) {
  Tape* tape = tape_of(logits);
  const std::size_t n = logits.size();
  if (label >= n) {
    throw Error(ErrorCode::BadLabel,
                "label " + std::to_string(label) + " outside [0, " + std::to_string(n) + ")");
  }
  double shift = logits[0].value();
  for (const Var& v : logits) shift = std::max(shift, v.value());
  reset_scratch(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(logits[i].value() - shift);
    total += e;
    scratch_inputs.push_back(logits[i].index());
    scratch_partials.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    scratch_partials[i] = scratch_partials[i] / total - (i == label ? 1.0 : 0.0);
  }
  const double value = shift + std::log(total) - logits[label].value();
  return tape->push(Op::cross_entropy, value, scratch_inputs, scratch_partials);
}

}  // namespace curvednet::ad
