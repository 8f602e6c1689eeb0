#include "curvednet/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <memory>

#include "curvednet/autodiff.hpp"
#include "curvednet/models.hpp"
#include "curvednet/rng.hpp"

namespace curvednet {

namespace {

using kernels::Vec;
using ad::Var;

struct Problem {
  ParamSet params;
  LossFn loss;
};

using Builder = std::function<Problem(Rng&)>;

std::vector<double> gaussian(std::size_t n, double sd, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, sd);
  return v;
}

/// n values drawn inside the ball of radius r/sqrt|k|, per row of length cols.
std::vector<double> ball_rows(std::size_t rows, std::size_t cols, double k, double r, Rng& rng) {
  std::vector<double> v;
  v.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row = gaussian(cols, 1.0, rng);
    double n = 0.0;
    for (double x : row) n += x * x;
    n = std::sqrt(n);
    const double target = rng.uniform(0.1, r) / std::sqrt(std::abs(k));
    for (double x : row) v.push_back(x / n * target);
  }
  return v;
}

std::vector<std::size_t> labels(std::size_t n, std::size_t classes, Rng& rng) {
  std::vector<std::size_t> out(n);
  for (auto& l : out) l = rng.below(classes);
  return out;
}

Var mean_cross_entropy(const std::vector<Vec<Var>>& logits, std::span<const std::size_t> y) {
  ad::VarVec parts;
  for (std::size_t i = 0; i < logits.size(); ++i) parts.push_back(ad::softmax_cross_entropy(logits[i], y[i]));
  return ad::sum(parts) / static_cast<double>(parts.size());
}

constexpr std::size_t kBatch = 6;
constexpr std::size_t kDim = 5;
constexpr std::size_t kClasses = 4;

Problem angular_problem(Rng& rng) {
  const double k = 1.0;
  Problem p;
  p.params.add("embeddings", {kBatch, kDim}, gaussian(kBatch * kDim, 1.0, rng));
  p.params.add("prototypes", {kClasses, kDim}, gaussian(kClasses * kDim, 1.0, rng));
  const auto y = labels(kBatch, kClasses, rng);
  p.loss = [y, k](ad::Tape&, const Bindings& b) {
    const MatView<Var> e = b.matrix(0);
    // Prototypes live on the sphere; project them so the check covers the
    // same composite the trainer sees after re-projection.
    std::vector<Var> protos;
    const MatView<Var> raw = b.matrix(1);
    for (std::size_t j = 0; j < raw.rows; ++j) {
      const Vec<Var> row = kernels::sphere_project<Var>(raw.row(j), k);
      protos.insert(protos.end(), row.begin(), row.end());
    }
    const MatView<Var> pv{protos, raw.rows, raw.cols};
    std::vector<Vec<Var>> logits;
    for (std::size_t i = 0; i < e.rows; ++i) {
      const Vec<Var> s = kernels::sphere_project<Var>(e.row(i), k);
      logits.push_back(kernels::angular_logits<Var>(s, pv));
    }
    return mean_cross_entropy(logits, y);
  };
  return p;
}

Problem mlr_problem(Rng& rng, double k) {
  Problem p;
  p.params.add("embeddings", {kBatch, kDim}, ball_rows(kBatch, kDim, k, 0.8, rng));
  p.params.add("offsets", {kClasses, kDim}, ball_rows(kClasses, kDim, k, 0.5, rng));
  // Logits scale like ||W||/sqrt|k|; keep them O(1) so the softmax is not
  // saturated and the finite differences stay above rounding noise.
  p.params.add("normals", {kClasses, kDim}, gaussian(kClasses * kDim, std::sqrt(std::abs(k)), rng));
  const auto y = labels(kBatch, kClasses, rng);
  p.loss = [y, k](ad::Tape&, const Bindings& b) {
    const MatView<Var> e = b.matrix(0);
    std::vector<Vec<Var>> logits;
    for (std::size_t i = 0; i < e.rows; ++i) {
      const Vec<Var> h = kernels::ball_clip<Var>(e.row(i), k, kDefaultXi);
      logits.push_back(kernels::hyperbolic_mlr_logits<Var>(h, b.matrix(1), b.matrix(2), k));
    }
    return mean_cross_entropy(logits, y);
  };
  return p;
}

Problem euclidean_problem(Rng& rng) {
  Problem p;
  p.params.add("embeddings", {kBatch, kDim}, gaussian(kBatch * kDim, 1.0, rng));
  p.params.add("weight", {kClasses, kDim}, gaussian(kClasses * kDim, 0.7, rng));
  p.params.add("bias", {kClasses}, gaussian(kClasses, 0.3, rng));
  const auto y = labels(kBatch, kClasses, rng);
  p.loss = [y](ad::Tape&, const Bindings& b) {
    const MatView<Var> e = b.matrix(0);
    std::vector<Vec<Var>> logits;
    for (std::size_t i = 0; i < e.rows; ++i) {
      logits.push_back(kernels::euclidean_logits<Var, Var>(e.row(i), b.matrix(1), b[2]));
    }
    return mean_cross_entropy(logits, y);
  };
  return p;
}

/// Matvec followed by a Moebius translation and the distance to a target,
/// summed over a small batch: every Moebius primitive in one composite.
Problem matvec_problem(Rng& rng, double k) {
  constexpr std::size_t rows = 4;
  Problem p;
  p.params.add("inputs", {kBatch, kDim}, ball_rows(kBatch, kDim, k, 0.7, rng));
  p.params.add("weight", {rows, kDim}, gaussian(rows * kDim, 0.4, rng));
  p.params.add("shift", {rows}, ball_rows(1, rows, k, 0.4, rng));
  const std::vector<double> target = ball_rows(1, rows, k, 0.5, rng);
  p.loss = [k, target](ad::Tape& tape, const Bindings& b) {
    const MatView<Var> x = b.matrix(0);
    ad::VarVec parts;
    Vec<Var> t;
    for (double v : target) t.push_back(tape.constant(v));
    for (std::size_t i = 0; i < x.rows; ++i) {
      const Vec<Var> h = kernels::ball_clip<Var>(x.row(i), k, kDefaultXi);
      const auto mv = kernels::mobius_matvec<Var>(b.matrix(1), h, k);
      const Vec<Var> moved = kernels::mobius_add<Var>(mv.point, b[2], k);
      const Vec<Var> clipped = kernels::ball_clip<Var>(moved, k, kDefaultXi);
      parts.push_back(kernels::geodesic_dist<Var>(clipped, t, k));
    }
    return ad::sum(parts);
  };
  return p;
}

Problem manifold_ops_problem(Rng& rng, double k) {
  Problem p;
  p.params.add("x", {kBatch, kDim}, ball_rows(kBatch, kDim, k, 0.7, rng));
  p.params.add("y", {kBatch, kDim}, ball_rows(kBatch, kDim, k, 0.7, rng));
  p.loss = [k](ad::Tape&, const Bindings& b) {
    const MatView<Var> x = b.matrix(0);
    const MatView<Var> y = b.matrix(1);
    ad::VarVec parts;
    for (std::size_t i = 0; i < x.rows; ++i) {
      parts.push_back(kernels::geodesic_dist<Var>(x.row(i), y.row(i), k));
      parts.push_back(kernels::distance_to_origin<Var>(x.row(i), k));
      parts.push_back(0.1 * kernels::conformal_factor<Var>(y.row(i), k));
      const Vec<Var> s = kernels::mobius_add<Var>(x.row(i), y.row(i), k);
      parts.push_back(kernels::norm<Var>(s));
    }
    return ad::sum(parts);
  };
  return p;
}

/// Points drawn well outside the ball so the rescaling branch of the clip
/// is exercised, plus the sphere projection.
Problem projection_problem(Rng& rng) {
  const double kh = -1.0;
  const double ks = 2.0;
  Problem p;
  std::vector<double> outside = ball_rows(kBatch, kDim, kh, 0.9, rng);
  for (double& v : outside) v *= 3.0;
  p.params.add("outside", {kBatch, kDim}, outside);
  p.params.add("free", {kBatch, kDim}, gaussian(kBatch * kDim, 1.0, rng));
  const std::vector<double> probe = gaussian(kDim, 1.0, rng);
  p.loss = [kh, ks, probe](ad::Tape&, const Bindings& b) {
    const MatView<Var> o = b.matrix(0);
    const MatView<Var> f = b.matrix(1);
    ad::VarVec parts;
    for (std::size_t i = 0; i < o.rows; ++i) {
      const Vec<Var> c = kernels::ball_clip<Var>(o.row(i), kh, kDefaultXi);
      parts.push_back(ad::dot(std::span<const Var>(c), std::span<const double>(probe)));
      const Vec<Var> s = kernels::sphere_project<Var>(f.row(i), ks);
      parts.push_back(ad::dot(std::span<const Var>(s), std::span<const double>(probe)));
    }
    return ad::sum(parts);
  };
  return p;
}

/// Whole-network loss of a small model, architecture chosen by name.
Problem model_problem(Rng& rng, std::string_view arch) {
  ModelConfig cfg = model_config_for(arch, 1.0, -1.0);
  cfg.input_dim = 4;
  cfg.hidden = {6};
  cfg.embed_dim = 4;
  cfg.classes = 3;
  Model model = Model::create(cfg, rng.next_u64());
  // Scale the extractor down so the clipped hyperbolic branch stays inside.
  for (auto& par : model.params()) {
    if (par.name.rfind("extractor.", 0) == 0) {
      for (double& v : par.value) v *= 0.5;
    }
  }
  std::vector<std::vector<double>> xs;
  for (std::size_t i = 0; i < 4; ++i) xs.push_back(gaussian(cfg.input_dim, 1.0, rng));
  const auto y = labels(xs.size(), cfg.classes, rng);
  Problem p;
  p.params = model.params();
  auto shared = std::make_shared<Model>(std::move(model));
  p.loss = [shared, xs, y](ad::Tape& tape, const Bindings& b) {
    ad::VarVec parts;
    for (std::size_t i = 0; i < xs.size(); ++i) parts.push_back(sample_loss(*shared, b, tape, xs[i], y[i]));
    return ad::sum(parts) / static_cast<double>(parts.size());
  };
  return p;
}

const std::vector<std::pair<std::string, Builder>>& registry() {
  static const std::vector<std::pair<std::string, Builder>> cases = {
      {"angular_loss", angular_problem},
      {"hyperbolic_mlr_loss", [](Rng& r) { return mlr_problem(r, -1.0); }},
      {"hyperbolic_mlr_loss_k0.01", [](Rng& r) { return mlr_problem(r, -0.01); }},
      {"euclidean_loss", euclidean_problem},
      {"mobius_matvec", [](Rng& r) { return matvec_problem(r, -1.0); }},
      {"mobius_matvec_k0.01", [](Rng& r) { return matvec_problem(r, -0.01); }},
      {"manifold_ops", [](Rng& r) { return manifold_ops_problem(r, -1.0); }},
      {"projections", projection_problem},
      {"model_baseline", [](Rng& r) { return model_problem(r, "baseline"); }},
      {"model_mio", [](Rng& r) { return model_problem(r, "mio"); }},
      {"model_mit", [](Rng& r) { return model_problem(r, "mit"); }},
  };
  return cases;
}

}  // namespace

std::vector<std::string> gradcheck_case_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

GradCheckCaseResult run_gradcheck_case(std::string_view name, const GradCheckSuiteOptions& opts) {
  const auto& cases = registry();
  const auto it = std::find_if(cases.begin(), cases.end(), [&](const auto& c) { return c.first == name; });
  if (it == cases.end()) throw Error(ErrorCode::ConfigError, "unknown gradcheck case '" + std::string(name) + "'");

  GradCheckCaseResult out;
  out.name = it->first;
  out.coordinates_per_point = static_cast<std::size_t>(-1);
  // Each case draws from its own stream so adding cases never shifts others.
  std::uint64_t salt = 0;
  for (char ch : it->first) salt = salt * 131 + static_cast<unsigned char>(ch);
  Rng rng(opts.seed ^ salt);
  for (std::size_t point = 0; point < opts.points; ++point) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < opts.max_attempts_per_point; ++attempt) {
      Problem prob = it->second(rng);
      GradCheckResult r;
      try {
        r = grad_check(prob.loss, prob.params, rng.next_u64(), opts.eps, opts.min_coordinates);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Singularity && e.code() != ErrorCode::ZeroVector) throw;
        ++out.resampled;
        continue;
      }
      if (r.min_boundary_distance < opts.boundary_margin) {
        ++out.resampled;
        continue;
      }
      if (r.max_rel_error >= out.max_rel_error) {
        out.max_rel_error = r.max_rel_error;
        out.worst_parameter = r.worst_parameter;
        out.worst_index = r.worst_index;
        out.worst_analytic = r.worst_analytic;
        out.worst_numeric = r.worst_numeric;
      }
      out.coordinates_per_point = std::min(out.coordinates_per_point, r.coordinates_checked);
      accepted = true;
      break;
    }
    if (!accepted) {
      throw Error(ErrorCode::InvariantViolation,
                  "gradcheck '" + out.name + "': no point clear of clip boundaries after " +
                      std::to_string(opts.max_attempts_per_point) + " attempts");
    }
    ++out.points;
  }
  if (out.points == 0) out.coordinates_per_point = 0;
  return out;
}

std::vector<GradCheckCaseResult> run_gradcheck_suite(const GradCheckSuiteOptions& opts) {
  std::vector<GradCheckCaseResult> out;
  for (const auto& name : gradcheck_case_names()) out.push_back(run_gradcheck_case(name, opts));
  return out;
}

}  // namespace curvednet
