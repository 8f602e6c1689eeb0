#include "curvednet/models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "curvednet/kernels.hpp"
#include "curvednet/rng.hpp"

namespace curvednet {

std::string_view to_string(Architecture a) noexcept {
  switch (a) {
    case Architecture::baseline: return "baseline";
    case Architecture::gio: return "gio";
    case Architecture::git: return "git";
  }
  return "baseline";
}

std::string_view to_string(Geometry g) noexcept {
  switch (g) {
    case Geometry::euclidean: return "euclidean";
    case Geometry::spherical: return "spherical";
    case Geometry::hyperbolic: return "hyperbolic";
  }
  return "euclidean";
}

std::string_view to_string(InitMode m) noexcept {
  return m == InitMode::uniform ? "uniform" : "random";
}

void ModelConfig::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (input_dim == 0 || embed_dim == 0) bad("input_dim and embed_dim must be positive");
  if (classes < 2) bad("need at least two classes");
  if (hidden.empty() && embed_dim != input_dim) {
    bad("an identity extractor needs embed_dim == input_dim");
  }
  if (std::find(hidden.begin(), hidden.end(), std::size_t{0}) != hidden.end()) {
    bad("hidden widths must be positive");
  }
  if (!(xi > 0.0 && xi < 1.0)) bad("xi must lie in (0, 1)");

  std::set<Geometry> seen;
  for (const auto& g : geometries) {
    if (!seen.insert(g.kind).second) bad("each geometry may appear once");
    if (g.kind == Geometry::spherical && !(g.curvature > 0.0 && std::isfinite(g.curvature))) {
      bad("spherical curvature must be finite and > 0");
    }
    if (g.kind == Geometry::hyperbolic && !(g.curvature < 0.0 && std::isfinite(g.curvature))) {
      bad("hyperbolic curvature must be finite and < 0");
    }
  }
  switch (architecture) {
    case Architecture::baseline:
      if (!geometries.empty()) bad("baseline takes no geometric components");
      break;
    case Architecture::gio:
      if (geometries.empty()) bad("GiO needs a geometric component");
      if (seen.count(Geometry::euclidean) && geometries.size() < 2) {
        bad("a euclidean component is only allowed in a mixed GiO model");
      }
      break;
    case Architecture::git:
      if (geometries.empty()) bad("GiT needs a geometric component");
      if (seen.count(Geometry::euclidean)) bad("GiT already carries its euclidean branch");
      break;
  }
}

ModelConfig model_config_for(std::string_view name, double curvature_s, double curvature_h) {
  ModelConfig cfg;
  const auto s = GeometryTag::spherical(curvature_s);
  const auto h = GeometryTag::hyperbolic(curvature_h);
  if (name == "baseline") {
    cfg.architecture = Architecture::baseline;
  } else if (name == "sio" || name == "hio" || name == "mio") {
    cfg.architecture = Architecture::gio;
  } else if (name == "sit" || name == "hit" || name == "mit") {
    cfg.architecture = Architecture::git;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown architecture '" + std::string(name) + "'");
  }
  if (name == "sio" || name == "sit") cfg.geometries = {s};
  if (name == "hio" || name == "hit") cfg.geometries = {h};
  if (name == "mio" || name == "mit") cfg.geometries = {s, h};
  return cfg;
}

namespace {

std::vector<double> uniform_values(std::size_t n, double half, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-half, half);
  return v;
}

std::vector<double> repeat_row(std::span<const double> row, std::size_t times) {
  std::vector<double> out;
  out.reserve(row.size() * times);
  for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<Branch> plan_branches(const ModelConfig& cfg, std::size_t first_head_param) {
  std::vector<GeometryTag> tags;
  if (cfg.architecture != Architecture::gio) tags.push_back(GeometryTag::euclidean());
  tags.insert(tags.end(), cfg.geometries.begin(), cfg.geometries.end());
  std::vector<Branch> branches;
  std::size_t next = first_head_param;
  for (const auto& t : tags) {
    branches.push_back({t.kind, t.curvature, next});
    next += t.kind == Geometry::spherical ? 1 : 2;
  }
  return branches;
}

// Uniform read access to parameters as double or as tape leaves.
struct DoubleAccess {
  const ParamSet& params;
  MatView<double> matrix(std::size_t i) const {
    const auto& p = params[i];
    return {p.value, p.rows(), p.cols()};
  }
  std::span<const double> vec(std::size_t i) const { return params[i].value; }
  double constant(double c) const { return c; }
};

struct VarAccess {
  const Bindings& bindings;
  ad::Tape& tape;
  MatView<ad::Var> matrix(std::size_t i) const { return bindings.matrix(i); }
  std::span<const ad::Var> vec(std::size_t i) const { return bindings[i]; }
  ad::Var constant(double c) const { return tape.constant(c); }
};

template <class T>
struct GenericForward {
  std::vector<T> embedding;
  std::vector<std::vector<T>> branch_embeddings;
  std::vector<std::vector<T>> branch_logits;
};

template <class T, class Access>
GenericForward<T> forward_generic(const Model& model, const Access& access,
                                  std::span<const double> x) {
  const std::size_t layers = model.extractor_layers();
  GenericForward<T> out;
  std::vector<T> h;
  if (layers == 0) {
    h.reserve(x.size());
    for (double v : x) h.push_back(access.constant(v));
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const MatView<T> w = access.matrix(2 * l);
    const std::span<const T> b = access.vec(2 * l + 1);
    std::vector<T> next;
    next.reserve(w.rows);
    for (std::size_t j = 0; j < w.rows; ++j) {
      T a = l == 0 ? affine(w.row(j), x, b[j]) : affine(w.row(j), std::span<const T>(h), b[j]);
      next.push_back(l + 1 < layers ? relu(a) : a);
    }
    h = std::move(next);
  }
  const std::span<const T> e(h);
  const double xi = model.config().xi;
  for (const Branch& br : model.branches()) {
    std::vector<T> emb;
    std::vector<T> logits;
    switch (br.geometry) {
      case Geometry::euclidean:
        emb.assign(e.begin(), e.end());
        logits = kernels::euclidean_logits<T, T>(e, access.matrix(br.first_param),
                                                 access.vec(br.first_param + 1));
        break;
      case Geometry::spherical:
        emb = kernels::sphere_project<T>(e, br.curvature);
        logits = kernels::angular_logits<T>(emb, access.matrix(br.first_param));
        break;
      case Geometry::hyperbolic:
        emb = kernels::ball_clip<T>(e, br.curvature, xi);
        logits = kernels::hyperbolic_mlr_logits<T>(emb, access.matrix(br.first_param),
                                                   access.matrix(br.first_param + 1),
                                                   br.curvature);
        break;
    }
    out.branch_embeddings.push_back(std::move(emb));
    out.branch_logits.push_back(std::move(logits));
  }
  out.embedding = std::move(h);
  return out;
}

Matrix matrix_of(const Parameter& p) { return Matrix(p.rows(), p.cols(), p.value); }

}  // namespace

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ParamSet params;
  std::vector<std::size_t> dims{config.input_dim};
  if (!config.hidden.empty()) {
    dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
    dims.push_back(config.embed_dim);
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    const std::string prefix = "extractor." + std::to_string(l);
    params.add(prefix + ".weight", {out, in},
               uniform_values(out * in, 1.0 / std::sqrt(static_cast<double>(in)), rng));
    params.add(prefix + ".bias", {out}, std::vector<double>(out, 0.0));
  }

  const std::size_t n = config.embed_dim;
  const std::size_t c = config.classes;
  const bool uniform = config.init == InitMode::uniform;
  for (const Branch& br : plan_branches(config, params.size())) {
    switch (br.geometry) {
      case Geometry::euclidean: {
        auto head = init_euclidean_head(c, n, rng);
        std::vector<double> w(head.weight.data().begin(), head.weight.data().end());
        if (uniform) std::fill(w.begin(), w.end(), 0.0);
        params.add("euclidean.weight", {c, n}, std::move(w));
        params.add("euclidean.bias", {c}, head.bias);
        break;
      }
      case Geometry::spherical: {
        const auto head = init_angular_head(c, n, Curvature::spherical(br.curvature), rng);
        const auto data = head.prototypes().data();
        std::vector<double> protos = uniform ? repeat_row(head.prototypes().row(0), c)
                                             : std::vector<double>(data.begin(), data.end());
        params.add("spherical.prototypes", {c, n}, std::move(protos), Constraint::sphere_rows,
                   br.curvature);
        break;
      }
      case Geometry::hyperbolic: {
        const auto head = init_mlr_head(c, n, Curvature::hyperbolic(br.curvature), rng, config.xi);
        const auto data = head.normals().data();
        std::vector<double> normals = uniform ? repeat_row(head.normals().row(0), c)
                                              : std::vector<double>(data.begin(), data.end());
        params.add("hyperbolic.offsets", {c, n}, std::vector<double>(c * n, 0.0),
                   Constraint::ball_rows, br.curvature, config.xi);
        params.add("hyperbolic.normals", {c, n}, std::move(normals));
        break;
      }
    }
  }
  return assemble(config, std::move(params));
}

Model Model::assemble(const ModelConfig& config, ParamSet params) {
  config.validate();
  Model m;
  m.config_ = config;
  m.extractor_layers_ = config.hidden.empty() ? 0 : config.hidden.size() + 1;
  m.branches_ = plan_branches(config, 2 * m.extractor_layers_);
  std::size_t expected = 2 * m.extractor_layers_;
  for (const Branch& b : m.branches_) expected += b.geometry == Geometry::spherical ? 1 : 2;
  if (params.size() != expected) {
    throw Error(ErrorCode::ModelFormat, "parameter count does not match the architecture");
  }
  m.params_ = std::move(params);
  return m;
}

void Model::set_standardization(std::vector<double> shift, std::vector<double> scale) {
  if (shift.size() != scale.size() || (!shift.empty() && shift.size() != config_.input_dim)) {
    throw Error(ErrorCode::DimMismatch, "standardisation vectors must match input_dim");
  }
  input_shift_ = std::move(shift);
  input_scale_ = std::move(scale);
}

void Model::fit_standardization(const Dataset& train) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit standardisation");
  const std::size_t d = train.dim;
  std::vector<double> mean(d, 0.0);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto r = train.row(i);
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
  }
  for (double& m : mean) m /= static_cast<double>(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto r = train.row(i);
    for (std::size_t k = 0; k < d; ++k) var[k] += (r[k] - mean[k]) * (r[k] - mean[k]);
  }
  for (double& v : var) v = std::max(std::sqrt(v / static_cast<double>(train.size())), 1e-12);
  set_standardization(std::move(mean), std::move(var));
}

std::vector<double> Model::prepare_input(std::span<const double> input) const {
  if (input.size() != config_.input_dim) {
    throw Error(ErrorCode::DimMismatch, "input has dim " + std::to_string(input.size()) +
                                            ", model expects " + std::to_string(config_.input_dim));
  }
  std::vector<double> x(input.begin(), input.end());
  if (!input_shift_.empty()) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = (x[k] - input_shift_[k]) / input_scale_[k];
  }
  return x;
}

EuclideanHead Model::euclidean_head(const Branch& b) const {
  return {matrix_of(params_[b.first_param]), params_[b.first_param + 1].value};
}

AngularHead Model::angular_head(const Branch& b) const {
  return AngularHead(matrix_of(params_[b.first_param]), Curvature::spherical(b.curvature));
}

HyperbolicMLRHead Model::mlr_head(const Branch& b) const {
  return HyperbolicMLRHead(matrix_of(params_[b.first_param]),
                           matrix_of(params_[b.first_param + 1]),
                           Curvature::hyperbolic(b.curvature), config_.xi);
}

ForwardResult forward(const Model& model, std::span<const double> input) {
  const auto x = model.prepare_input(input);
  auto g = forward_generic<double>(model, DoubleAccess{model.params()}, x);
  ForwardResult out;
  const auto branches = model.branches();
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& br = branches[i];
    const auto& emb = g.branch_embeddings[i];
    if (br.geometry == Geometry::spherical && !satisfies_sphere_invariant(emb, br.curvature)) {
      throw Error(ErrorCode::InvariantViolation, "spherical embedding left the sphere");
    }
    if (br.geometry == Geometry::hyperbolic && !satisfies_ball_invariant(emb, br.curvature)) {
      throw Error(ErrorCode::InvariantViolation, "hyperbolic embedding left the ball");
    }
    auto conf = softmax(g.branch_logits[i]);
    out.branches.push_back({br.geometry, br.curvature, std::move(g.branch_embeddings[i]),
                            std::move(g.branch_logits[i]), std::move(conf)});
  }
  out.embedding = std::move(g.embedding);
  return out;
}

std::vector<double> branch_losses(const Model& model, const Dataset& batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyDataset, "empty batch");
  std::vector<double> totals(model.branches().size(), 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.labels[i] < 0) throw Error(ErrorCode::BadLabel, "OOD sample has no class label");
    const auto out = forward(model, batch.row(i));
    for (std::size_t b = 0; b < totals.size(); ++b) {
      totals[b] += logits_cross_entropy(out.branches[b].logits, static_cast<std::size_t>(batch.labels[i]));
    }
  }
  for (double& t : totals) t /= static_cast<double>(batch.size());
  return totals;
}

double training_loss(const Model& model, const Dataset& batch) {
  const auto parts = branch_losses(model, batch);
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

std::size_t predict(const ForwardResult& out) {
  const std::size_t classes = out.branches.front().confidence.size();
  std::vector<double> mean(classes, 0.0);
  for (const auto& b : out.branches) {
    for (std::size_t j = 0; j < classes; ++j) mean[j] += b.confidence[j];
  }
  return static_cast<std::size_t>(std::max_element(mean.begin(), mean.end()) - mean.begin());
}

ad::Var sample_loss(const Model& model, const Bindings& bindings, ad::Tape& tape,
                    std::span<const double> input, std::size_t label,
                    std::vector<double>* branch_values) {
  const auto g = forward_generic<ad::Var>(model, VarAccess{bindings, tape}, input);
  ad::VarVec parts;
  parts.reserve(g.branch_logits.size());
  for (std::size_t b = 0; b < g.branch_logits.size(); ++b) {
    parts.push_back(ad::softmax_cross_entropy(g.branch_logits[b], label));
    if (branch_values) (*branch_values)[b] += parts.back().value();
  }
  return parts.size() == 1 ? parts.front() : ad::sum(parts);
}

namespace {

/// Rescales the joint gradient to at most `max_norm`. Non-finite gradients
/// are left alone so sgd_step can report them.
void clip_gradients(ParamSet& params, double max_norm) {
  double total = 0.0;
  for (const Parameter& p : params) {
    for (double g : p.grad) total += g * g;
  }
  const double norm = std::sqrt(total);
  if (!std::isfinite(norm) || norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (Parameter& p : params) {
    for (double& g : p.grad) g *= scale;
  }
}

}  // namespace

TrainReport train(Model& model, const Dataset& train_set, const TrainConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (train_set.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  if (train_set.dim != model.config().input_dim) {
    throw Error(ErrorCode::DimMismatch, "training data dim does not match the model");
  }
  if (config.batch_size == 0) throw Error(ErrorCode::BadSpec, "batch_size must be positive");
  if (!(config.max_grad_norm >= 0.0)) throw Error(ErrorCode::BadSpec, "max_grad_norm must be >= 0");
  if (!(config.lr >= 0.0) || !std::isfinite(config.lr)) {
    throw Error(ErrorCode::BadSpec, "learning rate must be finite and >= 0");
  }
  std::set<int> distinct;
  for (int l : train_set.labels) {
    if (l < 0) throw Error(ErrorCode::TrainPurity, "training set contains an OOD sample");
    if (static_cast<std::size_t>(l) >= model.config().classes) {
      throw Error(ErrorCode::BadLabel, "label " + std::to_string(l) + " exceeds the model's classes");
    }
    distinct.insert(l);
  }
  if (distinct.size() < 2) throw Error(ErrorCode::BadSpec, "training needs at least two classes");
  if (model.config().standardize && model.input_shift().empty()) {
    model.fit_standardization(train_set);
  }

  TrainReport report;
  report.seed = config.seed;
  report.initial_branch_loss = branch_losses(model, train_set);
  report.initial_loss = std::accumulate(report.initial_branch_loss.begin(),
                                        report.initial_branch_loss.end(), 0.0);

  const std::size_t n = train_set.size();
  const std::size_t n_branches = model.branches().size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed ^ 0xd1b54a32d192ed03ULL);
  ad::Tape tape;
  ParamSet& params = model.params();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_total = 0.0;
    std::vector<double> branch_total(n_branches, 0.0);
    for (std::size_t start = 0, batch = 0; start < n; start += config.batch_size, ++batch) {
      const std::size_t end = std::min(n, start + config.batch_size);
      const auto where = [&] {
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch);
      };
      try {
        tape.clear();
        const Bindings bindings(tape, params);
        ad::VarVec losses;
        losses.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
          const std::size_t idx = order[i];
          const int label = train_set.labels[idx];
          if (label < 0) throw Error(ErrorCode::TrainPurity, "OOD sample reached a training batch");
          const auto x = model.prepare_input(train_set.row(idx));
          losses.push_back(sample_loss(model, bindings, tape, x, static_cast<std::size_t>(label),
                                       &branch_total));
        }
        const ad::Var loss = ad::sum(losses) * (1.0 / static_cast<double>(losses.size()));
        if (!std::isfinite(loss.value())) {
          throw Error(ErrorCode::NonFiniteLoss, where() + ": loss is not finite");
        }
        bindings.accumulate(tape.backward(loss), params);
        if (config.max_grad_norm > 0.0) clip_gradients(params, config.max_grad_norm);
        sgd_step(params, config.lr);
        epoch_total += loss.value() * static_cast<double>(losses.size());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteGradient || e.code() == ErrorCode::Singularity ||
            e.code() == ErrorCode::ZeroVector) {
          throw Error(ErrorCode::NonFiniteLoss, where() + ": " + e.what());
        }
        throw;
      }
    }
    report.epoch_loss.push_back(epoch_total / static_cast<double>(n));
    for (double& b : branch_total) b /= static_cast<double>(n);
    report.epoch_branch_loss.push_back(std::move(branch_total));
  }

  std::size_t correct = 0;
  std::vector<std::size_t> branch_correct(n_branches, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto out = forward(model, train_set.row(i));
    const auto label = static_cast<std::size_t>(train_set.labels[i]);
    correct += predict(out) == label ? 1 : 0;
    for (std::size_t b = 0; b < n_branches; ++b) {
      branch_correct[b] += out.branches[b].confidence.argmax() == label ? 1 : 0;
    }
  }
  report.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  for (std::size_t c : branch_correct) {
    report.branch_accuracy.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace curvednet
