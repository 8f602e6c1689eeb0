#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvednet/autodiff.hpp"
#include "curvednet/data.hpp"
#include "curvednet/heads.hpp"
#include "curvednet/manifold.hpp"

namespace curvednet {

enum class Architecture { baseline, gio, git };
enum class Geometry { euclidean, spherical, hyperbolic };
enum class InitMode { random, uniform };

std::string_view to_string(Architecture a) noexcept;
std::string_view to_string(Geometry g) noexcept;
std::string_view to_string(InitMode m) noexcept;

struct GeometryTag {
  Geometry kind = Geometry::euclidean;
  double curvature = 0.0;  // > 0 spherical, < 0 hyperbolic, unused for euclidean

  static GeometryTag euclidean() { return {Geometry::euclidean, 0.0}; }
  static GeometryTag spherical(double k) { return {Geometry::spherical, k}; }
  static GeometryTag hyperbolic(double k) { return {Geometry::hyperbolic, k}; }
  friend bool operator==(const GeometryTag&, const GeometryTag&) = default;
};

struct ModelConfig {
  Architecture architecture = Architecture::baseline;
  /// Geometric components. A single entry for SiO/HiO/SiT/HiT, several for
  /// the mixed variants; a euclidean entry is only allowed in GiO-mixed.
  std::vector<GeometryTag> geometries;
  std::size_t input_dim = 0;
  /// Hidden widths of the rectifier extractor; empty means the identity.
  std::vector<std::size_t> hidden;
  std::size_t embed_dim = 8;
  std::size_t classes = 2;
  double xi = kDefaultXi;
  InitMode init = InitMode::random;
  /// Standardise inputs with train-set statistics before the extractor.
  bool standardize = false;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Builds a config from an architecture abbreviation
/// (baseline, sio, hio, mio, sit, hit, mit).
ModelConfig model_config_for(std::string_view name, double curvature_s, double curvature_h);

/// One classifier branch reading the shared embedding e_E.
struct Branch {
  Geometry geometry = Geometry::euclidean;
  double curvature = 0.0;
  std::size_t first_param = 0;  // head tensors start here in the ParamSet
};

struct BranchOutput {
  Geometry geometry = Geometry::euclidean;
  double curvature = 0.0;
  std::vector<double> embedding;  // e_G (e_E itself for the euclidean branch)
  std::vector<double> logits;
  ConfidenceVec confidence;
};

struct ForwardResult {
  std::vector<double> embedding;  // e_E
  std::vector<BranchOutput> branches;
};

class Model {
 public:
  static Model create(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }
  std::span<const Branch> branches() const noexcept { return branches_; }
  std::size_t extractor_layers() const noexcept { return extractor_layers_; }

  std::span<const double> input_shift() const noexcept { return input_shift_; }
  std::span<const double> input_scale() const noexcept { return input_scale_; }
  void set_standardization(std::vector<double> shift, std::vector<double> scale);
  /// Fits per-feature mean / std on `train` (std floored at 1e-12).
  void fit_standardization(const Dataset& train);
  /// Applies the stored standardisation (identity when none is set).
  std::vector<double> prepare_input(std::span<const double> input) const;

  /// Heads as standalone objects, built from the current parameters.
  EuclideanHead euclidean_head(const Branch& b) const;
  AngularHead angular_head(const Branch& b) const;
  HyperbolicMLRHead mlr_head(const Branch& b) const;

  /// Free-form key/value record of the run configuration, saved with the model.
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Rebuilds branch bookkeeping from a config and a loaded ParamSet.
  static Model assemble(const ModelConfig& config, ParamSet params);

 private:
  ModelConfig config_;
  ParamSet params_;
  std::vector<Branch> branches_;
  std::size_t extractor_layers_ = 0;
  std::vector<double> input_shift_;
  std::vector<double> input_scale_;
};

/// Runs extractor, geometric transformations and heads. Throws DimMismatch
/// or, if a transformation ever left its manifold, InvariantViolation.
ForwardResult forward(const Model& model, std::span<const double> input);

/// Sum over branches of each branch's softmax cross-entropy, averaged over
/// the batch (rows of `batch` are samples).
double training_loss(const Model& model, const Dataset& batch);
/// Per-branch mean losses in branch order.
std::vector<double> branch_losses(const Model& model, const Dataset& batch);

/// Index of the largest mean confidence across branches.
std::size_t predict(const ForwardResult& out);

/// Records the differentiable per-sample loss on a tape.
ad::Var sample_loss(const Model& model, const Bindings& bindings, ad::Tape& tape,
                    std::span<const double> input, std::size_t label,
                    std::vector<double>* branch_values = nullptr);

struct TrainConfig {
  std::size_t epochs = 30;
  double lr = 0.05;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  /// Global gradient-norm cap applied before each step; 0 disables it.
  double max_grad_norm = 1.0;
};

struct TrainReport {
  double initial_loss = 0.0;
  std::vector<double> initial_branch_loss;
  std::vector<double> epoch_loss;
  std::vector<std::vector<double>> epoch_branch_loss;
  double train_accuracy = 0.0;
  std::vector<double> branch_accuracy;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
};

/// Mini-batch SGD over shuffled ID samples. Deterministic given the seed.
/// Throws EmptyDataset, TrainPurity, BadLabel and NonFiniteLoss.
TrainReport train(Model& model, const Dataset& train_set, const TrainConfig& config);

}  // namespace curvednet
