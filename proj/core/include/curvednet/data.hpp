#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvednet/matrix.hpp"

namespace curvednet {

enum class Split { train, test_id, test_ood };

std::string_view to_string(Split split) noexcept;
/// Throws UnknownSplitTag.
Split parse_split(std::string_view tag);

/// Label carried by every OOD sample.
inline constexpr int kOodLabel = -1;

/// Row-major feature table for one split.
struct Dataset {
  Split split = Split::train;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::uint64_t seed = 0;
  std::string provenance;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
  void push(std::string id, std::span<const double> x, int label);
  /// Largest ID label + 1, or 0 when there are none.
  std::size_t class_count() const;
};

struct SplitData {
  Dataset train;
  Dataset test_id;
  Dataset test_ood;

  std::size_t dim() const noexcept;
  std::size_t class_count() const;
};

struct HierarchySpec {
  std::size_t n_super = 4;
  std::size_t n_sub_per_super = 3;
  std::size_t dim = 16;
  double super_spread = 10.0;
  double sub_spread = 2.0;
  double noise_std = 0.5;
  std::size_t samples_per_leaf = 200;
  std::size_t ood_leaves = 2;
  double train_fraction = 0.8;

  /// Throws BadSpec.
  void validate() const;
};

struct HierarchicalData {
  SplitData splits;
  Matrix leaf_centers;             // one row per leaf, leaf = super * n_sub + sub
  std::vector<int> leaf_labels;    // class label of each leaf, kOodLabel when held out
};

/// Super centres ~ N(0, super_spread^2 I), sub centres around them with
/// sub_spread, samples around sub centres with noise_std. Whole leaves are
/// held out as OOD; the remaining leaves are labelled 0.. in leaf order.
HierarchicalData gen_hierarchical(const HierarchySpec& spec, std::uint64_t seed);

/// Two isotropic unit-variance Gaussians at +-separation/2 along the first axis.
Dataset gen_two_gaussians(std::size_t samples, std::size_t dim, double separation,
                          std::uint64_t seed);

/// Per-class stratified split; returns (train, test_id). Throws ClassTooSmall
/// when a class cannot contribute to both sides.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double fraction,
                                             std::uint64_t seed);

// Embedding CSV:
//   # curvednet-embeddings v1 dim=<d>
//   id,split,label,f0,...,f{d-1}
// label is a non-negative integer for ID rows and the literal `ood` otherwise.
SplitData load_embeddings(std::istream& in);
SplitData load_embeddings(const std::filesystem::path& path);
/// Loads train.csv, test_id.csv and test_ood.csv when `dir` is a directory,
/// otherwise a single file holding any mix of splits.
SplitData load_embeddings_dir(const std::filesystem::path& dir);

void write_embeddings(std::ostream& out, std::span<const Dataset* const> parts);
void write_embeddings(const std::filesystem::path& path, const Dataset& ds);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace curvednet
