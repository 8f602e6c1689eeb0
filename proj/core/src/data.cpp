#include "curvednet/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "curvednet/rng.hpp"

namespace curvednet {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::test_id: return "test_id";
    case Split::test_ood: return "test_ood";
  }
  return "train";
}

Split parse_split(std::string_view tag) {
  if (tag == "train") return Split::train;
  if (tag == "test_id") return Split::test_id;
  if (tag == "test_ood") return Split::test_ood;
  throw Error(ErrorCode::UnknownSplitTag, "unknown split tag '" + std::string(tag) + "'");
}

void Dataset::push(std::string id, std::span<const double> x, int label) {
  if (x.size() != dim) throw Error(ErrorCode::DimInconsistent, "sample dim differs from dataset dim");
  ids.push_back(std::move(id));
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

std::size_t Dataset::class_count() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

std::size_t SplitData::dim() const noexcept {
  if (!train.empty()) return train.dim;
  if (!test_id.empty()) return test_id.dim;
  return test_ood.dim;
}

std::size_t SplitData::class_count() const {
  return std::max(train.class_count(), test_id.class_count());
}

void HierarchySpec::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::BadSpec, what); };
  if (n_super * n_sub_per_super < 2) bad("need at least two leaves");
  if (ood_leaves < 1) bad("need at least one OOD leaf");
  if (ood_leaves >= n_super * n_sub_per_super) bad("OOD leaves must leave an ID leaf");
  if (dim < 1) bad("dim must be positive");
  if (samples_per_leaf < 1) bad("samples_per_leaf must be positive");
  if (!(super_spread > 0.0) || !(sub_spread > 0.0) || !(noise_std >= 0.0)) {
    bad("spreads must be positive and noise_std non-negative");
  }
  if (!(super_spread > noise_std) || !(sub_spread > noise_std)) {
    bad("spreads must exceed noise_std");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) bad("train_fraction must lie in (0, 1)");
}

namespace {

std::string leaf_sample_id(std::size_t leaf, std::size_t k) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "L%03zu-%05zu", leaf, k);
  return buf.data();
}

}  // namespace

HierarchicalData gen_hierarchical(const HierarchySpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const std::size_t d = spec.dim;
  const std::size_t leaves = spec.n_super * spec.n_sub_per_super;

  Matrix supers(spec.n_super, d);
  for (double& v : supers.data()) v = rng.normal(0.0, spec.super_spread);
  HierarchicalData out;
  out.leaf_centers = Matrix(leaves, d);
  for (std::size_t s = 0; s < spec.n_super; ++s) {
    for (std::size_t b = 0; b < spec.n_sub_per_super; ++b) {
      auto c = out.leaf_centers.row(s * spec.n_sub_per_super + b);
      for (std::size_t i = 0; i < d; ++i) c[i] = supers(s, i) + rng.normal(0.0, spec.sub_spread);
    }
  }

  std::vector<std::size_t> order(leaves);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  std::vector<bool> held_out(leaves, false);
  for (std::size_t i = 0; i < spec.ood_leaves; ++i) held_out[order[i]] = true;
  out.leaf_labels.assign(leaves, kOodLabel);
  int next_label = 0;
  for (std::size_t l = 0; l < leaves; ++l) {
    if (!held_out[l]) out.leaf_labels[l] = next_label++;
  }

  Dataset id_all;
  id_all.dim = d;
  id_all.seed = seed;
  Dataset& ood = out.splits.test_ood;
  ood.split = Split::test_ood;
  ood.dim = d;
  ood.seed = seed;
  std::vector<double> x(d);
  for (std::size_t l = 0; l < leaves; ++l) {
    const auto c = out.leaf_centers.row(l);
    for (std::size_t k = 0; k < spec.samples_per_leaf; ++k) {
      for (std::size_t i = 0; i < d; ++i) x[i] = c[i] + spec.noise_std * rng.normal();
      if (held_out[l]) {
        ood.push(leaf_sample_id(l, k), x, kOodLabel);
      } else {
        id_all.push(leaf_sample_id(l, k), x, out.leaf_labels[l]);
      }
    }
  }

  auto [train, test_id] = split_train_test(id_all, spec.train_fraction, seed);
  out.splits.train = std::move(train);
  out.splits.test_id = std::move(test_id);
  const std::string note = "hierarchical " + std::to_string(spec.n_super) + "x" +
                           std::to_string(spec.n_sub_per_super) + " seed " + std::to_string(seed);
  out.splits.train.provenance = note;
  out.splits.test_id.provenance = note;
  ood.provenance = note;
  return out;
}

Dataset gen_two_gaussians(std::size_t samples, std::size_t dim, double separation,
                          std::uint64_t seed) {
  if (samples < 2 || dim < 1) throw Error(ErrorCode::BadSpec, "two-Gaussian set needs samples and dim");
  Rng rng(seed);
  Dataset ds;
  ds.split = Split::train;
  ds.dim = dim;
  ds.seed = seed;
  ds.provenance = "two gaussians seed " + std::to_string(seed);
  std::vector<double> x(dim);
  for (std::size_t k = 0; k < samples; ++k) {
    const int label = static_cast<int>(k % 2);
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.normal();
    x[0] += label == 0 ? -0.5 * separation : 0.5 * separation;
    ds.push("g" + std::to_string(k), x, label);
  }
  return ds;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double fraction,
                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::BadSpec, "split fraction must lie in (0, 1)");
  }
  const std::size_t classes = ds.class_count();
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] < 0) throw Error(ErrorCode::TrainPurity, "cannot split OOD samples into train");
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t c = 0; c < classes; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                      " sample(s); need at least 2 to split");
    }
    rng.shuffle(std::span(members));
    auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + n_train);
    test_idx.insert(test_idx.end(), members.begin() + n_train, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  const auto take = [&](const std::vector<std::size_t>& idx, Split split) {
    Dataset out;
    out.split = split;
    out.dim = ds.dim;
    out.seed = ds.seed;
    out.provenance = ds.provenance;
    for (std::size_t i : idx) out.push(ds.ids[i], ds.row(i), ds.labels[i]);
    return out;
  };
  return {take(train_idx, Split::train), take(test_idx, Split::test_id)};
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

constexpr std::string_view kMagic = "# curvednet-embeddings v1 dim=";

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <class Number>
bool parse_number(std::string_view s, Number& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

SplitData load_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || !line.starts_with(kMagic)) {
    fail(ErrorCode::ParseError, line_no, "missing '# curvednet-embeddings v1 dim=<d>' header");
  }
  std::size_t dim = 0;
  if (!parse_number(std::string_view(line).substr(kMagic.size()), dim) || dim == 0) {
    fail(ErrorCode::ParseError, line_no, "bad dimension in header");
  }

  ++line_no;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, line_no, "missing column header");
  {
    std::string expected = "id,split,label";
    for (std::size_t i = 0; i < dim; ++i) expected += ",f" + std::to_string(i);
    if (line != expected) fail(ErrorCode::ParseError, line_no, "column header does not match dim");
  }

  SplitData out;
  for (Dataset* ds : {&out.train, &out.test_id, &out.test_ood}) ds->dim = dim;
  out.train.split = Split::train;
  out.test_id.split = Split::test_id;
  out.test_ood.split = Split::test_ood;

  std::vector<double> x(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != dim + 3) {
      fail(ErrorCode::DimInconsistent, line_no,
           "expected " + std::to_string(dim) + " features, found " +
               std::to_string(fields.size() < 3 ? 0 : fields.size() - 3));
    }
    Split split;
    try {
      split = parse_split(fields[1]);
    } catch (const Error&) {
      fail(ErrorCode::UnknownSplitTag, line_no, "unknown split tag '" + std::string(fields[1]) + "'");
    }
    int label = kOodLabel;
    if (fields[2] == "ood") {
      if (split == Split::train) {
        fail(ErrorCode::TrainPurity, line_no, "OOD sample in the train split");
      }
      if (split == Split::test_id) fail(ErrorCode::BadLabel, line_no, "OOD label in test_id split");
    } else {
      if (!parse_number(fields[2], label) || label < 0) {
        fail(ErrorCode::ParseError, line_no, "label must be a non-negative integer or 'ood'");
      }
      if (split == Split::test_ood) {
        fail(ErrorCode::BadLabel, line_no, "test_ood rows must carry the label 'ood'");
      }
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_number(fields[3 + i], x[i]) || !std::isfinite(x[i])) {
        fail(ErrorCode::ParseError, line_no, "bad feature value '" + std::string(fields[3 + i]) + "'");
      }
    }
    Dataset& target = split == Split::train     ? out.train
                      : split == Split::test_id ? out.test_id
                                                : out.test_ood;
    target.push(std::string(fields[0]), x, label);
  }
  return out;
}

SplitData load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  auto out = load_embeddings(in);
  for (Dataset* ds : {&out.train, &out.test_id, &out.test_ood}) ds->provenance = path.string();
  return out;
}

SplitData load_embeddings_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) return load_embeddings(dir);
  SplitData out;
  bool first = true;
  for (const char* name : {"train.csv", "test_id.csv", "test_ood.csv"}) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::IoError, "missing data file " + path.string());
    }
    SplitData part = load_embeddings(path);
    if (first) {
      out = std::move(part);
      first = false;
      continue;
    }
    if (part.dim() != out.dim()) {
      throw Error(ErrorCode::DimInconsistent, path.string() + " has a different dim");
    }
    for (auto [dst, src] : {std::pair{&out.train, &part.train}, std::pair{&out.test_id, &part.test_id},
                            std::pair{&out.test_ood, &part.test_ood}}) {
      for (std::size_t i = 0; i < src->size(); ++i) dst->push(src->ids[i], src->row(i), src->labels[i]);
      if (dst->provenance.empty()) dst->provenance = src->provenance;
    }
  }
  return out;
}

void write_embeddings(std::ostream& out, std::span<const Dataset* const> parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to write");
  const std::size_t dim = parts.front()->dim;
  out << kMagic << dim << '\n' << "id,split,label";
  for (std::size_t i = 0; i < dim; ++i) out << ",f" << i;
  out << '\n';
  for (const Dataset* ds : parts) {
    if (ds->dim != dim) throw Error(ErrorCode::DimInconsistent, "datasets differ in dim");
    for (std::size_t r = 0; r < ds->size(); ++r) {
      out << ds->ids[r] << ',' << to_string(ds->split) << ',';
      if (ds->labels[r] < 0) out << "ood"; else out << ds->labels[r];
      for (double v : ds->row(r)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

void write_embeddings(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const Dataset* parts[] = {&ds};
  write_embeddings(out, parts);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace curvednet
