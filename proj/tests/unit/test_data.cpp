#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "curvednet/data.hpp"
#include "expect_error.hpp"

using namespace curvednet;
using curvednet::testing::error_code_of;

namespace {

std::size_t leaf_of(const std::string& id) { return std::stoul(id.substr(1, 3)); }

std::string what_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

HierarchySpec tiny() {
  HierarchySpec s;
  s.n_super = 2;
  s.n_sub_per_super = 2;
  s.dim = 3;
  s.samples_per_leaf = 10;
  s.ood_leaves = 1;
  return s;
}

}  // namespace

TEST(GenHierarchical, CountingContract) {
  const auto h = gen_hierarchical(tiny(), 0);
  EXPECT_EQ(h.splits.test_ood.size(), 10u);
  EXPECT_EQ(h.splits.train.size() + h.splits.test_id.size(), 30u);
  std::map<std::size_t, int> id_leaves;
  for (const Dataset* ds : {&h.splits.train, &h.splits.test_id}) {
    for (const auto& id : ds->ids) id_leaves[leaf_of(id)]++;
  }
  EXPECT_EQ(id_leaves.size(), 3u);
  for (const auto& id : h.splits.test_ood.ids) EXPECT_EQ(id_leaves.count(leaf_of(id)), 0u);
  for (int l : h.splits.test_ood.labels) EXPECT_EQ(l, kOodLabel);
  for (int l : h.splits.train.labels) EXPECT_GE(l, 0);
  EXPECT_EQ(h.splits.class_count(), 3u);
  EXPECT_EQ(h.splits.train.split, Split::train);
  EXPECT_EQ(h.splits.test_id.split, Split::test_id);
  EXPECT_EQ(h.splits.test_ood.split, Split::test_ood);
}

TEST(GenHierarchical, Deterministic) {
  const auto a = gen_hierarchical(HierarchySpec{}, 7);
  const auto b = gen_hierarchical(HierarchySpec{}, 7);
  EXPECT_EQ(a.splits.train.features, b.splits.train.features);
  EXPECT_EQ(a.splits.test_id.ids, b.splits.test_id.ids);
  EXPECT_EQ(a.splits.test_ood.features, b.splits.test_ood.features);
  const auto c = gen_hierarchical(HierarchySpec{}, 8);
  EXPECT_NE(a.splits.train.features, c.splits.train.features);
}

TEST(GenHierarchical, ZeroNoiseCollapsesLeaves) {
  auto spec = tiny();
  spec.noise_std = 0.0;
  const auto h = gen_hierarchical(spec, 3);
  for (const Dataset* ds : {&h.splits.train, &h.splits.test_id, &h.splits.test_ood}) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const auto c = h.leaf_centers.row(leaf_of(ds->ids[i]));
      const auto x = ds->row(i);
      for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(x[k], c[k]);
    }
  }
}

TEST(GenHierarchical, LeafMeansRecoverCenters) {
  const HierarchySpec spec;
  const auto h = gen_hierarchical(spec, 0);
  const std::size_t leaves = spec.n_super * spec.n_sub_per_super;
  std::vector<std::vector<double>> sums(leaves, std::vector<double>(spec.dim, 0.0));
  std::vector<std::size_t> counts(leaves, 0);
  for (const Dataset* ds : {&h.splits.train, &h.splits.test_id, &h.splits.test_ood}) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const std::size_t l = leaf_of(ds->ids[i]);
      counts[l]++;
      for (std::size_t k = 0; k < spec.dim; ++k) sums[l][k] += ds->row(i)[k];
    }
  }
  const double bound = 4.0 * spec.noise_std / std::sqrt(static_cast<double>(spec.samples_per_leaf));
  for (std::size_t l = 0; l < leaves; ++l) {
    ASSERT_EQ(counts[l], spec.samples_per_leaf);
    for (std::size_t k = 0; k < spec.dim; ++k) {
      EXPECT_LT(std::abs(sums[l][k] / counts[l] - h.leaf_centers(l, k)), bound);
    }
  }
}

TEST(GenHierarchical, BadSpec) {
  auto s = tiny();
  s.ood_leaves = 0;
  EXPECT_EQ(error_code_of([&] { (void)gen_hierarchical(s, 0); }), ErrorCode::BadSpec);
  s = tiny();
  s.ood_leaves = 4;
  EXPECT_EQ(error_code_of([&] { (void)gen_hierarchical(s, 0); }), ErrorCode::BadSpec);
  s = tiny();
  s.noise_std = 3.0;
  EXPECT_EQ(error_code_of([&] { (void)gen_hierarchical(s, 0); }), ErrorCode::BadSpec);
  s = tiny();
  s.n_super = 1;
  s.n_sub_per_super = 1;
  EXPECT_EQ(error_code_of([&] { (void)gen_hierarchical(s, 0); }), ErrorCode::BadSpec);
}

TEST(SplitTrainTest, ExactPerClassCounts) {
  Dataset ds;
  ds.dim = 1;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 100; ++i) ds.push("s" + std::to_string(c * 100 + i), std::vector<double>{double(i)}, c);
  }
  const auto [train, test] = split_train_test(ds, 0.8, 5);
  std::map<int, int> tr;
  std::map<int, int> te;
  for (int l : train.labels) tr[l]++;
  for (int l : test.labels) te[l]++;
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(tr[c], 80);
    EXPECT_EQ(te[c], 20);
  }
  const auto [train2, test2] = split_train_test(ds, 0.8, 5);
  EXPECT_EQ(train.ids, train2.ids);
  EXPECT_EQ(test.ids, test2.ids);
}

TEST(SplitTrainTest, ClassTooSmall) {
  Dataset ds;
  ds.dim = 1;
  for (int i = 0; i < 10; ++i) ds.push("a" + std::to_string(i), std::vector<double>{0.0}, 0);
  ds.push("lonely", std::vector<double>{1.0}, 1);
  EXPECT_EQ(error_code_of([&] { (void)split_train_test(ds, 0.8, 0); }), ErrorCode::ClassTooSmall);
}

TEST(LoadEmbeddings, ThreeRows) {
  std::istringstream in(
      "# curvednet-embeddings v1 dim=2\n"
      "id,split,label,f0,f1\n"
      "a,train,0,0.1,0.2\n"
      "b,test_id,1,-0.5,3\n"
      "c,test_ood,ood,1e-3,2.5\n");
  const auto d = load_embeddings(in);
  EXPECT_EQ(d.train.size() + d.test_id.size() + d.test_ood.size(), 3u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.test_id.row(0)[0], -0.5);
  EXPECT_EQ(d.test_ood.labels[0], kOodLabel);
  EXPECT_EQ(d.test_ood.ids[0], "c");
}

TEST(LoadEmbeddings, DimInconsistentAtLine) {
  std::istringstream in(
      "# curvednet-embeddings v1 dim=2\n"
      "id,split,label,f0,f1\n"
      "a,train,0,0.1,0.2\n"
      "b,train,0,0.1,0.2,0.3\n");
  const std::string msg = what_of([&] { (void)load_embeddings(in); });
  EXPECT_NE(msg.find("DimInconsistent"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(LoadEmbeddings, OodInTrainRejected) {
  std::istringstream in(
      "# curvednet-embeddings v1 dim=1\n"
      "id,split,label,f0\n"
      "a,train,ood,0.1\n");
  EXPECT_EQ(error_code_of([&] { (void)load_embeddings(in); }), ErrorCode::TrainPurity);
}

TEST(LoadEmbeddings, MalformedInputs) {
  const auto code = [](const std::string& text) {
    std::istringstream in(text);
    return error_code_of([&] { (void)load_embeddings(in); });
  };
  EXPECT_EQ(code("id,split,label,f0\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("# curvednet-embeddings v1 dim=1\nid,split,label,f0\na,val,0,1\n"),
            ErrorCode::UnknownSplitTag);
  EXPECT_EQ(code("# curvednet-embeddings v1 dim=1\nid,split,label,f0\na,train,x,1\n"),
            ErrorCode::ParseError);
  EXPECT_EQ(code("# curvednet-embeddings v1 dim=1\nid,split,label,f0\na,train,0,abc\n"),
            ErrorCode::ParseError);
  const std::string msg = what_of([] {
    std::istringstream in("# curvednet-embeddings v1 dim=1\nid,split,label,f0\na,train,0,1\nb,train,0,nope\n");
    (void)load_embeddings(in);
  });
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(Embeddings, WriteLoadRoundTrip) {
  const auto h = gen_hierarchical(tiny(), 11);
  const auto dir = std::filesystem::temp_directory_path() / "curvednet_test_data_rt";
  std::filesystem::create_directories(dir);
  write_embeddings(dir / "train.csv", h.splits.train);
  write_embeddings(dir / "test_id.csv", h.splits.test_id);
  write_embeddings(dir / "test_ood.csv", h.splits.test_ood);
  const auto back = load_embeddings_dir(dir);
  EXPECT_EQ(back.train.features, h.splits.train.features);
  EXPECT_EQ(back.train.labels, h.splits.train.labels);
  EXPECT_EQ(back.test_id.ids, h.splits.test_id.ids);
  EXPECT_EQ(back.test_ood.features, h.splits.test_ood.features);
  std::filesystem::remove_all(dir);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 5e-324}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v) << format_double(v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(GenTwoGaussians, Shape) {
  const auto ds = gen_two_gaussians(200, 3, 6.0, 0);
  EXPECT_EQ(ds.size(), 200u);
  EXPECT_EQ(ds.dim, 3u);
  EXPECT_EQ(ds.class_count(), 2u);
}
