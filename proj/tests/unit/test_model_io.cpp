#include <gtest/gtest.h>

#include <sstream>

#include "curvednet/model_io.hpp"
#include "expect_error.hpp"

using namespace curvednet;
using curvednet::testing::error_code_of;

namespace {

Model trained(std::string_view arch) {
  ModelConfig cfg = model_config_for(arch, 1.0, -1.0);
  cfg.input_dim = 3;
  cfg.hidden = {8, 5};
  cfg.embed_dim = 4;
  cfg.classes = 2;
  Model m = Model::create(cfg, 17);
  TrainConfig tc;
  tc.epochs = 2;
  (void)train(m, gen_two_gaussians(40, 3, 3.0, 0), tc);
  m.metadata = {{"config.seed", "17"}, {"note", "two words"}};
  return m;
}

std::string dump(const Model& m) {
  std::ostringstream out;
  save_model(out, m);
  return out.str();
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
  for (std::string_view arch : {"baseline", "sio", "hio", "mio", "sit", "hit", "mit"}) {
    const Model m = trained(arch);
    const std::string text = dump(m);
    EXPECT_EQ(text.rfind(kModelMagic, 0), 0u);
    std::istringstream in(text);
    const Model back = load_model(in);
    ASSERT_EQ(back.params().size(), m.params().size());
    for (std::size_t i = 0; i < m.params().size(); ++i) {
      EXPECT_EQ(back.params()[i].name, m.params()[i].name);
      EXPECT_EQ(back.params()[i].shape, m.params()[i].shape);
      EXPECT_EQ(back.params()[i].value, m.params()[i].value);
      EXPECT_EQ(back.params()[i].constraint, m.params()[i].constraint);
    }
    EXPECT_EQ(back.config().geometries, m.config().geometries);
    EXPECT_EQ(back.config().architecture, m.config().architecture);
    EXPECT_EQ(back.metadata, m.metadata);
    EXPECT_EQ(dump(back), text);
    const std::vector<double> x = {0.3, -1.2, 0.8};
    EXPECT_EQ(forward(back, x).branches[0].logits, forward(m, x).branches[0].logits);
  }
}

TEST(ModelIo, StandardizationSurvives) {
  Model m = trained("hio");
  m.set_standardization({1.0, 2.0, 3.0}, {0.5, 0.25, 4.0});
  std::istringstream in(dump(m));
  const Model back = load_model(in);
  EXPECT_EQ(std::vector<double>(back.input_shift().begin(), back.input_shift().end()),
            (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(std::vector<double>(back.input_scale().begin(), back.input_scale().end()),
            (std::vector<double>{0.5, 0.25, 4.0}));
}

TEST(ModelIo, RejectsBadFiles) {
  const auto code = [](const std::string& text) {
    std::istringstream in(text);
    return error_code_of([&] { (void)load_model(in); });
  };
  EXPECT_EQ(code(""), ErrorCode::ModelFormat);
  EXPECT_EQ(code("CURVEDNET-MODEL-v0\n"), ErrorCode::ModelFormat);
  std::string text = dump(trained("hit"));
  EXPECT_EQ(code(text.substr(0, text.size() / 2)), ErrorCode::ModelFormat);
  EXPECT_EQ(error_code_of([] { (void)load_model(std::filesystem::path("/nonexistent/model.txt")); }),
            ErrorCode::IoError);
}
