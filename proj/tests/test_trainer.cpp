#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <vector>

#include "lowbend/csv.hpp"
#include "lowbend/limit_verify.hpp"
#include "lowbend/trainer.hpp"

using namespace lowbend;

namespace {

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig c;
  c.kind = ManifoldKind::KleinBottle;
  c.strategy.tag = StrategyTag::S1;
  c.strategy.epsilon = 0.2;
  c.strategy.min_dist = 0.01;
  c.strategy.window = klein_window();
  c.weights = {0.0, 1.0, 0.0};
  c.encoder_hidden = {16, 16};
  c.latent = 2;
  c.epochs = 8;
  c.epoch_size = 512;
  c.batch = 32;
  c.test_size = 256;
  c.patience = 0;
  c.adam.lr = 3e-3;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Trainer, ModeNames) {
  for (TrainMode m : {TrainMode::EncoderOnly, TrainMode::Joint, TrainMode::DecoderAfter})
    EXPECT_EQ(train_mode_from_string(to_string(m)), m);
}

TEST(Trainer, WidthsAndValidation) {
  TrainConfig c = small_config(1);
  c.encoder_hidden = {8, 4};
  EXPECT_EQ(c.encoder_widths(), (std::vector<int>{2, 8, 4, 2}));
  EXPECT_EQ(c.decoder_widths(), (std::vector<int>{2, 4, 8, 2}));
  c.mode = TrainMode::Joint;
  c.weights.kappa_rec = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c.weights.kappa_rec = 1.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(Trainer, StackInputsLayout) {
  SamplingStrategy s;
  s.epsilon = 0.2;
  RngStream rng(StreamKey(1, "stack"));
  const auto tr = sample_triples(ManifoldKind::KleinBottle, s, 3, rng);
  const Eigen::MatrixXd x = stack_inputs(tr);
  ASSERT_EQ(x.cols(), 9);
  EXPECT_EQ(Eigen::VectorXd(x.col(1)), tr[1].x.coords);
  EXPECT_EQ(Eigen::VectorXd(x.col(4)), tr[1].y.coords);
  EXPECT_EQ(Eigen::VectorXd(x.col(7)), tr[1].mid.coords);
}

TEST(Trainer, EvaluateMatchesDiscreteLoss) {
  const TrainConfig c = small_config(2);
  RngStream init(StreamKey(2, "init"));
  const EncoderNet net = init_kaiming(c.encoder_widths(), c.activation, init);
  RngStream rng(StreamKey(2, "data"));
  const auto tr = sample_triples(c.kind, c.strategy, 3000, rng);
  const LossWeights w{0.5, 1.0, 0.0};
  const LossBreakdown a = evaluate_nets(net, nullptr, tr, w);
  const LossBreakdown b = discrete_loss(tr, as_embedding(net), w);
  EXPECT_NEAR(a.isometry, b.isometry, 1e-12 * b.isometry);
  EXPECT_NEAR(a.bending, b.bending, 1e-12 * std::max(b.bending, 1e-300));
  EXPECT_NEAR(a.total, b.total, 1e-12 * b.total);
}

TEST(Trainer, DeterministicLog) {
  const TrainResult a = train(small_config(3));
  const TrainResult b = train(small_config(3));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train.total, b.log[i].train.total);
    EXPECT_EQ(a.log[i].test.isometry, b.log[i].test.isometry);
  }
  EXPECT_EQ(flatten_parameters(a.encoder), flatten_parameters(b.encoder));
}

TEST(Trainer, IsometryDecreasesOnFlatKind) {
  std::vector<double> ratios;
  for (std::uint64_t seed : {11, 12, 13}) {
    const TrainResult r = train(small_config(seed));
    ratios.push_back(r.log.back().test.isometry / r.initial_test.isometry);
  }
  std::sort(ratios.begin(), ratios.end());
  EXPECT_LT(ratios[1], 1.0);
}

TEST(Trainer, DecoderAfterKeepsEncoderPhase) {
  TrainConfig enc = small_config(4);
  enc.epochs = 3;
  TrainConfig both = enc;
  both.mode = TrainMode::DecoderAfter;
  both.decoder_epochs = 2;
  const TrainResult a = train(enc);
  const TrainResult b = train(both);
  ASSERT_TRUE(b.decoder.has_value());
  EXPECT_FALSE(a.decoder.has_value());
  EXPECT_EQ(flatten_parameters(a.encoder), flatten_parameters(b.encoder));
  ASSERT_EQ(b.log.size(), 5u);
  for (std::size_t i = 0; i < b.log.size(); ++i) {
    EXPECT_EQ(b.log[i].epoch, i + 1);
    EXPECT_EQ(b.log[i].decoder_phase, i >= 3);
  }
  EXPECT_GT(b.log.back().test.reconstruction, 0.0);
}

TEST(Trainer, EarlyStoppingRestoresBest) {
  TrainConfig c = small_config(5);
  c.adam.lr = 0.5;  // unstable on purpose
  c.epochs = 30;
  c.patience = 2;
  const TrainResult r = train(c);
  double best = r.initial_test.total;
  for (const auto& e : r.log) best = std::min(best, e.test.total);
  if (r.stopped_early) EXPECT_EQ(r.log.size() - r.best_epoch, c.patience);
  if (r.best_epoch > 0) {
    const auto it = std::find_if(r.log.begin(), r.log.end(), [&](const EpochLog& e) { return e.epoch == r.best_epoch; });
    ASSERT_NE(it, r.log.end());
    EXPECT_EQ(it->test.total, best);
  }
  EXPECT_LE(r.log.size(), 30u);
}

TEST(Trainer, LogCsv) {
  const TrainResult r = train(small_config(6));
  const auto path = std::filesystem::temp_directory_path() / "lowbend_training_log.csv";
  write_training_log(path, r.log);
  const CsvTable t = read_csv(path);
  EXPECT_EQ(t.header, (std::vector<std::string>{"epoch", "phase", "isometry", "bending", "reconstruction", "total",
                                                "test_isometry", "test_bending", "test_reconstruction", "test_total"}));
  EXPECT_EQ(t.rows.size(), r.log.size());
  std::filesystem::remove(path);
}
