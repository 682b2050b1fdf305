#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lowbend/network.hpp"

using namespace lowbend;

namespace {

EncoderNet random_net(const std::vector<int>& widths, Activation act, std::uint64_t seed) {
  RngStream rng(StreamKey(seed, "net"));
  EncoderNet net = init_kaiming(widths, act, rng);
  for (auto& b : net.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.3 * rng.normal();
  return net;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, RngStream& rng) {
  return Eigen::MatrixXd::NullaryExpr(r, c, [&] { return rng.normal(); });
}

// Scalar probe loss sum(C .* net(X)).
double probe(const EncoderNet& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  return forward_batch(net, x).cwiseProduct(c).sum();
}

}  // namespace

TEST(Network, ActivationNames) {
  for (Activation a : {Activation::Softplus, Activation::Tanh}) EXPECT_EQ(activation_from_string(to_string(a)), a);
  EXPECT_THROW(activation_from_string("relu"), Error);
}

TEST(Network, KaimingInit) {
  RngStream rng(StreamKey(1, "kaiming"));
  const EncoderNet net = init_kaiming({512, 512}, Activation::Softplus, rng);
  const Eigen::ArrayXd w = net.weights[0].reshaped().array();
  const double mean = w.mean();
  const double sd = std::sqrt((w - mean).square().sum() / (w.size() - 1));
  const double expect = std::sqrt(2.0 / (512 * (1 + 0.01 * 0.01)));
  EXPECT_NEAR(sd, expect, 0.05 * expect);
  EXPECT_EQ(net.biases[0].cwiseAbs().maxCoeff(), 0.0);

  RngStream a(StreamKey(2, "same")), b(StreamKey(2, "same"));
  const EncoderNet na = init_kaiming({4, 16, 3}, Activation::Tanh, a);
  const EncoderNet nb = init_kaiming({4, 16, 3}, Activation::Tanh, b);
  EXPECT_EQ(flatten_parameters(na), flatten_parameters(nb));
}

TEST(Network, IdentityLayer) {
  EncoderNet net;
  net.widths = {3, 3};
  net.weights = {Eigen::MatrixXd::Identity(3, 3)};
  net.biases = {Eigen::VectorXd::Zero(3)};
  const Eigen::Vector3d x(0.2, -1.5, 4.0);
  EXPECT_EQ(forward(net, x), Eigen::VectorXd(x));
}

TEST(Network, BatchMatchesSingle) {
  const EncoderNet net = random_net({3, 8, 8, 2}, Activation::Softplus, 3);
  RngStream rng(StreamKey(3, "batch"));
  const Eigen::MatrixXd x = random_matrix(3, 5, rng);
  const Eigen::MatrixXd out = forward_batch(net, x);
  for (int j = 0; j < 5; ++j) EXPECT_LE((out.col(j) - forward(net, x.col(j))).norm(), 1e-15);
}

TEST(Network, OutputLayerHomogeneous) {
  EncoderNet net = random_net({3, 8, 2}, Activation::Tanh, 4);
  net.biases.back().setZero();
  const Eigen::Vector3d x(0.5, 0.1, -0.3);
  const Eigen::VectorXd y = forward(net, x);
  net.weights.back() *= 2;
  EXPECT_LE((forward(net, x) - 2 * y).norm(), 1e-15);
}

TEST(Network, BackwardMatchesFiniteDifferences) {
  for (Activation act : {Activation::Softplus, Activation::Tanh}) {
    EncoderNet net = random_net({4, 7, 6, 3}, act, 5);
    RngStream rng(StreamKey(5, to_string(act)));
    const Eigen::MatrixXd x = random_matrix(4, 6, rng);
    const Eigen::MatrixXd c = random_matrix(3, 6, rng);
    ForwardTape tape;
    forward_batch(net, x, &tape);
    Eigen::MatrixXd dx;
    const Eigen::VectorXd an = flatten_gradients(backward(net, tape, c, &dx));
    const Eigen::VectorXd theta = flatten_parameters(net);
    const double h = 1e-5;
    double worst = 0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      assign_parameters(net, tp);
      const double fp = probe(net, x, c);
      assign_parameters(net, tm);
      const double fm = probe(net, x, c);
      const double fd = (fp - fm) / (2 * h);
      worst = std::max(worst, std::abs(fd - an[i]) / std::max({std::abs(fd), std::abs(an[i]), 1e-8}));
    }
    assign_parameters(net, theta);
    EXPECT_LE(worst, 1e-5) << to_string(act);

    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Eigen::MatrixXd xp = x, xm = x;
        xp(i, j) += h;
        xm(i, j) -= h;
        const double fd = (probe(net, xp, c) - probe(net, xm, c)) / (2 * h);
        EXPECT_NEAR(dx(i, j), fd, 1e-7 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(Network, ParameterFlattening) {
  EncoderNet net = random_net({2, 5, 3}, Activation::Softplus, 6);
  EXPECT_EQ(net.parameter_count(), 2u * 5 + 5 + 5 * 3 + 3);
  Eigen::VectorXd theta = flatten_parameters(net);
  ASSERT_EQ(static_cast<std::size_t>(theta.size()), net.parameter_count());
  theta *= -1;
  assign_parameters(net, theta);
  EXPECT_EQ(flatten_parameters(net), theta);
  EXPECT_THROW(assign_parameters(net, Eigen::VectorXd::Zero(3)), Error);
}

TEST(Network, ValidateCatchesBadState) {
  EncoderNet net = random_net({2, 4, 1}, Activation::Tanh, 7);
  EXPECT_NO_THROW(net.validate());
  net.weights[0](0, 0) = std::nan("");
  EXPECT_THROW(net.validate(), Error);
  net = random_net({2, 4, 1}, Activation::Tanh, 7);
  net.biases[1] = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(net.validate(), Error);
}

TEST(Network, AdamFirstStep) {
  EncoderNet net;
  net.widths = {1, 1};
  net.weights = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  net.biases = {Eigen::VectorXd::Zero(1)};
  AdamParams hp;
  hp.lr = 1e-3;
  hp.weight_decay = 0.0;
  AdamState st = AdamState::init(net, hp);
  NetGradients g = NetGradients::zeros_like(net);
  const double gw = 2.5;
  g.weights[0](0, 0) = gw;
  adam_step(st, net, g);
  // m_hat = g and v_hat = g^2 after bias correction
  EXPECT_NEAR(net.weights[0](0, 0), 0.5 - hp.lr * gw / (std::abs(gw) + hp.eps), 1e-16);
  EXPECT_NEAR(net.weights[0](0, 0), 0.5 - hp.lr, 1e-10);
  EXPECT_EQ(net.biases[0][0], 0.0);
}

TEST(Network, AdamZeroGradientNoDecay) {
  EncoderNet net = random_net({3, 4, 2}, Activation::Softplus, 8);
  const Eigen::VectorXd before = flatten_parameters(net);
  AdamParams hp;
  hp.weight_decay = 0.0;
  AdamState st = AdamState::init(net, hp);
  for (int i = 0; i < 5; ++i) adam_step(st, net, NetGradients::zeros_like(net));
  EXPECT_EQ(flatten_parameters(net), before);
}

TEST(Network, AdamWeightDecayShrinks) {
  EncoderNet net = random_net({3, 4, 2}, Activation::Softplus, 9);
  AdamParams hp;
  hp.lr = 1e-3;
  hp.weight_decay = 0.1;
  AdamState st = AdamState::init(net, hp);
  Eigen::VectorXd prev = flatten_parameters(net);
  for (int step = 0; step < 30; ++step) {
    adam_step(st, net, NetGradients::zeros_like(net));
    const Eigen::VectorXd cur = flatten_parameters(net);
    for (Eigen::Index i = 0; i < cur.size(); ++i) {
      if (std::abs(prev[i]) < 50 * hp.lr) continue;
      EXPECT_LT(std::abs(cur[i]), std::abs(prev[i]));
      EXPECT_EQ(std::signbit(cur[i]), std::signbit(prev[i]));
    }
    prev = cur;
  }
}

TEST(Network, AdamRejectsNonFiniteGradient) {
  EncoderNet net = random_net({2, 2}, Activation::Tanh, 10);
  AdamState st = AdamState::init(net, {});
  NetGradients g = NetGradients::zeros_like(net);
  g.weights[0](0, 0) = std::numeric_limits<double>::infinity();
  try {
    adam_step(st, net, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrainingDivergence);
  }
}
