#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

#include "lowbend/loss.hpp"
#include "lowbend/random.hpp"

namespace lowbend {

enum class Activation { Softplus, Tanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Dense feed-forward net: smooth activation on hidden layers, linear output.
/// weights[k] maps layer k (width widths[k]) to layer k+1.
struct EncoderNet {
  std::vector<int> widths;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::Softplus;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  std::size_t layers() const { return weights.size(); }
  std::size_t parameter_count() const;
  /// Throws ShapeMismatch / TrainingDivergence on inconsistent or nonfinite state.
  void validate() const;
};

/// Activations of every layer for a batch (one sample per column).
struct ForwardTape {
  std::vector<Eigen::MatrixXd> pre;   // pre-activations of layers 1..L
  std::vector<Eigen::MatrixXd> post;  // post[0] = input, post[k] = layer k output
};

struct NetGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static NetGradients zeros_like(const EncoderNet& net);
  NetGradients& operator+=(const NetGradients& other);
  NetGradients& operator*=(double s);
};

Eigen::VectorXd forward(const EncoderNet& net, const Eigen::VectorXd& input);
Eigen::MatrixXd forward_batch(const EncoderNet& net, const Eigen::MatrixXd& inputs,
                              ForwardTape* tape = nullptr);

/// Parameter gradients of a scalar loss given d loss / d output for each
/// batch column. If `input_cotangent` is set it receives d loss / d input.
NetGradients backward(const EncoderNet& net, const ForwardTape& tape,
                      const Eigen::MatrixXd& upstream,
                      Eigen::MatrixXd* input_cotangent = nullptr);

/// Weights N(0, 2 / (fan_in (1 + 0.01^2))), biases zero.
EncoderNet init_kaiming(const std::vector<int>& widths, Activation activation, RngStream& rng);

/// All parameters layer by layer: weights (row-major) then bias.
Eigen::VectorXd flatten_parameters(const EncoderNet& net);
void assign_parameters(EncoderNet& net, const Eigen::VectorXd& flat);
Eigen::VectorXd flatten_gradients(const NetGradients& g);

/// Callable view of a net (captures a copy).
Embedding as_embedding(const EncoderNet& net);

struct AdamParams {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;
};

struct AdamState {
  AdamParams hp;
  std::size_t step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;

  static AdamState init(const EncoderNet& net, const AdamParams& hp);
};

/// One Adam step with bias correction; weight decay is added to the raw
/// gradient (L2 penalty form) before the moment updates.
void adam_step(AdamState& state, EncoderNet& net, const NetGradients& grads);

}  // namespace lowbend
