#include "lowbend/network.hpp"

#include <cmath>
#include <string>

#include "lowbend/error.hpp"

namespace lowbend {

std::string_view to_string(Activation a) {
  return a == Activation::Softplus ? "softplus" : "tanh";
}

Activation activation_from_string(std::string_view name) {
  if (name == "softplus") return Activation::Softplus;
  if (name == "tanh") return Activation::Tanh;
  throw Error(ErrorCode::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

std::size_t EncoderNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  return n;
}

void EncoderNet::validate() const {
  if (widths.size() < 2) throw Error(ErrorCode::ShapeMismatch, "net needs at least two widths");
  if (weights.size() != widths.size() - 1 || biases.size() != weights.size())
    throw Error(ErrorCode::ShapeMismatch, "layer count does not match widths");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k].rows() != widths[k + 1] || weights[k].cols() != widths[k] ||
        biases[k].size() != widths[k + 1])
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(k) + " has wrong shape");
    if (!weights[k].allFinite() || !biases[k].allFinite())
      throw Error(ErrorCode::TrainingDivergence, "non-finite parameters");
  }
}

namespace {

void activate(Activation a, const Eigen::MatrixXd& z, Eigen::MatrixXd& out) {
  if (a == Activation::Tanh) {
    out = z.array().tanh().matrix();
    return;
  }
  // softplus log(1 + e^z), evaluated without overflow
  out = z.unaryExpr([](double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); });
}

Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& post) {
  if (a == Activation::Tanh) return (1.0 - post.array().square()).matrix();
  return z.unaryExpr([](double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  });
}

}  // namespace

NetGradients NetGradients::zeros_like(const EncoderNet& net) {
  NetGradients g;
  for (std::size_t k = 0; k < net.layers(); ++k) {
    g.weights.push_back(Eigen::MatrixXd::Zero(net.weights[k].rows(), net.weights[k].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(net.biases[k].size()));
  }
  return g;
}

NetGradients& NetGradients::operator+=(const NetGradients& other) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] += other.weights[k];
    biases[k] += other.biases[k];
  }
  return *this;
}

NetGradients& NetGradients::operator*=(double s) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] *= s;
    biases[k] *= s;
  }
  return *this;
}

Eigen::MatrixXd forward_batch(const EncoderNet& net, const Eigen::MatrixXd& inputs,
                              ForwardTape* tape) {
  if (inputs.rows() != net.input_dim())
    throw Error(ErrorCode::ShapeMismatch, "input length " + std::to_string(inputs.rows()) +
                                              " does not match net input " +
                                              std::to_string(net.input_dim()));
  Eigen::MatrixXd a = inputs;
  if (tape) {
    tape->pre.clear();
    tape->post.assign(1, inputs);
  }
  const std::size_t last = net.layers() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    Eigen::MatrixXd z = net.weights[k] * a;
    z.colwise() += net.biases[k];
    if (k == last) {
      a = std::move(z);
      if (tape) {
        tape->pre.push_back(a);
        tape->post.push_back(a);
      }
    } else {
      activate(net.activation, z, a);
      if (tape) {
        tape->pre.push_back(std::move(z));
        tape->post.push_back(a);
      }
    }
  }
  return a;
}

Eigen::VectorXd forward(const EncoderNet& net, const Eigen::VectorXd& input) {
  return forward_batch(net, input);
}

NetGradients backward(const EncoderNet& net, const ForwardTape& tape,
                      const Eigen::MatrixXd& upstream, Eigen::MatrixXd* input_cotangent) {
  const std::size_t layers = net.layers();
  if (tape.post.size() != layers + 1 || upstream.rows() != net.output_dim() ||
      upstream.cols() != tape.post.back().cols())
    throw Error(ErrorCode::ShapeMismatch, "cotangent does not match the recorded batch");
  NetGradients g = NetGradients::zeros_like(net);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = layers; k-- > 0;) {
    g.weights[k].noalias() = delta * tape.post[k].transpose();
    g.biases[k] = delta.rowwise().sum();
    if (k == 0 && !input_cotangent) break;
    Eigen::MatrixXd back = net.weights[k].transpose() * delta;
    if (k > 0)
      delta = back.cwiseProduct(activation_slope(net.activation, tape.pre[k - 1], tape.post[k]));
    else
      *input_cotangent = std::move(back);
  }
  return g;
}

EncoderNet init_kaiming(const std::vector<int>& widths, Activation activation, RngStream& rng) {
  if (widths.size() < 2) throw Error(ErrorCode::InvalidArgument, "net needs at least two widths");
  EncoderNet net;
  net.widths = widths;
  net.activation = activation;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    if (widths[k] < 1 || widths[k + 1] < 1)
      throw Error(ErrorCode::InvalidArgument, "layer widths must be positive");
    const double sd = std::sqrt(2.0) / std::sqrt(widths[k] * (1.0 + 0.01 * 0.01));
    Eigen::MatrixXd w(widths[k + 1], widths[k]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = sd * rng.normal();
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(widths[k + 1]));
  }
  return net;
}

Eigen::VectorXd flatten_parameters(const EncoderNet& net) {
  Eigen::VectorXd flat(net.parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < net.layers(); ++k) {
    const auto& w = net.weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) flat[pos++] = w(i, j);
    flat.segment(pos, net.biases[k].size()) = net.biases[k];
    pos += net.biases[k].size();
  }
  return flat;
}

void assign_parameters(EncoderNet& net, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != net.parameter_count())
    throw Error(ErrorCode::ShapeMismatch, "parameter vector length mismatch");
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < net.layers(); ++k) {
    auto& w = net.weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = flat[pos++];
    net.biases[k] = flat.segment(pos, net.biases[k].size());
    pos += net.biases[k].size();
  }
}

Eigen::VectorXd flatten_gradients(const NetGradients& g) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < g.weights.size(); ++k) n += g.weights[k].size() + g.biases[k].size();
  Eigen::VectorXd flat(n);
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    const auto& w = g.weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) flat[pos++] = w(i, j);
    flat.segment(pos, g.biases[k].size()) = g.biases[k];
    pos += g.biases[k].size();
  }
  return flat;
}

Embedding as_embedding(const EncoderNet& net) {
  return [net](const Eigen::VectorXd& x) -> Eigen::VectorXd { return forward(net, x); };
}

AdamState AdamState::init(const EncoderNet& net, const AdamParams& hp) {
  AdamState s;
  s.hp = hp;
  s.m = Eigen::VectorXd::Zero(net.parameter_count());
  s.v = Eigen::VectorXd::Zero(net.parameter_count());
  return s;
}

void adam_step(AdamState& state, EncoderNet& net, const NetGradients& grads) {
  Eigen::VectorXd theta = flatten_parameters(net);
  Eigen::VectorXd g = flatten_gradients(grads);
  if (g.size() != theta.size() || state.m.size() != theta.size())
    throw Error(ErrorCode::ShapeMismatch, "gradient shape does not match the net");
  if (!g.allFinite()) throw Error(ErrorCode::TrainingDivergence, "non-finite gradient");
  const AdamParams& hp = state.hp;
  if (hp.weight_decay != 0.0) g += hp.weight_decay * theta;
  ++state.step;
  state.m = hp.beta1 * state.m + (1.0 - hp.beta1) * g;
  state.v = hp.beta2 * state.v + (1.0 - hp.beta2) * g.cwiseProduct(g);
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hp.beta1, t);
  const double c2 = 1.0 - std::pow(hp.beta2, t);
  const Eigen::ArrayXd mhat = state.m.array() / c1;
  const Eigen::ArrayXd vhat = state.v.array() / c2;
  theta.array() -= hp.lr * mhat / (vhat.sqrt() + hp.eps);
  if (!theta.allFinite()) throw Error(ErrorCode::TrainingDivergence, "non-finite parameters");
  assign_parameters(net, theta);
}

}  // namespace lowbend
