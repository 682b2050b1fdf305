#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>

#include "lowbend/error.hpp"
#include "lowbend/random.hpp"
#include "lowbend/sampling.hpp"

namespace lowbend {

/// A map from an input representation (chart coordinates or a flattened
/// image) into latent space R^l.
using Embedding = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LossWeights {
  double lambda = 1.0;     // bending weight
  double c = 1.0;          // shape parameter of the distortion penalty
  double kappa_rec = 0.0;  // reconstruction weight

  void validate() const;
};

struct LossBreakdown {
  double isometry = 0.0;
  double bending = 0.0;
  double reconstruction = 0.0;
  double total = 0.0;
  std::size_t n_samples = 0;
  double stderr_total = 0.0;
  double stderr_isometry = 0.0;
  double stderr_bending = 0.0;
};

/// total = isometry + lambda * bending + kappa_rec * reconstruction.
double weighted_total(double isometry, double bending, double reconstruction,
                      const LossWeights& w);

/// Distortion penalty s^2 + (1+c^2)^2/(s^2+c^2) - 2 - c^2, evaluated in the
/// equivalent cancellation-free form (s^2-1)^2 / (s^2+c^2).
template <typename Scalar>
Scalar gamma(Scalar s, Scalar c) {
  const Scalar s2 = s * s;
  const Scalar t = s2 - Scalar(1);
  return t * t / (s2 + c * c);
}

template <typename Scalar>
Scalar gamma_derivative(Scalar s, Scalar c) {
  const Scalar s2 = s * s;
  const Scalar q = s2 + c * c;
  return Scalar(2) * s * (s2 - Scalar(1)) * (s2 + Scalar(2) * c * c + Scalar(1)) / (q * q);
}

inline void require_positive_distance(double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::DivisionGuard, "difference quotient at zero distance");
}

/// (phi(y) - phi(x)) / d
template <typename DerivedX, typename DerivedY>
Eigen::VectorXd diff_quotient_1(const Eigen::MatrixBase<DerivedX>& phi_x,
                                const Eigen::MatrixBase<DerivedY>& phi_y, double d) {
  require_positive_distance(d);
  return (phi_y - phi_x) / d;
}

/// 8 ((phi(x) + phi(y))/2 - phi(mid)) / d^2
template <typename DerivedX, typename DerivedY, typename DerivedM>
Eigen::VectorXd diff_quotient_2(const Eigen::MatrixBase<DerivedX>& phi_x,
                                const Eigen::MatrixBase<DerivedY>& phi_y,
                                const Eigen::MatrixBase<DerivedM>& phi_mid, double d) {
  require_positive_distance(d);
  return (8.0 / (d * d)) * (0.5 * (phi_x + phi_y) - phi_mid);
}

Eigen::VectorXd diff_quotient_1(const SampleTriple& t, const Embedding& phi);
Eigen::VectorXd diff_quotient_2(const SampleTriple& t, const Embedding& phi);

/// Per-pair integrand gamma(|dq1|) and |dq2|^2.
struct PairTerms {
  double isometry = 0.0;
  double bending = 0.0;
};

PairTerms pair_terms(const Eigen::VectorXd& phi_x, const Eigen::VectorXd& phi_y,
                     const Eigen::VectorXd& phi_mid, double d, double c);

/// Gradient of isometry + lambda * bending for one pair with respect to the
/// three latent codes.
struct PairGradient {
  PairTerms terms;
  Eigen::VectorXd d_x;
  Eigen::VectorXd d_y;
  Eigen::VectorXd d_mid;
};

PairGradient pair_gradient(const Eigen::VectorXd& phi_x, const Eigen::VectorXd& phi_y,
                           const Eigen::VectorXd& phi_mid, double d, const LossWeights& w);

/// Sample mean of the pair integrand over a finite triple set. The
/// reconstruction term is left at zero.
LossBreakdown discrete_loss(std::span<const SampleTriple> triples, const Embedding& phi,
                            const LossWeights& weights);

/// Squared discrete L2 norm as the mean square over entries.
double mean_square(const Eigen::VectorXd& v);

/// (1 / 2|S|) sum ||psi(phi(x)) - x||^2 + ||psi(phi(y)) - y||^2 with the
/// mean-square pixel norm.
double reconstruction_loss(std::span<const SampleTriple> triples, const Embedding& phi,
                           const Embedding& psi);

/// Monte Carlo estimate of the continuous sampling loss from N fresh pairs.
/// phi acts on chart coordinates. Pairs are drawn in fixed-size chunks, each
/// from its own sub-stream of `key`, so the estimate does not depend on the
/// thread count.
LossBreakdown mc_continuous_loss(ManifoldKind kind, const Embedding& phi,
                                 const SamplingStrategy& strategy, std::size_t n,
                                 const LossWeights& weights, const StreamKey& key);

inline constexpr std::size_t kMcChunk = 4096;

}  // namespace lowbend
