#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "lowbend/geometry.hpp"
#include "lowbend/random.hpp"

namespace lowbend {

/// Nodes and positive weights for an integral over a region of R^m.
struct QuadratureRule {
  int dim = 0;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  /// True when the nodes are random draws, so a sampling error is meaningful.
  bool random = false;

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Unit ball (or the annulus r_min <= |w| < 1): Gauss-Legendre in the radius
/// with weight r^(m-1), and on the sphere equispaced angles (m = 2) or
/// Gauss-Legendre in cos(polar) times equispaced azimuth (m = 3).
QuadratureRule radial_angular(int m, int n_r, int n_ang, double r_min = 0.0);

/// n uniform draws in the unit ball (or annulus), each weighted |B|/n.
QuadratureRule mc_ball(int m, std::size_t n, const StreamKey& key, double r_min = 0.0);

/// Tensor Gauss-Legendre rule on an axis-aligned box.
QuadratureRule product_gauss_legendre(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                      int n_per_dim);

struct QuadratureSpec {
  enum class Scheme { MonteCarlo, RadialAngular };
  Scheme scheme = Scheme::RadialAngular;
  std::size_t mc_nodes = 4096;
  std::uint64_t seed = 0;
  int n_r = 6;
  int n_ang = 24;

  QuadratureRule build(int m, double r_min = 0.0) const;
};

}  // namespace lowbend
