#include "lowbend/quadrature.hpp"

#include <cmath>

#include "lowbend/error.hpp"
#include "lowbend/parallel.hpp"

namespace lowbend {

double QuadratureRule::weight_sum() const { return pairwise_sum(weights); }

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre needs n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureRule radial_angular(int m, int n_r, int n_ang, double r_min) {
  if (m != 2 && m != 3)
    throw Error(ErrorCode::InvalidArgument, "radial-angular rule is built for m = 2 or 3");
  if (n_r < 1 || n_ang < 1 || r_min < 0.0 || r_min >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "bad radial-angular parameters");
  std::vector<double> gr, gw;
  gauss_legendre(n_r, gr, gw);
  const double half = 0.5 * (1.0 - r_min);
  const double pi = std::numbers::pi;

  QuadratureRule rule;
  rule.dim = m;
  for (int i = 0; i < n_r; ++i) {
    const double r = r_min + half * (gr[i] + 1.0);
    const double wr = half * gw[i] * std::pow(r, m - 1);
    if (m == 2) {
      for (int a = 0; a < n_ang; ++a) {
        const double t = 2.0 * pi * (a + 0.5) / n_ang;
        rule.nodes.push_back(Eigen::Vector2d(r * std::cos(t), r * std::sin(t)));
        rule.weights.push_back(wr * 2.0 * pi / n_ang);
      }
    } else {
      std::vector<double> ct, cw;
      gauss_legendre(n_ang, ct, cw);
      const int n_az = 2 * n_ang;
      for (int p = 0; p < n_ang; ++p) {
        const double st = std::sqrt(1.0 - ct[p] * ct[p]);
        for (int a = 0; a < n_az; ++a) {
          const double f = 2.0 * pi * (a + 0.5) / n_az;
          rule.nodes.push_back(
              Eigen::Vector3d(r * st * std::cos(f), r * st * std::sin(f), r * ct[p]));
          rule.weights.push_back(wr * cw[p] * 2.0 * pi / n_az);
        }
      }
    }
  }
  return rule;
}

QuadratureRule mc_ball(int m, std::size_t n, const StreamKey& key, double r_min) {
  if (m < 1 || n == 0 || r_min < 0.0 || r_min >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "bad Monte Carlo ball parameters");
  RngStream rng(key);
  QuadratureRule rule;
  rule.dim = m;
  rule.random = true;
  const double vol = unit_ball_volume(m) * (1.0 - std::pow(r_min, m));
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd w(m);
    double len = 0.0;
    do {
      for (int k = 0; k < m; ++k) w[k] = rng.normal();
      len = w.norm();
    } while (len < 1e-12);
    // radius law r^m uniform on [r_min^m, 1]
    const double u = rng.uniform();
    const double r = std::pow(std::pow(r_min, m) + u * (1.0 - std::pow(r_min, m)), 1.0 / m);
    rule.nodes.push_back((r / len) * w);
    rule.weights.push_back(vol / static_cast<double>(n));
  }
  return rule;
}

QuadratureRule product_gauss_legendre(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                      int n_per_dim) {
  const int d = static_cast<int>(lo.size());
  if (d < 1 || hi.size() != d) throw Error(ErrorCode::ShapeMismatch, "box bounds mismatch");
  std::vector<double> g, gw;
  gauss_legendre(n_per_dim, g, gw);
  QuadratureRule rule;
  rule.dim = d;
  std::vector<int> idx(d, 0);
  while (true) {
    Eigen::VectorXd p(d);
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const double half = 0.5 * (hi[k] - lo[k]);
      p[k] = lo[k] + half * (g[idx[k]] + 1.0);
      w *= half * gw[idx[k]];
    }
    rule.nodes.push_back(p);
    rule.weights.push_back(w);
    int k = 0;
    while (k < d && ++idx[k] == n_per_dim) idx[k++] = 0;
    if (k == d) break;
  }
  return rule;
}

QuadratureRule QuadratureSpec::build(int m, double r_min) const {
  if (scheme == Scheme::MonteCarlo) return mc_ball(m, mc_nodes, StreamKey(seed, "ball-nodes"), r_min);
  return radial_angular(m, n_r, n_ang, r_min);
}

}  // namespace lowbend
