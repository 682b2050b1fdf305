#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowbend/geometry.hpp"
#include "lowbend/loss.hpp"
#include "lowbend/quadrature.hpp"
#include "lowbend/random.hpp"
#include "lowbend/sampling.hpp"

namespace lowbend {

/// A smooth map M -> R^l with closed-form directional derivatives along
/// geodesics. `grad(x, v)` is d/dt phi(exp_x(t v)) and `hess(x, v)` is
/// d^2/dt^2 phi(exp_x(t v)) at t = 0, for v in the chart tangent space.
/// The Lipschitz constants bound the second and third derivative along unit
/// speed geodesics.
struct AnalyticEmbedding {
  ManifoldKind kind = ManifoldKind::Hemisphere;
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> phi;
  std::function<Eigen::VectorXd(const ManifoldPoint&, const Eigen::VectorXd&)> grad;
  std::function<Eigen::VectorXd(const ManifoldPoint&, const Eigen::VectorXd&)> hess;
  double lip_grad = 0.0;
  double lip_hess = 0.0;
  /// Chart patch on which phi is defined (flat kinds whose phi does not
  /// respect the glueing).
  std::optional<ChartWindow> window;

  /// phi evaluated on the geodesic continuation exp_x(v) (no domain checks).
  Eigen::VectorXd along(const ManifoldPoint& x, const Eigen::VectorXd& v) const;
};

// Fixtures with known limit values.

/// s * inclusion of the hemisphere into R^3: gamma(s) isometry, s^2 bending.
AnalyticEmbedding hemisphere_inclusion(double scale = 1.0);
/// q -> vec(q q^T) / sqrt(2): isometric on the rotation group, bending 4.
AnalyticEmbedding rotations_veronese();
/// (cos 2t / 2, sin 2t / 2, y1, y2): isometric, bending 4 E[v_t^4].
AnalyticEmbedding ellipse_circle_lift();
/// Linear isometry A (orthonormal columns) on a flat chart window.
AnalyticEmbedding flat_linear(ManifoldKind kind, const ChartWindow& window,
                              const Eigen::MatrixXd& a);
AnalyticEmbedding flat_linear(ManifoldKind kind, const ChartWindow& window);
/// (p1, p2, amp sin(2 p1 + p2)) on a Klein bottle window.
AnalyticEmbedding flat_sine(const ChartWindow& window, double amp = 0.5);
/// Quadratic chart polynomial (p1^2, p1 p2, p2^2) on a Klein bottle window.
AnalyticEmbedding flat_quadratic(const ChartWindow& window);

/// Default interior window of the Klein bottle chart used by flat fixtures.
ChartWindow klein_window();

/// Integral over M of Gamma(grad phi) + lambda |Hess phi|^2 with the
/// strategy's density limit. Inner ball integral by `quad`; outer integral by
/// product Gauss-Legendre on the chart (flat kinds) or uniform Monte Carlo
/// with `outer_mc` points (curved kinds).
struct LimitOptions {
  QuadratureSpec quad;
  std::size_t outer_mc = std::size_t{1} << 16;
  int outer_gl = 8;
  std::uint64_t seed = 0;
  bool annulus = false;
};

LossBreakdown local_limit_loss(const AnalyticEmbedding& emb, const LossWeights& weights,
                               const SamplingStrategy& strategy, const LimitOptions& opts = {});

/// Central differences of phi along t -> exp_x(t v).
struct DirectionalDerivs {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
};

DirectionalDerivs network_directional_derivs(ManifoldKind kind, const Embedding& phi,
                                             const ManifoldPoint& x, const Eigen::VectorXd& v,
                                             double h);

/// Wraps a black-box map as an AnalyticEmbedding whose derivatives are the
/// finite differences above (Lipschitz constants unknown, set to NaN).
AnalyticEmbedding embedding_from_map(ManifoldKind kind, const Embedding& phi, double h,
                                     std::optional<ChartWindow> window = std::nullopt);

// Log-log regression slope of y against x (positive entries only); NaN if
// fewer than two usable points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Weighted least-squares fit of y by a nondecreasing sequence (pool adjacent
/// violators); `w` are positive weights.
std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w);

struct TaylorRow {
  double radius = 0.0;
  double first_residual = 0.0;   // max |dq1 - g(grad, v)|
  double second_residual = 0.0;  // max |dq2 - g(Hess[v], v)|
};

struct TaylorReport {
  std::vector<TaylorRow> rows;
  double bound_first = 0.0;   // L_grad / 2
  double bound_second = 0.0;  // 5 L_hess / 6
  double max_ratio_first = 0.0;
  double max_ratio_second = 0.0;
  double slope_first = 0.0;
  double slope_second = 0.0;
  bool bounds_hold = false;
};

TaylorReport verify_taylor(const AnalyticEmbedding& emb, const std::vector<double>& radii,
                           std::size_t trials, const StreamKey& key);

struct VolumeRow {
  double epsilon = 0.0;
  double max_error = 0.0;         // numerical det G vs 1 - Ric |w|^2 eps^2 / 3
  double max_error_closed = 0.0;  // closed-form det G vs the same expansion
};

struct VolumeReport {
  std::vector<VolumeRow> rows;
  double slope = 0.0;
};

/// det G_x(Pi_x(eps w)) from a central-difference Jacobian of the normal
/// chart, compared with the second-order expansion; curved kinds only.
VolumeReport verify_volume_expansion(ManifoldKind kind, const std::vector<double>& eps_list,
                                     int n_radii = 8, int n_angles = 16);

/// Numerical det G of the normal chart at x and w.
double normal_chart_det(const ManifoldPoint& x, const Eigen::VectorXd& w, double h = 1e-5);

struct ConvergenceRow {
  double epsilon = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double monotone_fit = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  /// Every |error| within `tolerance_sigmas` standard errors of its
  /// nondecreasing-in-epsilon fit.
  bool within_monotone_fit = false;
};

/// Monte Carlo values of the sampling loss at each epsilon against the local
/// limit. `min_dist_ratio` sets min_dist = ratio * epsilon (annulus family).
ConvergenceReport verify_epsilon_convergence(const AnalyticEmbedding& emb, StrategyTag tag,
                                             const std::vector<double>& eps_list,
                                             const LossWeights& weights, std::size_t n,
                                             const StreamKey& key, double min_dist_ratio = 0.0,
                                             double tolerance_sigmas = 3.0);

struct McRateRow {
  std::size_t n = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

struct McRateReport {
  std::vector<McRateRow> rows;
  double slope = 0.0;
};

McRateReport verify_mc_rate(const AnalyticEmbedding& emb, const SamplingStrategy& strategy,
                            const std::vector<std::size_t>& sizes, const LossWeights& weights,
                            const StreamKey& key);

struct NormEquivalenceReport {
  double c_min = 0.0;  // min |W|_av / |W| over trials
  double c_max = 0.0;
  double op_c_min = 0.0;  // same for unit symmetric operators
  double op_c_max = 0.0;
  double exact_c_min = 0.0;  // sqrt of the extreme eigenvalues of the node moment matrix
  double exact_c_max = 0.0;
  double cone_volume = 0.0;
  bool cauchy_schwarz_holds = false;
};

/// Averaged norms over V = cone_{r0,kappa} / r0 discretized by `nodes` Monte
/// Carlo points; `trials` random unit vectors and unit symmetric operators.
NormEquivalenceReport verify_norm_equivalence(int m, double r0, double kappa, std::size_t trials,
                                              std::size_t nodes, const StreamKey& key);

// CSV emitters (columns: parameter, estimate, stderr, reference, abs_error).
void write_taylor_csv(const std::filesystem::path& path, const TaylorReport& r);
void write_volume_csv(const std::filesystem::path& path, const VolumeReport& r);
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& r);
void write_mc_rate_csv(const std::filesystem::path& path, const McRateReport& r);

}  // namespace lowbend
