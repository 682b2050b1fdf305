#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lowbend/datasets.hpp"
#include "lowbend/loss.hpp"

namespace lowbend {

/// Network input for a manifold point (chart coordinates or rendered image).
using InputMap = std::function<Eigen::VectorXd(const ManifoldPoint&)>;

InputMap chart_input();
InputMap input_map(const RendererConfig& cfg);

struct LatentCloud {
  std::vector<ManifoldPoint> sources;
  Eigen::MatrixXd codes;  // l x N, one code per column
};

LatentCloud encode_cloud(std::span<const ManifoldPoint> points, const Embedding& phi,
                         const InputMap& input);

struct PcaResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // orthonormal columns, by descending variance
  Eigen::VectorXd variances;
  Eigen::VectorXd explained;   // cumulative fractions, last entry 1
  double total_variance = 0.0;
};

/// Sample covariance (divisor N-1). Each component is signed so that its
/// largest-magnitude entry is positive.
PcaResult pca(const Eigen::MatrixXd& codes);
inline PcaResult pca(const LatentCloud& cloud) { return pca(cloud.codes); }

/// Smallest k with explained[k-1] >= tau; 0 for a zero-variance cloud.
int dims_for_threshold(const PcaResult& p, double tau = 0.99);

/// Explained-variance mass beyond the first k components.
double tail_mass(const PcaResult& p, int k);

struct InterpolationRow {
  double delta = 0.0;
  std::size_t count = 0;
  bool empty = true;
  double err_sq = 0.0;      // mean of err_i^2 - err_b^2 over the bucket (signed)
  double err_sq_all = 0.0;  // same sum divided by the whole test set size
  double err_signed() const;  // sign(err_sq) sqrt|err_sq|
};

/// err(delta)^2 over pairs with d(x, y) <= delta. err_i compares the
/// geodesic midpoint's input with psi of the latent average, err_b with
/// its own reconstruction; both use the mean-square pixel norm.
std::vector<InterpolationRow> interpolation_error(
    ManifoldKind kind, const Embedding& phi, const Embedding& psi, const InputMap& input,
    std::span<const std::pair<ManifoldPoint, ManifoldPoint>> pairs,
    std::span<const double> deltas);

/// Uniform independent pairs on M x M (distinct points).
std::vector<std::pair<ManifoldPoint, ManifoldPoint>> uniform_pairs(ManifoldKind kind,
                                                                   std::size_t n,
                                                                   RngStream& rng);

struct EvalGrid {
  std::vector<ManifoldPoint> points;
  std::vector<Eigen::VectorXd> coords;  // grid parameters for output
  double spacing = 0.0;
};

/// Regular parameter grid with n steps per dimension:
///   KleinBottle  cell centers of [0,1)^2
///   Hemisphere   polar angle x azimuth (4n azimuth steps)
///   EllipseSpace theta x center on [0,pi) x [-1,1]^2
///   Rotations    axis (polar x azimuth) x rotation angle
/// `spacing` is the nominal neighbor distance used as exclusion collar.
EvalGrid evaluation_grid(ManifoldKind kind, int n);

/// min over grid points y with d(x, y) >= min_sep of
/// |P(x) - P(y)| / d(x, y), where P are the projected codes (k x N).
std::vector<double> self_intersection_field(ManifoldKind kind,
                                            std::span<const ManifoldPoint> grid,
                                            const Eigen::MatrixXd& projected, double min_sep);

/// Codes of the grid projected onto `basis` (l x k) after centering at `mean`.
Eigen::MatrixXd project_codes(const Eigen::MatrixXd& codes, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& basis);

struct ScatterRow {
  double manifold_distance = 0.0;
  double latent_distance = 0.0;
};

/// One row per pair with positive manifold distance.
std::vector<ScatterRow> distance_scatter(
    ManifoldKind kind, const Embedding& phi, const InputMap& input,
    std::span<const std::pair<ManifoldPoint, ManifoldPoint>> pairs);

void write_pca_csv(const std::filesystem::path& path, const PcaResult& p);
void write_err_csv(const std::filesystem::path& path, std::span<const InterpolationRow> rows);
void write_scatter_csv(const std::filesystem::path& path, std::span<const ScatterRow> rows);
void write_self_intersection_csv(const std::filesystem::path& path, const EvalGrid& grid,
                                 std::span<const double> field);

}  // namespace lowbend
