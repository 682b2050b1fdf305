#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "lowbend/geometry.hpp"
#include "lowbend/image.hpp"

namespace lowbend {

/// Shadow of a vertical rod under a light at direction p on the upper
/// hemisphere. The rod foot sits at the window center, the tip at height
/// `rod_height`; the shadow is a Gaussian centered at y/2 with variance
/// |y|^2 + sigma_orth^2 along y and sigma_orth^2 across it, where y is the
/// plane point hit by the line through the tip parallel to p.
struct SundialSpec {
  int resolution = 16;
  double rod_height = 1.0;
  double half_width = 2.0;   // plane window [-w, w]^2
  double sigma_orth = 0.05;  // standard deviation across the shadow
};

enum class EllipseMode { Binary, Smooth };

struct EllipseSpec {
  int resolution = 16;
  EllipseMode mode = EllipseMode::Binary;
  double k = 20.0;  // sharpness of the smooth variant
};

struct SplatPoint {
  Eigen::Vector3d position;
  Eigen::Vector3d color;
};

/// Orthographic Gaussian point-splat rendering of a fixed colored cloud.
struct SplatSpec {
  int resolution = 16;
  double splat_radius = 0.08;  // Gaussian std in view units
  double opacity = 0.9;
  double half_width = 1.2;     // view window [-w, w]^2
};

/// Validates resolution >= 8 and positive parameters.
void validate(const SundialSpec& s);
void validate(const EllipseSpec& s);
void validate(const SplatSpec& s);

/// Pixel-center coordinate of column/row index i on [-w, w] with n pixels.
double pixel_center(int i, int n, double w);

/// Plane point of the tip shadow for light direction p.
Eigen::Vector2d sundial_shadow_point(const Eigen::Vector3d& p, double rod_height);

ImageGrid render_sundial(const ManifoldPoint& p, const SundialSpec& spec = {});
ImageGrid render_ellipse(const ManifoldPoint& q, const EllipseSpec& spec = {});

/// The bundled asymmetric point cloud (deterministic, built from formulas).
const std::vector<SplatPoint>& splat_cloud();
/// 3x3 rotation of a unit quaternion (w, x, y, z).
Eigen::Matrix3d quaternion_matrix(const Eigen::Vector4d& q);
/// Hamilton product.
Eigen::Vector4d quaternion_multiply(const Eigen::Vector4d& a, const Eigen::Vector4d& b);

ImageGrid render_splat(const ManifoldPoint& q, const SplatSpec& spec = {});
/// Renders an arbitrary cloud after rotating it by q.
ImageGrid render_splat_cloud(const std::vector<SplatPoint>& cloud, const Eigen::Vector4d& q,
                             const SplatSpec& spec);

/// Renderer for a kind with the default spec of its dataset; Klein bottle
/// images are not supported.
Renderer default_renderer(ManifoldKind kind, int resolution = 16);

}  // namespace lowbend
