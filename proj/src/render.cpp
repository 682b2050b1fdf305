#include "lowbend/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lowbend/error.hpp"

namespace lowbend {

void validate(const SundialSpec& s) {
  if (s.resolution < 8) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 8");
  if (!(s.rod_height > 0) || !(s.half_width > 0) || !(s.sigma_orth > 0))
    throw Error(ErrorCode::InvalidArgument, "sundial geometry must be positive");
}

void validate(const EllipseSpec& s) {
  if (s.resolution < 8) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 8");
  if (s.mode == EllipseMode::Smooth && !(s.k > 0))
    throw Error(ErrorCode::InvalidArgument, "smooth ellipse needs k > 0");
}

void validate(const SplatSpec& s) {
  if (s.resolution < 8) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 8");
  if (!(s.splat_radius > 0) || !(s.opacity > 0) || s.opacity > 1 || !(s.half_width > 0))
    throw Error(ErrorCode::InvalidArgument, "bad splat parameters");
}

double pixel_center(int i, int n, double w) { return -w + (i + 0.5) * (2.0 * w / n); }

Eigen::Vector2d sundial_shadow_point(const Eigen::Vector3d& p, double rod_height) {
  if (!(p[2] > 0.0))
    throw Error(ErrorCode::BoundaryRender, "light on the horizon casts a shadow at infinity");
  return Eigen::Vector2d(-rod_height * p[0] / p[2], -rod_height * p[1] / p[2]);
}

ImageGrid render_sundial(const ManifoldPoint& p, const SundialSpec& spec) {
  if (p.kind != ManifoldKind::Hemisphere)
    throw Error(ErrorCode::KindMismatch, "sundial images need a hemisphere point");
  validate(spec);
  const Eigen::Vector2d y = sundial_shadow_point(p.coords, spec.rod_height);
  const Eigen::Vector2d c = 0.5 * y;
  const double len = y.norm();
  Eigen::Vector2d u(1.0, 0.0);
  if (len > 0.0) u = y / len;
  const Eigen::Vector2d n(-u[1], u[0]);
  const double s2 = spec.sigma_orth * spec.sigma_orth;
  const double var_along = len * len + s2;

  const int res = spec.resolution;
  ImageGrid img(res, res, 1);
  for (int r = 0; r < res; ++r) {
    const double py = pixel_center(r, res, spec.half_width);
    for (int col = 0; col < res; ++col) {
      const double px = pixel_center(col, res, spec.half_width);
      const double d0 = px - c[0];
      const double d1 = py - c[1];
      const double a = d0 * u[0] + d1 * u[1];
      const double b = d0 * n[0] + d1 * n[1];
      img.at(r, col) = std::exp(-0.5 * (a * a / var_along + b * b / s2));
    }
  }
  return img;
}

ImageGrid render_ellipse(const ManifoldPoint& q, const EllipseSpec& spec) {
  if (q.kind != ManifoldKind::EllipseSpace)
    throw Error(ErrorCode::KindMismatch, "ellipse images need an ellipse-space point");
  validate(spec);
  // A = (I + 2 u u^T) / 10 with u = (cos t, sin t), so
  // A^{-1} = 10 (I - 2/3 u u^T) and u u^T = (I + R(2t)) / 2.
  const double t = q.coords[0];
  const double c2 = std::cos(2 * t);
  const double s2 = std::sin(2 * t);
  const double uu00 = 0.5 * (1 + c2), uu11 = 0.5 * (1 - c2), uu01 = 0.5 * s2;
  const double cx = q.coords[1], cy = q.coords[2];

  const int res = spec.resolution;
  ImageGrid img(res, res, 1);
  for (int r = 0; r < res; ++r) {
    const double py = pixel_center(r, res, 1.0);
    for (int col = 0; col < res; ++col) {
      const double px = pixel_center(col, res, 1.0);
      const double d0 = px - cx, d1 = py - cy;
      const double proj = d0 * d0 * uu00 + 2 * d0 * d1 * uu01 + d1 * d1 * uu11;
      const double quad = 10.0 * (d0 * d0 + d1 * d1 - (2.0 / 3.0) * proj);
      img.at(r, col) = spec.mode == EllipseMode::Binary
                           ? (quad <= 1.0 ? 1.0 : 0.0)
                           : 1.0 / (1.0 + std::exp(-spec.k * (1.0 - quad)));
    }
  }
  return img;
}

namespace {

std::vector<SplatPoint> build_cloud() {
  // A toy animal: elongated body, offset head, one-sided tail and four legs,
  // colored by part and position so no nontrivial rotation maps it to itself.
  std::vector<SplatPoint> cloud;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  auto ellipsoid = [&](int n, Eigen::Vector3d center, Eigen::Vector3d radii,
                       Eigen::Vector3d base_color) {
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(1.0 - z * z);
      const double a = golden * i;
      const Eigen::Vector3d dir(r * std::cos(a), r * std::sin(a), z);
      const Eigen::Vector3d pos = center + radii.cwiseProduct(dir);
      Eigen::Vector3d color = base_color + 0.25 * Eigen::Vector3d(0.5 + 0.5 * dir[0], 0.5 + 0.5 * dir[1],
                                                                   0.5 + 0.5 * dir[2]);
      cloud.push_back({pos, color.cwiseMin(1.0).cwiseMax(0.0)});
    }
  };
  ellipsoid(160, {0.0, 0.0, 0.0}, {0.6, 0.3, 0.28}, {0.55, 0.45, 0.35});
  ellipsoid(60, {0.72, 0.18, 0.12}, {0.2, 0.17, 0.16}, {0.75, 0.2, 0.15});
  ellipsoid(20, {0.85, 0.28, 0.26}, {0.05, 0.05, 0.09}, {0.1, 0.1, 0.7});
  ellipsoid(24, {-0.7, -0.1, 0.2}, {0.18, 0.04, 0.04}, {0.1, 0.6, 0.2});
  const double legs[4][2] = {{0.35, 0.17}, {0.35, -0.17}, {-0.35, 0.17}, {-0.35, -0.17}};
  for (int k = 0; k < 4; ++k)
    ellipsoid(16, {legs[k][0], legs[k][1], -0.42}, {0.06, 0.06, 0.18},
              {0.2 + 0.15 * k, 0.2, 0.5 - 0.1 * k});
  return cloud;
}

}  // namespace

const std::vector<SplatPoint>& splat_cloud() {
  static const std::vector<SplatPoint> cloud = build_cloud();
  return cloud;
}

Eigen::Matrix3d quaternion_matrix(const Eigen::Vector4d& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Eigen::Vector4d quaternion_multiply(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return Eigen::Vector4d(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                         a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                         a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                         a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

ImageGrid render_splat_cloud(const std::vector<SplatPoint>& cloud, const Eigen::Vector4d& q,
                             const SplatSpec& spec) {
  validate(spec);
  const Eigen::Matrix3d rot = quaternion_matrix(q);
  std::vector<Eigen::Vector3d> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = rot * cloud[i].position;
  // painter's order: far (small z) first; index breaks ties
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a][2] < pts[b][2]; });

  const int res = spec.resolution;
  ImageGrid img(res, res, 3);
  const double inv2s2 = 1.0 / (2.0 * spec.splat_radius * spec.splat_radius);
  const double reach = 4.0 * spec.splat_radius;
  const double step = 2.0 * spec.half_width / res;
  for (std::size_t idx : order) {
    const Eigen::Vector3d& p = pts[idx];
    const int c0 = std::max(0, static_cast<int>(std::floor((p[0] - reach + spec.half_width) / step)));
    const int c1 = std::min(res - 1, static_cast<int>(std::floor((p[0] + reach + spec.half_width) / step)));
    const int r0 = std::max(0, static_cast<int>(std::floor((p[1] - reach + spec.half_width) / step)));
    const int r1 = std::min(res - 1, static_cast<int>(std::floor((p[1] + reach + spec.half_width) / step)));
    for (int r = r0; r <= r1; ++r) {
      const double dy = pixel_center(r, res, spec.half_width) - p[1];
      for (int c = c0; c <= c1; ++c) {
        const double dx = pixel_center(c, res, spec.half_width) - p[0];
        const double a = spec.opacity * std::exp(-(dx * dx + dy * dy) * inv2s2);
        for (int ch = 0; ch < 3; ++ch)
          img.at(r, c, ch) = a * cloud[idx].color[ch] + (1.0 - a) * img.at(r, c, ch);
      }
    }
  }
  return img;
}

ImageGrid render_splat(const ManifoldPoint& q, const SplatSpec& spec) {
  if (q.kind != ManifoldKind::Rotations)
    throw Error(ErrorCode::KindMismatch, "splat images need a rotation");
  return render_splat_cloud(splat_cloud(), q.coords, spec);
}

Renderer default_renderer(ManifoldKind kind, int resolution) {
  switch (kind) {
    case ManifoldKind::Hemisphere: {
      SundialSpec s;
      s.resolution = resolution;
      return [s](const ManifoldPoint& p) { return render_sundial(p, s); };
    }
    case ManifoldKind::EllipseSpace: {
      EllipseSpec s;
      s.resolution = resolution;
      return [s](const ManifoldPoint& p) { return render_ellipse(p, s); };
    }
    case ManifoldKind::Rotations: {
      SplatSpec s;
      s.resolution = resolution;
      return [s](const ManifoldPoint& p) { return render_splat(p, s); };
    }
    case ManifoldKind::KleinBottle:
      break;
  }
  throw Error(ErrorCode::UnsupportedKind, "no image renderer for the Klein bottle");
}

}  // namespace lowbend
