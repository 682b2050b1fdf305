#include <cmath>

#include "lowbend/limit_verify.hpp"

namespace lowbend {

Eigen::VectorXd AnalyticEmbedding::along(const ManifoldPoint& x, const Eigen::VectorXd& v) const {
  return phi(exp_map_extended(x, v));
}

ChartWindow klein_window() {
  return ChartWindow{Eigen::Vector2d(0.25, 0.25), Eigen::Vector2d(0.75, 0.75)};
}

AnalyticEmbedding hemisphere_inclusion(double scale) {
  AnalyticEmbedding e;
  e.kind = ManifoldKind::Hemisphere;
  e.name = "hemisphere-inclusion";
  e.phi = [scale](const Eigen::VectorXd& c) -> Eigen::VectorXd { return scale * c; };
  e.grad = [scale](const ManifoldPoint&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return scale * v;
  };
  e.hess = [scale](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return -scale * v.squaredNorm() * x.coords;
  };
  e.lip_grad = std::abs(scale);
  e.lip_hess = std::abs(scale);
  return e;
}

namespace {
Eigen::VectorXd flatten(const Eigen::Matrix4d& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), 16);
}
}  // namespace

AnalyticEmbedding rotations_veronese() {
  const double k = 1.0 / std::sqrt(2.0);
  AnalyticEmbedding e;
  e.kind = ManifoldKind::Rotations;
  e.name = "rotations-veronese";
  e.phi = [k](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    const Eigen::Vector4d u = q;
    return k * flatten(u * u.transpose());
  };
  e.grad = [k](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::Vector4d q = x.coords, t = v;
    return k * flatten(t * q.transpose() + q * t.transpose());
  };
  e.hess = [k](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::Vector4d q = x.coords, t = v;
    return 2.0 * k * flatten(t * t.transpose() - t.squaredNorm() * q * q.transpose());
  };
  e.lip_grad = 2.0;
  e.lip_hess = 4.0;
  return e;
}

AnalyticEmbedding ellipse_circle_lift() {
  AnalyticEmbedding e;
  e.kind = ManifoldKind::EllipseSpace;
  e.name = "ellipse-circle-lift";
  e.phi = [](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    Eigen::VectorXd out(4);
    out << 0.5 * std::cos(2 * c[0]), 0.5 * std::sin(2 * c[0]), c[1], c[2];
    return out;
  };
  e.grad = [](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const double t = 2 * x.coords[0];
    Eigen::VectorXd out(4);
    out << -std::sin(t) * v[0], std::cos(t) * v[0], v[1], v[2];
    return out;
  };
  e.hess = [](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const double t = 2 * x.coords[0];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(4);
    out[0] = -2 * std::cos(t) * v[0] * v[0];
    out[1] = -2 * std::sin(t) * v[0] * v[0];
    return out;
  };
  e.lip_grad = 2.0;
  e.lip_hess = 4.0;
  return e;
}

AnalyticEmbedding flat_linear(ManifoldKind kind, const ChartWindow& window,
                              const Eigen::MatrixXd& a) {
  if (!is_flat(kind)) throw Error(ErrorCode::UnsupportedKind, "linear fixture needs a flat kind");
  if (a.cols() != chart_dim(kind)) throw Error(ErrorCode::ShapeMismatch, "linear map width");
  AnalyticEmbedding e;
  e.kind = kind;
  e.name = "flat-linear";
  e.phi = [a](const Eigen::VectorXd& c) -> Eigen::VectorXd { return a * c; };
  e.grad = [a](const ManifoldPoint&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return a * v;
  };
  e.hess = [a](const ManifoldPoint&, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(a.rows());
  };
  e.window = window;
  return e;
}

AnalyticEmbedding flat_linear(ManifoldKind kind, const ChartWindow& window) {
  const int m = chart_dim(kind);
  // A fixed orthonormal frame of an m-plane in R^(m+1).
  Eigen::MatrixXd seed(m + 1, m);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j < m; ++j) seed(i, j) = std::cos(1.0 + 0.7 * i + 1.3 * j * (i + 1));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m + 1, m);
  return flat_linear(kind, window, q);
}

AnalyticEmbedding flat_sine(const ChartWindow& window, double amp) {
  AnalyticEmbedding e;
  e.kind = ManifoldKind::KleinBottle;
  e.name = "flat-sine";
  e.phi = [amp](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    return Eigen::Vector3d(c[0], c[1], amp * std::sin(2 * c[0] + c[1]));
  };
  e.grad = [amp](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const double u = 2 * x.coords[0] + x.coords[1];
    return Eigen::Vector3d(v[0], v[1], amp * std::cos(u) * (2 * v[0] + v[1]));
  };
  e.hess = [amp](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const double u = 2 * x.coords[0] + x.coords[1];
    const double s = 2 * v[0] + v[1];
    return Eigen::Vector3d(0, 0, -amp * std::sin(u) * s * s);
  };
  e.lip_grad = 5.0 * std::abs(amp);
  e.lip_hess = std::pow(5.0, 1.5) * std::abs(amp);
  e.window = window;
  return e;
}

AnalyticEmbedding flat_quadratic(const ChartWindow& window) {
  AnalyticEmbedding e;
  e.kind = ManifoldKind::KleinBottle;
  e.name = "flat-quadratic";
  e.phi = [](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    return Eigen::Vector3d(c[0] * c[0], c[0] * c[1], c[1] * c[1]);
  };
  e.grad = [](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const auto& p = x.coords;
    return Eigen::Vector3d(2 * p[0] * v[0], p[0] * v[1] + p[1] * v[0], 2 * p[1] * v[1]);
  };
  e.hess = [](const ManifoldPoint&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return Eigen::Vector3d(2 * v[0] * v[0], 2 * v[0] * v[1], 2 * v[1] * v[1]);
  };
  e.lip_grad = 2.0;
  e.lip_hess = 0.0;
  e.window = window;
  return e;
}

}  // namespace lowbend
