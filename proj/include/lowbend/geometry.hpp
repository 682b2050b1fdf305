#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "lowbend/error.hpp"
#include "lowbend/random.hpp"

namespace lowbend {

// The four test manifolds. All carry the metric induced by their chart:
//   Hemisphere    S^2 with x3 >= 0, unit 3-vectors
//   Rotations     SO(3) as unit quaternions modulo sign, d = arccos|q1.q2|
//   KleinBottle   [0,1)^2 with (x,0)~(x,1) and (0,y)~(1,1-y), flat
//   EllipseSpace  [0,pi) x [-1,1]^2, theta periodic, flat
enum class ManifoldKind { Hemisphere, Rotations, KleinBottle, EllipseSpace };

inline constexpr std::array<ManifoldKind, 4> kAllKinds = {
    ManifoldKind::Hemisphere, ManifoldKind::Rotations, ManifoldKind::KleinBottle,
    ManifoldKind::EllipseSpace};

std::string_view to_string(ManifoldKind kind);
ManifoldKind kind_from_string(std::string_view name);

/// Intrinsic dimension m.
int intrinsic_dim(ManifoldKind kind);
/// Length of the chart coordinate vector.
int chart_dim(ManifoldKind kind);
/// Maximal pairwise distance (an upper bound for EllipseSpace).
double diameter(ManifoldKind kind);
/// Largest radius below which means and log maps are unique.
double injectivity_bound(ManifoldKind kind);
/// Riemannian volume V_g(M); quaternion double-cover convention for Rotations.
double volume(ManifoldKind kind);
bool is_flat(ManifoldKind kind);
/// Lebesgue measure of the unit ball in R^m.
double unit_ball_volume(int m);

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
struct Point {
  ManifoldKind kind;
  Vec<Scalar> coords;
};

template <typename Scalar = double>
struct Tangent {
  Point<Scalar> base;
  Vec<Scalar> vec;
};

using ManifoldPoint = Point<double>;
using TangentVector = Tangent<double>;

/// Axis-aligned box in chart coordinates restricting a flat manifold to a
/// convex patch (a flat manifold with boundary).
struct ChartWindow {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  bool contains(const Eigen::VectorXd& coords) const {
    return (coords.array() >= lo.array()).all() && (coords.array() <= hi.array()).all();
  }
  double volume() const { return (hi - lo).prod(); }
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;

/// Angle between two vectors as atan2(|a ^ b|, a.b); the wedge norm comes
/// from Lagrange's identity so the result is bitwise symmetric.
template <typename Scalar>
Scalar wedge_norm(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  Scalar s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      const Scalar t = a[i] * b[j] - a[j] * b[i];
      s += t * t;
    }
  }
  return std::sqrt(s);
}

template <typename Scalar>
Scalar dot(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  Scalar s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <typename Scalar>
Scalar wrap_unit(Scalar v) {
  Scalar r = v - std::floor(v);
  if (r >= Scalar(1)) r = 0;
  return r;
}

template <typename Scalar>
Scalar wrap_pi(Scalar t) {
  const Scalar p = Scalar(kPi);
  Scalar r = t - p * std::floor(t / p);
  if (r >= p || r < 0) r = 0;
  return r;
}

template <typename Scalar>
void canonicalize_quaternion(Vec<Scalar>& q) {
  q /= std::sqrt(dot(q, q));
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] != Scalar(0)) {
      if (q[i] < Scalar(0)) q = -q;
      return;
    }
  }
}

/// Reduces (u, v) into [0,1)^2 under the Klein bottle group
/// (u, v) -> (u + a, (-1)^a v + b).
template <typename Scalar>
Vec<Scalar> reduce_klein(const Vec<Scalar>& c) {
  Scalar u = c[0];
  Scalar v = c[1];
  long a = static_cast<long>(std::floor(u));
  u -= Scalar(a);
  if (u >= Scalar(1)) {
    u = 0;
    ++a;
  }
  if (a % 2 != 0) v = -v;
  Vec<Scalar> r(2);
  r << u, wrap_unit(v);
  return r;
}

/// Copy of y closest to x in the Klein bottle covering, plus the gap to the
/// second-closest copy (zero gap means the minimal geodesic is not unique).
template <typename Scalar>
struct KleinLift {
  Vec<Scalar> delta;  // copy(y) - x
  Scalar dist_sq;
  Scalar gap_sq;
};

template <typename Scalar>
KleinLift<Scalar> klein_lift(const Vec<Scalar>& x, const Vec<Scalar>& y) {
  KleinLift<Scalar> best{Vec<Scalar>::Zero(2), std::numeric_limits<Scalar>::infinity(),
                         std::numeric_limits<Scalar>::infinity()};
  Scalar second = std::numeric_limits<Scalar>::infinity();
  for (int a = -1; a <= 1; ++a) {
    const Scalar sign = (a % 2 == 0) ? Scalar(1) : Scalar(-1);
    const Scalar du = (y[0] - x[0]) + Scalar(a);
    for (int b = -2; b <= 2; ++b) {
      Scalar dv;
      if (sign > 0) {
        dv = (y[1] - x[1]) + Scalar(b);
      } else {
        dv = -((x[1] + y[1]) - Scalar(b));
      }
      const Scalar d2 = du * du + dv * dv;
      if (d2 < best.dist_sq) {
        second = best.dist_sq;
        best.dist_sq = d2;
        best.delta[0] = du;
        best.delta[1] = dv;
      } else if (d2 < second) {
        second = d2;
      }
    }
  }
  best.gap_sq = second - best.dist_sq;
  return best;
}

/// Minimal-magnitude representative of theta2 - theta1 modulo pi, with the gap
/// to the next candidate.
template <typename Scalar>
std::pair<Scalar, Scalar> theta_lift(Scalar t1, Scalar t2) {
  const Scalar p = Scalar(kPi);
  const Scalar base = t2 - t1;
  const std::array<Scalar, 3> cands = {base, base + p, base - p};
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(cands[i]) < std::abs(cands[best])) best = i;
  Scalar gap = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < 3; ++i)
    if (i != best) gap = std::min(gap, std::abs(cands[i]) - std::abs(cands[best]));
  return {cands[best], gap};
}

inline void require_same_kind(ManifoldKind a, ManifoldKind b) {
  if (a != b)
    throw Error(ErrorCode::KindMismatch, std::string("kind mismatch: ") +
                                             std::string(to_string(a)) + " vs " +
                                             std::string(to_string(b)));
}

}  // namespace detail

/// Brings chart coordinates into the kind's canonical representative:
/// unit norm (sphere kinds), positive leading quaternion entry, fundamental
/// domain (flat kinds).
template <typename Scalar>
Vec<Scalar> canonical_coords(ManifoldKind kind, Vec<Scalar> c) {
  switch (kind) {
    case ManifoldKind::Hemisphere:
      if (c[2] < Scalar(0)) c[2] = 0;
      c /= std::sqrt(detail::dot(c, c));
      return c;
    case ManifoldKind::Rotations:
      detail::canonicalize_quaternion(c);
      return c;
    case ManifoldKind::KleinBottle:
      return detail::reduce_klein(c);
    case ManifoldKind::EllipseSpace:
      c[0] = detail::wrap_pi(c[0]);
      c[1] = std::clamp(c[1], Scalar(-1), Scalar(1));
      c[2] = std::clamp(c[2], Scalar(-1), Scalar(1));
      return c;
  }
  return c;
}

/// Validates coordinates against the kind's invariants (tolerance `tol`) and
/// returns the canonical point.
template <typename Derived>
Point<typename Derived::Scalar> make_point(ManifoldKind kind,
                                           const Eigen::MatrixBase<Derived>& input,
                                           double tol = 1e-9) {
  using Scalar = typename Derived::Scalar;
  const Vec<Scalar> coords = input;
  if (coords.size() != chart_dim(kind))
    throw Error(ErrorCode::ShapeMismatch, "chart coordinate length does not match kind");
  if (!coords.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite coordinates");
  switch (kind) {
    case ManifoldKind::Hemisphere:
      if (std::abs(coords.norm() - 1) > tol || coords[2] < -tol)
        throw Error(ErrorCode::OutOfDomain, "point is not on the upper unit hemisphere");
      break;
    case ManifoldKind::Rotations:
      if (std::abs(coords.norm() - 1) > tol)
        throw Error(ErrorCode::OutOfDomain, "quaternion is not unit length");
      break;
    case ManifoldKind::KleinBottle:
      break;
    case ManifoldKind::EllipseSpace:
      if (std::abs(coords[1]) > 1 + tol || std::abs(coords[2]) > 1 + tol)
        throw Error(ErrorCode::OutOfDomain, "ellipse translation outside [-1,1]^2");
      break;
  }
  return Point<Scalar>{kind, canonical_coords(kind, coords)};
}

template <typename Scalar>
Scalar distance(const Point<Scalar>& x, const Point<Scalar>& y) {
  detail::require_same_kind(x.kind, y.kind);
  const auto& a = x.coords;
  const auto& b = y.coords;
  switch (x.kind) {
    case ManifoldKind::Hemisphere: {
      const Scalar d = detail::dot(a, b);
      const Scalar w = detail::wedge_norm(a, b);
      return std::atan2(w, d);
    }
    case ManifoldKind::Rotations: {
      const Scalar d = std::abs(detail::dot(a, b));
      const Scalar w = detail::wedge_norm(a, b);
      return std::atan2(w, d);
    }
    case ManifoldKind::KleinBottle:
      return std::sqrt(detail::klein_lift(a, b).dist_sq);
    case ManifoldKind::EllipseSpace: {
      const Scalar dt = std::abs(a[0] - b[0]);
      const Scalar p = Scalar(detail::kPi);
      const Scalar t = std::min({dt, std::abs(dt - p), std::abs(dt + p)});
      const Scalar d1 = a[1] - b[1];
      const Scalar d2 = a[2] - b[2];
      return std::sqrt(t * t + (d1 * d1 + d2 * d2));
    }
  }
  return Scalar(0);
}

/// Orthonormal tangent frame at x (columns), realizing the isometry iota_x.
template <typename Scalar>
Mat<Scalar> tangent_frame(const Point<Scalar>& x) {
  const auto& c = x.coords;
  switch (x.kind) {
    case ManifoldKind::Hemisphere: {
      Eigen::Index axis = 0;
      for (Eigen::Index i = 1; i < 3; ++i)
        if (std::abs(c[i]) < std::abs(c[axis])) axis = i;
      Vec<Scalar> a = Vec<Scalar>::Zero(3);
      a[axis] = 1;
      Vec<Scalar> e1 = a - detail::dot(a, c) * c;
      e1 /= e1.norm();
      Eigen::Matrix<Scalar, 3, 1> e2 =
          Eigen::Matrix<Scalar, 3, 1>(c[0], c[1], c[2])
              .cross(Eigen::Matrix<Scalar, 3, 1>(e1[0], e1[1], e1[2]));
      Mat<Scalar> f(3, 2);
      f.col(0) = e1;
      f.col(1) = e2;
      return f;
    }
    case ManifoldKind::Rotations: {
      // Right multiplication by the unit quaternions i, j, k.
      const Scalar a = c[0], b = c[1], cc = c[2], d = c[3];
      Mat<Scalar> f(4, 3);
      f.col(0) << -b, a, d, -cc;
      f.col(1) << -cc, -d, a, b;
      f.col(2) << -d, cc, -b, a;
      return f;
    }
    case ManifoldKind::KleinBottle:
      return Mat<Scalar>::Identity(2, 2);
    case ManifoldKind::EllipseSpace:
      return Mat<Scalar>::Identity(3, 3);
  }
  return {};
}

namespace detail {

template <typename Scalar>
Vec<Scalar> project_tangent(ManifoldKind kind, const Vec<Scalar>& base, const Vec<Scalar>& v) {
  if (kind == ManifoldKind::Hemisphere || kind == ManifoldKind::Rotations)
    return v - dot(base, v) * base;
  return v;
}

template <typename Scalar>
Vec<Scalar> sphere_exp(const Vec<Scalar>& x, const Vec<Scalar>& v) {
  const Scalar r = std::sqrt(dot(v, v));
  if (r == Scalar(0)) return x;
  Vec<Scalar> y = std::cos(r) * x + (std::sin(r) / r) * v;
  return y / std::sqrt(dot(y, y));
}

}  // namespace detail

/// Geodesic continuation without domain checks: the full sphere for the
/// Hemisphere and an unbounded translation box for EllipseSpace. Used by
/// finite-difference stencils that may step just across the boundary.
template <typename Scalar>
Vec<Scalar> exp_map_extended(const Point<Scalar>& x, const Vec<Scalar>& v) {
  const Vec<Scalar> t = detail::project_tangent(x.kind, x.coords, v);
  switch (x.kind) {
    case ManifoldKind::Hemisphere:
    case ManifoldKind::Rotations:
      return detail::sphere_exp(x.coords, t);
    case ManifoldKind::KleinBottle: {
      Vec<Scalar> y = x.coords + t;
      return detail::reduce_klein(y);
    }
    case ManifoldKind::EllipseSpace: {
      Vec<Scalar> y = x.coords + t;
      y[0] = detail::wrap_pi(y[0]);
      return y;
    }
  }
  return x.coords;
}

/// Riemannian exponential. Throws OutOfDomain if the geodesic leaves the
/// manifold (Hemisphere below the equator, EllipseSpace outside the box).
template <typename Scalar>
Point<Scalar> exp_map(const Point<Scalar>& x, const Vec<Scalar>& v) {
  if (v.size() != x.coords.size())
    throw Error(ErrorCode::ShapeMismatch, "tangent vector length does not match chart");
  Vec<Scalar> y = exp_map_extended(x, v);
  switch (x.kind) {
    case ManifoldKind::Hemisphere:
      if (y[2] < Scalar(-1e-12) || v.norm() >= Scalar(detail::kPi))
        throw Error(ErrorCode::OutOfDomain, "geodesic leaves the upper hemisphere");
      break;
    case ManifoldKind::EllipseSpace:
      if (std::abs(y[1]) > Scalar(1 + 1e-12) || std::abs(y[2]) > Scalar(1 + 1e-12))
        throw Error(ErrorCode::OutOfDomain, "geodesic leaves the translation box");
      break;
    default:
      break;
  }
  return Point<Scalar>{x.kind, canonical_coords(x.kind, y)};
}

template <typename Scalar>
Point<Scalar> exp_map(const Point<Scalar>& x, const Tangent<Scalar>& v) {
  detail::require_same_kind(x.kind, v.base.kind);
  return exp_map(x, v.vec);
}

/// Normal coordinates Pi_x(w) = exp_x(iota_x w), w in R^m.
template <typename Scalar>
Point<Scalar> normal_coords(const Point<Scalar>& x, const Vec<Scalar>& w) {
  return exp_map(x, Vec<Scalar>(tangent_frame(x) * w));
}

/// Riemannian logarithm: initial velocity of the unique minimal geodesic.
template <typename Scalar>
Tangent<Scalar> log_map(const Point<Scalar>& x, const Point<Scalar>& y) {
  detail::require_same_kind(x.kind, y.kind);
  const auto& a = x.coords;
  switch (x.kind) {
    case ManifoldKind::Hemisphere:
    case ManifoldKind::Rotations: {
      Vec<Scalar> b = y.coords;
      if (x.kind == ManifoldKind::Rotations) {
        const Scalar d = detail::dot(a, b);
        if (std::abs(d) <= Scalar(1e-14))
          throw Error(ErrorCode::DegeneratePair, "rotations at maximal distance");
        if (d < 0) b = -b;
      }
      const Scalar dist = distance(x, y);
      if (x.kind == ManifoldKind::Hemisphere && dist >= Scalar(detail::kPi) - Scalar(1e-12))
        throw Error(ErrorCode::DegeneratePair, "antipodal points have no unique geodesic");
      Vec<Scalar> v = b - detail::dot(a, b) * a;
      const Scalar n = std::sqrt(detail::dot(v, v));
      if (n == Scalar(0) || dist == Scalar(0)) return {x, Vec<Scalar>::Zero(a.size())};
      return {x, (dist / n) * v};
    }
    case ManifoldKind::KleinBottle: {
      const auto lift = detail::klein_lift(a, y.coords);
      if (lift.gap_sq <= Scalar(1e-12))
        throw Error(ErrorCode::DegeneratePair, "Klein bottle pair on the cut locus");
      return {x, lift.delta};
    }
    case ManifoldKind::EllipseSpace: {
      const auto [dt, gap] = detail::theta_lift(a[0], y.coords[0]);
      if (gap <= Scalar(1e-12))
        throw Error(ErrorCode::DegeneratePair, "ellipse orientations a half-turn apart");
      Vec<Scalar> v(3);
      v << dt, y.coords[1] - a[1], y.coords[2] - a[2];
      return {x, v};
    }
  }
  return {x, Vec<Scalar>::Zero(a.size())};
}

/// Riemannian mean (geodesic midpoint).
template <typename Scalar>
Point<Scalar> mean(const Point<Scalar>& x, const Point<Scalar>& y) {
  detail::require_same_kind(x.kind, y.kind);
  const auto& a = x.coords;
  switch (x.kind) {
    case ManifoldKind::Hemisphere: {
      Vec<Scalar> s = a + y.coords;
      const Scalar n = std::sqrt(detail::dot(s, s));
      if (n < Scalar(1e-10))
        throw Error(ErrorCode::DegeneratePair, "antipodal points have no unique midpoint");
      return {x.kind, canonical_coords(x.kind, Vec<Scalar>(s / n))};
    }
    case ManifoldKind::Rotations: {
      Vec<Scalar> b = y.coords;
      const Scalar d = detail::dot(a, b);
      if (std::abs(d) <= Scalar(1e-14))
        throw Error(ErrorCode::DegeneratePair, "rotations at maximal distance");
      if (d < 0) b = -b;
      Vec<Scalar> s = a + b;
      return {x.kind, canonical_coords(x.kind, Vec<Scalar>(s / std::sqrt(detail::dot(s, s))))};
    }
    case ManifoldKind::KleinBottle:
    case ManifoldKind::EllipseSpace: {
      const Tangent<Scalar> v = log_map(x, y);
      return {x.kind, canonical_coords(x.kind, Vec<Scalar>(a + v.vec / Scalar(2)))};
    }
  }
  return x;
}

template <typename Scalar>
bool in_neighborhood(const Point<Scalar>& x, const Point<Scalar>& y, Scalar eps) {
  return distance(x, y) < eps;
}

/// Uniform draw with respect to the normalized Riemannian volume.
template <typename Scalar = double>
Point<Scalar> sample_uniform(ManifoldKind kind, RngStream& rng) {
  switch (kind) {
    case ManifoldKind::Hemisphere: {
      Vec<Scalar> c(3);
      Scalar n = 0;
      do {
        for (int i = 0; i < 3; ++i) c[i] = Scalar(rng.normal());
        n = std::sqrt(detail::dot(c, c));
      } while (n < Scalar(1e-12));
      c /= n;
      c[2] = std::abs(c[2]);
      return {kind, c};
    }
    case ManifoldKind::Rotations: {
      Vec<Scalar> c(4);
      Scalar n = 0;
      do {
        for (int i = 0; i < 4; ++i) c[i] = Scalar(rng.normal());
        n = std::sqrt(detail::dot(c, c));
      } while (n < Scalar(1e-12));
      return {kind, canonical_coords(kind, c)};
    }
    case ManifoldKind::KleinBottle: {
      Vec<Scalar> c(2);
      c << Scalar(rng.uniform()), Scalar(rng.uniform());
      return {kind, c};
    }
    case ManifoldKind::EllipseSpace: {
      Vec<Scalar> c(3);
      c << Scalar(rng.uniform(0.0, detail::kPi)), Scalar(rng.uniform(-1.0, 1.0)),
          Scalar(rng.uniform(-1.0, 1.0));
      return {kind, c};
    }
  }
  return {kind, Vec<Scalar>()};
}

/// sqrt(det G_x) in normal coordinates at geodesic radius r.
template <typename Scalar>
Scalar volume_factor(ManifoldKind kind, Scalar r) {
  if (is_flat(kind) || r == Scalar(0)) return Scalar(1);
  const Scalar s = std::sin(r) / r;
  return kind == ManifoldKind::Hemisphere ? s : s * s;
}

}  // namespace lowbend
