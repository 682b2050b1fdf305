#include "lowbend/geometry.hpp"

#include <cmath>

namespace lowbend {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::KindMismatch: return "kind-mismatch";
    case ErrorCode::DegeneratePair: return "degenerate-pair";
    case ErrorCode::OutOfDomain: return "out-of-domain";
    case ErrorCode::SamplingStarvation: return "sampling-starvation";
    case ErrorCode::DivisionGuard: return "division-guard";
    case ErrorCode::EmptySampleSet: return "empty-sample-set";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::TrainingDivergence: return "training-divergence";
    case ErrorCode::BoundaryRender: return "boundary-render";
    case ErrorCode::UnsupportedKind: return "unsupported-kind";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::ConfigParse: return "config-parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Hemisphere: return "Hemisphere";
    case ManifoldKind::Rotations: return "Rotations";
    case ManifoldKind::KleinBottle: return "KleinBottle";
    case ManifoldKind::EllipseSpace: return "EllipseSpace";
  }
  return "?";
}

ManifoldKind kind_from_string(std::string_view name) {
  for (ManifoldKind k : kAllKinds)
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind '" + std::string(name) + "'");
}

int intrinsic_dim(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Hemisphere: return 2;
    case ManifoldKind::Rotations: return 3;
    case ManifoldKind::KleinBottle: return 2;
    case ManifoldKind::EllipseSpace: return 3;
  }
  return 0;
}

int chart_dim(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Hemisphere: return 3;
    case ManifoldKind::Rotations: return 4;
    case ManifoldKind::KleinBottle: return 2;
    case ManifoldKind::EllipseSpace: return 3;
  }
  return 0;
}

double diameter(ManifoldKind kind) {
  const double pi = std::numbers::pi;
  switch (kind) {
    case ManifoldKind::Hemisphere: return pi;
    case ManifoldKind::Rotations: return pi / 2;
    case ManifoldKind::KleinBottle: return 1 / std::sqrt(2.0);
    case ManifoldKind::EllipseSpace: return std::sqrt(pi * pi / 4 + 8);
  }
  return 0;
}

double injectivity_bound(ManifoldKind kind) {
  const double pi = std::numbers::pi;
  switch (kind) {
    case ManifoldKind::Hemisphere: return pi;
    case ManifoldKind::Rotations: return pi / 2;
    case ManifoldKind::KleinBottle: return 0.5;
    case ManifoldKind::EllipseSpace: return pi / 2;
  }
  return 0;
}

double volume(ManifoldKind kind) {
  const double pi = std::numbers::pi;
  switch (kind) {
    case ManifoldKind::Hemisphere: return 2 * pi;
    case ManifoldKind::Rotations: return pi * pi;
    case ManifoldKind::KleinBottle: return 1;
    case ManifoldKind::EllipseSpace: return 4 * pi;
  }
  return 0;
}

bool is_flat(ManifoldKind kind) {
  return kind == ManifoldKind::KleinBottle || kind == ManifoldKind::EllipseSpace;
}

double unit_ball_volume(int m) {
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1);
}

}  // namespace lowbend
