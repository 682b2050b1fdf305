#pragma once

#include <Eigen/Dense>

#include <functional>

#include "lowbend/geometry.hpp"

namespace lowbend {

/// Row-major pixel grid, channels interleaved per pixel, values in [0,1].
struct ImageGrid {
  int width = 0;
  int height = 0;
  int channels = 1;
  Eigen::VectorXd values;

  ImageGrid() = default;
  ImageGrid(int w, int h, int c)
      : width(w), height(h), channels(c), values(Eigen::VectorXd::Zero(Eigen::Index(w) * h * c)) {}

  Eigen::Index index(int row, int col, int ch = 0) const {
    return (Eigen::Index(row) * width + col) * channels + ch;
  }
  double& at(int row, int col, int ch = 0) { return values[index(row, col, ch)]; }
  double at(int row, int col, int ch = 0) const { return values[index(row, col, ch)]; }
  Eigen::Index size() const { return values.size(); }
};

/// Maps a manifold point to its image representation.
using Renderer = std::function<ImageGrid(const ManifoldPoint&)>;

}  // namespace lowbend
