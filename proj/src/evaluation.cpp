#include "lowbend/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lowbend/csv.hpp"
#include "lowbend/error.hpp"
#include "lowbend/parallel.hpp"

namespace lowbend {

InputMap chart_input() {
  return [](const ManifoldPoint& p) { return p.coords; };
}

InputMap input_map(const RendererConfig& cfg) {
  if (!cfg.enabled()) return chart_input();
  Renderer render = make_renderer(cfg);
  return [render](const ManifoldPoint& p) { return render(p).values; };
}

LatentCloud encode_cloud(std::span<const ManifoldPoint> points, const Embedding& phi,
                         const InputMap& input) {
  LatentCloud cloud;
  cloud.sources.assign(points.begin(), points.end());
  if (points.empty()) return cloud;
  std::vector<Eigen::VectorXd> codes(points.size());
  parallel_for(points.size(), [&](std::size_t i) { codes[i] = phi(input(points[i])); });
  cloud.codes.resize(codes[0].size(), static_cast<Eigen::Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].size() != cloud.codes.rows())
      throw Error(ErrorCode::ShapeMismatch, "codes of different lengths");
    cloud.codes.col(static_cast<Eigen::Index>(i)) = codes[i];
  }
  return cloud;
}

PcaResult pca(const Eigen::MatrixXd& codes) {
  if (codes.cols() < 2) throw Error(ErrorCode::EmptySampleSet, "PCA needs at least two points");
  PcaResult r;
  r.mean = codes.rowwise().mean();
  const Eigen::MatrixXd centered = codes.colwise() - r.mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / double(codes.cols() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::Index l = cov.rows();
  r.variances.resize(l);
  r.components.resize(l, l);
  for (Eigen::Index k = 0; k < l; ++k) {
    r.variances[k] = std::max(0.0, eig.eigenvalues()[l - 1 - k]);
    Eigen::VectorXd v = eig.eigenvectors().col(l - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    r.components.col(k) = v;
  }
  r.total_variance = r.variances.sum();
  r.explained.resize(l);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < l; ++k) {
    acc += r.variances[k];
    r.explained[k] = r.total_variance > 0 ? acc / r.total_variance : 1.0;
  }
  if (l > 0) r.explained[l - 1] = 1.0;
  return r;
}

int dims_for_threshold(const PcaResult& p, double tau) {
  if (!(p.total_variance > 0)) return 0;
  for (Eigen::Index k = 0; k < p.explained.size(); ++k)
    if (p.explained[k] >= tau) return static_cast<int>(k + 1);
  return static_cast<int>(p.explained.size());
}

double tail_mass(const PcaResult& p, int k) {
  if (k <= 0) return 1.0;
  if (k >= p.explained.size()) return 0.0;
  return 1.0 - p.explained[k - 1];
}

double InterpolationRow::err_signed() const {
  return err_sq < 0 ? -std::sqrt(-err_sq) : std::sqrt(err_sq);
}

std::vector<InterpolationRow> interpolation_error(
    ManifoldKind kind, const Embedding& phi, const Embedding& psi, const InputMap& input,
    std::span<const std::pair<ManifoldPoint, ManifoldPoint>> pairs,
    std::span<const double> deltas) {
  if (pairs.empty()) throw Error(ErrorCode::EmptySampleSet, "interpolation error over no pairs");
  std::vector<double> dist(pairs.size()), excess(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    if (x.kind != kind || y.kind != kind)
      throw Error(ErrorCode::KindMismatch, "pair from another manifold");
    const ManifoldPoint m = mean(x, y);
    const Eigen::VectorXd truth = input(m);
    const Eigen::VectorXd interp = psi(0.5 * (phi(input(x)) + phi(input(y))));
    const Eigen::VectorXd base = psi(phi(truth));
    if (interp.size() != truth.size())
      throw Error(ErrorCode::ShapeMismatch, "decoder output does not match input dimension");
    dist[i] = distance(x, y);
    excess[i] = mean_square(truth - interp) - mean_square(truth - base);
  });
  std::vector<InterpolationRow> rows;
  for (double delta : deltas) {
    InterpolationRow row;
    row.delta = delta;
    std::vector<double> bucket;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (dist[i] <= delta) bucket.push_back(excess[i]);
    row.count = bucket.size();
    row.empty = bucket.empty();
    if (!bucket.empty()) {
      const double s = pairwise_sum(bucket);
      row.err_sq = s / static_cast<double>(bucket.size());
      row.err_sq_all = s / static_cast<double>(pairs.size());
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<ManifoldPoint, ManifoldPoint>> uniform_pairs(ManifoldKind kind,
                                                                   std::size_t n,
                                                                   RngStream& rng) {
  std::vector<std::pair<ManifoldPoint, ManifoldPoint>> out;
  out.reserve(n);
  while (out.size() < n) {
    ManifoldPoint x = sample_uniform(kind, rng);
    ManifoldPoint y = sample_uniform(kind, rng);
    if (distance(x, y) > 0) out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

EvalGrid evaluation_grid(ManifoldKind kind, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 steps");
  constexpr double pi = std::numbers::pi;
  EvalGrid g;
  auto add = [&](Eigen::VectorXd param, const Eigen::VectorXd& coords) {
    g.points.push_back(make_point(kind, coords));
    g.coords.push_back(std::move(param));
  };
  switch (kind) {
    case ManifoldKind::KleinBottle:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Eigen::VectorXd c(2);
          c << (i + 0.5) / n, (j + 0.5) / n;
          add(c, c);
        }
      g.spacing = 1.0 / n;
      break;
    case ManifoldKind::Hemisphere:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < 4 * n; ++j) {
          const double th = (i + 0.5) * 0.5 * pi / n;
          const double az = 2 * pi * j / (4.0 * n);
          Eigen::VectorXd p(2), c(3);
          p << th, az;
          c << std::sin(th) * std::cos(az), std::sin(th) * std::sin(az), std::cos(th);
          add(p, c);
        }
      g.spacing = 0.5 * pi / n;
      break;
    case ManifoldKind::EllipseSpace:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Eigen::VectorXd c(3);
            c << (i + 0.5) * pi / n, -1 + (j + 0.5) * 2.0 / n, -1 + (k + 0.5) * 2.0 / n;
            add(c, c);
          }
      g.spacing = std::min(pi, 2.0) / n;
      break;
    case ManifoldKind::Rotations:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double th = (i + 0.5) * pi / n;
            const double az = 2 * pi * j / n;
            const double angle = (k + 0.5) * pi / n;
            Eigen::VectorXd p(3), c(4);
            p << th, az, angle;
            const double s = std::sin(0.5 * angle);
            c << std::cos(0.5 * angle), s * std::sin(th) * std::cos(az),
                s * std::sin(th) * std::sin(az), s * std::cos(th);
            add(p, c);
          }
      g.spacing = 0.5 * pi / n;
      break;
  }
  return g;
}

Eigen::MatrixXd project_codes(const Eigen::MatrixXd& codes, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& basis) {
  if (basis.rows() != codes.rows() || mean.size() != codes.rows())
    throw Error(ErrorCode::ShapeMismatch, "projection basis does not match code length");
  return basis.transpose() * (codes.colwise() - mean);
}

std::vector<double> self_intersection_field(ManifoldKind kind,
                                            std::span<const ManifoldPoint> grid,
                                            const Eigen::MatrixXd& projected, double min_sep) {
  if (static_cast<Eigen::Index>(grid.size()) != projected.cols())
    throw Error(ErrorCode::ShapeMismatch, "one projected code per grid point expected");
  std::vector<double> field(grid.size(), std::numeric_limits<double>::infinity());
  parallel_for(grid.size(), [&](std::size_t i) {
    if (grid[i].kind != kind) throw Error(ErrorCode::KindMismatch, "grid from another manifold");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j == i) continue;
      const double d = distance(grid[i], grid[j]);
      if (d < min_sep * (1 - 1e-9) || d <= 0) continue;
      const double r = (projected.col(Eigen::Index(i)) - projected.col(Eigen::Index(j))).norm() / d;
      best = std::min(best, r);
    }
    field[i] = best;
  });
  return field;
}

std::vector<ScatterRow> distance_scatter(
    ManifoldKind kind, const Embedding& phi, const InputMap& input,
    std::span<const std::pair<ManifoldPoint, ManifoldPoint>> pairs) {
  std::vector<ScatterRow> rows(pairs.size());
  std::vector<char> keep(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    if (x.kind != kind || y.kind != kind)
      throw Error(ErrorCode::KindMismatch, "pair from another manifold");
    const double d = distance(x, y);
    if (!(d > 0)) return;
    rows[i] = {d, (phi(input(x)) - phi(input(y))).norm()};
    keep[i] = 1;
  });
  std::vector<ScatterRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (keep[i]) out.push_back(rows[i]);
  return out;
}

void write_pca_csv(const std::filesystem::path& path, const PcaResult& p) {
  CsvWriter csv(path, {"component", "variance", "explained"});
  for (Eigen::Index k = 0; k < p.variances.size(); ++k)
    csv.row({double(k + 1), p.variances[k], p.explained[k]});
}

void write_err_csv(const std::filesystem::path& path, std::span<const InterpolationRow> rows) {
  CsvWriter csv(path, {"delta", "count", "empty", "err_sq", "err_sq_all", "err_signed"});
  for (const InterpolationRow& r : rows)
    csv.row_text({format_double(r.delta), std::to_string(r.count), r.empty ? "1" : "0",
                  format_double(r.err_sq), format_double(r.err_sq_all),
                  format_double(r.err_signed())});
}

void write_scatter_csv(const std::filesystem::path& path, std::span<const ScatterRow> rows) {
  CsvWriter csv(path, {"manifold_distance", "latent_distance"});
  for (const ScatterRow& r : rows) csv.row({r.manifold_distance, r.latent_distance});
}

void write_self_intersection_csv(const std::filesystem::path& path, const EvalGrid& grid,
                                 std::span<const double> field) {
  if (field.size() != grid.points.size())
    throw Error(ErrorCode::ShapeMismatch, "one field value per grid point expected");
  std::vector<std::string> header;
  const Eigen::Index k = grid.coords.empty() ? 0 : grid.coords[0].size();
  for (Eigen::Index i = 0; i < k; ++i) header.push_back("u" + std::to_string(i));
  header.push_back("value");
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < field.size(); ++i) {
    std::vector<double> row(grid.coords[i].data(), grid.coords[i].data() + k);
    row.push_back(field[i]);
    csv.row(row);
  }
}

}  // namespace lowbend
