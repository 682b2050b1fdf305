#include "lowbend/limit_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowbend/csv.hpp"
#include "lowbend/parallel.hpp"

namespace lowbend {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Chart box covering the whole fundamental domain of a flat kind.
ChartWindow full_chart(ManifoldKind kind) {
  if (kind == ManifoldKind::KleinBottle)
    return ChartWindow{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
  return ChartWindow{Eigen::Vector3d(0, -1, -1), Eigen::Vector3d(std::numbers::pi, 1, 1)};
}

/// Gradient columns and Hessian bilinear form of phi at x in frame coordinates.
struct LocalJet {
  Eigen::MatrixXd jac;                      // l x m
  std::vector<Eigen::VectorXd> hess;        // m*m entries, row-major (i, j)
  int m = 0;

  Eigen::VectorXd second(const Eigen::VectorXd& w) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(jac.rows());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out += (w[i] * w[j]) * hess[i * m + j];
    return out;
  }
};

LocalJet local_jet(const AnalyticEmbedding& emb, const ManifoldPoint& x) {
  const Eigen::MatrixXd frame = tangent_frame(x);
  LocalJet jet;
  jet.m = static_cast<int>(frame.cols());
  const int m = jet.m;
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd g = emb.grad(x, frame.col(i));
    if (i == 0) jet.jac.resize(g.size(), m);
    jet.jac.col(i) = g;
  }
  jet.hess.resize(m * m);
  for (int i = 0; i < m; ++i) {
    jet.hess[i * m + i] = emb.hess(x, frame.col(i));
    for (int j = 0; j < i; ++j) {
      // polarization of the quadratic form
      const Eigen::VectorXd p = emb.hess(x, frame.col(i) + frame.col(j));
      const Eigen::VectorXd q = emb.hess(x, frame.col(i) - frame.col(j));
      jet.hess[i * m + j] = 0.25 * (p - q);
      jet.hess[j * m + i] = jet.hess[i * m + j];
    }
  }
  return jet;
}

double sample_sd(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double mu = pairwise_sum(v) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(n - 1));
}

Eigen::VectorXd random_unit(int m, RngStream& rng) {
  Eigen::VectorXd w(m);
  double n = 0.0;
  do {
    for (int k = 0; k < m; ++k) w[k] = rng.normal();
    n = w.norm();
  } while (n < 1e-12);
  return w / n;
}

}  // namespace

LossBreakdown local_limit_loss(const AnalyticEmbedding& emb, const LossWeights& weights,
                               const SamplingStrategy& strategy, const LimitOptions& opts) {
  weights.validate();
  const ManifoldKind kind = emb.kind;
  SamplingStrategy s = strategy;
  if (!s.window && emb.window) s.window = emb.window;
  const DensityLimit rho = density_limit(kind, s, opts.annulus);
  const int m = intrinsic_dim(kind);
  const QuadratureRule inner = opts.quad.build(m, rho.inner_radius);
  const std::size_t k_in = inner.size();
  std::vector<Eigen::VectorXd> dirs(k_in);
  for (std::size_t k = 0; k < k_in; ++k) dirs[k] = inner.nodes[k] / inner.nodes[k].norm();

  // Outer nodes.
  QuadratureRule outer;
  std::vector<ManifoldPoint> points;
  if (is_flat(kind)) {
    const ChartWindow box = s.window ? *s.window : full_chart(kind);
    outer = product_gauss_legendre(box.lo, box.hi, opts.outer_gl);
    for (const auto& c : outer.nodes) points.push_back(ManifoldPoint{kind, c});
  } else {
    RngStream rng(StreamKey(opts.seed, "limit-outer"));
    const double v = volume(kind);
    for (std::size_t i = 0; i < opts.outer_mc; ++i) {
      points.push_back(sample_uniform<double>(kind, rng));
      outer.weights.push_back(v / static_cast<double>(opts.outer_mc));
    }
    outer.random = true;
  }
  const std::size_t n_out = points.size();

  // Per outer node: integrals over the ball. Per inner node: integrals over M
  // accumulated chunkwise for the inner sampling error.
  std::vector<double> iso_x(n_out), bend_x(n_out);
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (n_out + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> iso_k(chunks), bend_k(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    iso_k[c].assign(k_in, 0.0);
    bend_k[c].assign(k_in, 0.0);
    const std::size_t end = std::min(n_out, (c + 1) * kChunk);
    for (std::size_t j = c * kChunk; j < end; ++j) {
      const LocalJet jet = local_jet(emb, points[j]);
      double fi = 0.0, fb = 0.0;
      for (std::size_t k = 0; k < k_in; ++k) {
        const double a = inner.weights[k] * rho(inner.nodes[k].norm());
        const double gi = gamma((jet.jac * dirs[k]).norm(), weights.c);
        const double gb = jet.second(dirs[k]).squaredNorm();
        fi += a * gi;
        fb += a * gb;
        iso_k[c][k] += outer.weights[j] * gi;
        bend_k[c][k] += outer.weights[j] * gb;
      }
      iso_x[j] = fi;
      bend_x[j] = fb;
    }
  });

  LossBreakdown out;
  std::vector<double> wi(n_out), wb(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    wi[j] = outer.weights[j] * iso_x[j];
    wb[j] = outer.weights[j] * bend_x[j];
  }
  out.isometry = pairwise_sum(wi);
  out.bending = pairwise_sum(wb);
  out.total = weighted_total(out.isometry, out.bending, 0.0, weights);
  out.n_samples = n_out * k_in;

  double var_i = 0.0, var_b = 0.0, var_t = 0.0;
  if (outer.random) {
    const double v = volume(kind);
    const double n = static_cast<double>(n_out);
    std::vector<double> tot(n_out);
    for (std::size_t j = 0; j < n_out; ++j) tot[j] = iso_x[j] + weights.lambda * bend_x[j];
    var_i += std::pow(v * sample_sd(iso_x), 2) / n;
    var_b += std::pow(v * sample_sd(bend_x), 2) / n;
    var_t += std::pow(v * sample_sd(tot), 2) / n;
  }
  if (inner.random) {
    std::vector<double> gi(k_in, 0.0), gb(k_in, 0.0), gt(k_in);
    for (std::size_t c = 0; c < chunks; ++c)
      for (std::size_t k = 0; k < k_in; ++k) {
        gi[k] += iso_k[c][k];
        gb[k] += bend_k[c][k];
      }
    // every node carries the same weight |B|/K, and rho is constant on nodes
    const double scale = inner.weights[0] * rho(inner.nodes[0].norm()) *
                         static_cast<double>(k_in);
    for (std::size_t k = 0; k < k_in; ++k) gt[k] = gi[k] + weights.lambda * gb[k];
    const double n = static_cast<double>(k_in);
    var_i += std::pow(scale * sample_sd(gi), 2) / n;
    var_b += std::pow(scale * sample_sd(gb), 2) / n;
    var_t += std::pow(scale * sample_sd(gt), 2) / n;
  }
  out.stderr_isometry = std::sqrt(var_i);
  out.stderr_bending = std::sqrt(var_b);
  out.stderr_total = std::sqrt(var_t);
  return out;
}

DirectionalDerivs network_directional_derivs(ManifoldKind kind, const Embedding& phi,
                                             const ManifoldPoint& x, const Eigen::VectorXd& v,
                                             double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be > 0");
  if (x.kind != kind) throw Error(ErrorCode::KindMismatch, "point kind differs from manifold");
  const Eigen::VectorXd step = h * v;
  const Eigen::VectorXd fp = phi(exp_map_extended(x, step));
  const Eigen::VectorXd fm = phi(exp_map_extended(x, Eigen::VectorXd(-step)));
  const Eigen::VectorXd f0 = phi(x.coords);
  DirectionalDerivs d;
  d.first = (fp - fm) / (2.0 * h);
  d.second = (fp - 2.0 * f0 + fm) / (h * h);
  return d;
}

AnalyticEmbedding embedding_from_map(ManifoldKind kind, const Embedding& phi, double h,
                                     std::optional<ChartWindow> window) {
  AnalyticEmbedding e;
  e.kind = kind;
  e.name = "finite-difference";
  e.phi = phi;
  e.grad = [kind, phi, h](const ManifoldPoint& x, const Eigen::VectorXd& v) {
    return network_directional_derivs(kind, phi, x, v, h).first;
  };
  e.hess = [kind, phi, h](const ManifoldPoint& x, const Eigen::VectorXd& v) {
    return network_directional_derivs(kind, phi, x, v, h).second;
  };
  e.lip_grad = kNaN;
  e.lip_hess = kNaN;
  e.window = std::move(window);
  return e;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w) {
  struct Block {
    double value, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double wt = a.weight + b.weight;
      a.value = (a.value * a.weight + b.value * b.weight) / wt;
      a.weight = wt;
      a.count += b.count;
    }
  }
  std::vector<double> fit;
  for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.value);
  return fit;
}

TaylorReport verify_taylor(const AnalyticEmbedding& emb, const std::vector<double>& radii,
                           std::size_t trials, const StreamKey& key) {
  if (radii.empty() || trials == 0)
    throw Error(ErrorCode::InvalidArgument, "Taylor check needs radii and trials");
  const int m = intrinsic_dim(emb.kind);
  RngStream rng(key);
  std::vector<ManifoldPoint> xs;
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t t = 0; t < trials; ++t) {
    xs.push_back(sample_in_domain(emb.kind, emb.window, rng));
    dirs.push_back(tangent_frame(xs.back()) * random_unit(m, rng));
  }

  TaylorReport rep;
  rep.bound_first = 0.5 * emb.lip_grad;
  rep.bound_second = 5.0 / 6.0 * emb.lip_hess;
  // Floating-point allowance: the quotients divide rounding errors of size
  // eps |phi| by r and r^2 / 8 respectively.
  constexpr double kRound = 64 * std::numeric_limits<double>::epsilon();
  bool within = true;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
    TaylorRow row;
    row.radius = r;
    for (std::size_t t = 0; t < trials; ++t) {
      const ManifoldPoint& x = xs[t];
      const Eigen::VectorXd& v = dirs[t];
      const Eigen::VectorXd fx = emb.phi(x.coords);
      const Eigen::VectorXd fy = emb.along(x, Eigen::VectorXd(r * v));
      const Eigen::VectorXd fm = emb.along(x, Eigen::VectorXd(0.5 * r * v));
      const double e1 = (diff_quotient_1(fx, fy, r) - emb.grad(x, v)).norm();
      const double e2 = (diff_quotient_2(fx, fy, fm, r) - emb.hess(x, v)).norm();
      row.first_residual = std::max(row.first_residual, e1);
      row.second_residual = std::max(row.second_residual, e2);
      const double scale = 1.0 + std::max({fx.norm(), fy.norm(), fm.norm()});
      within = within && e1 <= rep.bound_first * r + kRound * scale / r &&
               e2 <= rep.bound_second * r + 8.0 * kRound * scale / (r * r);
    }
    rep.max_ratio_first = std::max(rep.max_ratio_first, row.first_residual / r);
    rep.max_ratio_second = std::max(rep.max_ratio_second, row.second_residual / r);
    rep.rows.push_back(row);
  }
  std::vector<double> rs, f1, f2;
  for (const auto& row : rep.rows) {
    rs.push_back(row.radius);
    f1.push_back(row.first_residual > 1e-12 ? row.first_residual : 0.0);
    f2.push_back(row.second_residual > 1e-10 ? row.second_residual : 0.0);
  }
  rep.slope_first = loglog_slope(rs, f1);
  rep.slope_second = loglog_slope(rs, f2);
  rep.bounds_hold = within;
  return rep;
}

double normal_chart_det(const ManifoldPoint& x, const Eigen::VectorXd& w, double h) {
  const Eigen::MatrixXd frame = tangent_frame(x);
  const int m = static_cast<int>(frame.cols());
  Eigen::MatrixXd jac(frame.rows(), m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    jac.col(i) = (exp_map_extended(x, Eigen::VectorXd(frame * wp)) -
                  exp_map_extended(x, Eigen::VectorXd(frame * wm))) /
                 (2.0 * h);
  }
  return (jac.transpose() * jac).determinant();
}

VolumeReport verify_volume_expansion(ManifoldKind kind, const std::vector<double>& eps_list,
                                     int n_radii, int n_angles) {
  if (is_flat(kind))
    throw Error(ErrorCode::UnsupportedKind, "volume expansion check needs a curved kind");
  const int m = intrinsic_dim(kind);
  const double ric = m - 1.0;  // unit spheres S^2 and S^3
  const QuadratureRule grid = radial_angular(m, n_radii, n_angles);

  std::vector<ManifoldPoint> bases;
  if (kind == ManifoldKind::Hemisphere) {
    bases.push_back(make_point(kind, Eigen::Vector3d(0, 0, 1)));
    bases.push_back(make_point(kind, Eigen::Vector3d(0.6, 0, 0.8)));
  } else {
    bases.push_back(make_point(kind, Eigen::Vector4d(1, 0, 0, 0)));
    bases.push_back(make_point(kind, Eigen::Vector4d(0.5, 0.5, 0.5, 0.5)));
  }

  VolumeReport rep;
  std::vector<double> es, errs;
  for (double eps : eps_list) {
    VolumeRow row;
    row.epsilon = eps;
    for (const auto& x : bases)
      for (const auto& w : grid.nodes) {
        const double r = eps * w.norm();
        const double expansion = 1.0 - ric * r * r / 3.0;
        const double det = normal_chart_det(x, Eigen::VectorXd(eps * w));
        const double closed = std::pow(std::sin(r) / r, 2.0 * (m - 1));
        row.max_error = std::max(row.max_error, std::abs(det - expansion));
        row.max_error_closed = std::max(row.max_error_closed, std::abs(closed - expansion));
      }
    rep.rows.push_back(row);
    es.push_back(eps);
    errs.push_back(row.max_error);
  }
  rep.slope = loglog_slope(es, errs);
  return rep;
}

ConvergenceReport verify_epsilon_convergence(const AnalyticEmbedding& emb, StrategyTag tag,
                                             const std::vector<double>& eps_list,
                                             const LossWeights& weights, std::size_t n,
                                             const StreamKey& key, double min_dist_ratio,
                                             double tolerance_sigmas) {
  if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty epsilon list");
  SamplingStrategy ref_strategy{tag, eps_list.front(), min_dist_ratio * eps_list.front(),
                                emb.window};
  LimitOptions opts;
  opts.annulus = min_dist_ratio > 0.0;
  const double reference = local_limit_loss(emb, weights, ref_strategy, opts).total;

  ConvergenceReport rep;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    SamplingStrategy s{tag, eps, min_dist_ratio * eps, emb.window};
    const LossBreakdown est =
        mc_continuous_loss(emb.kind, emb.phi, s, n, weights, key.child("epsilon", i));
    ConvergenceRow row;
    row.epsilon = eps;
    row.estimate = est.total;
    row.stderr_ = est.stderr_total;
    row.reference = reference;
    row.abs_error = std::abs(est.total - reference);
    rep.rows.push_back(row);
  }

  // Fit |error| as nondecreasing in epsilon.
  std::vector<std::size_t> order(rep.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rep.rows[a].epsilon < rep.rows[b].epsilon; });
  std::vector<double> y, w;
  for (std::size_t i : order) {
    y.push_back(rep.rows[i].abs_error);
    const double se = rep.rows[i].stderr_;
    w.push_back(1.0 / (se * se + 1e-300));
  }
  const std::vector<double> fit = isotonic_fit(y, w);
  rep.within_monotone_fit = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    ConvergenceRow& row = rep.rows[order[k]];
    row.monotone_fit = fit[k];
    if (std::abs(row.abs_error - fit[k]) > tolerance_sigmas * row.stderr_ + 1e-12)
      rep.within_monotone_fit = false;
  }
  std::vector<double> es, errs;
  for (const auto& row : rep.rows) {
    es.push_back(row.epsilon);
    errs.push_back(row.abs_error);
  }
  rep.slope = loglog_slope(es, errs);
  return rep;
}

McRateReport verify_mc_rate(const AnalyticEmbedding& emb, const SamplingStrategy& strategy,
                            const std::vector<std::size_t>& sizes, const LossWeights& weights,
                            const StreamKey& key) {
  SamplingStrategy s = strategy;
  if (!s.window && emb.window) s.window = emb.window;
  McRateReport rep;
  std::vector<double> ns, ses;
  for (std::size_t n : sizes) {
    const LossBreakdown b = mc_continuous_loss(emb.kind, emb.phi, s, n, weights, key);
    rep.rows.push_back({n, b.total, b.stderr_total});
    ns.push_back(static_cast<double>(n));
    ses.push_back(b.stderr_total);
  }
  rep.slope = loglog_slope(ns, ses);
  return rep;
}

NormEquivalenceReport verify_norm_equivalence(int m, double r0, double kappa, std::size_t trials,
                                              std::size_t nodes, const StreamKey& key) {
  if (m < 1 || !(r0 > 0.0) || trials == 0 || nodes == 0)
    throw Error(ErrorCode::InvalidArgument, "bad norm-equivalence parameters");
  if (!(kappa > 1e-3) || kappa > std::numbers::pi)
    throw Error(ErrorCode::InvalidArgument, "degenerate cone angle");
  // V = cone_{r0,kappa} / r0 is the unit-height double cone around e1.
  RngStream rng(key.child("cone-nodes", 0));
  const double cos_k = std::cos(kappa);
  std::vector<Eigen::VectorXd> dirs;
  std::size_t proposed = 0;
  while (dirs.size() < nodes) {
    if (++proposed > kMaxRejections * 10)
      throw Error(ErrorCode::SamplingStarvation, "cone too thin for node sampling");
    const Eigen::VectorXd d = random_unit(m, rng);
    if (std::abs(d[0]) >= cos_k) dirs.push_back(d);
    // radius is irrelevant: the integrands only see w / |w|
  }
  NormEquivalenceReport rep;
  rep.cone_volume = unit_ball_volume(m) * static_cast<double>(nodes) /
                    static_cast<double>(proposed);
  const double wt = rep.cone_volume / static_cast<double>(nodes);

  Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd mom4 = Eigen::MatrixXd::Zero(m * m, m * m);
  for (const auto& d : dirs) {
    mom += wt * d * d.transpose();
    const Eigen::MatrixXd dd = d * d.transpose();
    const Eigen::Map<const Eigen::VectorXd> v(dd.data(), m * m);
    mom4 += wt * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mom);
  rep.exact_c_min = std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
  rep.exact_c_max = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));

  RngStream trng(key.child("trials", 0));
  rep.c_min = rep.op_c_min = std::numeric_limits<double>::infinity();
  rep.cauchy_schwarz_holds = true;
  const double cs = rep.cone_volume * (1.0 + 1e-12);
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd w = random_unit(m, trng);
    const double q = w.dot(mom * w);
    rep.c_min = std::min(rep.c_min, std::sqrt(q));
    rep.c_max = std::max(rep.c_max, std::sqrt(q));
    if (q > cs) rep.cauchy_schwarz_holds = false;

    Eigen::MatrixXd a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = trng.normal();
    a /= a.norm();
    const Eigen::Map<const Eigen::VectorXd> av(a.data(), m * m);
    const double qa = av.dot(mom4 * av);
    rep.op_c_min = std::min(rep.op_c_min, std::sqrt(qa));
    rep.op_c_max = std::max(rep.op_c_max, std::sqrt(qa));
    if (qa > cs) rep.cauchy_schwarz_holds = false;
  }
  return rep;
}

void write_taylor_csv(const std::filesystem::path& path, const TaylorReport& r) {
  CsvWriter w(path, {"r", "first_residual", "second_residual", "first_ratio", "second_ratio",
                     "first_bound", "second_bound"});
  for (const auto& row : r.rows)
    w.row({row.radius, row.first_residual, row.second_residual, row.first_residual / row.radius,
           row.second_residual / row.radius, r.bound_first, r.bound_second});
}

void write_volume_csv(const std::filesystem::path& path, const VolumeReport& r) {
  CsvWriter w(path, {"epsilon", "estimate", "stderr", "reference", "abs_error"});
  for (const auto& row : r.rows)
    w.row({row.epsilon, row.max_error, 0.0, row.max_error_closed,
           std::abs(row.max_error - row.max_error_closed)});
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& r) {
  CsvWriter w(path, {"epsilon", "estimate", "stderr", "reference", "abs_error"});
  for (const auto& row : r.rows)
    w.row({row.epsilon, row.estimate, row.stderr_, row.reference, row.abs_error});
}

void write_mc_rate_csv(const std::filesystem::path& path, const McRateReport& r) {
  CsvWriter w(path, {"N", "estimate", "stderr", "reference", "abs_error"});
  const double ref = r.rows.empty() ? 0.0 : r.rows.back().estimate;
  for (const auto& row : r.rows)
    w.row({static_cast<double>(row.n), row.estimate, row.stderr_, ref,
           std::abs(row.estimate - ref)});
}

}  // namespace lowbend
