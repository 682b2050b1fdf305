#include "lowbend/loss.hpp"

#include <cmath>
#include <vector>

#include "lowbend/parallel.hpp"

namespace lowbend {

void LossWeights::validate() const {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma shape c must be > 0");
  if (!(kappa_rec >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa_rec must be >= 0");
}

double weighted_total(double isometry, double bending, double reconstruction,
                      const LossWeights& w) {
  return isometry + w.lambda * bending + w.kappa_rec * reconstruction;
}

Eigen::VectorXd diff_quotient_1(const SampleTriple& t, const Embedding& phi) {
  return diff_quotient_1(phi(t.input_x()), phi(t.input_y()), t.dist);
}

Eigen::VectorXd diff_quotient_2(const SampleTriple& t, const Embedding& phi) {
  return diff_quotient_2(phi(t.input_x()), phi(t.input_y()), phi(t.input_mid()), t.dist);
}

PairTerms pair_terms(const Eigen::VectorXd& phi_x, const Eigen::VectorXd& phi_y,
                     const Eigen::VectorXd& phi_mid, double d, double c) {
  if (phi_x.size() != phi_y.size() || phi_x.size() != phi_mid.size())
    throw Error(ErrorCode::ShapeMismatch, "latent codes of different length");
  PairTerms p;
  p.isometry = gamma(diff_quotient_1(phi_x, phi_y, d).norm(), c);
  p.bending = diff_quotient_2(phi_x, phi_y, phi_mid, d).squaredNorm();
  return p;
}

PairGradient pair_gradient(const Eigen::VectorXd& phi_x, const Eigen::VectorXd& phi_y,
                           const Eigen::VectorXd& phi_mid, double d, const LossWeights& w) {
  require_positive_distance(d);
  PairGradient g;
  const Eigen::VectorXd delta = phi_y - phi_x;
  const double len = delta.norm();
  const double s = len / d;
  g.terms.isometry = gamma(s, w.c);
  const Eigen::VectorXd b = (8.0 / (d * d)) * (0.5 * (phi_x + phi_y) - phi_mid);
  g.terms.bending = b.squaredNorm();

  g.d_y = Eigen::VectorXd::Zero(delta.size());
  if (len > 0.0) g.d_y = (gamma_derivative(s, w.c) / (len * d)) * delta;
  g.d_x = -g.d_y;
  const Eigen::VectorXd bend_side = (w.lambda * 8.0 / (d * d)) * b;
  g.d_x += bend_side;
  g.d_y += bend_side;
  g.d_mid = -2.0 * bend_side;
  return g;
}

namespace {

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const std::size_t n = v.size();
  if (n == 0) return m;
  m.mean = pairwise_sum(v) / static_cast<double>(n);
  if (n < 2) return m;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  m.stderr_ = std::sqrt(var / static_cast<double>(n));
  return m;
}

LossBreakdown summarize(const std::vector<double>& iso, const std::vector<double>& bend,
                        const LossWeights& w) {
  std::vector<double> tot(iso.size());
  for (std::size_t i = 0; i < iso.size(); ++i) tot[i] = iso[i] + w.lambda * bend[i];
  const Moments mi = moments(iso);
  const Moments mb = moments(bend);
  const Moments mt = moments(tot);
  LossBreakdown out;
  out.isometry = mi.mean;
  out.bending = mb.mean;
  out.total = weighted_total(out.isometry, out.bending, 0.0, w);
  out.n_samples = iso.size();
  out.stderr_isometry = mi.stderr_;
  out.stderr_bending = mb.stderr_;
  out.stderr_total = mt.stderr_;
  return out;
}

}  // namespace

LossBreakdown discrete_loss(std::span<const SampleTriple> triples, const Embedding& phi,
                            const LossWeights& weights) {
  weights.validate();
  if (triples.empty()) throw Error(ErrorCode::EmptySampleSet, "discrete loss over no samples");
  std::vector<double> iso(triples.size());
  std::vector<double> bend(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const SampleTriple& t = triples[i];
    const PairTerms p =
        pair_terms(phi(t.input_x()), phi(t.input_y()), phi(t.input_mid()), t.dist, weights.c);
    iso[i] = p.isometry;
    bend[i] = p.bending;
  }
  return summarize(iso, bend, weights);
}

double mean_square(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.squaredNorm() / static_cast<double>(v.size());
}

double reconstruction_loss(std::span<const SampleTriple> triples, const Embedding& phi,
                           const Embedding& psi) {
  if (triples.empty()) throw Error(ErrorCode::EmptySampleSet, "reconstruction over no samples");
  std::vector<double> terms(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const SampleTriple& t = triples[i];
    const Eigen::VectorXd rx = psi(phi(t.input_x()));
    const Eigen::VectorXd ry = psi(phi(t.input_y()));
    if (rx.size() != t.input_x().size() || ry.size() != t.input_y().size())
      throw Error(ErrorCode::ShapeMismatch, "decoder output does not match input dimension");
    terms[i] = mean_square(rx - t.input_x()) + mean_square(ry - t.input_y());
  }
  return pairwise_sum(terms) / (2.0 * static_cast<double>(triples.size()));
}

LossBreakdown mc_continuous_loss(ManifoldKind kind, const Embedding& phi,
                                 const SamplingStrategy& strategy, std::size_t n,
                                 const LossWeights& weights, const StreamKey& key) {
  weights.validate();
  strategy.validate(kind);
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo estimate needs N >= 2");
  std::vector<double> iso(n);
  std::vector<double> bend(n);
  const std::size_t chunks = (n + kMcChunk - 1) / kMcChunk;
  parallel_for(chunks, [&](std::size_t c) {
    RngStream rng(key.child("mc-chunk", c));
    const std::size_t end = std::min(n, (c + 1) * kMcChunk);
    for (std::size_t i = c * kMcChunk; i < end; ++i) {
      auto [x, y] = sample_pair(kind, strategy, rng);
      const ManifoldPoint mid = mean(x, y);
      const PairTerms p =
          pair_terms(phi(x.coords), phi(y.coords), phi(mid.coords), distance(x, y), weights.c);
      iso[i] = p.isometry;
      bend[i] = p.bending;
    }
  });
  return summarize(iso, bend, weights);
}

}  // namespace lowbend
