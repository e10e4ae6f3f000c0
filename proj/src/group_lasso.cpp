#include <cmath>
#include <random>
#include <stdexcept>

#include "mindkit/solvers.hpp"

namespace mindkit {

namespace {

double design_norm_sq(const DesignOperator& X, int power_iters) {
  if (X.kind() == DesignOperator::Kind::identity) return 1.0;
  std::mt19937_64 rng(0x5deece66dULL);
  Vec x(X.cols());
  for (double& xi : x) xi = (rng() >> 11) * 0x1.0p-53 - 0.5;
  double lambda = 1.0;
  for (int it = 0; it < power_iters; ++it) {
    Vec y = X.apply_adjoint(X.apply(x));
    lambda = norm2(y);
    if (lambda == 0.0) return 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = y[j] / lambda;
  }
  return lambda;
}

}  // namespace

Vec group_lasso_solve(const DesignOperator& X, const Vec& Y,
                      const BlockPartition& partition, const Vec& weights,
                      double gamma, int max_iter, double tol,
                      std::shared_ptr<const HaarBasis> basis) {
  const int p = X.cols();
  partition.validate(basis ? basis->size() : p);
  if (gamma < 0.0)
    throw std::invalid_argument("group_lasso_solve: gamma must be >= 0");
  for (double w : weights)
    if (w <= 0.0)
      throw std::invalid_argument("group_lasso_solve: weights must be > 0");
  if (basis && X.kind() != DesignOperator::Kind::identity)
    throw std::invalid_argument(
        "group_lasso_solve: basis blocks require identity design");

  const double L = 1.05 * design_norm_sq(X, 60);
  const double step = 1.0 / L;

  auto prox = [&](Vec v, double t) {
    Vec c = basis ? basis->analyze(v) : std::move(v);
    for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
      const double w = weights.empty() ? 1.0 : weights[a];
      double nrm2 = 0.0;
      for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
      const double nrm = std::sqrt(nrm2);
      const double thresh = t * gamma * w;
      const double scale = nrm > thresh ? 1.0 - thresh / nrm : 0.0;
      for (int idx : partition.blocks[a]) c[idx] *= scale;
    }
    return basis ? basis->synthesize(c) : c;
  };

  auto objective = [&](const Vec& beta) {
    Vec r = X.apply(beta);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = Y[i] - r[i];
    double penalty = 0.0;
    const Vec c = basis ? basis->analyze(beta) : beta;
    for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
      const double w = weights.empty() ? 1.0 : weights[a];
      double nrm2 = 0.0;
      for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
      penalty += w * std::sqrt(nrm2);
    }
    return 0.5 * dot(r, r) + gamma * penalty;
  };

  Vec beta(p, 0.0), z = beta;
  double t_momentum = 1.0;
  double obj_prev = objective(beta);
  for (int iter = 0; iter < max_iter; ++iter) {
    Vec r = X.apply(z);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Y[i];
    const Vec grad = X.apply_adjoint(r);
    Vec candidate(p);
    for (int j = 0; j < p; ++j) candidate[j] = z[j] - step * grad[j];
    Vec beta_new = prox(std::move(candidate), step);

    const double obj = objective(beta_new);
    if (obj > obj_prev) {
      // adaptive restart keeps FISTA monotone
      t_momentum = 1.0;
      z = beta;
      continue;
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    for (int j = 0; j < p; ++j)
      z[j] = beta_new[j] + (t_momentum - 1.0) / t_new * (beta_new[j] - beta[j]);
    t_momentum = t_new;
    beta = std::move(beta_new);
    if (std::abs(obj_prev - obj) <= tol * std::max(1.0, std::abs(obj))) {
      obj_prev = obj;
      break;
    }
    obj_prev = obj;
  }
  return beta;
}

ConjugateValue conjugate_block_l1(const Vec& mu, const BlockPartition& partition,
                                  const Vec& weights,
                                  std::shared_ptr<const HaarBasis> basis) {
  partition.validate(static_cast<int>(mu.size()));
  const Vec c = basis ? basis->analyze(mu) : mu;
  double worst = 0.0;
  for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
    const double w = weights.empty() ? 1.0 : weights[a];
    double nrm2 = 0.0;
    for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
    worst = std::max(worst, std::sqrt(nrm2) / w);
  }
  return {worst <= 1.0 + 1e-12, worst};
}

DualEquivalenceReport verify_dual_equivalence(
    const DesignOperator& X, const Vec& Y, const BlockPartition& partition,
    const Vec& weights, double gamma, double tol,
    std::shared_ptr<const HaarBasis> basis) {
  DualEquivalenceReport rep;
  rep.beta_penalized =
      group_lasso_solve(X, Y, partition, weights, gamma, 200000, 1e-15, basis);
  PdhgOptions opts;
  opts.tol = std::min(tol * 1e-2, 1e-10);
  SolveReport dual = solve_group_lasso_dual(X, Y, partition, weights, gamma,
                                            basis, opts);
  rep.beta_constrained = std::move(dual.beta_hat);

  const Vec pred1 = X.apply(rep.beta_penalized);
  const Vec pred2 = X.apply(rep.beta_constrained);
  double gap2 = 0.0;
  for (std::size_t i = 0; i < pred1.size(); ++i)
    gap2 += (pred1[i] - pred2[i]) * (pred1[i] - pred2[i]);
  rep.prediction_gap = std::sqrt(gap2);

  // slack of the penalized solution in the constrained program
  Vec residual = pred1;
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = Y[i] - residual[i];
  const Vec g = X.apply_adjoint(residual);
  const Vec c = basis ? basis->analyze(g) : g;
  double worst = 0.0;
  for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
    const double w = weights.empty() ? 1.0 : weights[a];
    double nrm2 = 0.0;
    for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
    worst = std::max(worst, std::sqrt(nrm2) / w);
  }
  rep.primal_slack = worst - gamma;
  return rep;
}

}  // namespace mindkit
