#include <cmath>
#include <random>
#include <stdexcept>

#include "mindkit/solvers.hpp"

namespace mindkit {

namespace {

// Exact prox of t * R for the prox-friendly kinds.
Vec reg_prox(const Regularizer& reg, Vec v, double t) {
  switch (reg.kind) {
    case Regularizer::Kind::l2_sq:
      for (double& x : v) x /= 1.0 + t;
      return v;
    case Regularizer::Kind::tv:
      return prox_tv_1d(v, t);
    case Regularizer::Kind::sq_diff: {
      // (I + t D^T D) x = v, tridiagonal Thomas solve
      const int n = static_cast<int>(v.size());
      if (n < 2) return v;
      Vec diag(n), rhs = v;
      for (int i = 0; i < n; ++i)
        diag[i] = 1.0 + t * ((i == 0 || i == n - 1) ? 1.0 : 2.0);
      const double off = -t;
      Vec c_prime(n, 0.0);
      c_prime[0] = off / diag[0];
      rhs[0] /= diag[0];
      for (int i = 1; i < n; ++i) {
        const double m = diag[i] - off * c_prime[i - 1];
        c_prime[i] = off / m;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
      }
      for (int i = n - 2; i >= 0; --i) rhs[i] -= c_prime[i] * rhs[i + 1];
      return rhs;
    }
    case Regularizer::Kind::l1_coeff: {
      Vec c = reg.basis ? reg.basis->analyze(v) : std::move(v);
      for (double& x : c) {
        const double ax = std::abs(x);
        x = ax <= t ? 0.0 : x * (1.0 - t / ax);
      }
      return reg.basis ? reg.basis->synthesize(c) : c;
    }
    case Regularizer::Kind::block_l1: {
      Vec c = reg.basis ? reg.basis->analyze(v) : std::move(v);
      for (std::size_t a = 0; a < reg.partition.blocks.size(); ++a) {
        const double w =
            reg.block_weights.empty() ? 1.0 : reg.block_weights[a];
        double nrm2 = 0.0;
        for (int idx : reg.partition.blocks[a]) nrm2 += c[idx] * c[idx];
        const double nrm = std::sqrt(nrm2);
        const double thresh = t * w;
        const double scale = nrm > thresh ? 1.0 - thresh / nrm : 0.0;
        for (int idx : reg.partition.blocks[a]) c[idx] *= scale;
      }
      return reg.basis ? reg.basis->synthesize(c) : c;
    }
    case Regularizer::Kind::sobolev_kq:
      throw std::invalid_argument("penalized_solve: no closed prox for sobolev");
  }
  throw std::logic_error("unreachable");
}

double design_norm_sq(const DesignOperator& X) {
  if (X.kind() != DesignOperator::Kind::dense) {
    if (X.kind() == DesignOperator::Kind::identity) return 1.0;
    // cumulative_sum: power iteration
  }
  std::mt19937_64 rng(0x2545f4914f6cdd1dULL);
  Vec x(X.cols());
  for (double& xi : x) xi = (rng() >> 11) * 0x1.0p-53 - 0.5;
  double lambda = 1.0;
  for (int it = 0; it < 60; ++it) {
    Vec y = X.apply_adjoint(X.apply(x));
    lambda = norm2(y);
    if (lambda == 0.0) return 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = y[j] / lambda;
  }
  return lambda;
}

}  // namespace

Vec penalized_solve(const DesignOperator& X, const Vec& Y,
                    const Regularizer& reg, double gamma, int max_iter,
                    double tol) {
  if (gamma < 0.0)
    throw std::invalid_argument("penalized_solve: gamma must be >= 0");
  const int p = X.cols();

  if (X.kind() == DesignOperator::Kind::identity)
    return reg_prox(reg, Y, gamma);  // one exact prox step

  const double L = 1.05 * design_norm_sq(X);
  const double step = 1.0 / L;
  auto objective = [&](const Vec& beta) {
    Vec r = X.apply(beta);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = Y[i] - r[i];
    return 0.5 * dot(r, r) + gamma * reg.value(beta);
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
    Vec beta_new = reg_prox(reg, std::move(candidate), step * gamma);
    const double obj = objective(beta_new);
    if (obj > obj_prev) {
      t_momentum = 1.0;
      z = beta;
      continue;
    }
    const double t_new =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
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

DiscrepancyResult discrepancy_calibrate(const DesignOperator& op,
                                        const Observation& obs,
                                        const Regularizer& reg, double q,
                                        double tol) {
  if (q <= 0.0)
    throw std::invalid_argument("discrepancy_calibrate: q must be > 0");
  const int p = op.cols();

  auto residual_norm = [&](const Vec& beta) {
    Vec r = op.apply(beta);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = obs.y[i] - r[i];
    return norm2(r);
  };

  // known R-minimizer per kind; feasibility of it is the Lagrange
  // hypothesis check
  Vec z0(p, 0.0);
  if (reg.kind == Regularizer::Kind::tv ||
      reg.kind == Regularizer::Kind::sq_diff) {
    const Vec xe = op.apply(Vec(p, 1.0));
    const double denom = dot(xe, xe);
    const double c = denom > 0.0 ? dot(xe, obs.y) / denom : 0.0;
    z0.assign(p, c);
  }
  if (residual_norm(z0) <= q) {
    DiscrepancyResult res;
    res.degenerate = true;
    res.gamma = 0.0;
    res.beta_hat = std::move(z0);
    res.residual = residual_norm(res.beta_hat);
    return res;
  }

  double lo = 1e-8, hi = 1e8;
  auto solve_at = [&](double gamma) {
    return penalized_solve(op, obs.y, reg, gamma);
  };
  Vec beta_lo = solve_at(lo);
  if (residual_norm(beta_lo) > q + tol)
    throw std::runtime_error(
        "discrepancy_calibrate: residual target unattainable");

  DiscrepancyResult res;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);  // bisection in log scale
    res.beta_hat = solve_at(mid);
    res.gamma = mid;
    res.residual = residual_norm(res.beta_hat);
    if (std::abs(res.residual - q) <= tol) return res;
    if (res.residual > q)
      hi = mid;
    else
      lo = mid;
  }
  return res;
}

}  // namespace mindkit
