#include <cmath>
#include <random>
#include <stdexcept>

#include "mindkit/solvers.hpp"

namespace mindkit {

Vec project_ball(Vec v, double r, BallNorm norm) {
  if (r < 0.0) throw std::invalid_argument("project_ball: r must be >= 0");
  if (norm == BallNorm::linf) {
    for (double& x : v) x = std::clamp(x, -r, r);
    return v;
  }
  const double nrm = norm2(v);
  if (nrm > r) {
    const double scale = r / nrm;
    for (double& x : v) x *= scale;
  }
  return v;
}

namespace {

double estimate_operator_norm(const std::vector<DualBlock>& blocks, int dim,
                              int iters) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Vec x(dim);
  for (double& xi : x) xi = (rng() >> 11) * 0x1.0p-53 - 0.5;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec y(dim, 0.0);
    for (const auto& b : blocks) {
      const Vec z = b.op.fwd(x);
      const Vec back = b.op.adj(z);
      for (int j = 0; j < dim; ++j) y[j] += back[j];
    }
    lambda = norm2(y);
    if (lambda == 0.0) return 0.0;
    for (int j = 0; j < dim; ++j) x[j] = y[j] / lambda;
  }
  return std::sqrt(lambda);
}

}  // namespace

SolveReport pdhg_run(const PdhgProblem& problem, const PdhgOptions& options) {
  const int p = problem.dim;
  double L = estimate_operator_norm(problem.blocks, p, options.power_iters);
  if (L <= 0.0) L = 1.0;
  L *= options.step_safety;
  const double tau = options.step_scale / L;
  const double sigma = options.step_scale / L;

  Vec beta(p, 0.0), beta_bar(p, 0.0);
  std::vector<Vec> duals;
  duals.reserve(problem.blocks.size());
  for (const auto& b : problem.blocks) duals.emplace_back(b.op.rows, 0.0);

  SolveReport report;
  double step_inf = 0.0, dual_step_inf = 0.0;
  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    dual_step_inf = 0.0;
    Vec grad(p, 0.0);
    for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
      const auto& b = problem.blocks[i];
      Vec z = b.op.fwd(beta_bar);
      Vec& u = duals[i];
      Vec u_old = u;
      for (int r = 0; r < b.op.rows; ++r) u[r] += sigma * z[r];
      b.prox_conj(u, sigma);
      for (int r = 0; r < b.op.rows; ++r)
        dual_step_inf = std::max(dual_step_inf, std::abs(u[r] - u_old[r]));
      const Vec back = b.op.adj(u);
      for (int j = 0; j < p; ++j) grad[j] += back[j];
    }
    Vec beta_new(p);
    for (int j = 0; j < p; ++j) beta_new[j] = beta[j] - tau * grad[j];
    if (problem.primal_prox) problem.primal_prox(beta_new, tau);

    step_inf = 0.0;
    for (int j = 0; j < p; ++j)
      step_inf = std::max(step_inf, std::abs(beta_new[j] - beta[j]));
    for (int j = 0; j < p; ++j) beta_bar[j] = 2.0 * beta_new[j] - beta[j];
    beta = std::move(beta_new);

    if (options.gap_trace)
      options.gap_trace(iter, step_inf / tau + dual_step_inf / sigma);

    if (iter % options.check_every == 0) {
      const double scale = std::max(1.0, norm_inf(beta));
      if (step_inf <= options.tol * scale) {
        if (!problem.slack || problem.slack(beta) <= options.feas_tol) break;
      }
    }
  }

  report.beta_hat = std::move(beta);
  report.iterations = std::min(iter, options.max_iter);
  report.primal_residual = step_inf;
  report.dual_gap = step_inf / tau + dual_step_inf / sigma;
  report.constraint_slack =
      problem.slack ? problem.slack(report.beta_hat) : 0.0;
  report.feasible = report.constraint_slack <= options.feas_tol;
  report.objective =
      problem.objective ? problem.objective(report.beta_hat) : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Assembly of the stacked operators.
// ---------------------------------------------------------------------------

namespace {

struct StackedProbes {
  LinOp op;    // probes composed with the design
  Vec centers; // probes applied to Y
  std::vector<int> offsets;
  Vec radii;   // (q + s_a) w_a
};

Vec apply_probes_raw(const ProbeSystem& probes, const Vec& v) {
  switch (probes.kind) {
    case ProbeSystem::Kind::basis:
      return probes.basis->analyze(v);
    case ProbeSystem::Kind::intervals: {
      const int n = probes.input_dim;
      Vec prefix(n + 1, 0.0);
      for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
      Vec out(probes.intervals.intervals.size());
      for (std::size_t a = 0; a < out.size(); ++a) {
        const auto& iv = probes.intervals.intervals[a];
        out[a] = prefix[iv.hi + 1] - prefix[iv.lo];
      }
      return out;
    }
    case ProbeSystem::Kind::blocks: {
      const Vec c = probes.basis ? probes.basis->analyze(v) : v;
      Vec out;
      for (const auto& block : probes.partition.blocks)
        for (int idx : block) out.push_back(c[idx]);
      return out;
    }
    case ProbeSystem::Kind::dense: {
      Vec out;
      for (std::size_t a = 0; a < probes.dense_probes.size(); ++a) {
        const Vec& mat = probes.dense_probes[a];
        for (int r = 0; r < probes.dense_rows[a]; ++r) {
          double s = 0.0;
          const double* row =
              mat.data() + static_cast<std::size_t>(r) * probes.input_dim;
          for (int j = 0; j < probes.input_dim; ++j) s += row[j] * v[j];
          out.push_back(s);
        }
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec apply_probes_adjoint_raw(const ProbeSystem& probes, const Vec& u) {
  const int n = probes.input_dim;
  switch (probes.kind) {
    case ProbeSystem::Kind::basis:
      return probes.basis->synthesize(u);
    case ProbeSystem::Kind::intervals: {
      Vec diff(n + 1, 0.0);
      for (std::size_t a = 0; a < probes.intervals.intervals.size(); ++a) {
        const auto& iv = probes.intervals.intervals[a];
        diff[iv.lo] += u[a];
        diff[iv.hi + 1] -= u[a];
      }
      Vec out(n, 0.0);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += diff[i];
        out[i] = acc;
      }
      return out;
    }
    case ProbeSystem::Kind::blocks: {
      Vec c(n, 0.0);
      std::size_t pos = 0;
      for (const auto& block : probes.partition.blocks)
        for (int idx : block) c[idx] = u[pos++];
      return probes.basis ? probes.basis->synthesize(c) : c;
    }
    case ProbeSystem::Kind::dense: {
      Vec out(n, 0.0);
      std::size_t pos = 0;
      for (std::size_t a = 0; a < probes.dense_probes.size(); ++a) {
        const Vec& mat = probes.dense_probes[a];
        for (int r = 0; r < probes.dense_rows[a]; ++r, ++pos) {
          const double* row =
              mat.data() + static_cast<std::size_t>(r) * probes.input_dim;
          for (int j = 0; j < n; ++j) out[j] += row[j] * u[pos];
        }
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

int probe_output_dim(const ProbeSystem& probes, std::vector<int>& offsets) {
  offsets.assign(1, 0);
  switch (probes.kind) {
    case ProbeSystem::Kind::basis:
      for (int a = 0; a < probes.basis->size(); ++a)
        offsets.push_back(offsets.back() + 1);
      break;
    case ProbeSystem::Kind::intervals:
      for (std::size_t a = 0; a < probes.intervals.intervals.size(); ++a)
        offsets.push_back(offsets.back() + 1);
      break;
    case ProbeSystem::Kind::blocks:
      for (const auto& block : probes.partition.blocks)
        offsets.push_back(offsets.back() + static_cast<int>(block.size()));
      break;
    case ProbeSystem::Kind::dense:
      for (int m : probes.dense_rows) offsets.push_back(offsets.back() + m);
      break;
  }
  return offsets.back();
}

StackedProbes make_stacked_probes(const ProbeSystem& probes,
                                  const DesignOperator& X, const Vec& Y,
                                  double q) {
  StackedProbes sp;
  const int m = probe_output_dim(probes, sp.offsets);
  sp.centers = apply_probes_raw(probes, Y);
  sp.radii.resize(probes.count());
  for (std::size_t a = 0; a < probes.count(); ++a)
    sp.radii[a] =
        std::max(0.0, (q + probes.penalty(a)) * probes.weight(a));
  sp.op.rows = m;
  sp.op.cols = X.cols();
  sp.op.fwd = [&probes, &X](const Vec& beta) {
    return apply_probes_raw(probes, X.apply(beta));
  };
  sp.op.adj = [&probes, &X](const Vec& u) {
    return X.apply_adjoint(apply_probes_adjoint_raw(probes, u));
  };
  return sp;
}

DualBlock make_constraint_block(const StackedProbes& sp) {
  DualBlock b;
  b.op = sp.op;
  const Vec centers = sp.centers;
  const std::vector<int> offsets = sp.offsets;
  const Vec radii = sp.radii;
  // Indicator of the product of balls ||z_a - c_a||_2 <= r_a, dualized
  // through Moreau: prox_{sigma g*}(u) = u - sigma P(u / sigma).
  b.prox_conj = [centers, offsets, radii](Vec& u, double sigma) {
    for (std::size_t a = 0; a + 1 < offsets.size(); ++a) {
      const int lo = offsets[a], hi = offsets[a + 1];
      double nrm2 = 0.0;
      for (int i = lo; i < hi; ++i) {
        const double w = u[i] / sigma - centers[i];
        nrm2 += w * w;
      }
      const double nrm = std::sqrt(nrm2);
      const double scale = nrm > radii[a] ? radii[a] / nrm : 1.0;
      for (int i = lo; i < hi; ++i) {
        const double w = u[i] / sigma - centers[i];
        u[i] -= sigma * (centers[i] + scale * w);
      }
    }
  };
  return b;
}

LinOp diff_op(int p, int order) {
  LinOp op;
  op.cols = p;
  op.rows = std::max(0, p - order);
  op.fwd = [order](const Vec& v) {
    Vec d = v;
    for (int l = 0; l < order; ++l) {
      Vec next(d.size() - 1);
      for (std::size_t i = 0; i + 1 < d.size(); ++i) next[i] = d[i + 1] - d[i];
      d = std::move(next);
    }
    return d;
  };
  op.adj = [order, p](const Vec& u) {
    Vec v = u;
    for (int l = 0; l < order; ++l) {
      Vec next(v.size() + 1, 0.0);
      for (std::size_t i = 0; i < v.size(); ++i) {
        next[i] -= v[i];
        next[i + 1] += v[i];
      }
      v = std::move(next);
    }
    if (static_cast<int>(v.size()) != p)
      throw std::logic_error("diff_op adjoint dimension");
    return v;
  };
  return op;
}

LinOp identity_op(int p) {
  LinOp op;
  op.rows = op.cols = p;
  op.fwd = [](const Vec& v) { return v; };
  op.adj = [](const Vec& u) { return u; };
  return op;
}

LinOp basis_op(std::shared_ptr<const HaarBasis> basis) {
  LinOp op;
  op.rows = op.cols = basis->size();
  op.fwd = [basis](const Vec& v) { return basis->analyze(v); };
  op.adj = [basis](const Vec& u) { return basis->synthesize(u); };
  return op;
}

void clamp_unit(Vec& u, double) {
  for (double& x : u) x = std::clamp(x, -1.0, 1.0);
}

// Dual blocks realizing the regularizer through its analysis operator.
// l2_sq is handled in the primal prox instead.
void append_regularizer_blocks(const Regularizer& reg, int p,
                               std::vector<DualBlock>& blocks) {
  switch (reg.kind) {
    case Regularizer::Kind::l2_sq:
      break;
    case Regularizer::Kind::tv: {
      DualBlock b;
      b.op = diff_op(p, 1);
      b.prox_conj = clamp_unit;
      blocks.push_back(std::move(b));
      break;
    }
    case Regularizer::Kind::sq_diff: {
      DualBlock b;
      b.op = diff_op(p, 1);
      b.prox_conj = [](Vec& u, double sigma) {
        for (double& x : u) x /= 1.0 + sigma;
      };
      blocks.push_back(std::move(b));
      break;
    }
    case Regularizer::Kind::l1_coeff: {
      DualBlock b;
      b.op = reg.basis ? basis_op(reg.basis) : identity_op(p);
      b.prox_conj = clamp_unit;
      blocks.push_back(std::move(b));
      break;
    }
    case Regularizer::Kind::block_l1: {
      DualBlock b;
      b.op = reg.basis ? basis_op(reg.basis) : identity_op(p);
      const BlockPartition part = reg.partition;
      Vec weights = reg.block_weights;
      if (weights.empty()) weights.assign(part.blocks.size(), 1.0);
      std::vector<char> member(p, 0);
      for (const auto& blk : part.blocks)
        for (int idx : blk) member[idx] = 1;
      b.prox_conj = [part, weights, member](Vec& u, double) {
        for (std::size_t a = 0; a < part.blocks.size(); ++a) {
          double nrm2 = 0.0;
          for (int idx : part.blocks[a]) nrm2 += u[idx] * u[idx];
          const double nrm = std::sqrt(nrm2);
          if (nrm > weights[a]) {
            const double scale = weights[a] / nrm;
            for (int idx : part.blocks[a]) u[idx] *= scale;
          }
        }
        // coordinates outside every block do not enter R; their conjugate
        // is the indicator of {0}
        for (std::size_t j = 0; j < u.size(); ++j)
          if (!member[j]) u[j] = 0.0;
      };
      blocks.push_back(std::move(b));
      break;
    }
    case Regularizer::Kind::sobolev_kq: {
      for (int l = 0; l <= reg.sobolev_k; ++l) {
        if (p - l < 1) break;
        DualBlock b;
        b.op = l == 0 ? identity_op(p) : diff_op(p, l);
        if (reg.sobolev_q == 1.0)
          b.prox_conj = clamp_unit;
        else
          b.prox_conj = [](Vec& u, double) {
            const double nrm = norm2(u);
            if (nrm > 1.0)
              for (double& x : u) x /= nrm;
          };
        blocks.push_back(std::move(b));
      }
      break;
    }
  }
}

}  // namespace

SolveReport pdhg_solve(const MindProblem& problem, const PdhgOptions& options) {
  problem.constraint.probes.validate();
  const int p = problem.op.cols();
  PdhgProblem pp;
  pp.dim = p;

  const StackedProbes sp = make_stacked_probes(
      problem.constraint.probes, problem.op, problem.obs.y, problem.constraint.q);
  pp.blocks.push_back(make_constraint_block(sp));
  append_regularizer_blocks(problem.reg, p, pp.blocks);
  if (problem.reg.kind == Regularizer::Kind::l2_sq)
    pp.primal_prox = [](Vec& v, double tau) {
      for (double& x : v) x /= 1.0 + tau;
    };

  const Regularizer& reg = problem.reg;
  pp.objective = [&reg](const Vec& beta) { return reg.value(beta); };
  const MindProblem* prob = &problem;
  pp.slack = [prob](const Vec& beta) {
    Vec residual = prob->op.apply(beta);
    for (std::size_t i = 0; i < residual.size(); ++i)
      residual[i] = prob->obs.y[i] - residual[i];
    return multiscale_statistic(residual, prob->constraint.probes) -
           prob->constraint.q;
  };
  return pdhg_run(pp, options);
}

SolveReport solve_group_lasso_dual(const DesignOperator& X, const Vec& Y,
                                   const BlockPartition& partition,
                                   const Vec& weights, double gamma,
                                   std::shared_ptr<const HaarBasis> basis,
                                   const PdhgOptions& options) {
  const int n = X.rows();
  const int p = X.cols();
  partition.validate(basis ? basis->size() : p);
  if (basis && X.kind() != DesignOperator::Kind::identity)
    throw std::invalid_argument(
        "solve_group_lasso_dual: basis blocks require identity design");

  ProbeSystem probes;
  if (basis) {
    probes = ProbeSystem::from_blocks(basis, partition, weights);
  } else if (X.kind() == DesignOperator::Kind::identity) {
    probes.kind = ProbeSystem::Kind::blocks;
    probes.input_dim = n;
    probes.partition = partition;
    probes.weights = weights;
    probes.validate();
  } else {
    // probes B_a X^T as explicit matrices (rows = columns of X)
    std::vector<Vec> mats;
    std::vector<int> rows;
    for (const auto& block : partition.blocks) {
      Vec mat;
      mat.reserve(block.size() * n);
      for (int j : block)
        for (int i = 0; i < n; ++i) mat.push_back(X.entries()[i * p + j]);
      mats.push_back(std::move(mat));
      rows.push_back(static_cast<int>(block.size()));
    }
    probes = ProbeSystem::from_dense(n, std::move(mats), std::move(rows),
                                     weights);
  }

  PdhgProblem pp;
  pp.dim = p;
  const StackedProbes sp = make_stacked_probes(probes, X, Y, gamma);
  pp.blocks.push_back(make_constraint_block(sp));
  // objective 1/2 ||X beta||^2, dualized through X
  DualBlock fid;
  fid.op.rows = n;
  fid.op.cols = p;
  fid.op.fwd = [&X](const Vec& b) { return X.apply(b); };
  fid.op.adj = [&X](const Vec& u) { return X.apply_adjoint(u); };
  fid.prox_conj = [](Vec& u, double sigma) {
    for (double& x : u) x /= 1.0 + sigma;
  };
  pp.blocks.push_back(std::move(fid));

  pp.objective = [&X](const Vec& beta) {
    const Vec z = X.apply(beta);
    return 0.5 * dot(z, z);
  };
  const ProbeSystem probes_copy = probes;  // keep alive for slack
  pp.slack = [&X, Y, probes_copy, gamma](const Vec& beta) {
    Vec residual = X.apply(beta);
    for (std::size_t i = 0; i < residual.size(); ++i)
      residual[i] = Y[i] - residual[i];
    return multiscale_statistic(residual, probes_copy) - gamma;
  };
  return pdhg_run(pp, options);
}

}  // namespace mindkit
