#pragma once

#include <functional>
#include <memory>

#include "mindkit/dictionaries.hpp"
#include "mindkit/model.hpp"
#include "mindkit/multiscale.hpp"

namespace mindkit {

/// Convex regularization functionals. Coefficient-domain kinds (l1_coeff,
/// block_l1) act on basis coefficients when `basis` is set, or on raw
/// coordinates otherwise. Conventions:
///   l2_sq      1/2 ||beta||_2^2
///   sq_diff    1/2 sum (beta_{i+1} - beta_i)^2
///   tv         sum |beta_{i+1} - beta_i|
///   l1_coeff   sum_lambda |<phi_lambda, beta>|
///   block_l1   sum_a w_a ||B_a beta||_2
///   sobolev_kq sum_{l=0..k} ||Delta^l beta||_q, forward differences,
///              no grid rescaling, q in {1, 2}
struct Regularizer {
  enum class Kind { sq_diff, tv, l1_coeff, block_l1, sobolev_kq, l2_sq };

  Kind kind = Kind::l2_sq;
  int sobolev_k = 1;
  double sobolev_q = 1.0;  // 1 or 2
  std::shared_ptr<const HaarBasis> basis;  // l1_coeff / block_l1, optional
  BlockPartition partition;                // block_l1
  Vec block_weights;                       // block_l1, empty means all 1

  double value(const Vec& beta) const;

  static Regularizer l2_sq() { return of_kind(Kind::l2_sq); }
  static Regularizer tv() { return of_kind(Kind::tv); }
  static Regularizer sq_diff() { return of_kind(Kind::sq_diff); }
  static Regularizer of_kind(Kind k) {
    Regularizer r;
    r.kind = k;
    return r;
  }
  static Regularizer l1_coeff(std::shared_ptr<const HaarBasis> basis = {});
  static Regularizer block_l1(BlockPartition partition, Vec weights = {},
                              std::shared_ptr<const HaarBasis> basis = {});
  static Regularizer sobolev(int k, double q);
};

struct MindProblem {
  DesignOperator op;
  Observation obs;
  MultiscaleConstraint constraint;
  Regularizer reg;
};

struct SolveReport {
  Vec beta_hat;
  int iterations = 0;
  bool feasible = false;
  double primal_residual = 0.0;   // last primal step length (inf norm)
  double constraint_slack = 0.0;  // statistic(Y - X beta) - q, <= 0 feasible
  double objective = 0.0;         // R(beta_hat)
  double dual_gap = 0.0;          // step-residual gap surrogate
};

// ---------------------------------------------------------------------------
// Primal-dual hybrid gradient engine.
//
// Solves min_beta f0(beta) + sum_i f_i(K_i beta) where each f_i enters
// through the prox of its Fenchel conjugate. One engine serves every
// constrained program here: constraints become ball-indicator blocks,
// dualized regularizers become norm-conjugate blocks.
// ---------------------------------------------------------------------------

struct LinOp {
  int rows = 0;
  int cols = 0;
  std::function<Vec(const Vec&)> fwd;
  std::function<Vec(const Vec&)> adj;
};

struct DualBlock {
  LinOp op;
  std::function<void(Vec&, double)> prox_conj;  // in-place prox_{sigma f*}
};

struct PdhgOptions {
  int max_iter = 200000;
  double tol = 1e-10;       // relative primal step tolerance
  double feas_tol = 1e-7;   // constraint slack tolerance
  int check_every = 25;
  int power_iters = 50;
  double step_safety = 1.05;
  double step_scale = 0.95;  // tau = sigma = step_scale / ||K||
  std::function<void(int, double)> gap_trace;  // iteration, gap surrogate
};

struct PdhgProblem {
  int dim = 0;
  std::vector<DualBlock> blocks;
  std::function<void(Vec&, double)> primal_prox;    // optional, prox_{tau f0}
  std::function<double(const Vec&)> objective;      // for reporting
  std::function<double(const Vec&)> slack;          // statistic - q, or null
};

SolveReport pdhg_run(const PdhgProblem& problem, const PdhgOptions& options);

/// Solves the constrained program of a MindProblem. Throws on non-convex
/// regularizers (jump counting lives in the changepoint module). Reports
/// feasible = false when the slack never reaches feas_tol.
SolveReport pdhg_solve(const MindProblem& problem,
                       const PdhgOptions& options = {});

/// min 1/2 ||X beta||^2 subject to max_a ||B_a X^T (Y - X beta)||_2 / w_a
/// <= gamma — the dual reformulation of the (group) lasso.
SolveReport solve_group_lasso_dual(const DesignOperator& X, const Vec& Y,
                                   const BlockPartition& partition,
                                   const Vec& weights, double gamma,
                                   std::shared_ptr<const HaarBasis> basis = {},
                                   const PdhgOptions& options = {});

enum class BallNorm { l2, linf };
Vec project_ball(Vec v, double r, BallNorm norm);

/// Exact minimizer of 1/2 ||v - u||^2 + gamma sum |u_{i+1} - u_i|, O(n)
/// taut-string sweep.
Vec prox_tv_1d(const Vec& v, double gamma);

/// Accelerated proximal gradient (FISTA) for
/// 1/2 ||Y - X beta||^2 + gamma sum_a w_a ||B_a beta||_2.
Vec group_lasso_solve(const DesignOperator& X, const Vec& Y,
                      const BlockPartition& partition, const Vec& weights,
                      double gamma, int max_iter = 20000, double tol = 1e-12,
                      std::shared_ptr<const HaarBasis> basis = {});

struct ConjugateValue {
  bool finite = false;   // true iff the conjugate is 0 at mu
  double max_ratio = 0;  // max_a ||B_a mu||_2 / w_a
};

/// Fenchel conjugate of the block l1 norm: 0 on the dual ball, +inf outside.
ConjugateValue conjugate_block_l1(const Vec& mu, const BlockPartition& partition,
                                  const Vec& weights,
                                  std::shared_ptr<const HaarBasis> basis = {});

struct DualEquivalenceReport {
  Vec beta_penalized;
  Vec beta_constrained;
  double prediction_gap = 0.0;   // ||X b1 - X b2||_2
  double primal_slack = 0.0;     // constraint violation of b1 in the dual program
};

/// Solves the penalized group lasso and its constrained dual reformulation
/// and compares predictions (solutions may be non-unique, predictions agree).
DualEquivalenceReport verify_dual_equivalence(
    const DesignOperator& X, const Vec& Y, const BlockPartition& partition,
    const Vec& weights, double gamma, double tol,
    std::shared_ptr<const HaarBasis> basis = {});

/// min 1/2 ||Y - X beta||^2 + gamma R(beta) via FISTA with the exact prox of
/// R. Supported: l2_sq, tv, sq_diff, l1_coeff, block_l1.
Vec penalized_solve(const DesignOperator& X, const Vec& Y,
                    const Regularizer& reg, double gamma, int max_iter = 20000,
                    double tol = 1e-13);

struct DiscrepancyResult {
  double gamma = 0.0;
  Vec beta_hat;
  bool degenerate = false;  // R-minimizer already feasible, gamma = 0
  double residual = 0.0;    // ||Y - X beta_hat||_2
};

/// Morozov discrepancy calibration: bisection on gamma in [1e-8, 1e8] until
/// the penalized residual norm hits q within tol.
DiscrepancyResult discrepancy_calibrate(const DesignOperator& op,
                                        const Observation& obs,
                                        const Regularizer& reg, double q,
                                        double tol);

}  // namespace mindkit
