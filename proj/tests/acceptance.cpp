// End-to-end acceptance gate. Each numbered check prints exactly one
// PASS/FAIL line; the binary exits nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mindkit/changepoint.hpp"
#include "mindkit/dictionaries.hpp"
#include "mindkit/model.hpp"
#include "mindkit/multiscale.hpp"
#include "mindkit/solvers.hpp"
#include "mindkit/thresholding.hpp"

using namespace mindkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------

// 1. the coefficient-constrained least-l1 program reproduces soft
//    thresholding on 200 instances within 1e-6, under 10 s
Outcome check_soft_equivalence() {
  const int n = 64;
  auto basis = std::make_shared<HaarBasis>(6);
  const double q = universal_threshold(n, 1.0);
  const double t0 = now_s();
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Vec truth(n, 0.0);
    truth[7] = 5.0;
    truth[33] = -4.0;
    truth[50] = 2.5;
    Observation obs = simulate(DesignOperator::identity(n), truth, 1.0,
                               10000 + rep);
    Vec closed = wavelet_threshold(obs, *basis,
                                   ShrinkageRule::uniform(n, q, Theta::soft()));
    MindProblem prob{DesignOperator::identity(n), obs,
                     MultiscaleConstraint{
                         ProbeSystem::from_basis(basis, Vec(n, q)), 1.0},
                     Regularizer::l1_coeff(basis)};
    auto report = pdhg_solve(prob);
    if (!report.feasible) return {false, "solver reported infeasible"};
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(report.beta_hat[i] - closed[i]));
  }
  const double dt = now_s() - t0;
  return {worst < 1e-6 && dt < 10.0,
          fmt("max gap %.2e, %.1f s", worst, dt)};
}

// 2. garrote equals soft thresholding with the adjusted weights, exactly
Outcome check_garrote_identity() {
  GaussianSampler g(2024);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double c = 3.0 * g.next();
    const double q = 0.2 + std::abs(g.next());
    const double w = q * q / std::max(q, std::abs(c));
    worst = std::max(worst, std::abs(eta_theta(c, w, Theta::soft()) -
                                     eta_theta(c, q, Theta::garrote())));
  }
  return {worst < 1e-12, fmt("max gap %.2e", worst)};
}

// 3. block soft thresholding, the penalized block solver and the constrained
//    dual program agree pairwise in prediction
Outcome check_block_threeway() {
  const int n = 64;
  auto basis = std::make_shared<HaarBasis>(6);
  BlockPartition part = contiguous_blocks(n, 8);
  const double gamma = 1.6;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Vec truth(n, 0.0);
    for (int i = 16; i < 32; ++i) truth[i] = 3.0;
    Observation obs = simulate(DesignOperator::identity(n), truth, 1.0,
                               20000 + rep);
    Vec direct = block_threshold(obs, *basis, part, Vec(8, gamma), 1);
    Vec pen = group_lasso_solve(DesignOperator::identity(n), obs.y, part,
                                Vec(8, 1.0), gamma, 100000, 1e-15, basis);
    auto dual = solve_group_lasso_dual(DesignOperator::identity(n), obs.y,
                                       part, Vec(8, 1.0), gamma, basis);
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(direct[i] - pen[i]));
      worst = std::max(worst, std::abs(direct[i] - dual.beta_hat[i]));
      worst = std::max(worst, std::abs(pen[i] - dual.beta_hat[i]));
    }
  }
  return {worst < 1e-5, fmt("max pairwise gap %.2e", worst)};
}

// 4. penalized lasso vs its constrained dual on dense designs: KKT residual
//    within gamma and prediction gap below 1e-5
Outcome check_lasso_duality() {
  const int n = 20, p = 8;
  BlockPartition singles = contiguous_blocks(p, p);
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    GaussianSampler g(30000 + rep);
    Vec entries(n * p);
    g.fill(entries, 1.0);
    auto X = DesignOperator::dense(n, p, entries);
    Vec beta(p, 0.0);
    beta[1] = 2.0;
    beta[5] = -1.0;
    Observation obs = simulate(X, beta, 0.5, 31000 + rep);
    const double gamma = 1.0;
    auto report = verify_dual_equivalence(X, obs.y, singles, Vec(p, 1.0),
                                          gamma, 1e-12);
    Vec resid = X.apply(report.beta_penalized);
    for (int i = 0; i < n; ++i) resid[i] = obs.y[i] - resid[i];
    worst_kkt = std::max(worst_kkt, norm_inf(X.apply_adjoint(resid)) / gamma);
    worst_gap = std::max(worst_gap, report.prediction_gap);
  }
  return {worst_kkt <= 1.0 + 1e-6 && worst_gap < 1e-5,
          fmt("kkt ratio %.8f, prediction gap %.2e", worst_kkt, worst_gap)};
}

// 5. penalized <-> constrained round trips for the quadratic and TV
//    regularizers; the quadratic case also matches the closed-form gamma
Outcome check_round_trips() {
  const int n = 48;
  ProbeSystem ip = [] {
    Vec flat(48 * 48, 0.0);
    for (int i = 0; i < 48; ++i) flat[i * 48 + i] = 1.0;
    return ProbeSystem::from_dense(48, {flat}, {48});
  }();
  double worst = 0.0, worst_gamma = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    Regularizer reg = variant == 0 ? Regularizer::l2_sq() : Regularizer::tv();
    for (int rep = 0; rep < 20; ++rep) {
      Vec truth(n, 1.0);
      for (int i = n / 2; i < n; ++i) truth[i] = 3.5;
      Observation obs = simulate(DesignOperator::identity(n), truth, 1.0,
                                 40000 + 100 * variant + rep);
      const double gamma0 = 1.0 + 0.2 * (rep % 5);
      Vec pen = penalized_solve(DesignOperator::identity(n), obs.y, reg, gamma0);
      Vec resid(n);
      for (int i = 0; i < n; ++i) resid[i] = obs.y[i] - pen[i];
      const double q = norm2(resid);

      MindProblem prob{DesignOperator::identity(n), obs,
                       MultiscaleConstraint{ip, q}, reg};
      auto report = pdhg_solve(prob);
      if (!report.feasible) return {false, "constrained solve infeasible"};
      const double r_pen = reg.value(pen);
      worst = std::max(worst, std::abs(report.objective - r_pen) /
                                  std::max(1.0, std::abs(r_pen)));

      if (variant == 0) {
        auto cal = discrepancy_calibrate(DesignOperator::identity(n), obs,
                                         reg, q, 1e-10);
        const double closed = q / (norm2(obs.y) - q);
        worst_gamma = std::max(worst_gamma,
                               std::abs(cal.gamma - closed) / closed);
      }
    }
  }
  return {worst < 1e-4 && worst_gamma < 1e-4,
          fmt("max rel objective gap %.2e, gamma gap %.2e", worst, worst_gamma)};
}

// 6. Monte Carlo quantiles of the coefficient maximum agree with the
//    extreme-value formula within 5% at n=4096, under 60 s
Outcome check_gumbel_calibration() {
  const int n = 4096;
  const double t0 = now_s();
  auto basis = std::make_shared<HaarBasis>(12);
  Vec samples = monte_carlo_statistic_samples(ProbeSystem::from_basis(basis),
                                              n, 1.0, 10000, 51);
  double worst = 0.0;
  for (double alpha : {0.05, 0.1}) {
    const int k = static_cast<int>(std::ceil(10000 * (1.0 - alpha)));
    const double mc = samples[std::min<std::size_t>(k, samples.size()) - 1];
    const double g = gumbel_threshold(n, 1.0, alpha);
    worst = std::max(worst, std::abs(mc - g) / g);
  }
  const double dt = now_s() - t0;
  return {worst < 0.05 && dt < 60.0,
          fmt("max rel gap %.3f, %.1f s", worst, dt)};
}

// 7. coverage of the sqrt(2 log n) threshold matches the prediction obtained
//    by inverting the extreme-value limit: exp(-1/sqrt(pi log n))
Outcome check_universal_coverage() {
  const int n = 4096;
  const double q = universal_threshold(n, 1.0);
  auto basis = std::make_shared<HaarBasis>(12);
  int hits = 0;
  const int reps = 5000;
  for (int rep = 0; rep < reps; ++rep) {
    Observation obs = simulate(DesignOperator::identity(n), Vec(n, 0.0), 1.0,
                               60000 + rep);
    Vec c = basis->analyze(obs.y);
    if (norm_inf(c) <= q) ++hits;
  }
  const double emp = double(hits) / reps;
  constexpr double kPi = 3.14159265358979323846;
  const double predicted = std::exp(-1.0 / std::sqrt(kPi * std::log(double(n))));
  return {std::abs(emp - predicted) <= 0.03,
          fmt("empirical %.4f vs predicted %.4f", emp, predicted)};
}

// 8. the segmentation dynamic program is exact against brute force
Outcome check_mcps_exactness() {
  int agree = 0;
  const int total = 200;
  for (int rep = 0; rep < total; ++rep) {
    const int n = 6 + rep % 7;  // 6..12
    auto sys = IntervalSystem::all_intervals(n);
    GaussianSampler g(70000 + rep);
    Vec y(n);
    g.fill(y, 1.0);
    for (int i = n / 2; i < n; ++i) y[i] += (rep % 3) * 2.0;
    const double q = (0.5 + 0.5 * (rep % 4)) * std::sqrt(2.0 * std::log(double(n)));
    if (mcps_solve(y, sys, q).jumps() == brute_force_mcps(y, sys, q).jumps())
      ++agree;
  }
  return {agree == total, fmt("%d/%d jump counts agree", agree, total)};
}

// 9. segmentation with the 0.9-quantile threshold overestimates the jump
//    count in at most ~10% of replications
Outcome check_mcps_guarantee() {
  const int n = 128;
  auto sys = default_scale_penalties(n, IntervalSystem::all_intervals(n));
  const double q =
      monte_carlo_quantile(ProbeSystem::from_intervals(sys), n, 1.0, 0.1,
                           5000, 81)
          .q_alpha;
  Vec truth(n, 0.0);
  for (int i = 43; i < 86; ++i) truth[i] = 3.0;  // two jumps of size 3
  int ok = 0;
  const int reps = 1000;
  for (int rep = 0; rep < reps; ++rep) {
    Observation obs = simulate(DesignOperator::identity(n), truth, 1.0,
                               80000 + rep);
    if (mcps_solve(obs.y, sys, q).jumps() <= 2) ++ok;
  }
  const double freq = double(ok) / reps;
  return {freq >= 0.88, fmt("frequency %.3f (q=%.3f)", freq, q)};
}

// 10. denoising a smooth signal with jumps: the garrote shrinks large
//     coefficients less than soft, and hard keeps them exactly
Outcome check_threshold_family_properties() {
  const int n = 1024;
  const double sigma = 0.1;
  constexpr double kPi = 3.14159265358979323846;
  Vec truth(n);
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / n;
    if (t < 0.3)
      truth[i] = 2.0 * std::sin(3.0 * kPi * t);
    else if (t < 0.6)
      truth[i] = 2.0 * std::sin(3.0 * kPi * t) - 2.0 + 4.0 * (t - 0.3);
    else
      truth[i] = 2.0 * std::cos(6.0 * kPi * t) + 1.0;
  }
  Observation obs = simulate(DesignOperator::identity(n), truth, sigma, 91);
  HaarBasis basis(10);
  const double q = universal_threshold(n, sigma);

  Vec soft = wavelet_threshold(obs, basis, ShrinkageRule::uniform(n, q, Theta::soft()));
  Vec hard = wavelet_threshold(obs, basis, ShrinkageRule::uniform(n, q, Theta::hard_rule()));
  Vec gar = wavelet_threshold(obs, basis, ShrinkageRule::uniform(n, q, Theta::garrote()));
  Vec block = block_threshold(obs, basis, contiguous_blocks(n, 16),
                              Vec(16, q * 8.0), 1);
  if (block.size() != static_cast<std::size_t>(n)) return {false, "block failed"};

  Vec cy = basis.analyze(obs.y);
  Vec ct = basis.analyze(truth);
  Vec cs = basis.analyze(soft);
  Vec cg = basis.analyze(gar);
  Vec ch = basis.analyze(hard);

  double mse_soft = 0.0, mse_gar = 0.0, worst_hard = 0.0;
  int large = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(cy[i]) > 2.0 * q) {
      ++large;
      mse_soft += (cs[i] - ct[i]) * (cs[i] - ct[i]);
      mse_gar += (cg[i] - ct[i]) * (cg[i] - ct[i]);
    }
    if (std::abs(cy[i]) > q)
      worst_hard = std::max(worst_hard, std::abs(ch[i] - cy[i]));
  }
  const bool pass = large > 0 && mse_gar <= mse_soft && worst_hard <= 1e-12;
  return {pass, fmt("%d large coeffs, garrote mse %.3e <= soft mse %.3e, "
                    "hard max gap %.1e",
                    large, mse_gar, mse_soft, worst_hard)};
}

// 11. on a 10-jump signal of awkward length the multiscale segmentation
//     detects at least as many true jumps as the BIC-penalized baseline in
//     most replications
Outcome check_segmentation_comparison() {
  const int n = 1497;
  const double sigma = 1.0;
  // fixed random 10-jump signal
  GaussianSampler g(4242);
  std::vector<int> jumps;
  int pos = 0;
  for (int k = 0; k < 10; ++k) {
    pos += 60 + static_cast<int>(std::abs(g.next()) * 55.0);
    if (pos >= n - 60) pos = n - 60 - 10 * (10 - k);
    jumps.push_back(pos);
  }
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  Vec truth(n, 0.0);
  {
    double level = 0.0;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
      if (k < jumps.size() && i == jumps[k]) {
        const double mag = 2.0 + 2.0 * std::abs(g.next());
        level += (k % 2 ? -mag : mag);
        ++k;
      }
      truth[i] = level;
    }
  }

  auto sys = default_scale_penalties(n, IntervalSystem::dyadic(n));
  const double q =
      monte_carlo_quantile(ProbeSystem::from_intervals(sys), n, 1.0, 0.1,
                           1000, 4243)
          .q_alpha;
  const double gamma = 2.0 * sigma * sigma * std::log2(double(n));

  auto detected = [&](const std::vector<int>& est) {
    int d = 0;
    for (int tj : jumps) {
      for (int e : est)
        if (std::abs(e - (tj - 1)) <= 20) {
          ++d;
          break;
        }
    }
    return d;
  };

  int mcps_wins = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Observation obs = simulate(DesignOperator::identity(n), truth, sigma,
                               90000 + rep);
    const int d_mcps = detected(mcps_solve(obs.y, sys, q).breakpoints);
    const int d_potts = detected(jump_penalized_ls(obs.y, gamma).breakpoints);
    if (d_mcps >= d_potts) ++mcps_wins;
  }
  const double frac = double(mcps_wins) / reps;
  return {frac >= 0.6, fmt("multiscale >= baseline in %.0f%% of %d reps",
                           100.0 * frac, reps)};
}

// 12. the O(n) total-variation prox matches a brute-force oracle
Outcome check_prox_tv_oracle() {
  double worst = 0.0;
  GaussianSampler g(121);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 10;
    Vec v(n);
    g.fill(v, 1.0);
    const double gamma = 0.1 + 0.3 * (rep % 4);
    Vec fast = prox_tv_1d(v, gamma);

    // enumerate all 3^(n-1) difference sign patterns
    Vec best;
    double best_obj = 0.0;
    long patterns = 1;
    for (int i = 1; i < n; ++i) patterns *= 3;
    for (long code = 0; code < patterns; ++code) {
      long c = code;
      std::vector<int> sign(n - 1);
      for (int i = 0; i < n - 1; ++i) {
        sign[i] = static_cast<int>(c % 3) - 1;
        c /= 3;
      }
      Vec u(n);
      int start = 0;
      while (start < n) {
        int end = start;
        while (end + 1 < n && sign[end] == 0) ++end;
        double mean = 0.0;
        for (int i = start; i <= end; ++i) mean += v[i];
        mean /= end - start + 1;
        const int sl = start > 0 ? sign[start - 1] : 0;
        const int sr = end < n - 1 ? sign[end] : 0;
        const double mu = mean + gamma * (sr - sl) / (end - start + 1);
        for (int i = start; i <= end; ++i) u[i] = mu;
        start = end + 1;
      }
      double obj = 0.0;
      for (int i = 0; i < n; ++i) obj += 0.5 * (v[i] - u[i]) * (v[i] - u[i]);
      for (int i = 1; i < n; ++i) obj += gamma * std::abs(u[i] - u[i - 1]);
      if (best.empty() || obj < best_obj) {
        best = u;
        best_obj = obj;
      }
    }
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(fast[i] - best[i]));
  }
  return {worst <= 1e-8, fmt("max gap %.2e", worst)};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Check> checks = {
      {"constrained program equals soft thresholding", check_soft_equivalence},
      {"garrote equals weighted soft thresholding", check_garrote_identity},
      {"three-way block estimator agreement", check_block_threeway},
      {"lasso duality (KKT + prediction gap)", check_lasso_duality},
      {"penalized/constrained round trips", check_round_trips},
      {"Monte Carlo vs extreme-value quantiles", check_gumbel_calibration},
      {"universal-threshold coverage", check_universal_coverage},
      {"segmentation DP exact vs brute force", check_mcps_exactness},
      {"segmentation jump-count guarantee", check_mcps_guarantee},
      {"threshold family shrinkage properties", check_threshold_family_properties},
      {"multiscale vs BIC segmentation detection", check_segmentation_comparison},
      {"total-variation prox vs QP oracle", check_prox_tv_oracle},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome out;
    try {
      out = checks[i].fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%2zu] %-48s %s (%s)\n", i + 1, checks[i].name,
                out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
