#pragma once

#include <cstdint>
#include <functional>

#include "mindkit/dictionaries.hpp"
#include "mindkit/model.hpp"

namespace mindkit {

struct MultiscaleConstraint {
  ProbeSystem probes;
  double q = 0.0;
};

struct QuantileEstimate {
  double alpha = 0.1;
  double q_alpha = 0.0;
  int reps = 0;
  double stderr_boot = 0.0;
};

/// T = max_a { ||T_a r||_2 / w_a - s_a }.
double multiscale_statistic(const Vec& residual, const ProbeSystem& probes);

/// Empirical (1-alpha)-quantile of the pure-noise statistic over `reps`
/// draws; the statistic is pivotal so pure noise suffices. Uses the
/// ceil(reps*(1-alpha)) order statistic. Deterministic per seed; replication
/// i draws from seed + i.
QuantileEstimate monte_carlo_quantile(const ProbeSystem& probes, int n,
                                      double sigma, double alpha, int reps,
                                      std::uint64_t seed);

/// Draws all `reps` statistic samples (sorted ascending); quantiles at
/// several levels can then be read off one simulation.
Vec monte_carlo_statistic_samples(const ProbeSystem& probes, int n,
                                  double sigma, int reps, std::uint64_t seed);

/// Gumbel-limit threshold for maxima of n orthonormal-basis coefficients:
/// q = sigma sqrt(2 log n) + sigma (2x - loglog n - log pi)/(2 sqrt(2 log n))
/// with x = -log(-log(1-alpha)).
double gumbel_threshold(int n, double sigma, double alpha);

/// sigma sqrt(2 log n).
double universal_threshold(int n, double sigma);

struct FeasibilityResult {
  bool feasible = false;
  double slack = 0.0;  // q - statistic, positive when strictly inside
};

FeasibilityResult is_feasible(const Vec& beta, const Observation& obs,
                              const DesignOperator& op,
                              const MultiscaleConstraint& c);

using Estimator = std::function<Vec(const Observation&)>;
using RegFunctional = std::function<double(const Vec&)>;

/// Empirical coverage of the guarantee P{R(beta_hat) <= R(beta)}: fraction
/// of replications with R(estimate) <= R(truth) + 1e-9.
double simulate_guarantee(const Estimator& estimator,
                          const DesignOperator& op, const Vec& truth,
                          const RegFunctional& reg, double sigma, int reps,
                          std::uint64_t seed);

/// 1.4826 * median |pairwise Haar detail| — robust noise level for the CLI
/// when sigma is not supplied. Works for any n >= 2.
double estimate_sigma(const Vec& y);

}  // namespace mindkit
