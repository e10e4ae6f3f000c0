#include "mindkit/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mindkit {

double multiscale_statistic(const Vec& residual, const ProbeSystem& probes) {
  probes.validate();
  if (static_cast<int>(residual.size()) != probes.input_dim)
    throw std::invalid_argument("multiscale_statistic: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  switch (probes.kind) {
    case ProbeSystem::Kind::basis: {
      const Vec c = probes.basis->analyze(residual);
      for (std::size_t a = 0; a < c.size(); ++a)
        best = std::max(best,
                        std::abs(c[a]) / probes.weight(a) - probes.penalty(a));
      break;
    }
    case ProbeSystem::Kind::intervals: {
      const int n = probes.input_dim;
      Vec prefix(n + 1, 0.0);
      for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + residual[i];
      for (std::size_t a = 0; a < probes.intervals.intervals.size(); ++a) {
        const auto& iv = probes.intervals.intervals[a];
        const double s = std::abs(prefix[iv.hi + 1] - prefix[iv.lo]);
        best = std::max(best, s / probes.weight(a) - probes.penalty(a));
      }
      break;
    }
    case ProbeSystem::Kind::blocks: {
      const Vec c = probes.basis ? probes.basis->analyze(residual) : residual;
      for (std::size_t a = 0; a < probes.partition.blocks.size(); ++a) {
        double nrm2 = 0.0;
        for (int idx : probes.partition.blocks[a]) nrm2 += c[idx] * c[idx];
        best = std::max(best, std::sqrt(nrm2) / probes.weight(a) -
                                  probes.penalty(a));
      }
      break;
    }
    case ProbeSystem::Kind::dense: {
      for (std::size_t a = 0; a < probes.dense_probes.size(); ++a) {
        const int m = probes.dense_rows[a];
        const Vec& mat = probes.dense_probes[a];
        double nrm2 = 0.0;
        for (int r = 0; r < m; ++r) {
          double s = 0.0;
          const double* row =
              mat.data() + static_cast<std::size_t>(r) * probes.input_dim;
          for (int j = 0; j < probes.input_dim; ++j) s += row[j] * residual[j];
          nrm2 += s * s;
        }
        best = std::max(best, std::sqrt(nrm2) / probes.weight(a) -
                                  probes.penalty(a));
      }
      break;
    }
  }
  return best;
}

Vec monte_carlo_statistic_samples(const ProbeSystem& probes, int n,
                                  double sigma, int reps, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("monte carlo: reps must be >= 1");
  Vec samples(reps);
  Vec noise(n);
  for (int r = 0; r < reps; ++r) {
    GaussianSampler g(seed + static_cast<std::uint64_t>(r));
    g.fill(noise, sigma);
    samples[r] = multiscale_statistic(noise, probes);
  }
  std::sort(samples.begin(), samples.end());
  return samples;
}

QuantileEstimate monte_carlo_quantile(const ProbeSystem& probes, int n,
                                      double sigma, double alpha, int reps,
                                      std::uint64_t seed) {
  if (reps < 100)
    throw std::invalid_argument("monte_carlo_quantile: reps must be >= 100");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("monte_carlo_quantile: alpha in (0,1)");
  const Vec samples = monte_carlo_statistic_samples(probes, n, sigma, reps, seed);
  // Conservative ceil(reps (1-alpha)) order statistic.
  int k = static_cast<int>(std::ceil(reps * (1.0 - alpha)));
  k = std::clamp(k, 1, reps);
  QuantileEstimate est;
  est.alpha = alpha;
  est.reps = reps;
  est.q_alpha = samples[k - 1];
  // Distribution-free order-statistic spread as a standard-error proxy.
  const double se_k = std::sqrt(reps * alpha * (1.0 - alpha));
  const int lo = std::clamp(static_cast<int>(k - se_k), 1, reps);
  const int hi = std::clamp(static_cast<int>(k + se_k + 1), 1, reps);
  est.stderr_boot = 0.5 * (samples[hi - 1] - samples[lo - 1]);
  return est;
}

double gumbel_threshold(int n, double sigma, double alpha) {
  if (n < 3) throw std::invalid_argument("gumbel_threshold: n must be >= 3");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("gumbel_threshold: alpha in (0,1)");
  const double x = -std::log(-std::log(1.0 - alpha));
  const double a = std::sqrt(2.0 * std::log(double(n)));
  return sigma * a +
         sigma * (2.0 * x - std::log(std::log(double(n))) - std::log(M_PI)) /
             (2.0 * a);
}

double universal_threshold(int n, double sigma) {
  if (n < 2) throw std::invalid_argument("universal_threshold: n must be >= 2");
  return sigma * std::sqrt(2.0 * std::log(double(n)));
}

FeasibilityResult is_feasible(const Vec& beta, const Observation& obs,
                              const DesignOperator& op,
                              const MultiscaleConstraint& c) {
  Vec residual = op.apply(beta);
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = obs.y[i] - residual[i];
  const double t = multiscale_statistic(residual, c.probes);
  return {t <= c.q + 1e-9, c.q - t};
}

double simulate_guarantee(const Estimator& estimator,
                          const DesignOperator& op, const Vec& truth,
                          const RegFunctional& reg, double sigma, int reps,
                          std::uint64_t seed) {
  const double r_true = reg(truth);
  int hits = 0;
  for (int r = 0; r < reps; ++r) {
    const Observation obs =
        simulate(op, truth, sigma, seed + static_cast<std::uint64_t>(r));
    const Vec beta_hat = estimator(obs);
    if (reg(beta_hat) <= r_true + 1e-9) ++hits;
  }
  return double(hits) / reps;
}

double estimate_sigma(const Vec& y) {
  if (y.size() < 2)
    throw std::invalid_argument("estimate_sigma: need at least 2 samples");
  Vec d;
  d.reserve(y.size() / 2);
  for (std::size_t i = 0; i + 1 < y.size(); i += 2)
    d.push_back(std::abs(y[i] - y[i + 1]) * 0.70710678118654752440);
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size();
  const double median =
      m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
  return 1.4826 * median;
}

}  // namespace mindkit
