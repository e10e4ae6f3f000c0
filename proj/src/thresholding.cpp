#include "mindkit/thresholding.hpp"

#include <cmath>
#include <stdexcept>

namespace mindkit {

double eta_theta(double x, double q, Theta theta) {
  if (q <= 0.0) throw std::invalid_argument("eta_theta: q must be > 0");
  const double ax = std::abs(x);
  if (ax <= q) return 0.0;
  if (theta.hard) return x;
  if (theta.value <= 0.0)
    throw std::invalid_argument("eta_theta: theta must be > 0");
  return x * (1.0 - std::pow(q / ax, theta.value));
}

ShrinkageRule ShrinkageRule::uniform(int n, double q, Theta theta) {
  if (q <= 0.0) throw std::invalid_argument("ShrinkageRule: q must be > 0");
  return {theta, Vec(n, q)};
}

Vec wavelet_threshold(const Observation& obs, const HaarBasis& basis,
                      const ShrinkageRule& rule) {
  Vec c = basis.analyze(obs.y);
  if (rule.thresholds.size() != c.size())
    throw std::invalid_argument("wavelet_threshold: threshold count mismatch");
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = eta_theta(c[i], rule.thresholds[i], rule.theta);
  return basis.synthesize(c);
}

Vec garrote_weights(const Vec& coeffs, const Vec& q) {
  Vec w(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (q[i] <= 0.0) throw std::invalid_argument("garrote_weights: q <= 0");
    w[i] = q[i] * q[i] / std::max(q[i], std::abs(coeffs[i]));
  }
  return w;
}

Vec hard_weights(const Vec& coeffs, const Vec& q) {
  Vec w(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (q[i] <= 0.0) throw std::invalid_argument("hard_weights: q <= 0");
    w[i] = std::abs(coeffs[i]) <= q[i] ? q[i] : 0.0;
  }
  return w;
}

Vec block_threshold(const Observation& obs, const HaarBasis& basis,
                    const BlockPartition& partition, const Vec& thresholds,
                    int theta) {
  if (theta != 1 && theta != 2)
    throw std::invalid_argument("block_threshold: theta must be 1 or 2");
  partition.validate(basis.size());
  if (!partition.covers)
    throw std::invalid_argument("block_threshold: partition must cover");
  if (thresholds.size() != partition.blocks.size())
    throw std::invalid_argument("block_threshold: threshold count mismatch");
  Vec c = basis.analyze(obs.y);
  for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
    const double q = thresholds[a];
    if (q <= 0.0) throw std::invalid_argument("block_threshold: q <= 0");
    double nrm2 = 0.0;
    for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
    const double nrm = std::sqrt(nrm2);
    double factor = 0.0;
    if (nrm > q)
      factor = theta == 1 ? 1.0 - q / nrm : 1.0 - (q * q) / (nrm * nrm);
    for (int idx : partition.blocks[a]) c[idx] *= factor;
  }
  return basis.synthesize(c);
}

CharacterizationReport verify_characterization(const Vec& beta_hat,
                                               const Observation& obs,
                                               const HaarBasis& basis,
                                               const Vec& thresholds) {
  const Vec cy = basis.analyze(obs.y);
  const Vec cb = basis.analyze(beta_hat);
  CharacterizationReport rep;
  rep.feasible = true;
  rep.coefficientwise_minimal = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < cy.size(); ++i) {
    const double q = thresholds[i];
    if (q <= 0.0)
      throw std::invalid_argument("verify_characterization: q <= 0");
    const double slack = std::abs(cy[i] - cb[i]) / q - 1.0;
    if (slack > 1e-9) rep.feasible = false;
    // Minimum-modulus point of [cy - q, cy + q]: 0 if it contains 0,
    // otherwise the endpoint nearest 0 — exactly the soft threshold.
    const double want = eta_theta(cy[i], q, Theta::soft());
    const double gap = std::abs(cb[i] - want);
    if (gap > 1e-9) rep.coefficientwise_minimal = false;
    worst = std::max(worst, std::max(slack, gap));
  }
  rep.margin = worst;
  return rep;
}

}  // namespace mindkit
