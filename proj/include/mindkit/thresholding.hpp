#pragma once

#include <limits>

#include "mindkit/dictionaries.hpp"
#include "mindkit/model.hpp"

namespace mindkit {

/// Shrinkage exponent: theta = 1 is soft, 2 garrote (James-Stein), the hard
/// rule is a distinguished value rather than a float sentinel.
struct Theta {
  bool hard = false;
  double value = 1.0;

  static Theta soft() { return {false, 1.0}; }
  static Theta garrote() { return {false, 2.0}; }
  static Theta hard_rule() { return {true, 0.0}; }
  static Theta finite(double t) { return {false, t}; }
};

/// eta_theta(x, q) = x (1 - q^theta / |x|^theta)_+, hard rule keeps x when
/// |x| > q.
double eta_theta(double x, double q, Theta theta);

struct ShrinkageRule {
  Theta theta = Theta::soft();
  Vec thresholds;  // per coefficient index, all > 0

  static ShrinkageRule uniform(int n, double q, Theta theta);
};

/// beta_hat = sum_lambda eta_theta(<phi_lambda, Y>, q_lambda) phi_lambda.
Vec wavelet_threshold(const Observation& obs, const HaarBasis& basis,
                      const ShrinkageRule& rule);

/// w_lambda = q^2 / max{q, |c|}; soft thresholding with these weights equals
/// the garrote rule with thresholds q.
Vec garrote_weights(const Vec& coeffs, const Vec& q);

/// Degenerate weights reproducing hard thresholding: q if |c| <= q, else 0
/// (with the 0/0 = 1 reading of the constraint).
Vec hard_weights(const Vec& coeffs, const Vec& q);

/// Block shrinkage of basis coefficients: each block scaled by
/// (1 - q_a^theta / ||block||_2^theta)_+. theta must be 1 or 2.
Vec block_threshold(const Observation& obs, const HaarBasis& basis,
                    const BlockPartition& partition, const Vec& thresholds,
                    int theta);

/// Checks the variational characterization of coefficient-wise soft
/// thresholding: feasibility of the residual coefficients, and that every
/// coefficient of beta_hat is the minimum-modulus point of its feasible
/// interval [<phi,Y> - q, <phi,Y> + q].
struct CharacterizationReport {
  bool feasible = false;
  bool coefficientwise_minimal = false;
  double margin = 0.0;  // worst constraint violation / minimality gap
};

CharacterizationReport verify_characterization(const Vec& beta_hat,
                                               const Observation& obs,
                                               const HaarBasis& basis,
                                               const Vec& thresholds);

}  // namespace mindkit
