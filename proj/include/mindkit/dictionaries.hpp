#pragma once

#include <memory>
#include <vector>

#include "mindkit/model.hpp"

namespace mindkit {

/// Orthonormal discrete Haar basis of R^n, n = 2^J. Coefficients are laid
/// out as [scaling, level 0 (1 coeff), level 1 (2), ..., level J-1 (n/2)],
/// so index 0 is the scaling coefficient and level j starts at offset 2^j.
/// Both transforms run in O(n) via the pyramid scheme.
class HaarBasis {
 public:
  explicit HaarBasis(int levels);

  int levels() const { return J_; }
  int size() const { return n_; }

  /// (<phi_lambda, v>)_lambda.
  Vec analyze(const Vec& v) const;
  /// Inverse of analyze (the basis is orthonormal).
  Vec synthesize(const Vec& coeffs) const;

  /// The lambda-th basis vector, materialized.
  Vec basis_vector(int lambda) const;

  /// Offset of the first detail coefficient at level j.
  static int level_offset(int j) { return 1 << j; }

 private:
  int J_;
  int n_;
};

/// Disjoint groups of coefficient indices. `covers` is set when the union
/// of the blocks is the whole index set {0, ..., n-1}.
struct BlockPartition {
  std::vector<std::vector<int>> blocks;
  bool covers = false;

  void validate(int n) const;  // throws on overlap / out-of-range / bad flag
};

BlockPartition contiguous_blocks(int n, int num_blocks);

/// Interval probe system: probe (i,j) maps v to sum_{k=i..j} v_k with
/// weight sqrt(j-i+1) and scale penalty s_ij. Indices are 0-based and
/// inclusive.
struct IntervalSystem {
  enum class Variant { all, dyadic_lengths };

  struct Interval {
    int lo, hi;  // 0-based, inclusive
    double weight;
    double penalty = 0.0;
  };

  int n = 0;
  Variant variant = Variant::all;
  std::vector<Interval> intervals;

  static IntervalSystem all_intervals(int n);
  static IntervalSystem dyadic(int n);
};

/// sup over intervals of |sum_{k in B} v_k| / sqrt(|B|).
double nemirovskii_norm(const Vec& v, const IntervalSystem& sys);

/// Sets s_ij = sqrt(2 log(n / len)). The full-length interval gets s = 0.
IntervalSystem default_scale_penalties(int n, IntervalSystem sys);

/// |{(lambda, mu) : |<phi_lambda, phi_mu>| >= rho}| including the diagonal.
/// All vectors must be unit norm within 1e-8.
long coherence_count(const std::vector<Vec>& vectors, double rho);

/// Family {(T_a, w_a, s_a)} of linear probes on residuals. Four shapes:
///   basis     — scalar probes <phi_lambda, .> of an orthonormal basis
///   intervals — normalized interval sums
///   blocks    — vector probes extracting coefficient blocks (optionally in
///               a basis; basis == nullptr means standard coordinates)
///   dense     — explicit matrices, one per probe, row-major m_a x n
struct ProbeSystem {
  enum class Kind { basis, intervals, blocks, dense };

  Kind kind = Kind::basis;
  std::shared_ptr<const HaarBasis> basis;  // basis / blocks kinds
  BlockPartition partition;                // blocks kind
  IntervalSystem intervals;                // intervals kind
  std::vector<Vec> dense_probes;           // dense kind
  std::vector<int> dense_rows;             // m_a per dense probe
  std::vector<double> weights;             // w_a > 0, empty means all 1
  std::vector<double> penalties;           // s_a >= 0, empty means all 0

  int input_dim = 0;  // n

  std::size_t count() const;
  double weight(std::size_t a) const {
    return weights.empty() ? 1.0 : weights[a];
  }
  double penalty(std::size_t a) const {
    return penalties.empty() ? 0.0 : penalties[a];
  }
  void validate() const;

  static ProbeSystem from_basis(std::shared_ptr<const HaarBasis> basis,
                                Vec weights = {}, Vec penalties = {});
  static ProbeSystem from_intervals(IntervalSystem sys);
  static ProbeSystem from_blocks(std::shared_ptr<const HaarBasis> basis,
                                 BlockPartition partition, Vec weights = {},
                                 Vec penalties = {});
  static ProbeSystem from_dense(int n, std::vector<Vec> probes,
                                std::vector<int> rows, Vec weights = {},
                                Vec penalties = {});
};

}  // namespace mindkit
