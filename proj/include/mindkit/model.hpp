#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mindkit {

using Vec = std::vector<double>;

/// Deterministic Gaussian stream: mt19937_64 + Box-Muller.
/// Identical seed gives bit-identical draws on every platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next();
  void fill(Vec& out, double sigma);

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Linear observation model Y = X beta + noise. Three design kinds:
/// identity (regression), cumulative_sum (change points, lower-triangular
/// ones) and a general dense matrix stored row-major.
class DesignOperator {
 public:
  enum class Kind { identity, cumulative_sum, dense };

  static DesignOperator identity(int n);
  static DesignOperator cumulative_sum(int n);
  static DesignOperator dense(int n, int p, Vec entries);

  Kind kind() const { return kind_; }
  int rows() const { return n_; }
  int cols() const { return p_; }
  const Vec& entries() const { return entries_; }

  Vec apply(const Vec& beta) const;
  Vec apply_adjoint(const Vec& v) const;

 private:
  DesignOperator(Kind kind, int n, int p, Vec entries)
      : kind_(kind), n_(n), p_(p), entries_(std::move(entries)) {}

  Kind kind_;
  int n_;
  int p_;
  Vec entries_;  // dense kind only, row-major n x p
};

struct Observation {
  Vec y;
  double sigma = 1.0;
  std::optional<std::uint64_t> seed;
};

/// Draws Y = X beta + eps with eps iid N(0, sigma^2), reproducible per seed.
Observation simulate(const DesignOperator& op, const Vec& beta, double sigma,
                     std::uint64_t seed);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm_inf(const Vec& v);

}  // namespace mindkit
