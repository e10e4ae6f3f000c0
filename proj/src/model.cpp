#include "mindkit/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mindkit {

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on uniforms from the raw 64-bit stream.
  double u1, u2;
  do {
    u1 = (rng_() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  u2 = (rng_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

void GaussianSampler::fill(Vec& out, double sigma) {
  for (double& x : out) x = sigma * next();
}

DesignOperator DesignOperator::identity(int n) {
  if (n <= 0) throw std::invalid_argument("identity: n must be positive");
  return DesignOperator(Kind::identity, n, n, {});
}

DesignOperator DesignOperator::cumulative_sum(int n) {
  if (n <= 0) throw std::invalid_argument("cumulative_sum: n must be positive");
  return DesignOperator(Kind::cumulative_sum, n, n, {});
}

DesignOperator DesignOperator::dense(int n, int p, Vec entries) {
  if (n <= 0 || p <= 0) throw std::invalid_argument("dense: bad dimensions");
  if (static_cast<int>(entries.size()) != n * p)
    throw std::invalid_argument("dense: entries size mismatch");
  return DesignOperator(Kind::dense, n, p, std::move(entries));
}

Vec DesignOperator::apply(const Vec& beta) const {
  if (static_cast<int>(beta.size()) != p_)
    throw std::invalid_argument("apply: dimension mismatch");
  switch (kind_) {
    case Kind::identity:
      return beta;
    case Kind::cumulative_sum: {
      Vec out(n_);
      double s = 0.0;
      for (int i = 0; i < n_; ++i) {
        s += beta[i];
        out[i] = s;
      }
      return out;
    }
    case Kind::dense: {
      Vec out(n_, 0.0);
      for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* row = entries_.data() + static_cast<std::size_t>(i) * p_;
        for (int j = 0; j < p_; ++j) s += row[j] * beta[j];
        out[i] = s;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec DesignOperator::apply_adjoint(const Vec& v) const {
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("apply_adjoint: dimension mismatch");
  switch (kind_) {
    case Kind::identity:
      return v;
    case Kind::cumulative_sum: {
      // entry j = sum_{i >= j} v_i
      Vec out(n_);
      double s = 0.0;
      for (int j = n_ - 1; j >= 0; --j) {
        s += v[j];
        out[j] = s;
      }
      return out;
    }
    case Kind::dense: {
      Vec out(p_, 0.0);
      for (int i = 0; i < n_; ++i) {
        const double* row = entries_.data() + static_cast<std::size_t>(i) * p_;
        for (int j = 0; j < p_; ++j) out[j] += row[j] * v[i];
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Observation simulate(const DesignOperator& op, const Vec& beta, double sigma,
                     std::uint64_t seed) {
  if (sigma <= 0.0) throw std::invalid_argument("simulate: sigma must be > 0");
  Observation obs;
  obs.y = op.apply(beta);
  obs.sigma = sigma;
  obs.seed = seed;
  GaussianSampler g(seed);
  for (double& yi : obs.y) yi += sigma * g.next();
  return obs;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace mindkit
