#include <cmath>
#include <stdexcept>

#include "mindkit/solvers.hpp"

namespace mindkit {

Regularizer Regularizer::l1_coeff(std::shared_ptr<const HaarBasis> basis) {
  Regularizer r;
  r.kind = Kind::l1_coeff;
  r.basis = std::move(basis);
  return r;
}

Regularizer Regularizer::block_l1(BlockPartition partition, Vec weights,
                                  std::shared_ptr<const HaarBasis> basis) {
  Regularizer r;
  r.kind = Kind::block_l1;
  r.partition = std::move(partition);
  r.block_weights = std::move(weights);
  r.basis = std::move(basis);
  return r;
}

Regularizer Regularizer::sobolev(int k, double q) {
  if (k < 0) throw std::invalid_argument("sobolev: k must be >= 0");
  if (q != 1.0 && q != 2.0)
    throw std::invalid_argument("sobolev: only q in {1,2} supported");
  Regularizer r;
  r.kind = Kind::sobolev_kq;
  r.sobolev_k = k;
  r.sobolev_q = q;
  return r;
}

namespace {

Vec forward_diff(const Vec& v) {
  Vec d(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) d[i] = v[i + 1] - v[i];
  return d;
}

double lq_norm(const Vec& v, double q) {
  if (q == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  return norm2(v);
}

}  // namespace

double Regularizer::value(const Vec& beta) const {
  switch (kind) {
    case Kind::l2_sq:
      return 0.5 * dot(beta, beta);
    case Kind::sq_diff: {
      if (beta.size() < 2) return 0.0;
      const Vec d = forward_diff(beta);
      return 0.5 * dot(d, d);
    }
    case Kind::tv: {
      if (beta.size() < 2) return 0.0;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < beta.size(); ++i)
        s += std::abs(beta[i + 1] - beta[i]);
      return s;
    }
    case Kind::l1_coeff: {
      const Vec c = basis ? basis->analyze(beta) : beta;
      double s = 0.0;
      for (double x : c) s += std::abs(x);
      return s;
    }
    case Kind::block_l1: {
      const Vec c = basis ? basis->analyze(beta) : beta;
      double s = 0.0;
      for (std::size_t a = 0; a < partition.blocks.size(); ++a) {
        double nrm2 = 0.0;
        for (int idx : partition.blocks[a]) nrm2 += c[idx] * c[idx];
        const double w = block_weights.empty() ? 1.0 : block_weights[a];
        s += w * std::sqrt(nrm2);
      }
      return s;
    }
    case Kind::sobolev_kq: {
      double s = 0.0;
      Vec d = beta;
      for (int l = 0; l <= sobolev_k; ++l) {
        s += lq_norm(d, sobolev_q);
        if (static_cast<int>(d.size()) < 2) break;
        d = forward_diff(d);
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace mindkit
