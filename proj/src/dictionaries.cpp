#include "mindkit/dictionaries.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mindkit {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

HaarBasis::HaarBasis(int levels) : J_(levels), n_(1 << levels) {
  if (levels < 0 || levels > 30)
    throw std::invalid_argument("HaarBasis: bad level count");
}

Vec HaarBasis::analyze(const Vec& v) const {
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("analyze: length must be 2^J");
  Vec c = v;
  Vec tmp(n_);
  for (int m = n_; m >= 2; m /= 2) {
    const int half = m / 2;
    for (int k = 0; k < half; ++k) {
      tmp[k] = (c[2 * k] + c[2 * k + 1]) * kInvSqrt2;
      tmp[half + k] = (c[2 * k] - c[2 * k + 1]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + m, c.begin());
  }
  return c;
}

Vec HaarBasis::synthesize(const Vec& coeffs) const {
  if (static_cast<int>(coeffs.size()) != n_)
    throw std::invalid_argument("synthesize: index set mismatch");
  Vec c = coeffs;
  Vec tmp(n_);
  for (int m = 2; m <= n_; m *= 2) {
    const int half = m / 2;
    for (int k = 0; k < half; ++k) {
      tmp[2 * k] = (c[k] + c[half + k]) * kInvSqrt2;
      tmp[2 * k + 1] = (c[k] - c[half + k]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + m, c.begin());
  }
  return c;
}

Vec HaarBasis::basis_vector(int lambda) const {
  if (lambda < 0 || lambda >= n_)
    throw std::invalid_argument("basis_vector: index out of range");
  Vec e(n_, 0.0);
  e[lambda] = 1.0;
  return synthesize(e);
}

void BlockPartition::validate(int n) const {
  std::vector<char> seen(n, 0);
  std::size_t total = 0;
  for (const auto& block : blocks) {
    for (int idx : block) {
      if (idx < 0 || idx >= n)
        throw std::invalid_argument("BlockPartition: index out of range");
      if (seen[idx]) throw std::invalid_argument("BlockPartition: overlap");
      seen[idx] = 1;
      ++total;
    }
  }
  if (covers && total != static_cast<std::size_t>(n))
    throw std::invalid_argument("BlockPartition: flagged covering but is not");
}

BlockPartition contiguous_blocks(int n, int num_blocks) {
  BlockPartition part;
  part.covers = true;
  part.blocks.resize(num_blocks);
  for (int i = 0; i < n; ++i)
    part.blocks[static_cast<long>(i) * num_blocks / n].push_back(i);
  return part;
}

IntervalSystem IntervalSystem::all_intervals(int n) {
  if (n < 1) throw std::invalid_argument("all_intervals: n must be >= 1");
  IntervalSystem sys;
  sys.n = n;
  sys.variant = Variant::all;
  sys.intervals.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int lo = 0; lo < n; ++lo)
    for (int hi = lo; hi < n; ++hi)
      sys.intervals.push_back({lo, hi, std::sqrt(double(hi - lo + 1)), 0.0});
  return sys;
}

IntervalSystem IntervalSystem::dyadic(int n) {
  if (n < 1) throw std::invalid_argument("dyadic: n must be >= 1");
  IntervalSystem sys;
  sys.n = n;
  sys.variant = Variant::dyadic_lengths;
  for (int len = 1; len <= n; len *= 2)
    for (int lo = 0; lo + len <= n; ++lo)
      sys.intervals.push_back({lo, lo + len - 1, std::sqrt(double(len)), 0.0});
  return sys;
}

double nemirovskii_norm(const Vec& v, const IntervalSystem& sys) {
  if (sys.intervals.empty())
    throw std::invalid_argument("nemirovskii_norm: empty system");
  const int n = static_cast<int>(v.size());
  Vec prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  double best = 0.0;
  for (const auto& iv : sys.intervals) {
    if (iv.lo < 0 || iv.hi >= n)
      throw std::invalid_argument("nemirovskii_norm: interval out of range");
    const double s = std::abs(prefix[iv.hi + 1] - prefix[iv.lo]) / iv.weight;
    best = std::max(best, s);
  }
  return best;
}

IntervalSystem default_scale_penalties(int n, IntervalSystem sys) {
  for (auto& iv : sys.intervals) {
    const double len = iv.hi - iv.lo + 1;
    iv.penalty = std::sqrt(std::max(0.0, 2.0 * std::log(double(n) / len)));
  }
  return sys;
}

long coherence_count(const std::vector<Vec>& vectors, double rho) {
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("coherence_count: rho must be in (0,1)");
  for (const auto& v : vectors)
    if (std::abs(norm2(v) - 1.0) > 1e-8)
      throw std::invalid_argument("coherence_count: vectors must be unit norm");
  const std::size_t m = vectors.size();
  long count = 0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (std::abs(dot(vectors[a], vectors[b])) >= rho) ++count;
  return count;
}

std::size_t ProbeSystem::count() const {
  switch (kind) {
    case Kind::basis:
      return basis ? static_cast<std::size_t>(basis->size()) : 0;
    case Kind::intervals:
      return intervals.intervals.size();
    case Kind::blocks:
      return partition.blocks.size();
    case Kind::dense:
      return dense_probes.size();
  }
  return 0;
}

void ProbeSystem::validate() const {
  if (count() == 0) throw std::invalid_argument("ProbeSystem: empty");
  if (!weights.empty() && weights.size() != count())
    throw std::invalid_argument("ProbeSystem: weight count mismatch");
  for (double w : weights)
    if (w <= 0.0) throw std::invalid_argument("ProbeSystem: weights must be > 0");
  if (!penalties.empty() && penalties.size() != count())
    throw std::invalid_argument("ProbeSystem: penalty count mismatch");
  for (double s : penalties)
    if (s < 0.0) throw std::invalid_argument("ProbeSystem: penalties must be >= 0");
}

ProbeSystem ProbeSystem::from_basis(std::shared_ptr<const HaarBasis> basis,
                                    Vec weights, Vec penalties) {
  ProbeSystem ps;
  ps.kind = Kind::basis;
  ps.input_dim = basis->size();
  ps.basis = std::move(basis);
  ps.weights = std::move(weights);
  ps.penalties = std::move(penalties);
  ps.validate();
  return ps;
}

ProbeSystem ProbeSystem::from_intervals(IntervalSystem sys) {
  ProbeSystem ps;
  ps.kind = Kind::intervals;
  ps.input_dim = sys.n;
  ps.weights.reserve(sys.intervals.size());
  ps.penalties.reserve(sys.intervals.size());
  for (const auto& iv : sys.intervals) {
    ps.weights.push_back(iv.weight);
    ps.penalties.push_back(iv.penalty);
  }
  ps.intervals = std::move(sys);
  ps.validate();
  return ps;
}

ProbeSystem ProbeSystem::from_blocks(std::shared_ptr<const HaarBasis> basis,
                                     BlockPartition partition, Vec weights,
                                     Vec penalties) {
  ProbeSystem ps;
  ps.kind = Kind::blocks;
  ps.input_dim = basis->size();
  partition.validate(basis->size());
  ps.basis = std::move(basis);
  ps.partition = std::move(partition);
  ps.weights = std::move(weights);
  ps.penalties = std::move(penalties);
  ps.validate();
  return ps;
}

ProbeSystem ProbeSystem::from_dense(int n, std::vector<Vec> probes,
                                    std::vector<int> rows, Vec weights,
                                    Vec penalties) {
  ProbeSystem ps;
  ps.kind = Kind::dense;
  ps.input_dim = n;
  if (probes.size() != rows.size())
    throw std::invalid_argument("from_dense: rows/probes mismatch");
  for (std::size_t a = 0; a < probes.size(); ++a)
    if (probes[a].size() != static_cast<std::size_t>(rows[a]) * n)
      throw std::invalid_argument("from_dense: probe matrix size mismatch");
  ps.dense_probes = std::move(probes);
  ps.dense_rows = std::move(rows);
  ps.weights = std::move(weights);
  ps.penalties = std::move(penalties);
  ps.validate();
  return ps;
}

}  // namespace mindkit
