#pragma once

#include "mindkit/dictionaries.hpp"
#include "mindkit/model.hpp"

namespace mindkit {

/// Admissible constant levels for one segment; empty when lo > hi.
struct LevelBox {
  double lo = 1.0;
  double hi = -1.0;
  bool empty() const { return lo > hi; }
};

/// Piecewise-constant fit: jump after index tau (0-based, so segments are
/// [0, tau_1], [tau_1+1, tau_2], ...). levels has one entry per segment and
/// always lies inside the per-segment feasibility box.
struct Segmentation {
  std::vector<int> breakpoints;
  Vec levels;
  std::vector<LevelBox> boxes;

  int jumps() const { return static_cast<int>(breakpoints.size()); }
  Vec fitted(int n) const;
};

/// Intersection over all system intervals contained in [i, j] of
/// { mu : |sum_{k=a..b} (Y_k - mu)| / sqrt(len) - s_ab <= q }.
LevelBox segment_feasible_box(const Vec& y, int i, int j,
                              const IntervalSystem& sys, double q);

/// Minimal-jump segmentation subject to the interval-wise multiscale
/// constraints, dynamic programming over prefixes. Throws when no
/// segmentation is feasible at this q.
Segmentation mcps_solve(const Vec& y, const IntervalSystem& sys, double q);

/// Exhaustive search over all 2^(n-1) breakpoint patterns, n <= 14.
Segmentation brute_force_mcps(const Vec& y, const IntervalSystem& sys,
                              double q);

/// Exact Potts minimizer of 1/2 sum (Y - f)^2 + gamma * (#jumps), classical
/// O(n^2) dynamic program.
Segmentation jump_penalized_ls(const Vec& y, double gamma);

/// Number of level changes of a piecewise-constant vector.
int count_jumps(const Vec& f, double tol = 1e-9);

}  // namespace mindkit
