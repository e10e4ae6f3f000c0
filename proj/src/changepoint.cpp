#include "mindkit/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mindkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> prefix_sums(const Vec& y) {
  std::vector<double> ps(y.size() + 1, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) ps[i + 1] = ps[i] + y[i];
  return ps;
}

double clamp_to(const LevelBox& box, double v) {
  return std::min(box.hi, std::max(box.lo, v));
}

// Constraint from one interval [a, b]: |S - mu*len|/sqrt(len) <= q + s,
// i.e. mu in [ (S - h*sqrt(len))/len, (S + h*sqrt(len))/len ] with h = q + s.
void intersect_interval(LevelBox& box, double sum, int len, double q,
                        double penalty) {
  const double h = q + penalty;
  if (h < 0.0) {
    box = LevelBox{};
    return;
  }
  const double half = h / std::sqrt(static_cast<double>(len));
  const double mean = sum / len;
  box.lo = std::max(box.lo, mean - half);
  box.hi = std::min(box.hi, mean + half);
}

// Intervals of the system grouped by their left endpoint, ascending right
// endpoints within a group. Lets the DP pick up exactly the constraints that
// appear when a candidate segment start moves one position to the left.
struct GroupedSystem {
  struct Entry {
    int hi;
    double penalty;
  };
  std::vector<std::vector<Entry>> by_lo;

  explicit GroupedSystem(const IntervalSystem& sys, int n) : by_lo(n) {
    for (const auto& iv : sys.intervals) {
      if (iv.lo < 0 || iv.hi >= n) throw std::invalid_argument("interval out of range");
      by_lo[iv.lo].push_back({iv.hi, iv.penalty});
    }
    for (auto& g : by_lo)
      std::sort(g.begin(), g.end(),
                [](const Entry& a, const Entry& b) { return a.hi < b.hi; });
  }
};

Segmentation build_segmentation(const Vec& y, const std::vector<int>& starts,
                                const IntervalSystem& sys, double q) {
  const int n = static_cast<int>(y.size());
  const auto ps = prefix_sums(y);
  Segmentation seg;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const int i = starts[k];
    const int j = (k + 1 < starts.size()) ? starts[k + 1] - 1 : n - 1;
    LevelBox box = segment_feasible_box(y, i, j, sys, q);
    if (box.empty()) throw std::logic_error("reconstructed segment infeasible");
    const double mean = (ps[j + 1] - ps[i]) / (j - i + 1);
    seg.levels.push_back(clamp_to(box, mean));
    seg.boxes.push_back(box);
    if (i > 0) seg.breakpoints.push_back(i - 1);
  }
  return seg;
}

}  // namespace

Vec Segmentation::fitted(int n) const {
  Vec f(n);
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    if (seg < breakpoints.size() && i > breakpoints[seg]) ++seg;
    f[i] = levels[seg];
  }
  return f;
}

int count_jumps(const Vec& f, double tol) {
  int jumps = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (std::abs(f[i] - f[i - 1]) > tol) ++jumps;
  return jumps;
}

LevelBox segment_feasible_box(const Vec& y, int i, int j,
                              const IntervalSystem& sys, double q) {
  if (i < 0 || j >= static_cast<int>(y.size()) || i > j)
    throw std::invalid_argument("bad segment bounds");
  const auto ps = prefix_sums(y);
  LevelBox box{-kInf, kInf};
  for (const auto& iv : sys.intervals) {
    if (iv.lo < i || iv.hi > j) continue;
    intersect_interval(box, ps[iv.hi + 1] - ps[iv.lo], iv.hi - iv.lo + 1, q,
                       iv.penalty);
    if (box.empty()) break;
  }
  return box;
}

Segmentation mcps_solve(const Vec& y, const IntervalSystem& sys, double q) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw std::invalid_argument("empty data");
  const GroupedSystem grouped(sys, n);
  const auto ps = prefix_sums(y);

  // cost[j+1] = minimal number of segments covering y[0..j]; pred[j] = start
  // of the last segment in one optimal cover.
  std::vector<int> cost(n + 1, std::numeric_limits<int>::max());
  std::vector<int> pred(n, -1);
  cost[0] = 0;

  for (int j = 0; j < n; ++j) {
    LevelBox box{-kInf, kInf};
    for (int i = j; i >= 0; --i) {
      // Constraints newly contained in [i, j] all have left endpoint i.
      for (const auto& e : grouped.by_lo[i]) {
        if (e.hi > j) break;
        intersect_interval(box, ps[e.hi + 1] - ps[i], e.hi - i + 1, q,
                           e.penalty);
      }
      if (box.empty()) break;  // shrinks monotonically as i decreases
      if (cost[i] == std::numeric_limits<int>::max()) continue;
      if (cost[i] + 1 <= cost[j + 1]) {  // prefer longer last segments
        cost[j + 1] = cost[i] + 1;
        pred[j] = i;
      }
    }
  }

  if (cost[n] == std::numeric_limits<int>::max())
    throw std::runtime_error("no feasible segmentation at this threshold");

  std::vector<int> starts;
  for (int j = n - 1; j >= 0; j = pred[j] - 1) starts.push_back(pred[j]);
  std::reverse(starts.begin(), starts.end());
  return build_segmentation(y, starts, sys, q);
}

Segmentation brute_force_mcps(const Vec& y, const IntervalSystem& sys,
                              double q) {
  const int n = static_cast<int>(y.size());
  if (n < 1 || n > 14) throw std::invalid_argument("brute force needs 1 <= n <= 14");
  int best_jumps = -1;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    const int jumps = __builtin_popcount(mask);
    if (best_jumps >= 0 && jumps >= best_jumps) continue;
    bool ok = true;
    int start = 0;
    for (int i = 0; i < n && ok; ++i) {
      const bool last = (i == n - 1);
      if (last || (mask >> i) & 1u) {
        ok = !segment_feasible_box(y, start, i, sys, q).empty();
        start = i + 1;
      }
    }
    if (ok) {
      best_jumps = jumps;
      best_mask = mask;
    }
  }
  if (best_jumps < 0)
    throw std::runtime_error("no feasible segmentation at this threshold");
  std::vector<int> starts{0};
  for (int i = 0; i + 1 < n; ++i)
    if ((best_mask >> i) & 1u) starts.push_back(i + 1);
  return build_segmentation(y, starts, sys, q);
}

Segmentation jump_penalized_ls(const Vec& y, double gamma) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw std::invalid_argument("empty data");
  if (gamma < 0.0) throw std::invalid_argument("penalty must be nonnegative");
  const auto ps = prefix_sums(y);
  std::vector<double> ps2(n + 1, 0.0);
  for (int i = 0; i < n; ++i) ps2[i + 1] = ps2[i] + y[i] * y[i];

  auto sse = [&](int i, int j) {
    const double s = ps[j + 1] - ps[i];
    return (ps2[j + 1] - ps2[i]) - s * s / (j - i + 1);
  };

  std::vector<double> cost(n + 1, kInf);
  std::vector<int> pred(n, 0);
  cost[0] = -gamma;  // first segment carries no jump penalty
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double c = cost[i] + gamma + 0.5 * sse(i, j);
      if (c < cost[j + 1]) {
        cost[j + 1] = c;
        pred[j] = i;
      }
    }
  }

  Segmentation seg;
  std::vector<int> starts;
  for (int j = n - 1; j >= 0; j = pred[j] - 1) starts.push_back(pred[j]);
  std::reverse(starts.begin(), starts.end());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const int i = starts[k];
    const int j = (k + 1 < starts.size()) ? starts[k + 1] - 1 : n - 1;
    const double mean = (ps[j + 1] - ps[i]) / (j - i + 1);
    seg.levels.push_back(mean);
    seg.boxes.push_back({mean, mean});
    if (i > 0) seg.breakpoints.push_back(i - 1);
  }
  return seg;
}

}  // namespace mindkit
