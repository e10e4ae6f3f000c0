#include <stdexcept>

#include "mindkit/solvers.hpp"

namespace mindkit {

// Taut-string sweep (Condat's direct 1D TV algorithm): one forward pass
// maintaining the running bounds of the string, segments are emitted as soon
// as a jump is certain.
Vec prox_tv_1d(const Vec& y, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("prox_tv_1d: gamma must be >= 0");
  const int n = static_cast<int>(y.size());
  Vec x(n);
  if (n == 0) return x;
  if (n == 1 || gamma == 0.0) return y;

  int k = 0, k0 = 0, km = 0, kp = 0;
  double vmin = y[0] - gamma;
  double vmax = y[0] + gamma;
  double umin = gamma;
  double umax = -gamma;

  while (true) {
    if (k == n - 1) {
      // termination: flush remaining segments
      if (umin < 0.0) {
        for (int i = k0; i <= km; ++i) x[i] = vmin;
        k = k0 = km = km + 1;
        vmin = y[k];
        umin = gamma;
        umax = y[k] + gamma - vmax;
        continue;
      }
      if (umax > 0.0) {
        for (int i = k0; i <= kp; ++i) x[i] = vmax;
        k = k0 = kp = kp + 1;
        vmax = y[k];
        umax = -gamma;
        umin = y[k] - gamma - vmin;
        continue;
      }
      const double level = vmin + umin / (k - k0 + 1);
      for (int i = k0; i <= k; ++i) x[i] = level;
      return x;
    }
    if (y[k + 1] + umin < vmin - gamma) {
      // negative jump is certain
      for (int i = k0; i <= km; ++i) x[i] = vmin;
      k = k0 = km = kp = km + 1;
      vmin = y[k];
      vmax = y[k] + 2.0 * gamma;
      umin = gamma;
      umax = -gamma;
    } else if (y[k + 1] + umax > vmax + gamma) {
      // positive jump is certain
      for (int i = k0; i <= kp; ++i) x[i] = vmax;
      k = k0 = km = kp = kp + 1;
      vmin = y[k] - 2.0 * gamma;
      vmax = y[k];
      umin = gamma;
      umax = -gamma;
    } else {
      // no jump yet, extend the segment
      ++k;
      umin += y[k] - vmin;
      umax += y[k] - vmax;
      if (umin >= gamma) {
        vmin += (umin - gamma) / (k - k0 + 1);
        umin = gamma;
        km = k;
      }
      if (umax <= -gamma) {
        vmax += (umax + gamma) / (k - k0 + 1);
        umax = -gamma;
        kp = k;
      }
    }
  }
}

}  // namespace mindkit
