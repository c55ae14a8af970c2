#pragma once

#include <cmath>
#include <map>
#include <utility>

namespace cbp {

inline constexpr double kInvPhi = 0.6180339887498949;

/// Maximizes a unimodal function over the integers lo..hi. Each index is
/// evaluated at most once. Returns (argmax, max); ties go to the smaller index.
template <class F>
std::pair<int, double> golden_max_int(int lo, int hi, F&& f) {
  std::map<int, double> memo;
  auto eval = [&](int i) {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    const double v = f(i);
    memo.emplace(i, v);
    return v;
  };
  int a = lo;
  int b = hi;
  while (b - a > 4) {
    const int span = b - a;
    const int c = b - static_cast<int>(std::lround(span * kInvPhi));
    const int d = a + static_cast<int>(std::lround(span * kInvPhi));
    if (c >= d) break;
    if (eval(c) >= eval(d)) b = d;
    else a = c;
  }
  int best = a;
  double best_v = eval(a);
  for (int i = a + 1; i <= b; ++i) {
    const double v = eval(i);
    if (v > best_v) {
      best = i;
      best_v = v;
    }
  }
  return {best, best_v};
}

/// Minimizes a unimodal function on [a, b] to an interval of width tol.
template <class F>
std::pair<double, double> golden_min(double a, double b, double tol, F&& f) {
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace cbp
