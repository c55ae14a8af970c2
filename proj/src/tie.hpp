#pragma once

#include <cmath>
#include <limits>

namespace cbp {

// Rounding error that n steps of the recursion can leave in the score of an
// action at a state pair valued a and b. Scores closer than this are treated as
// ties and resolved toward the larger production rate: value differences near
// an on/off indifference approach it from the producing side, and rounding
// noise would otherwise flip the policy at random. At n = 0 the values are the
// exact boundary costs and only exact ties remain; those go to the smallest rate.
inline double tie_tolerance(int n, double a, double b, double lamf_max, double r_abs) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return 8.0 * eps * n * ((std::abs(a) + std::abs(b)) * lamf_max + r_abs);
}

}  // namespace cbp
