#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cbp/hjb.hpp"
#include "cbp/model.hpp"

namespace cbp {

enum class BangBangReason { EqualFunctions, PowerExponentDominance, ConvexConcave, RatioTestGrid, NotDetected };

std::string_view to_string(BangBangReason reason);

struct BangBangVerdict {
  bool is_bang_bang = false;
  BangBangReason reason = BangBangReason::NotDetected;
  /// min over the test grid of q(s_max) - q(s), q(s) = (r(s) - r(0)) / f(s).
  double worst_ratio_gap = 0.0;
};

/// Sufficient-condition test for an optimal policy that only uses {0, s_max}.
/// A negative verdict is not a proof that interior rates are optimal.
///
/// The ratio test is applied to r - r(0); for r(0) = 0 this is exactly the
/// condition r(s)/f(s) <= r(s_max)/f(s_max), and the shift keeps the test
/// sound for demand-penalty revenue where r(0) < 0.
BangBangVerdict check_bang_bang(const RateFunction& r, const RateFunction& f, double s_max);

/// Reads only r, f and s_max; the base rate plays no role.
BangBangVerdict check_bang_bang(const ProblemInstance& inst);

inline constexpr int kRatioGridPoints = 10001;
inline constexpr double kRatioTolerance = 1e-12;

/// threshold[n] is the smallest x with policy(x, n) = 0.
struct SwitchingCurve {
  std::vector<int> threshold;
};

/// Requires a policy that only takes the values 0 and s_max and switches off
/// for every level at or above the threshold; throws NotBangBangSolution
/// otherwise.
SwitchingCurve extract_switching_curve(const SolutionGrid& sol);

struct PropertyResult {
  std::string property;
  bool pass = true;
  bool skipped = false;
  double max_violation = 0.0;
  int x = -1;
  int n = -1;
  double lambda = 0.0;
};

struct StructureReport {
  std::vector<PropertyResult> properties;

  bool all_pass() const;
  const PropertyResult* find(std::string_view name) const;
};

struct StructureTolerances {
  double exact = 1e-9;       ///< identities (boundary conditions)
  double relative = 1e-6;    ///< inequalities, scaled by max(1, max |J|)
  double action_slack = -1;  ///< policy slack; negative means one action-grid cell
};

/// Checks monotonicity, concavity and submodularity properties on solved grids
/// that share everything but lambda. With one grid the lambda-comparisons are
/// reported as skipped.
///
/// `submodular_x_lambda` asks for delta nondecreasing in lambda. It cannot hold
/// at x = xi - 1 whenever J(xi - 1) depends on lambda, because J(xi) does not;
/// `weighted_delta_lambda` checks lambda * delta nondecreasing in lambda, which
/// is what the ordering of policies in lambda needs.
StructureReport verify_structure(const std::vector<SolutionGrid>& sols, const StructureTolerances& tol = {});

void write_structure_table(const StructureReport& report, std::ostream& out);
/// Header `property,pass,max_violation,x,n,lambda`.
void write_structure_csv(const StructureReport& report, std::ostream& out);

}  // namespace cbp
