#include "cbp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace cbp {

std::string_view to_string(BangBangReason reason) {
  switch (reason) {
    case BangBangReason::EqualFunctions: return "EqualFunctions";
    case BangBangReason::PowerExponentDominance: return "PowerExponentDominance";
    case BangBangReason::ConvexConcave: return "ConvexConcave";
    case BangBangReason::RatioTestGrid: return "RatioTestGrid";
    case BangBangReason::NotDetected: return "NotDetected";
  }
  return "Unknown";
}

namespace {

bool is_convex(const RateFunction& fn) {
  if (const auto* p = fn.as_power()) return p->exponent >= 1.0;
  const auto* d = fn.as_demand_penalty();
  return d->bonus >= d->penalty;
}

bool is_concave(const RateFunction& fn) {
  if (const auto* p = fn.as_power()) return p->exponent <= 1.0;
  const auto* d = fn.as_demand_penalty();
  return d->bonus <= d->penalty;
}

double worst_gap(const RateFunction& r, const RateFunction& f, double s_max) {
  const double r0 = eval_rate(r, 0.0);
  const double top = (eval_rate(r, s_max) - r0) / eval_rate(f, s_max);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kRatioGridPoints; ++i) {
    const double s = s_max * i / (kRatioGridPoints + 1);
    const double fs = eval_rate(f, s);
    if (!(fs > 0.0)) continue;
    worst = std::min(worst, top - (eval_rate(r, s) - r0) / fs);
  }
  return worst;
}

}  // namespace

BangBangVerdict check_bang_bang(const RateFunction& r, const RateFunction& f, double s_max) {
  BangBangVerdict v;
  v.worst_ratio_gap = worst_gap(r, f, s_max);
  if (r == f) {
    v.is_bang_bang = true;
    v.reason = BangBangReason::EqualFunctions;
  } else if (r.is_power() && f.is_power() && r.as_power()->exponent >= f.as_power()->exponent) {
    v.is_bang_bang = true;
    v.reason = BangBangReason::PowerExponentDominance;
  } else if (is_convex(r) && is_concave(f)) {
    v.is_bang_bang = true;
    v.reason = BangBangReason::ConvexConcave;
  } else if (v.worst_ratio_gap >= -kRatioTolerance) {
    v.is_bang_bang = true;
    v.reason = BangBangReason::RatioTestGrid;
  }
  return v;
}

BangBangVerdict check_bang_bang(const ProblemInstance& inst) { return check_bang_bang(inst.r, inst.f, inst.s_max); }

SwitchingCurve extract_switching_curve(const SolutionGrid& sol) {
  const double s_max = sol.instance().s_max;
  const double eps = 1e-12 * std::max(1.0, s_max);
  SwitchingCurve curve;
  curve.threshold.resize(static_cast<std::size_t>(sol.steps()) + 1);
  for (int n = 0; n <= sol.steps(); ++n) {
    int threshold = sol.xi() + 1;
    for (int x = 0; x <= sol.xi(); ++x) {
      const double s = sol.policy(x, n);
      const bool off = std::abs(s) <= eps;
      if (!off && std::abs(s - s_max) > eps) {
        throw Error(Errc::NotBangBangSolution, fmt::format("interior rate {} at x={}, n={}", s, x, n));
      }
      if (off && threshold > sol.xi()) threshold = x;
      if (!off && threshold <= sol.xi()) {
        throw Error(Errc::NotBangBangSolution,
                    fmt::format("production resumes at x={} above switch-off level {} (n={})", x, threshold, n));
      }
    }
    curve.threshold[n] = threshold;
  }
  return curve;
}

bool StructureReport::all_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.pass; });
}

const PropertyResult* StructureReport::find(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.property == name) return &p;
  }
  return nullptr;
}

namespace {

// Tracks the largest amount by which an inequality lhs <= rhs is violated.
class Tracker {
 public:
  Tracker(std::string name, double tol) : tol_(tol) { result_.property = std::move(name); }

  void check(double excess, int x, int n, double lambda) {
    if (excess > result_.max_violation) {
      result_.max_violation = excess;
      result_.x = x;
      result_.n = n;
      result_.lambda = lambda;
    }
  }

  PropertyResult finish() {
    result_.pass = result_.max_violation <= tol_;
    return result_;
  }

 private:
  double tol_;
  PropertyResult result_;
};

PropertyResult skipped(std::string name) {
  PropertyResult p;
  p.property = std::move(name);
  p.skipped = true;
  return p;
}

void check_compatible(const std::vector<SolutionGrid>& sols) {
  if (sols.empty()) throw Error(Errc::IncompatibleGrids, "no solution grids given");
  const auto& a = sols.front();
  for (const auto& b : sols) {
    const auto& ia = a.instance();
    const auto& ib = b.instance();
    const bool same = a.xi() == b.xi() && a.steps() == b.steps() && a.dt() == b.dt() && ia.s_max == ib.s_max &&
                      ia.f == ib.f && ia.r == ib.r && ia.cost.costs() == ib.cost.costs() &&
                      a.action_step() == b.action_step();
    if (!same) throw Error(Errc::IncompatibleGrids, "grids differ in more than the base rate");
  }
}

}  // namespace

StructureReport verify_structure(const std::vector<SolutionGrid>& input, const StructureTolerances& tol) {
  check_compatible(input);
  std::vector<const SolutionGrid*> sols;
  for (const auto& s : input) sols.push_back(&s);
  std::sort(sols.begin(), sols.end(),
            [](const SolutionGrid* a, const SolutionGrid* b) { return a->instance().lambda < b->instance().lambda; });

  const SolutionGrid& first = *sols.front();
  const int xi = first.xi();
  const int steps = first.steps();
  double scale = 1.0;
  for (const auto* s : sols) {
    for (double v : s->raw_values()) scale = std::max(scale, std::abs(v));
  }
  const double ineq = tol.relative * scale;
  const double slack = (tol.action_slack >= 0.0 ? tol.action_slack : first.action_step()) + 1e-12;
  const double r0 = eval_rate(first.instance().r, 0.0);

  StructureReport report;
  auto per_grid = [&](const std::string& name, double limit, const std::function<void(const SolutionGrid&, Tracker&)>& body) {
    Tracker t(name, limit);
    for (const auto* s : sols) body(*s, t);
    report.properties.push_back(t.finish());
  };

  per_grid("boundary", tol.exact, [&](const SolutionGrid& s, Tracker& t) {
    for (int x = 0; x <= xi; ++x) t.check(std::abs(s.value(x, 0) + s.instance().cost(x)), x, 0, s.instance().lambda);
  });
  per_grid("failed_off", tol.exact, [&](const SolutionGrid& s, Tracker& t) {
    for (int n = 0; n <= steps; ++n) t.check(std::abs(s.policy(xi, n)), xi, n, s.instance().lambda);
  });
  per_grid("failed_value", tol.exact * scale, [&](const SolutionGrid& s, Tracker& t) {
    double expected = -s.instance().cost(xi);
    for (int n = 0; n <= steps; ++n) {
      t.check(std::abs(s.value(xi, n) - expected), xi, n, s.instance().lambda);
      expected += s.dt() * r0;
    }
  });
  per_grid("value_monotone_x", ineq, [&](const SolutionGrid& s, Tracker& t) {
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x < xi; ++x) t.check(s.value(x + 1, n) - s.value(x, n), x, n, s.instance().lambda);
  });
  if (r0 < 0.0) {
    // With r(0) < 0 idle time costs money and more remaining time can lower J.
    report.properties.push_back(skipped("value_monotone_t"));
  } else {
    per_grid("value_monotone_t", ineq, [&](const SolutionGrid& s, Tracker& t) {
      for (int n = 0; n < steps; ++n)
        for (int x = 0; x <= xi; ++x) t.check(s.value(x, n) - s.value(x, n + 1), x, n, s.instance().lambda);
    });
  }
  per_grid("delta_nonnegative", ineq, [&](const SolutionGrid& s, Tracker& t) {
    const MarginalGrid m(s);
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x < xi; ++x) t.check(-m.delta(x, n), x, n, s.instance().lambda);
  });
  per_grid("concave_x", ineq, [&](const SolutionGrid& s, Tracker& t) {
    const MarginalGrid m(s);
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x + 1 < xi; ++x) t.check(m.delta2(x, n), x, n, s.instance().lambda);
  });
  per_grid("delta_increasing_t", ineq, [&](const SolutionGrid& s, Tracker& t) {
    const MarginalGrid m(s);
    for (int n = 0; n < steps; ++n)
      for (int x = 0; x < xi; ++x) t.check(m.delta(x, n) - m.delta(x, n + 1), x, n, s.instance().lambda);
  });
  per_grid("concave_t", ineq, [&](const SolutionGrid& s, Tracker& t) {
    for (int n = 0; n + 1 < steps; ++n)
      for (int x = 0; x <= xi; ++x) {
        const double inc0 = s.value(x, n + 1) - s.value(x, n);
        const double inc1 = s.value(x, n + 2) - s.value(x, n + 1);
        t.check(inc1 - inc0, x, n, s.instance().lambda);
      }
  });
  per_grid("policy_monotone_x", slack, [&](const SolutionGrid& s, Tracker& t) {
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x < xi; ++x) t.check(s.policy(x + 1, n) - s.policy(x, n), x, n, s.instance().lambda);
  });
  per_grid("policy_monotone_t", slack, [&](const SolutionGrid& s, Tracker& t) {
    for (int n = 0; n < steps; ++n)
      for (int x = 0; x <= xi; ++x) t.check(s.policy(x, n + 1) - s.policy(x, n), x, n, s.instance().lambda);
  });

  auto pairwise = [&](const std::string& name, double limit,
                      const std::function<void(const SolutionGrid&, const SolutionGrid&, Tracker&)>& body) {
    if (sols.size() < 2) {
      report.properties.push_back(skipped(name));
      return;
    }
    Tracker t(name, limit);
    for (std::size_t i = 0; i < sols.size(); ++i)
      for (std::size_t j = i + 1; j < sols.size(); ++j) body(*sols[i], *sols[j], t);
    report.properties.push_back(t.finish());
  };

  // lo has the smaller base rate.
  pairwise("value_monotone_lambda", ineq, [&](const SolutionGrid& lo, const SolutionGrid& hi, Tracker& t) {
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x <= xi; ++x) t.check(hi.value(x, n) - lo.value(x, n), x, n, hi.instance().lambda);
  });
  pairwise("submodular_x_lambda", ineq, [&](const SolutionGrid& lo, const SolutionGrid& hi, Tracker& t) {
    const MarginalGrid ml(lo);
    const MarginalGrid mh(hi);
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x < xi; ++x) t.check(ml.delta(x, n) - mh.delta(x, n), x, n, hi.instance().lambda);
  });
  // The property the policy ordering in lambda actually rests on: lambda * delta
  // is nondecreasing in lambda.
  pairwise("weighted_delta_lambda", ineq, [&](const SolutionGrid& lo, const SolutionGrid& hi, Tracker& t) {
    const MarginalGrid ml(lo);
    const MarginalGrid mh(hi);
    const double l_lo = lo.instance().lambda;
    const double l_hi = hi.instance().lambda;
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x < xi; ++x) t.check((l_lo * ml.delta(x, n) - l_hi * mh.delta(x, n)) / l_hi, x, n, l_hi);
  });
  pairwise("policy_monotone_lambda", slack, [&](const SolutionGrid& lo, const SolutionGrid& hi, Tracker& t) {
    for (int n = 0; n <= steps; ++n)
      for (int x = 0; x <= xi; ++x) t.check(hi.policy(x, n) - lo.policy(x, n), x, n, hi.instance().lambda);
  });
  return report;
}

void write_structure_table(const StructureReport& report, std::ostream& out) {
  out << fmt::format("{:<24} {:<7} {:>14} {:>5} {:>7} {:>8}\n", "property", "result", "max_violation", "x", "n",
                     "lambda");
  for (const auto& p : report.properties) {
    const char* result = p.skipped ? "skip" : (p.pass ? "pass" : "FAIL");
    out << fmt::format("{:<24} {:<7} {:>14.6g} {:>5} {:>7} {:>8.4g}\n", p.property, result, p.max_violation, p.x, p.n,
                       p.lambda);
  }
}

void write_structure_csv(const StructureReport& report, std::ostream& out) {
  out << "property,pass,max_violation,x,n,lambda\n";
  for (const auto& p : report.properties) {
    const char* pass = p.skipped ? "skipped" : (p.pass ? "true" : "false");
    out << fmt::format("{},{},{:.9g},{},{},{:.9g}\n", p.property, pass, p.max_violation, p.x, p.n, p.lambda);
  }
}

}  // namespace cbp
