#pragma once

#include "liensync/nc_optimal.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace liensync {

/// MT1: extreme point of the cycle; MT2: interior stationary point;
/// MT3: constant path at x1 = b (only reachable when |x10| = b).
enum class TotalCase { MT1, MT2, MT3 };
[[nodiscard]] const char* to_string(TotalCase c) noexcept;

struct LandscapeSample {
    double x1f = 0.0;
    Branch branch = Branch::upper;
    WorkBreakdown work;
};

struct Candidate {
    double x1f = 0.0;
    std::optional<Branch> branch;  // empty at the extreme point
    TotalCase total_case = TotalCase::MT1;
    WorkBreakdown work;
};

struct TotalWorkLandscape {
    double s_f = 0.0;
    std::vector<LandscapeSample> samples;  // both branches
    std::vector<Candidate> interior_roots;  // MT2 candidates
    double boundary_value = 0.0;            // W at the extreme point
    Candidate global_opt;
};

/// W = (g(x1f) - g(x10))^2 / s_f + E(x1f, s_branch(x1f)) - E(x10, x20).
/// DomainError when |x1f| > x_max; NoSolutionError when infeasible.
[[nodiscard]] WorkBreakdown total_work_at(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                          double x1f, Branch branch, double s_f);

/// Zeros of R(x) = mu s_branch(x) - 2 (g(x) - g(x10)) / (s_f sqrt(h(x))), the
/// stationarity condition dW/dx1f = -h R = 0, on the part of the branch where
/// sgn(s_branch) = sgn(g(x1f) - g(x10)). The scan uses 400 nodes in
/// sqrt(x - b) on [b + 1e-6, x_max - 1e-6]; when the residual near b has the
/// wrong sign the search continues geometrically towards b.
[[nodiscard]] std::vector<double> mt2_roots(const GFunction& gf, const LimitCycle& lc, double x10,
                                            double s_f, Branch branch);

/// Evaluates the MT1 boundary, every MT2 root on both branches and MT3 when
/// |x10| = b; returns the landscape with the global minimiser.
[[nodiscard]] TotalWorkLandscape optimal_endpoint_total(const GFunction& gf, const LimitCycle& lc,
                                                        PhasePoint start, double s_f, int nodes = 400);

/// Minimum of W over MT2 candidates only; nullopt when there are none.
[[nodiscard]] std::optional<Candidate> best_interior(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                                     double s_f);

/// Scaled time where W_boundary - W_interior_min changes sign, located by a
/// logarithmic scan of [lo, hi] and bisection to relative 1e-10. nullopt
/// when no crossing lies in range. DomainError unless |x10| > x_max.
[[nodiscard]] std::optional<double> critical_time(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                                  std::pair<double, double> s_range);

}  // namespace liensync
