#pragma once

#include "liensync/core.hpp"
#include "liensync/integrate.hpp"

#include <vector>

namespace liensync {

enum class Branch { upper, lower };

[[nodiscard]] inline Branch opposite(Branch b) noexcept {
    return b == Branch::upper ? Branch::lower : Branch::upper;
}
[[nodiscard]] const char* to_string(Branch b) noexcept;

/// Numerically sampled stable limit cycle.
///
/// One period is stored starting at the rightmost point (x_max, 0): first the
/// lower branch (x2 <= 0, x1 decreasing) down to (-x_max, 0), then the upper
/// branch back. Each sample carries its time and phase velocity, so between
/// samples the orbit is represented by cubic Hermite segments in time. Branch
/// lookups invert x1(t) on those segments, which are monotone in x1.
class LimitCycle {
public:
    LimitCycle(std::vector<double> times, std::vector<PhasePoint> samples,
               std::vector<PhaseRate> rates, std::size_t turning_index, double x_max, double mu);

    [[nodiscard]] const std::vector<PhasePoint>& samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] double period() const noexcept { return times_.back(); }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] double mu() const noexcept { return mu_; }

    /// s_upper(x1) >= 0 or s_lower(x1) <= 0; exactly 0 at |x1| = x_max.
    /// Throws DomainError for |x1| > x_max.
    [[nodiscard]] double branch_velocity(double x1, Branch branch) const;

    /// Minimum Euclidean distance to the orbit (segment scan plus local
    /// refinement on the Hermite segments).
    [[nodiscard]] double distance(PhasePoint p) const;

    /// Orbit state at time t (mod period) measured from (x_max, 0).
    [[nodiscard]] PhasePoint at_time(double t) const;

private:
    [[nodiscard]] PhasePoint segment_point(std::size_t i, double theta) const;

    std::vector<double> times_;
    std::vector<PhasePoint> samples_;
    std::vector<PhaseRate> rates_;
    std::size_t turning_;  // index of (-x_max, 0)
    double x_max_;
    double mu_;
};

/// Poincare first-return map on {x2 = 0, x1 > 0}: integrates from (x1, 0)
/// to the next descending crossing. Returns the crossing x1; the return time
/// is written to *return_time when given.
[[nodiscard]] double poincare_return(const LienardSystem& sys, double x1, const IntegratorConfig& cfg,
                                     double* return_time = nullptr);

/// Integrator settings used for cycle location (rk45, tolerances 1e-13).
[[nodiscard]] IntegratorConfig cycle_config();

/// Locates the fixed point of the Poincare map by secant iteration from
/// x1 = 2 until |P(x) - x| < 1e-11, then samples one period densely.
/// Throws CycleNotFound after 50 iterations without convergence.
[[nodiscard]] LimitCycle find_limit_cycle(const LienardSystem& sys,
                                          const IntegratorConfig& cfg = cycle_config(),
                                          int samples_per_period = 4096);

[[nodiscard]] inline double distance_to_cycle(const LimitCycle& lc, PhasePoint p) { return lc.distance(p); }
[[nodiscard]] inline double branch_velocity(const LimitCycle& lc, double x1, Branch branch) {
    return lc.branch_velocity(x1, branch);
}

}  // namespace liensync
