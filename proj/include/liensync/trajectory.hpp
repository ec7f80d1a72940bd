#pragma once

#include "liensync/core.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace liensync {

/// Instantaneous velocity jump x2 -> x2 + delta_v at `time` (a Dirac term of
/// the driving force). Does no non-conservative work.
struct Impulse {
    double time = 0.0;
    double delta_v = 0.0;
};

/// Driving force: smooth part plus impulses with strictly increasing times.
class ForceProfile {
public:
    using SmoothFn = std::function<double(double)>;

    ForceProfile() = default;
    /// Throws ContractViolation when impulse times are not strictly increasing.
    explicit ForceProfile(SmoothFn smooth, std::vector<Impulse> impulses = {});

    [[nodiscard]] static ForceProfile zero() { return {}; }
    [[nodiscard]] static ForceProfile constant(double value);

    [[nodiscard]] double smooth(double t) const { return smooth_ ? smooth_(t) : 0.0; }
    [[nodiscard]] bool has_smooth() const noexcept { return static_cast<bool>(smooth_); }
    [[nodiscard]] const std::vector<Impulse>& impulses() const noexcept { return impulses_; }

    /// Copy with the smooth part multiplied by `factor` (impulses unchanged).
    [[nodiscard]] ForceProfile scaled_smooth(double factor) const;

private:
    SmoothFn smooth_;
    std::vector<Impulse> impulses_;
};

/// Time-sampled phase path. Times are non-decreasing and start at 0; a time
/// repeats only at an impulse, where the pre- and post-jump states are both
/// stored. `force_values` holds the smooth force at each sample and
/// `cumulative_wnc` the non-conservative work accumulated by the integrator
/// (both may be empty for paths not produced by integration).
struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> states;
    std::vector<double> force_values;
    std::vector<double> cumulative_wnc;
    std::optional<ForceProfile> force;

    [[nodiscard]] bool empty() const noexcept { return states.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    [[nodiscard]] const PhasePoint& front() const { return states.front(); }
    [[nodiscard]] const PhasePoint& back() const { return states.back(); }
    [[nodiscard]] double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

/// Work done by the driving force, split as total = delta_E + w_nc.
struct WorkBreakdown {
    double delta_E = 0.0;
    double w_nc = 0.0;
    double total = 0.0;
};

/// w_nc = mu * int h(x1) x2^2 dt by composite (uneven) Simpson over the
/// samples, restarted at every impulse; delta_E from the endpoint energies.
/// Throws ContractViolation for an empty trajectory or mismatched lengths.
[[nodiscard]] WorkBreakdown work_breakdown(const LienardSystem& sys, const Trajectory& traj);

/// Appends `tail` to `head`; tail's first sample must coincide with head's last.
[[nodiscard]] Trajectory concatenate(const Trajectory& head, const Trajectory& tail);

/// CSV with header `t,x1,x2,F`, full double precision.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace liensync
