#include "liensync/trajectory.hpp"

#include "liensync/errors.hpp"
#include "liensync/io.hpp"
#include "liensync/numerics.hpp"

#include <cmath>
#include <ostream>

namespace liensync {

ForceProfile::ForceProfile(SmoothFn smooth, std::vector<Impulse> impulses)
    : smooth_(std::move(smooth)), impulses_(std::move(impulses)) {
    for (std::size_t i = 0; i < impulses_.size(); ++i) {
        if (!std::isfinite(impulses_[i].time) || !std::isfinite(impulses_[i].delta_v)) {
            throw ContractViolation("impulse time and amplitude must be finite");
        }
        if (i > 0 && !(impulses_[i].time > impulses_[i - 1].time)) {
            throw ContractViolation("impulse times must be strictly increasing");
        }
    }
}

ForceProfile ForceProfile::constant(double value) {
    return ForceProfile([value](double) { return value; });
}

ForceProfile ForceProfile::scaled_smooth(double factor) const {
    if (!smooth_) return *this;
    return ForceProfile([f = smooth_, factor](double t) { return factor * f(t); }, impulses_);
}

WorkBreakdown work_breakdown(const LienardSystem& sys, const Trajectory& traj) {
    if (traj.empty()) throw ContractViolation("work_breakdown: empty trajectory");
    if (traj.times.size() != traj.states.size()) {
        throw ContractViolation("work_breakdown: times and states differ in length");
    }
    const auto& t = traj.times;
    std::vector<double> f(traj.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& p = traj.states[i];
        f[i] = sys.h()(p.x1) * p.x2 * p.x2;
    }

    // Integrate each jump-free segment [first, last] separately.
    double integral = 0.0;
    auto integrate_segment = [&](std::size_t first, std::size_t last) {
        std::size_t i = first;
        while (i + 2 <= last) {
            integral += numerics::simpson_uneven(t[i], t[i + 1], t[i + 2], f[i], f[i + 1], f[i + 2]);
            i += 2;
        }
        if (i + 1 == last) {
            if (last - first >= 2) {
                integral += numerics::quadratic_tail(t[i - 1], t[i], t[i + 1], f[i - 1], f[i], f[i + 1]);
            } else {
                integral += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
            }
        }
    };
    std::size_t seg_start = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] < t[i - 1]) throw ContractViolation("work_breakdown: times decrease");
        if (t[i] == t[i - 1]) {
            if (i - 1 > seg_start) integrate_segment(seg_start, i - 1);
            seg_start = i;
        }
    }
    if (t.size() - 1 > seg_start) integrate_segment(seg_start, t.size() - 1);

    WorkBreakdown w;
    w.w_nc = sys.mu() * integral;
    w.delta_E = energy(sys, traj.back()) - energy(sys, traj.front());
    w.total = w.delta_E + w.w_nc;
    return w;
}

Trajectory concatenate(const Trajectory& head, const Trajectory& tail) {
    if (head.empty()) return tail;
    if (tail.empty()) return head;
    if (!(head.back() == tail.front())) {
        throw ContractViolation("concatenate: trajectories do not share the junction sample");
    }
    Trajectory out = head;
    const double offset = head.times.back() - tail.times.front();
    const bool keep_force = head.force_values.size() == head.size() && tail.force_values.size() == tail.size();
    const bool keep_w = head.cumulative_wnc.size() == head.size() && tail.cumulative_wnc.size() == tail.size();
    if (!keep_force) out.force_values.clear();
    if (!keep_w) out.cumulative_wnc.clear();
    const double w_offset = keep_w ? head.cumulative_wnc.back() - tail.cumulative_wnc.front() : 0.0;
    for (std::size_t i = 1; i < tail.size(); ++i) {
        out.times.push_back(tail.times[i] + offset);
        out.states.push_back(tail.states[i]);
        if (keep_force) out.force_values.push_back(tail.force_values[i]);
        if (keep_w) out.cumulative_wnc.push_back(tail.cumulative_wnc[i] + w_offset);
    }
    out.force.reset();
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    io::CsvWriter csv(os, {"t", "x1", "x2", "F"});
    const bool has_force = traj.force_values.size() == traj.size();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        csv.row({traj.times[i], traj.states[i].x1, traj.states[i].x2,
                 has_force ? traj.force_values[i] : 0.0});
    }
}

}  // namespace liensync
