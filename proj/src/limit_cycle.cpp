#include "liensync/limit_cycle.hpp"

#include "liensync/errors.hpp"
#include "liensync/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liensync {

namespace {

constexpr double kFixedPointTol = 1e-11;
constexpr int kMaxSecantIterations = 50;

struct Hermite1 {
    double y0, y1, d0, d1;  // values and h-scaled derivatives
    [[nodiscard]] double operator()(double th) const noexcept {
        const double th1 = 1.0 - th;
        const double ydiff = y1 - y0;
        const double bspl = d0 - ydiff;
        return y0 + th * (ydiff + th1 * (bspl + th * (ydiff - d1 - bspl)));
    }
};

}  // namespace

const char* to_string(Branch b) noexcept { return b == Branch::upper ? "upper" : "lower"; }

LimitCycle::LimitCycle(std::vector<double> times, std::vector<PhasePoint> samples,
                       std::vector<PhaseRate> rates, std::size_t turning_index, double x_max, double mu)
    : times_(std::move(times)),
      samples_(std::move(samples)),
      rates_(std::move(rates)),
      turning_(turning_index),
      x_max_(x_max),
      mu_(mu) {
    if (samples_.size() < 4 || samples_.size() != times_.size() || samples_.size() != rates_.size() ||
        turning_ == 0 || turning_ + 1 >= samples_.size()) {
        throw ContractViolation("LimitCycle: inconsistent sample arrays");
    }
}

PhasePoint LimitCycle::segment_point(std::size_t i, double theta) const {
    const double h = times_[i + 1] - times_[i];
    const Hermite1 x1{samples_[i].x1, samples_[i + 1].x1, h * rates_[i].dx1, h * rates_[i + 1].dx1};
    const Hermite1 x2{samples_[i].x2, samples_[i + 1].x2, h * rates_[i].dx2, h * rates_[i + 1].dx2};
    return {x1(theta), x2(theta)};
}

double LimitCycle::branch_velocity(double x1, Branch branch) const {
    if (!std::isfinite(x1) || std::fabs(x1) > x_max_) {
        throw DomainError("branch_velocity: |x1| exceeds the cycle amplitude");
    }
    if (std::fabs(x1) == x_max_) return 0.0;

    // Lower branch: indices [0, turning_] with x1 decreasing.
    // Upper branch: indices [turning_, n-1] with x1 increasing.
    std::size_t lo_idx, hi_idx;
    if (branch == Branch::lower) {
        lo_idx = 0;
        hi_idx = turning_;
    } else {
        lo_idx = turning_;
        hi_idx = samples_.size() - 1;
    }
    const bool increasing = branch == Branch::upper;
    // Binary search for the segment [i, i+1] containing x1.
    std::size_t a = lo_idx, b = hi_idx;
    while (b - a > 1) {
        const std::size_t m = (a + b) / 2;
        const bool before = increasing ? samples_[m].x1 <= x1 : samples_[m].x1 >= x1;
        (before ? a : b) = m;
    }
    const std::size_t i = a;
    const double h = times_[i + 1] - times_[i];
    const Hermite1 xs{samples_[i].x1, samples_[i + 1].x1, h * rates_[i].dx1, h * rates_[i + 1].dx1};
    double theta;
    const double f0 = xs(0.0) - x1;
    const double f1 = xs(1.0) - x1;
    if (f0 == 0.0) {
        theta = 0.0;
    } else if (f1 == 0.0) {
        theta = 1.0;
    } else if ((f0 > 0.0) == (f1 > 0.0)) {
        // Roundoff at a segment boundary.
        theta = std::fabs(f0) < std::fabs(f1) ? 0.0 : 1.0;
    } else {
        theta = numerics::find_root([&](double th) { return xs(th) - x1; }, 0.0, 1.0, f0, f1, 1e-15);
    }
    const double v = segment_point(i, theta).x2;
    return branch == Branch::upper ? std::max(v, 0.0) : std::min(v, 0.0);
}

double LimitCycle::distance(PhasePoint p) const {
    // Coarse pass over chords.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
        const auto& a = samples_[i];
        const auto& b = samples_[i + 1];
        const double dx = b.x1 - a.x1, dy = b.x2 - a.x2;
        const double len2 = dx * dx + dy * dy;
        double s = len2 > 0.0 ? ((p.x1 - a.x1) * dx + (p.x2 - a.x2) * dy) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        const double ex = a.x1 + s * dx - p.x1, ey = a.x2 + s * dy - p.x2;
        const double d = std::hypot(ex, ey);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    // Refine on the curved segments around the best chord.
    const std::size_t n_seg = samples_.size() - 1;
    for (long k = -1; k <= 1; ++k) {
        const std::size_t i = (best_i + n_seg + static_cast<std::size_t>(k + static_cast<long>(n_seg))) % n_seg;
        auto dist = [&](double th) {
            const auto q = segment_point(i, th);
            return std::hypot(q.x1 - p.x1, q.x2 - p.x2);
        };
        const auto [th, d] = numerics::minimize(dist, 0.0, 1.0, 50);
        (void)th;
        best = std::min({best, d, dist(0.0), dist(1.0)});
    }
    return best;
}

PhasePoint LimitCycle::at_time(double t) const {
    const double T = period();
    double tm = std::fmod(t, T);
    if (tm < 0.0) tm += T;
    const auto it = std::upper_bound(times_.begin(), times_.end(), tm);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    if (i + 1 >= times_.size()) i = times_.size() - 2;
    const double h = times_[i + 1] - times_[i];
    return segment_point(i, h > 0.0 ? (tm - times_[i]) / h : 0.0);
}

IntegratorConfig cycle_config() {
    IntegratorConfig c;
    c.rel_tol = c.abs_tol = 1e-13;
    return c;
}

double poincare_return(const LienardSystem& sys, double x1, const IntegratorConfig& cfg, double* return_time) {
    // Generous horizon: the period is 2 pi for small mu and grows like
    // (3 - 2 ln 2) mu for large mu.
    const double t_max = 50.0 + 10.0 * sys.mu();
    const auto ev = integrate_until_event(sys, {x1, 0.0}, {CrossingDirection::descending, +1}, cfg, t_max);
    if (return_time) *return_time = ev.t_cross;
    return ev.crossing.x1;
}

LimitCycle find_limit_cycle(const LienardSystem& sys, const IntegratorConfig& cfg, int samples_per_period) {
    require_valid(sys);
    auto residual = [&](double x) { return poincare_return(sys, x, cfg) - x; };

    // Secant iteration; the second iterate is one application of the map,
    // which is already contracting towards the cycle.
    double x0 = 2.0;
    double r0 = residual(x0);
    double x1 = x0 + r0;
    if (!(x1 > 0.0)) x1 = 0.5 * x0;
    double r1 = residual(x1);
    int it = 0;
    while (std::fabs(r1) >= kFixedPointTol) {
        if (++it > kMaxSecantIterations) {
            throw CycleNotFound("find_limit_cycle: secant iteration did not converge");
        }
        const double denom = r1 - r0;
        double x2 = denom != 0.0 ? x1 - r1 * (x1 - x0) / denom : x1 + r1;
        if (!(x2 > 0.0) || !std::isfinite(x2)) x2 = x1 + r1;
        x0 = x1;
        r0 = r1;
        x1 = x2;
        r1 = residual(x1);
    }
    const double x_star = x1;

    double period = 0.0;
    (void)poincare_return(sys, x_star, cfg, &period);

    // Dense pass: lower branch to the ascending crossing, then the upper branch.
    IntegratorConfig dense = cfg;
    dense.max_step = std::min(cfg.max_step, period / samples_per_period);
    const auto lower = integrate_until_event(sys, {x_star, 0.0}, {CrossingDirection::ascending, -1}, dense,
                                             2.0 * period);
    const auto upper = integrate_until_event(sys, lower.crossing, {CrossingDirection::descending, +1}, dense,
                                             2.0 * period);

    std::vector<double> times;
    std::vector<PhasePoint> pts;
    for (std::size_t i = 0; i < lower.trajectory.size(); ++i) {
        times.push_back(lower.trajectory.times[i]);
        pts.push_back(lower.trajectory.states[i]);
    }
    const std::size_t turning = pts.size() - 1;
    const double t_half = lower.t_cross;
    for (std::size_t i = 1; i < upper.trajectory.size(); ++i) {
        times.push_back(t_half + upper.trajectory.times[i]);
        pts.push_back(upper.trajectory.states[i]);
    }
    // Snap the turning points onto the section; the residual offsets are
    // below the fixed-point tolerance.
    pts.front() = {x_star, 0.0};
    pts[turning] = {-x_star, 0.0};
    pts.back() = {x_star, 0.0};

    std::vector<PhaseRate> rates;
    rates.reserve(pts.size());
    for (const auto& p : pts) rates.push_back(vector_field(sys, p, 0.0));
    return LimitCycle(std::move(times), std::move(pts), std::move(rates), turning, x_star, sys.mu());
}

}  // namespace liensync
