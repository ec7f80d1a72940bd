#include "liensync/nc_optimal.hpp"

#include "liensync/errors.hpp"
#include "liensync/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace liensync {

struct GFunction::Table {
    LienardSystem sys;
    double b;
    // Nodes in s = sqrt(x - b), uniform; g at each node.
    std::vector<double> s;
    std::vector<double> g;
    double ds;

    // g(b + s1^2) - g(b + s0^2)
    [[nodiscard]] double integrate(double s0, double s1) const {
        const auto& h = sys.h();
        const double bb = b;
        auto f = [&h, bb](double t) {
            const double v = h(bb + t * t);
            return v > 0.0 ? 2.0 * t * std::sqrt(v) : 0.0;
        };
        // g grows like x^2 / 2; keep the tolerance above round-off of the result.
        const double x1 = b + s1 * s1;
        return numerics::adaptive_simpson(f, s0, s1, 1e-13 * std::max(1.0, 0.5 * x1 * x1));
    }

    [[nodiscard]] double eval_positive(double x) const {
        const double sx = std::sqrt(std::max(x - b, 0.0));
        std::size_t k = std::min(static_cast<std::size_t>(sx / ds + 0.5), s.size() - 1);
        return g[k] + integrate(s[k], sx);
    }
};

GFunction::GFunction(const LienardSystem& sys, double x_table_max, int table_nodes) {
    const double b = sys.b();
    if (!std::isfinite(b) || !(b > 0.0)) throw DomainError("g-function: h has no positive zero");
    if (table_nodes < 2) throw ContractViolation("g-function: need at least two table nodes");
    if (!(x_table_max > b)) x_table_max = std::max(10.0 * b, b + 10.0);
    auto t = std::make_shared<Table>(Table{sys, b, {}, {}, 0.0});
    const double s_max = std::sqrt(x_table_max - b);
    t->ds = s_max / (table_nodes - 1);
    t->s.resize(static_cast<std::size_t>(table_nodes));
    t->g.resize(static_cast<std::size_t>(table_nodes));
    t->s[0] = 0.0;
    t->g[0] = 0.0;
    for (std::size_t i = 1; i < t->s.size(); ++i) {
        t->s[i] = static_cast<double>(i) * t->ds;
        t->g[i] = t->g[i - 1] + t->integrate(t->s[i - 1], t->s[i]);
    }
    table_ = std::move(t);
}

const LienardSystem& GFunction::system() const noexcept { return table_->sys; }
double GFunction::b() const noexcept { return table_->b; }

double GFunction::operator()(double x) const {
    const double ax = std::fabs(x);
    if (!std::isfinite(x) || ax < table_->b) throw DomainError("g: |x| < b lies outside the dissipative region");
    const double v = table_->eval_positive(ax);
    return x < 0.0 ? -v : v;
}

double GFunction::invert(double y) const {
    if (!std::isfinite(y) || y < 0.0) throw DomainError("g_invert: argument must be non-negative");
    const auto& t = *table_;
    if (y == 0.0) return t.b;
    // Bracket in s = sqrt(x - b) using the table, extending past its end.
    double s_lo = 0.0, s_hi;
    const auto it = std::upper_bound(t.g.begin(), t.g.end(), y);
    if (it != t.g.end()) {
        const std::size_t k = static_cast<std::size_t>(it - t.g.begin());
        s_lo = t.s[k - 1];
        s_hi = t.s[k];
    } else {
        s_lo = t.s.back();
        s_hi = 2.0 * s_lo;
        while (t.eval_positive(t.b + s_hi * s_hi) < y) {
            s_lo = s_hi;
            s_hi *= 2.0;
        }
    }
    auto f = [&](double s) { return t.eval_positive(t.b + s * s) - y; };
    const double s = numerics::find_root(f, s_lo, s_hi, 1e-15 * std::max(1.0, s_hi));
    return t.b + s * s;
}

// -----------------------------------------------------------------------------

namespace {

void require_feasible(double b, double x10, double x1f) {
    if (!std::isfinite(x10) || !std::isfinite(x1f)) throw DomainError("EL path: non-finite endpoint");
    if (std::fabs(x10) < b || std::fabs(x1f) < b) {
        throw NoSolutionError("EL path: endpoints must satisfy |x| >= b (Legendre-Clebsch condition)");
    }
    if ((x10 > 0.0) != (x1f > 0.0)) {
        throw NoSolutionError("EL path: endpoints must lie in the same half-plane");
    }
}

}  // namespace

ElPath::ElPath(GFunction gf, double x10, double x1f, double t_f)
    : gf_(std::move(gf)), x10_(x10), x1f_(x1f), t_f_(t_f), C0_(0.0), C1_(0.0) {
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw DomainError("EL path: t_f must be positive");
    require_feasible(gf_.b(), x10, x1f);
    C0_ = gf_(x10);
    C1_ = x1f == x10 ? 0.0 : (gf_(x1f) - C0_) / t_f;
}

PhasePoint ElPath::operator()(double t) const {
    const auto& h = gf_.system().h();
    if (C1_ == 0.0) return {x10_, 0.0};
    double x1;
    if (t <= 0.0) {
        x1 = x10_;
    } else if (t >= t_f_) {
        x1 = x1f_;
    } else {
        const double y = C0_ + C1_ * t;
        const double ax = gf_.invert(std::fabs(y));
        x1 = x10_ < 0.0 ? -ax : ax;
    }
    const double hv = h(x1);
    const double x2 = hv > 0.0 ? C1_ / std::sqrt(hv) : std::copysign(INFINITY, C1_);
    return {x1, x2};
}

ElPath solve_el_path(const GFunction& gf, double x10, double x1f, double t_f) { return {gf, x10, x1f, t_f}; }

const char* to_string(EndpointCase c) noexcept {
    switch (c) {
        case EndpointCase::T1_extreme: return "T1";
        case EndpointCase::T2_stay: return "T2";
        case EndpointCase::user_fixed: return "fixed";
    }
    return "?";
}

EndpointChoice choose_endpoint_nc(const GFunction& gf, const LimitCycle& lc, double x10) {
    return choose_endpoint_nc(gf, lc.x_max(), x10);
}

EndpointChoice choose_endpoint_nc(const GFunction& gf, double x_max, double x10) {
    const double ax = std::fabs(x10);
    if (!std::isfinite(x10) || ax < gf.b()) {
        throw NoSolutionError("no optimal endpoint: |x10| < b lies in the active region");
    }
    if (ax <= x_max) return {x10, EndpointCase::T2_stay};
    return {std::copysign(x_max, x10), EndpointCase::T1_extreme};
}

namespace {

void require_positive_sf(double s_f) {
    if (!(s_f > 0.0) || !std::isfinite(s_f)) throw DomainError("s_f must be positive");
}

/// Branch velocity with exact point symmetry: the left half-plane is served
/// by reflecting the right half-plane lookup.
double cycle_velocity(const LimitCycle& lc, double x1, Branch branch) {
    if (x1 < 0.0) return -lc.branch_velocity(-x1, opposite(branch));
    return lc.branch_velocity(x1, branch);
}

}  // namespace

OptimalPlan plan_to_endpoint(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double x1f,
                             Branch branch, double s_f, EndpointCase endpoint_case) {
    require_positive_sf(s_f);
    if (!is_finite(start)) throw DomainError("plan: non-finite start");
    if (std::fabs(x1f) > lc.x_max()) throw DomainError("plan: |x1f| exceeds the cycle amplitude");
    const auto& sys = gf.system();
    const double t_f = sys.mu() * s_f;
    ElPath path(gf, start.x1, x1f, t_f);
    const bool extreme = std::fabs(x1f) == lc.x_max();
    const double x2f = extreme ? 0.0 : cycle_velocity(lc, x1f, branch);
    const PhasePoint p0 = path(0.0);
    const PhasePoint pf = path(t_f);
    OptimalPlan plan{sys.mu(), start.x1, start.x2, x1f, x2f, t_f, s_f, path.C0(), path.C1(), endpoint_case,
                     extreme ? std::nullopt : std::optional<Branch>(branch), p0.x2 - start.x2, x2f - pf.x2,
                     sys.mu() * path.C1() * path.C1() * t_f, path};
    return plan;
}

OptimalPlan plan_nc_branch(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double s_f,
                           Branch branch) {
    const auto choice = choose_endpoint_nc(gf, lc, start.x1);
    return plan_to_endpoint(gf, lc, start, choice.x1f, branch, s_f, choice.endpoint_case);
}

std::vector<OptimalPlan> plan_nc_all(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double s_f) {
    const auto choice = choose_endpoint_nc(gf, lc, start.x1);
    if (choice.endpoint_case == EndpointCase::T1_extreme || std::fabs(choice.x1f) == lc.x_max()) {
        return {plan_to_endpoint(gf, lc, start, choice.x1f, Branch::upper, s_f, choice.endpoint_case)};
    }
    return {plan_to_endpoint(gf, lc, start, choice.x1f, Branch::upper, s_f, choice.endpoint_case),
            plan_to_endpoint(gf, lc, start, choice.x1f, Branch::lower, s_f, choice.endpoint_case)};
}

OptimalPlan plan_nc(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double s_f) {
    auto plans = plan_nc_all(gf, lc, start, s_f);
    if (plans.size() == 2 && std::fabs(plans[1].impulse_end) < std::fabs(plans[0].impulse_end)) {
        return plans[1];
    }
    return plans[0];
}

ForceProfile synthesize_force(const LienardSystem& sys, const OptimalPlan& plan) {
    const double C1 = plan.C1;
    if (C1 != 0.0 && (sys.h()(plan.x10) <= 0.0 || sys.h()(plan.x1f) <= 0.0)) {
        throw SingularForceError("synthesize_force: path touches h = 0 with non-zero C1");
    }
    const double mu = sys.mu();
    const ElPath path = plan.path;
    ForceProfile::SmoothFn smooth;
    if (C1 == 0.0) {
        const double F = sys.dV()(plan.x10);
        smooth = [F](double) { return F; };
    } else {
        const Polynomial h = sys.h(), dh = sys.dh(), dV = sys.dV();
        smooth = [path, h, dh, dV, mu, C1](double t) {
            const double x1 = path(t).x1;
            const double hv = h(x1);
            return -C1 * C1 * dh(x1) / (2.0 * hv * hv) + mu * C1 * std::sqrt(hv) + dV(x1);
        };
    }
    std::vector<Impulse> impulses;
    if (plan.impulse_start != 0.0) impulses.push_back({0.0, plan.impulse_start});
    if (plan.impulse_end != 0.0) impulses.push_back({plan.t_f, plan.impulse_end});
    return ForceProfile(std::move(smooth), std::move(impulses));
}

double wnc_fixed_endpoint(const GFunction& gf, double x10, double x1f, double s_f) {
    require_positive_sf(s_f);
    require_feasible(gf.b(), x10, x1f);
    const double dg = gf(x1f) - gf(x10);
    return dg * dg / s_f;
}

double wnc_min(const GFunction& gf, const LimitCycle& lc, double x10, double s_f) {
    return wnc_min(gf, lc.x_max(), x10, s_f);
}

double wnc_min(const GFunction& gf, double x_max, double x10, double s_f) {
    require_positive_sf(s_f);
    const auto choice = choose_endpoint_nc(gf, x_max, x10);
    if (choice.endpoint_case == EndpointCase::T2_stay) return 0.0;
    return wnc_fixed_endpoint(gf, x10, choice.x1f, s_f);
}

double speed_limit(const GFunction& gf, const LimitCycle& lc, double x10, double w_budget) {
    if (!(w_budget > 0.0)) throw DomainError("speed_limit: work budget must be positive");
    const auto choice = choose_endpoint_nc(gf, lc, x10);
    if (choice.endpoint_case == EndpointCase::T2_stay) return 0.0;
    const double dg = gf(choice.x1f) - gf(x10);
    return dg * dg / w_budget;
}

Trajectory sample_plan(const LienardSystem& sys, const OptimalPlan& plan, int n) {
    if (n < 2) throw ContractViolation("sample_plan: need at least two samples");
    const auto force = synthesize_force(sys, plan);
    Trajectory tr;
    auto push = [&](double t, PhasePoint p) {
        tr.times.push_back(t);
        tr.states.push_back(p);
        tr.force_values.push_back(force.smooth(t));
    };
    const PhasePoint start{plan.x10, plan.x20};
    const PhasePoint end{plan.x1f, plan.x2f};
    if (plan.impulse_start != 0.0) push(0.0, start);
    for (int i = 0; i < n; ++i) {
        const double t = i + 1 == n ? plan.t_f : plan.t_f * i / (n - 1);
        push(t, plan.path(t));
    }
    if (plan.impulse_end != 0.0) push(plan.t_f, end);
    tr.force = force;
    return tr;
}

}  // namespace liensync
