#include "liensync/verify.hpp"

#include "liensync/errors.hpp"
#include "liensync/numerics.hpp"
#include "liensync/ode.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace liensync {

Check check_close(std::string name, double measured, double expected, double tolerance) {
    const bool pass = std::isfinite(measured) && std::fabs(measured - expected) <= tolerance;
    return {std::move(name), measured, expected, tolerance, pass};
}

Check check_below(std::string name, double measured, double bound) {
    const bool pass = std::isfinite(measured) && measured <= bound;
    return {std::move(name), measured, bound, bound, pass};
}

bool VerificationReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void VerificationReport::append(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

nlohmann::json VerificationReport::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"measured", c.measured},
                       {"expected", c.expected},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    }
    return {{"schema_version", "1"}, {"passed", passed()}, {"checks", arr}};
}

// -----------------------------------------------------------------------------
// Work quadrature

QuadratureResult oracle_wnc_quadrature(const LienardSystem& sys, const PathFn& path, double t_f, int n) {
    if (n < 1000) throw ContractViolation("oracle_wnc_quadrature: n must be at least 1000");
    auto integrand = [&](double t) {
        const auto p = path(t);
        return sys.mu() * sys.h()(p.x1) * p.x2 * p.x2;
    };
    const double s1 = numerics::composite_simpson(integrand, 0.0, t_f, n);
    const double s2 = numerics::composite_simpson(integrand, 0.0, t_f, 2 * n);
    const double corr = (s2 - s1) / 15.0;
    return {s2 + corr, std::fabs(corr)};
}

// -----------------------------------------------------------------------------
// Shooting oracle for the EL equation

namespace {

using State2 = ode::State<2>;

struct ShotResult {
    bool reached_b = false;
    double t_stop = 0.0;
    double x_end = 0.0;
};

ode::Settings shooting_settings() {
    ode::Settings s;
    s.rel_tol = s.abs_tol = 1e-13;
    s.max_steps = 2'000'000;
    return s;
}

/// x'' = -h'(x) x'^2 / (2 h(x)) from (x0, v0), x0 > b. Samples are written
/// for `times` (sorted) when `out` is non-null.
ShotResult shoot(const LienardSystem& sys, double x0, double v0, double t_f, const std::vector<double>* times,
                 std::vector<PhasePoint>* out) {
    const auto& h = sys.h();
    const auto& dh = sys.dh();
    const double b = sys.b();
    auto rhs = [&](double, const State2& y) -> State2 {
        const double hv = h(y[0]);
        return {y[1], -dh(y[0]) * y[1] * y[1] / (2.0 * hv)};
    };
    ShotResult res;
    std::size_t next = 0;
    auto emit = [&](double t, const State2& y) {
        if (out) out->push_back({y[0], y[1]});
        (void)t;
        ++next;
    };
    if (times) {
        while (next < times->size() && (*times)[next] <= 0.0) emit(0.0, {x0, v0});
    }
    double x_last = x0;
    auto observer = [&](const ode::DenseStep<2>& st) {
        if (!(st.y1[0] > b) || !std::isfinite(st.y1[0])) {
            res.reached_b = true;
            res.t_stop = st.t0;
            return false;
        }
        if (times) {
            while (next < times->size() && (*times)[next] <= st.t1()) emit((*times)[next], st.at((*times)[next]));
        }
        x_last = st.y1[0];
        return true;
    };
    const auto status = ode::integrate<2>(rhs, 0.0, State2{x0, v0}, t_f, shooting_settings(), observer);
    if (status == ode::Status::step_limit || status == ode::Status::step_underflow) {
        // Step collapse happens when the trajectory runs into h = 0.
        res.reached_b = true;
    }
    res.x_end = x_last;
    return res;
}

}  // namespace

std::vector<PhasePoint> oracle_el_bvp(const LienardSystem& sys, double x10, double x1f, double t_f,
                                      const std::vector<double>& times) {
    const double b = sys.b();
    if (!(t_f > 0.0)) throw DomainError("oracle_el_bvp: t_f must be positive");
    if (std::fabs(x10) < b || std::fabs(x1f) < b || (x10 > 0.0) != (x1f > 0.0)) {
        throw NoSolutionError("oracle_el_bvp: infeasible boundary values");
    }
    if (!std::is_sorted(times.begin(), times.end())) throw ContractViolation("oracle_el_bvp: unsorted times");
    if (x10 == x1f) return std::vector<PhasePoint>(times.size(), PhasePoint{x10, 0.0});
    if (x10 < 0.0) {
        auto pts = oracle_el_bvp(sys, -x10, -x1f, t_f, times);
        for (auto& p : pts) p = reflect(p);
        return pts;
    }
    if (x10 == b) throw NumericalError("oracle_el_bvp: start on h = 0 is singular for shooting");

    auto miss = [&](double v0) {
        const auto r = shoot(sys, x10, v0, t_f, nullptr, nullptr);
        if (r.reached_b) {
            // Overshoot towards b; keep the sign and grow with the lost time.
            return (b - x1f) * (1.0 + (t_f - r.t_stop) / t_f);
        }
        return r.x_end - x1f;
    };
    const double m0 = x10 - x1f;  // v0 = 0 stays put
    double v = (x1f - x10) / t_f;
    double mv = miss(v);
    int expand = 0;
    while ((mv > 0.0) == (m0 > 0.0) && mv != 0.0) {
        if (++expand > 80) throw NumericalError("oracle_el_bvp: could not bracket the initial velocity");
        v *= 2.0;
        mv = miss(v);
    }
    const double lo = std::min(0.0, v), hi = std::max(0.0, v);
    const double f_lo = lo == 0.0 ? m0 : mv;
    const double f_hi = hi == 0.0 ? m0 : mv;
    const double v0 = numerics::find_root(miss, lo, hi, f_lo, f_hi, 1e-15 * std::fabs(v), 400);

    std::vector<PhasePoint> out;
    out.reserve(times.size());
    const auto r = shoot(sys, x10, v0, t_f, &times, &out);
    if (r.reached_b || out.size() != times.size()) throw NumericalError("oracle_el_bvp: final shot failed");
    return out;
}

// -----------------------------------------------------------------------------
// Closed-loop replay

ReplayResult closed_loop_replay_run(const LienardSystem& sys, const LimitCycle& lc, const OptimalPlan& plan,
                                    const ForceProfile& force, double track_tolerance,
                                    const IntegratorConfig& cfg) {
    ReplayResult res;
    IntegratorConfig c = cfg;
    c.max_step = std::min(c.max_step, plan.t_f / 200.0);
    res.driven = integrate_driven(sys, {plan.x10, plan.x20}, force, plan.t_f, c);
    const PhasePoint end = res.driven.back();
    res.report.checks.push_back(check_below("replay terminal distance to cycle", lc.distance(end), 1e-3));
    res.report.checks.push_back(
        check_below("replay endpoint vs plan", std::hypot(end.x1 - plan.x1f, end.x2 - plan.x2f), 1e-3));

    if (track_tolerance > 0.0) {
        double gap = 0.0;
        for (std::size_t i = 0; i < res.driven.size(); ++i) {
            const double t = res.driven.times[i];
            if (!(t > 0.0 && t < plan.t_f)) continue;
            const auto p = plan.path(t);
            const auto q = res.driven.states[i];
            gap = std::max(gap, std::hypot(p.x1 - q.x1, p.x2 - q.x2));
        }
        res.report.checks.push_back(check_below("replay tracks the planned path", gap, track_tolerance));
    }

    IntegratorConfig fc = cfg;
    fc.max_step = std::min(fc.max_step, lc.period() / 200.0);
    res.free_run = integrate_driven(sys, end, ForceProfile::zero(), 5.0 * lc.period(), fc);
    double worst = 0.0;
    for (const auto& p : res.free_run.states) worst = std::max(worst, lc.distance(p));
    res.report.checks.push_back(check_below("free orbit stays near cycle for 5 periods", worst, 1e-2));
    return res;
}

VerificationReport closed_loop_replay(const LienardSystem& sys, const LimitCycle& lc, const OptimalPlan& plan,
                                      const ForceProfile& force) {
    return closed_loop_replay_run(sys, lc, plan, force).report;
}

// -----------------------------------------------------------------------------
// Adjoint and transversality

VerificationReport adjoint_residuals(const LienardSystem& sys, const OptimalPlan& plan, Objective objective) {
    VerificationReport rep;
    const double mu = sys.mu();
    const auto& h = sys.h();
    const auto& dh = sys.dh();
    auto p1 = [&](double t) {
        const auto p = plan.path(t);
        return 2.0 * mu * h(p.x1) * p.x2;
    };
    constexpr double step = 1e-5;
    constexpr int n = 200;
    double worst = 0.0, scale = 1.0;
    for (int i = 0; i < n; ++i) {
        const double t = plan.t_f * (i + 0.5) / n;
        if (t - step <= 0.0 || t + step >= plan.t_f) continue;
        const auto p = plan.path(t);
        const double expected = mu * dh(p.x1) * p.x2 * p.x2;
        const double numeric = (p1(t + step) - p1(t - step)) / (2.0 * step);
        worst = std::max(worst, std::fabs(numeric - expected));
        scale = std::max(scale, std::fabs(expected));
    }
    rep.checks.push_back(check_below("adjoint p1 evolution residual", worst / scale, 1e-6));

    const PhasePoint before = plan.before_end_impulse();
    if (objective == Objective::non_conservative) {
        const double prod = h(before.x1) * before.x2 * plan.x2f;
        rep.checks.push_back(check_below("transversality h x2(tf-) x2f", std::fabs(prod), 1e-9));
    } else {
        const double prod = mu * h(plan.x1f) * plan.x2f * (2.0 * before.x2 - plan.x2f);
        rep.checks.push_back(check_below("modified transversality", std::fabs(prod), 1e-8));
    }
    return rep;
}

// -----------------------------------------------------------------------------
// Perturbations

VerificationReport perturbation_optimality(const LienardSystem& sys, const OptimalPlan& plan, int count,
                                           std::uint64_t seed) {
    constexpr int panels = 20000;
    const double t_f = plan.t_f;
    const double dt = t_f / panels;
    std::vector<PhasePoint> base(panels + 1);
    for (int i = 0; i <= panels; ++i) base[i] = plan.path(i * dt);

    const double mu = sys.mu();
    const auto& h = sys.h();
    auto simpson = [&](auto&& integrand) {
        double acc = integrand(0) + integrand(panels);
        for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i);
        return acc * dt / 3.0;
    };
    const double w0 = simpson([&](int i) { return mu * h(base[i].x1) * base[i].x2 * base[i].x2; });

    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    double worst_drop = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const int knots = 6 + static_cast<int>(uniform() * 5.0);
        std::vector<double> v(static_cast<std::size_t>(knots), 0.0);
        double vmax = 0.0;
        for (int j = 1; j + 1 < knots; ++j) {
            v[j] = 2.0 * uniform() - 1.0;
            vmax = std::max(vmax, std::fabs(v[j]));
        }
        const double eps = std::pow(10.0, -4.0 + 2.0 * uniform());
        for (auto& x : v) x *= eps / std::max(vmax, 1e-12);
        const boost::math::interpolators::cardinal_cubic_b_spline<double> bump(v.data(), v.size(), 0.0,
                                                                                t_f / (knots - 1), 0.0, 0.0);
        const double w = simpson([&](int i) {
            const double t = i * dt;
            const double x1 = base[i].x1 + bump(t);
            const double x2 = base[i].x2 + bump.prime(t);
            return mu * h(x1) * x2 * x2;
        });
        worst_drop = std::max(worst_drop, w0 - w);
    }
    VerificationReport rep;
    rep.checks.push_back(check_below("perturbations never lower W_nc", worst_drop, 1e-10));
    return rep;
}

// -----------------------------------------------------------------------------

VerificationReport full_report(const LienardSystem& sys) {
    VerificationReport rep;
    const auto lc = find_limit_cycle(sys);
    const GFunction gf(sys);
    const double b = sys.b();

    if (sys.is_van_der_pol()) {
        auto closed = [](double x) {
            const double r = std::sqrt(x * x - 1.0);
            return 0.5 * (x * r - std::log(x + r));
        };
        rep.checks.push_back(check_close("g(2) closed form", gf(2.0), closed(2.0), 1e-10));
        rep.checks.push_back(check_close("g(5) closed form", gf(5.0), closed(5.0), 1e-10));
    }
    for (double x : {1.3 * b, 2.0 * b, 5.0 * b}) {
        rep.checks.push_back(check_close("g round trip at " + std::to_string(x), gf.invert(gf(x)), x, 1e-10));
    }

    // EL path against the shooting oracle.
    {
        const double x10 = 5.0 * b, x1f = 2.0 * b, t_f = 1.0;
        const auto path = solve_el_path(gf, x10, x1f, t_f);
        std::vector<double> times;
        for (int i = 0; i <= 100; ++i) times.push_back(t_f * i / 100.0);
        const auto oracle = oracle_el_bvp(sys, x10, x1f, t_f, times);
        double gap = 0.0, drift = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto p = path(times[i]);
            gap = std::max(gap, std::fabs(p.x1 - oracle[i].x1));
            drift = std::max(drift, std::fabs(p.x2 * std::sqrt(sys.h()(p.x1)) - path.C1()));
        }
        rep.checks.push_back(check_below("EL path vs shooting oracle", gap, 1e-8));
        rep.checks.push_back(check_below("first integral drift", drift, 1e-9));

        const auto q = oracle_wnc_quadrature(sys, [&](double t) { return path(t); }, t_f);
        rep.checks.push_back(
            check_close("W_nc quadrature vs mu C1^2 t_f", q.value, sys.mu() * path.C1() * path.C1() * t_f, 1e-9));
    }

    // Endpoint selection.
    const double inside = 0.5 * (b + lc.x_max());
    rep.checks.push_back(check_close("inside start stays", choose_endpoint_nc(gf, lc, inside).x1f, inside, 0.0));
    rep.checks.push_back(
        check_close("outside start goes to x_max", choose_endpoint_nc(gf, lc, 5.0 * b).x1f, lc.x_max(), 0.0));

    // Replays, adjoint residuals and perturbations.
    std::vector<OptimalPlan> plans = plan_nc_all(gf, lc, {inside, 0.0}, 10.0);
    plans.push_back(plan_nc(gf, lc, {5.0 * b, 0.0}, 10.0));
    for (const auto& plan : plans) {
        const auto force = synthesize_force(sys, plan);
        rep.append(closed_loop_replay(sys, lc, plan, force));
        rep.append(adjoint_residuals(sys, plan));
    }
    rep.append(perturbation_optimality(sys, plans.back()));
    return rep;
}

}  // namespace liensync
