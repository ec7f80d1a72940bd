#include "liensync/integrate.hpp"

#include "liensync/ode.hpp"

#include <cmath>

namespace liensync {

namespace {

using State3 = ode::State<3>;

ode::Settings to_settings(const IntegratorConfig& cfg) {
    ode::Settings s;
    s.adaptive = cfg.method == IntegratorMethod::rk45_adaptive;
    s.dt = cfg.dt;
    s.rel_tol = cfg.rel_tol;
    s.abs_tol = cfg.abs_tol;
    s.max_step = cfg.max_step;
    s.max_steps = cfg.max_steps;
    return s;
}

/// (x1, x2, w_nc) with w_nc' = mu h(x1) x2^2.
struct DrivenRhs {
    const LienardSystem* sys;
    const ForceProfile* force;

    State3 operator()(double t, const State3& y) const {
        const double h = sys->h()(y[0]);
        const double F = force ? force->smooth(t) : 0.0;
        return {y[1], -sys->mu() * h * y[1] - sys->dV()(y[0]) + F, sys->mu() * h * y[1] * y[1]};
    }
};

void push_sample(Trajectory& traj, double t, const State3& y, double F) {
    traj.times.push_back(t);
    traj.states.push_back({y[0], y[1]});
    traj.force_values.push_back(F);
    traj.cumulative_wnc.push_back(y[2]);
}

bool crosses(const EventSpec& ev, double before, double after) {
    return ev.direction == CrossingDirection::descending ? (before > 0.0 && after <= 0.0)
                                                         : (before < 0.0 && after >= 0.0);
}

}  // namespace

void IntegratorConfig::validate() const {
    if (max_steps <= 0) throw DomainError("integrator: max_steps must be positive");
    if (!(max_step > 0.0)) throw DomainError("integrator: max_step must be positive");
    if (method == IntegratorMethod::rk4_fixed) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("rk4_fixed requires dt > 0");
    } else {
        auto ok = [](double tol) { return tol > 0.0 && tol <= 1e-2; };
        if (!ok(rel_tol) || !ok(abs_tol)) {
            throw DomainError("rk45_adaptive requires rel_tol and abs_tol in (0, 1e-2]");
        }
    }
}

IntegratorConfig IntegratorConfig::verification() { return {}; }

IntegratorConfig IntegratorConfig::sweep() {
    IntegratorConfig c;
    c.rel_tol = c.abs_tol = 1e-8;
    return c;
}

IntegratorConfig IntegratorConfig::fixed(double dt) {
    IntegratorConfig c;
    c.method = IntegratorMethod::rk4_fixed;
    c.dt = dt;
    return c;
}

Trajectory integrate_driven(const LienardSystem& sys, PhasePoint start, const ForceProfile& force,
                            double t_f, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(t_f >= 0.0) || !std::isfinite(t_f)) throw DomainError("integrate_driven: t_f must be >= 0");
    if (!is_finite(start)) throw DomainError("integrate_driven: start point must be finite");
    for (const auto& imp : force.impulses()) {
        if (imp.time < 0.0 || imp.time > t_f) {
            throw ContractViolation("integrate_driven: impulse outside [0, t_f]");
        }
    }

    const auto settings = to_settings(cfg);
    DrivenRhs rhs{&sys, &force};
    Trajectory traj;
    traj.force = force;
    State3 y{start.x1, start.x2, 0.0};
    double t = 0.0;
    push_sample(traj, t, y, force.smooth(t));
    long budget = cfg.max_steps;

    auto advance = [&](double t_end) {
        if (!(t_end > t)) return;
        ode::Settings s = settings;
        s.max_steps = budget;
        long used = 0;
        const auto status = ode::integrate<3>(
            rhs, t, y, t_end, s,
            [&](const ode::DenseStep<3>& step) {
                push_sample(traj, step.t1(), step.y1, force.smooth(step.t1()));
                return true;
            },
            &used);
        budget -= used;
        y = {traj.states.back().x1, traj.states.back().x2, traj.cumulative_wnc.back()};
        t = traj.times.back();
        if (status != ode::Status::completed) {
            throw IntegrationFailure("integrate_driven: step budget exhausted or step size underflow",
                                     std::move(traj));
        }
        t = t_end;
    };

    for (const auto& imp : force.impulses()) {
        advance(imp.time);
        y[1] += imp.delta_v;
        push_sample(traj, imp.time, y, force.smooth(imp.time));
    }
    advance(t_f);
    return traj;
}

EventResult integrate_until_event(const LienardSystem& sys, PhasePoint start, const EventSpec& event,
                                  const IntegratorConfig& cfg, double t_max) {
    cfg.validate();
    if (!(t_max > 0.0)) throw DomainError("integrate_until_event: t_max must be positive");
    if (!is_finite(start)) throw DomainError("integrate_until_event: start point must be finite");

    const auto settings = to_settings(cfg);
    DrivenRhs rhs{&sys, nullptr};
    EventResult result;
    auto& traj = result.trajectory;
    push_sample(traj, 0.0, {start.x1, start.x2, 0.0}, 0.0);
    bool found = false;

    auto observer = [&](const ode::DenseStep<3>& step) {
        if (crosses(event, step.y0[1], step.y1[1])) {
            // Bracket on the dense output ...
            double lo = step.t0, hi = step.t1();
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double v = step.at(mid)[1];
                if (std::fabs(v) < 1e-13) {
                    lo = hi = mid;
                    break;
                }
                (crosses(event, step.y0[1], v) ? hi : lo) = mid;
            }
            // ... then polish with exact single steps from the step origin.
            double tc = 0.5 * (lo + hi);
            State3 yc = step.at(tc);
            State3 err;
            ode::DenseStep<3> probe;
            auto rhs_ref = rhs;
            for (int it = 0; it < 8; ++it) {
                const double tau = tc - step.t0;
                if (tau <= 0.0) {
                    yc = step.y0;
                } else if (settings.adaptive) {
                    ode::dopri_step<3>(rhs_ref, step.t0, step.y0, step.f0, tau, probe, err);
                    yc = probe.y1;
                } else {
                    ode::rk4_step<3>(rhs_ref, step.t0, step.y0, step.f0, tau, probe);
                    yc = probe.y1;
                }
                if (std::fabs(yc[1]) < 1e-13) break;
                const double slope = rhs(tc, yc)[1];
                if (slope == 0.0) break;
                tc -= yc[1] / slope;
            }
            if (std::fabs(yc[1]) >= 1e-12) {
                throw NumericalError("integrate_until_event: crossing refinement did not converge");
            }
            const bool side_ok = event.x1_sign == 0 || (event.x1_sign > 0 ? yc[0] > 0.0 : yc[0] < 0.0);
            if (side_ok) {
                push_sample(traj, tc, yc, 0.0);
                result.crossing = {yc[0], yc[1]};
                result.t_cross = tc;
                found = true;
                return false;
            }
        }
        push_sample(traj, step.t1(), step.y1, 0.0);
        return true;
    };

    const auto status = ode::integrate<3>(rhs, 0.0, State3{start.x1, start.x2, 0.0}, t_max, settings,
                                          observer);
    if (found) return result;
    if (status == ode::Status::step_limit || status == ode::Status::step_underflow) {
        throw IntegrationFailure("integrate_until_event: step budget exhausted", std::move(traj));
    }
    throw EventNotFound("integrate_until_event: no section crossing before t_max");
}

double envelope_amplitude(const LienardSystem& sys, PhasePoint start, double t) {
    if (!sys.is_van_der_pol()) throw DomainError("small-mu envelope is defined for van der Pol only");
    const double r0sq = start.x1 * start.x1 + start.x2 * start.x2;
    if (!(r0sq > 0.0)) throw DomainError("small-mu envelope: start at the unstable fixed point");
    return 2.0 / std::sqrt(1.0 - (r0sq - 4.0) / r0sq * std::exp(-sys.mu() * t));
}

PhasePoint small_mu_envelope(const LienardSystem& sys, PhasePoint start, double t) {
    const double A = envelope_amplitude(sys, start, t);
    const double phi0 = std::atan2(-start.x2, start.x1);
    return {A * std::cos(t + phi0), -A * std::sin(t + phi0)};
}

}  // namespace liensync
