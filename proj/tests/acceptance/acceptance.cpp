// Acceptance suite: one line per criterion, non-zero exit on any failure.

#include "liensync/integrate.hpp"
#include "liensync/limit_cycle.hpp"
#include "liensync/nc_optimal.hpp"
#include "liensync/numerics.hpp"
#include "liensync/total_work.hpp"
#include "liensync/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace liensync;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (pass) detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

LienardSystem quartic(double mu) { return {mu, Polynomial{-1.0, 0.0, 0.0, 0.0, 1.0}, Polynomial{0.0, 1.0}}; }

// Criterion 3: g-inversion path against the shooting oracle.
Outcome el_cross_validation(const LienardSystem& sys) {
    Outcome o;
    const GFunction gf(sys);
    const double x10 = 5.0, x1f = 2.0, t_f = 1.0;
    const auto path = solve_el_path(gf, x10, x1f, t_f);
    std::vector<double> ts;
    for (int i = 0; i <= 400; ++i) ts.push_back(t_f * i / 400.0);
    const auto oracle = oracle_el_bvp(sys, x10, x1f, t_f, ts);
    double gap = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto p = path(ts[i]);
        gap = std::max(gap, std::fabs(p.x1 - oracle[i].x1));
        drift = std::max(drift, std::fabs(p.x2 * std::sqrt(sys.h()(p.x1)) - path.C1()));
    }
    o.require(gap < 1e-8, "gap " + fmt("%.3g", gap));
    o.require(drift < 1e-9, "drift " + fmt("%.3g", drift));
    o.note("max gap " + fmt("%.2e", gap) + ", first-integral drift " + fmt("%.2e", drift));
    return o;
}

// Criterion 4: work constant fixed by quadrature; held-out wnc_min; 1/s_f scaling.
Outcome work_resolution(const LienardSystem& sys) {
    Outcome o;
    const GFunction gf(sys);
    const auto lc = find_limit_cycle(sys);
    struct Inst {
        double x10, x1f, sf;
    };
    std::vector<Inst> grid;
    for (double x10 : {5.0, 3.0, -4.0, 1.3, 8.0}) {
        const double s = x10 < 0 ? -1.0 : 1.0;
        const double ax = std::fabs(x10);
        grid.push_back({x10, s * 1.1, 10.0});
        grid.push_back({x10, s * 2.0, 1.0});
        grid.push_back({x10, s * (ax + 0.7), 100.0});
        grid.push_back({x10, s * 0.5 * (1.0 + ax) + (ax == 1.3 ? s * 0.4 : 0.0), 3.0});
    }
    double worst_factor = 0.0, worst_bvp = 0.0;
    for (const auto& g : grid) {
        const double t_f = sys.mu() * g.sf;
        const auto path = solve_el_path(gf, g.x10, g.x1f, t_f);
        const double closed = sys.mu() * path.C1() * path.C1() * t_f;
        const auto q = oracle_wnc_quadrature(sys, [&](double t) { return path(t); }, t_f);
        worst_factor = std::max(worst_factor, std::fabs(q.value - closed));
        // Same integral on the shooting oracle's states (independent of g).
        constexpr int n = 2000;
        std::vector<double> ts;
        for (int i = 0; i <= n; ++i) ts.push_back(t_f * i / n);
        const auto states = oracle_el_bvp(sys, g.x10, g.x1f, t_f, ts);
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * sys.mu() * sys.h()(states[i].x1) * states[i].x2 * states[i].x2;
        }
        acc *= t_f / n / 3.0;
        worst_bvp = std::max(worst_bvp, std::fabs(acc - closed) / std::max(1.0, closed));
    }
    o.require(worst_factor < 1e-9, "quadrature vs mu C1^2 t_f " + fmt("%.3g", worst_factor));
    o.require(worst_bvp < 1e-6, "shooting-path quadrature rel " + fmt("%.3g", worst_bvp));

    double worst_heldout = 0.0, worst_scaling = 0.0;
    for (double x10 : {2.7, 4.2, 6.5, -3.3}) {
        for (double sf : {3.0, 30.0}) {
            const auto plan = plan_nc(gf, lc, {x10, 0.0}, sf);
            const auto q = oracle_wnc_quadrature(sys, [&](double t) { return plan.path(t); }, plan.t_f);
            worst_heldout = std::max(worst_heldout, std::fabs(wnc_min(gf, lc, x10, sf) - q.value));
            const double w1 = wnc_min(gf, lc, x10, sf), w2 = wnc_min(gf, lc, x10, 2.0 * sf);
            worst_scaling = std::max(worst_scaling, std::fabs(w2 - 0.5 * w1) / w1);
        }
    }
    o.require(worst_heldout < 1e-9, "held-out " + fmt("%.3g", worst_heldout));
    o.require(worst_scaling < 1e-10, "1/s_f scaling " + fmt("%.3g", worst_scaling));
    o.note("20-instance factor gap " + fmt("%.1e", worst_factor) + " (constant 1 confirmed), shooting-path rel " +
           fmt("%.1e", worst_bvp) + ", held-out " + fmt("%.1e", worst_heldout) + ", scaling " +
           fmt("%.1e", worst_scaling));
    return o;
}

// Criterion 5: endpoint selection and exact point symmetry.
Outcome endpoint_selection(const LienardSystem& sys) {
    Outcome o;
    const GFunction gf(sys);
    const auto lc = find_limit_cycle(sys);
    const auto in = plan_nc(gf, lc, {1.5, 0.0}, 10.0);
    o.require(in.x1f == 1.5 && in.w_nc_min == 0.0, "inside start moved");
    o.require(wnc_min(gf, lc, 1.5, 10.0) == 0.0, "inside W_nc not zero");
    const auto out = plan_nc(gf, lc, {5.0, 0.0}, 10.0);
    o.require(out.x1f == lc.x_max(), "outside start not at x_max");
    for (const PhasePoint p : {PhasePoint{1.5, 0.0}, PhasePoint{5.0, 0.0}, PhasePoint{3.0, -0.7}, PhasePoint{1.2, 0.4}}) {
        const auto a = plan_nc(gf, lc, p, 7.0);
        const auto b = plan_nc(gf, lc, reflect(p), 7.0);
        const bool sym = b.x1f == -a.x1f && b.x2f == -a.x2f && b.C1 == -a.C1 && b.C0 == -a.C0 &&
                         b.impulse_start == -a.impulse_start && b.impulse_end == -a.impulse_end &&
                         b.w_nc_min == a.w_nc_min && b.path(0.37 * a.t_f).x1 == -a.path(0.37 * a.t_f).x1;
        o.require(sym, "asymmetric plan from (" + fmt("%g", p.x1) + ", " + fmt("%g", p.x2) + ")");
    }
    o.note("x_max " + fmt("%.6f", lc.x_max()) + ", symmetric outputs bit-identical");
    return o;
}

// Criterion 7: seeded perturbations never lower W_nc.
Outcome local_optimality(const LienardSystem& sys) {
    Outcome o;
    const GFunction gf(sys);
    const auto lc = find_limit_cycle(sys);
    std::vector<OptimalPlan> plans = plan_nc_all(gf, lc, {1.5, 0.0}, 10.0);
    plans.push_back(plan_nc(gf, lc, {5.0, 0.0}, 10.0));
    plans.push_back(plan_nc(gf, lc, {3.0, 0.5}, 4.0));
    plans.push_back(plan_nc(gf, lc, {-6.0, -1.0}, 30.0));
    double worst = -INFINITY;
    for (const auto& p : plans) {
        const auto rep = perturbation_optimality(sys, p, 50);
        worst = std::max(worst, rep.checks.front().measured);
        o.require(rep.passed(), "perturbation lowered W_nc");
    }
    o.note(std::to_string(plans.size()) + " paths x 50 bumps, smallest increase " + fmt("%.2e", -worst));
    return o;
}

}  // namespace

int main() {
    const auto vdp = make_van_der_pol(0.1);

    report(1, "limit-cycle amplitude", [] {
        Outcome o;
        const double x = find_limit_cycle(make_van_der_pol(0.1)).x_max();
        o.require(std::fabs(x - 2.00010) <= 1e-4, "mu=0.1 x_max " + fmt("%.6f", x));
        std::string others;
        for (double mu : {0.01, 0.5, 1.0}) {
            const double xm = find_limit_cycle(make_van_der_pol(mu)).x_max();
            o.require(xm >= 2.0 && xm <= 2.0672, "mu=" + fmt("%g", mu) + " x_max " + fmt("%.6f", xm));
            others += fmt(" %.5f", xm);
        }
        o.note("mu=0.1: " + fmt("%.6f", x) + "; mu=0.01,0.5,1:" + others);
        return o;
    });

    report(2, "small-mu asymptotics", [] {
        Outcome o;
        const auto sys = make_van_der_pol(0.01);
        const PhasePoint start{4.0, 0.0};
        IntegratorConfig cfg = IntegratorConfig::verification();
        cfg.max_step = 0.05;
        const auto tr = integrate_driven(sys, start, ForceProfile::zero(), 400.0, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double amp = std::hypot(tr.states[i].x1, tr.states[i].x2);
            worst = std::max(worst, std::fabs(amp - envelope_amplitude(sys, start, tr.times[i])));
        }
        o.require(worst < 5.0 * sys.mu(), "envelope gap " + fmt("%.4f", worst));
        const auto lc = find_limit_cycle(sys);
        const double t_R = 4.0 / sys.mu();
        const auto relax = integrate_driven(sys, start, ForceProfile::zero(), 2.0 * t_R, IntegratorConfig::verification());
        const double d = lc.distance(relax.back());
        o.require(d < 0.05, "distance at 2 t_R " + fmt("%.4f", d));
        o.note("envelope gap " + fmt("%.4f", worst) + " < 0.05, distance at 2 t_R " + fmt("%.2e", d));
        return o;
    });

    report(3, "EL path vs shooting oracle (van der Pol)", [&] { return el_cross_validation(vdp); });
    report(4, "work formula resolution (van der Pol)", [&] { return work_resolution(vdp); });
    report(5, "endpoint selection (van der Pol)", [&] { return endpoint_selection(vdp); });

    report(6, "closed-loop replay of the A_i / B_i scenarios", [&] {
        Outcome o;
        const auto lc = find_limit_cycle(vdp);
        const GFunction gf(vdp);
        struct Case {
            const char* name;
            OptimalPlan plan;
            PhasePoint expect;
        };
        const std::vector<Case> cases{
            {"A_f", plan_nc_branch(gf, lc, {1.5, 0.0}, 10.0, Branch::upper), {1.5, 1.4}},
            {"A'_f", plan_nc_branch(gf, lc, {1.5, 0.0}, 10.0, Branch::lower), {1.5, -1.3}},
            {"B_f", plan_nc(gf, lc, {5.0, 0.0}, 10.0), {2.0, 0.0}},
        };
        for (const auto& c : cases) {
            const auto run = closed_loop_replay_run(vdp, lc, c.plan, synthesize_force(vdp, c.plan));
            for (const auto& chk : run.report.checks) o.require(chk.pass, std::string(c.name) + ": " + chk.name);
            const auto end = run.driven.back();
            const bool near = std::fabs(end.x1 - c.expect.x1) <= 0.05 && std::fabs(end.x2 - c.expect.x2) <= 0.05;
            o.require(near, std::string(c.name) + " at (" + fmt("%.3f", end.x1) + ", " + fmt("%.3f", end.x2) + ")");
            o.note(std::string(c.name) + "=(" + fmt("%.3f", end.x1) + "," + fmt("%.3f", end.x2) + ") d=" +
                   fmt("%.1e", run.report.checks.front().measured));
        }
        return o;
    });

    report(7, "local optimality under perturbations (van der Pol)", [&] { return local_optimality(vdp); });

    report(8, "total-work transition", [&] {
        Outcome o;
        const auto lc = find_limit_cycle(vdp);
        const GFunction gf(vdp);
        const PhasePoint start{5.0, 0.0};
        const auto s = critical_time(gf, lc, start, {10.0, 400.0});
        if (!s) {
            o.require(false, "no critical time found");
            return o;
        }
        const double rel = std::fabs(*s - 174.7) / 174.7;
        o.require(rel < 0.03, "s_f* " + fmt("%.3f", *s));
        const auto lo = optimal_endpoint_total(gf, lc, start, *s * (1.0 - 1e-9)).global_opt;
        const auto hi = optimal_endpoint_total(gf, lc, start, *s * (1.0 + 1e-9)).global_opt;
        const double dW = std::fabs(lo.work.total - hi.work.total);
        const double jump = std::fabs(lo.x1f - hi.x1f);
        o.require(dW < 1e-6, "W discontinuous " + fmt("%.3g", dW));
        o.require(jump > 0.1, "x1f_opt jump " + fmt("%.3g", jump));
        o.note("s_f* " + fmt("%.3f", *s) + " (" + fmt("%.2f", 100 * rel) + "% off 174.7), |dW| " + fmt("%.1e", dW) +
               ", x1f jump " + fmt("%.3f", lo.x1f) + " -> " + fmt("%.3f", hi.x1f));
        return o;
    });

    report(9, "inside-point drift towards b", [&] {
        Outcome o;
        const auto lc = find_limit_cycle(vdp);
        const GFunction gf(vdp);
        constexpr int n = 41;
        double prev = INFINITY, last = 0.0;
        int violations = 0;
        for (int i = 0; i < n; ++i) {
            const double sf = std::pow(10.0, 4.0 * i / (n - 1));
            const double x = optimal_endpoint_total(gf, lc, {1.5, 0.0}, sf).global_opt.x1f;
            if (x > prev) ++violations;
            prev = x;
            last = x;
        }
        o.require(violations == 0, std::to_string(violations) + " increases");
        o.require(std::fabs(last - 1.0) < 0.05, "x1f_opt at mu s_f = 1e3 is " + fmt("%.6f", last));
        o.note("non-increasing on 41 log points, x1f_opt(1e4) - 1 = " + fmt("%.2e", last - 1.0));
        return o;
    });

    report(10, "Lienard generality h = x^4 - 1 (criteria 3, 4, 5, 7)", [] {
        const auto sys = quartic(0.1);
        Outcome o;
        for (const auto& [name, fn] : std::vector<std::pair<std::string, std::function<Outcome()>>>{
                 {"3", [&] { return el_cross_validation(sys); }},
                 {"4", [&] { return work_resolution(sys); }},
                 {"5", [&] { return endpoint_selection(sys); }},
                 {"7", [&] { return local_optimality(sys); }}}) {
            const auto sub = fn();
            o.require(sub.pass, "criterion " + name + ": " + sub.detail);
        }
        o.note("x_max " + fmt("%.6f", find_limit_cycle(sys).x_max()) + ", all four sub-criteria pass");
        return o;
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
