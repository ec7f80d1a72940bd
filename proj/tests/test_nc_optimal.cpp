#include "liensync/errors.hpp"
#include "liensync/nc_optimal.hpp"
#include "liensync/numerics.hpp"
#include "liensync/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace liensync;

namespace {

double g_closed(double x) {
    const double r = std::sqrt(x * x - 1.0);
    return 0.5 * (x * r - std::log(x + r));
}

struct Fixture {
    LienardSystem sys = make_van_der_pol(0.1);
    LimitCycle lc = find_limit_cycle(sys);
    GFunction gf{sys};
};

}  // namespace

TEST_CASE("g-function values") {
    const GFunction gf(make_van_der_pol(0.1));
    CHECK(gf(1.0) == 0.0);
    // Oracle: adaptive Simpson of sqrt(x^2 - 1) directly in x.
    auto direct = [](double x) {
        return numerics::adaptive_simpson([](double u) { return std::sqrt(std::max(u * u - 1.0, 0.0)); }, 1.0, x,
                                          1e-13);
    };
    CHECK(gf(2.0) == doctest::Approx(direct(2.0)).epsilon(1e-9));
    CHECK(gf(2.0) == doctest::Approx(1.0735718).epsilon(1e-7));
    CHECK(gf(5.0) == doctest::Approx(direct(5.0)).epsilon(1e-9));
    // The published reference 11.1011813 is off in the fifth digit; the closed
    // form gives 11.1012329.
    CHECK(gf(5.0) == doctest::Approx(11.1011813).epsilon(1e-5));
    for (double x : {1.0 + 1e-9, 1.001, 1.3, 2.0, 3.7, 9.9, 15.0, 40.0}) {
        CHECK(std::fabs(gf(x) - g_closed(x)) < 1e-10 * std::max(1.0, g_closed(x)));
        CHECK(gf(-x) == -gf(x));
    }
    CHECK_THROWS_AS((void)gf(0.5), DomainError);
}

TEST_CASE("g inversion") {
    const GFunction gf(make_van_der_pol(0.1));
    CHECK(gf.invert(0.0) == 1.0);
    CHECK(gf.invert(gf(2.0)) == doctest::Approx(2.0).epsilon(1e-10));
    const double x5 = gf.invert(5.0);
    CHECK(std::fabs(gf(x5) - 5.0) < 1e-10);
    const double far = gf.invert(1e4);
    CHECK(std::fabs(gf(far) - 1e4) < 1e-10 * 1e4);
    CHECK_THROWS_AS((void)gf.invert(-1.0), DomainError);
}

TEST_CASE("EL path structure") {
    const GFunction gf(make_van_der_pol(0.1));
    const auto stay = solve_el_path(gf, 1.5, 1.5, 3.0);
    CHECK(stay.C1() == 0.0);
    CHECK(stay(1.0).x1 == 1.5);
    CHECK(stay(1.0).x2 == 0.0);

    const auto p = solve_el_path(gf, 5.0, 2.0, 1.0);
    double prev = INFINITY;
    for (int i = 0; i <= 200; ++i) {
        const auto q = p(i / 200.0);
        CHECK(q.x1 < prev);
        prev = q.x1;
        CHECK(std::fabs(q.x2 * std::sqrt(q.x1 * q.x1 - 1.0) - p.C1()) < 1e-9);
    }
    const auto m = solve_el_path(gf, -5.0, -2.0, 1.0);
    for (double t : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(m(t).x1 == -p(t).x1);
        CHECK(m(t).x2 == -p(t).x2);
    }
    CHECK_THROWS_AS((void)solve_el_path(gf, 0.5, 2.0, 1.0), NoSolutionError);
    CHECK_THROWS_AS((void)solve_el_path(gf, 2.0, -2.0, 1.0), NoSolutionError);
}

TEST_CASE("EL path against the shooting oracle") {
    const auto sys = make_van_der_pol(0.1);
    const GFunction gf(sys);
    const auto p = solve_el_path(gf, 5.0, 2.0, 1.0);
    std::vector<double> ts;
    for (int i = 0; i <= 50; ++i) ts.push_back(i / 50.0);
    const auto o = oracle_el_bvp(sys, 5.0, 2.0, 1.0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::fabs(o[i].x1 - p(ts[i]).x1) < 1e-8);
}

TEST_CASE("endpoint selection") {
    Fixture f;
    auto a = choose_endpoint_nc(f.gf, f.lc, 1.5);
    CHECK(a.x1f == 1.5);
    CHECK(a.endpoint_case == EndpointCase::T2_stay);
    auto b = choose_endpoint_nc(f.gf, f.lc, 5.0);
    CHECK(b.x1f == f.lc.x_max());
    CHECK(b.x1f == doctest::Approx(2.00010).epsilon(5e-5));
    CHECK(b.endpoint_case == EndpointCase::T1_extreme);
    auto c = choose_endpoint_nc(f.gf, f.lc, -3.0);
    CHECK(c.x1f == -f.lc.x_max());
    CHECK(c.endpoint_case == EndpointCase::T1_extreme);
    CHECK_THROWS_AS((void)choose_endpoint_nc(f.gf, f.lc, 0.9), NoSolutionError);
}

TEST_CASE("minimal work and speed limit") {
    Fixture f;
    CHECK(wnc_min(f.gf, f.lc, 1.9, 10.0) == 0.0);
    CHECK(wnc_min(f.gf, f.lc, 1.9, 0.01) == 0.0);
    const double w = wnc_min(f.gf, f.lc, 5.0, 10.0);
    const double dg = 11.1012328791 - f.gf(f.lc.x_max());
    CHECK(w == doctest::Approx(dg * dg / 10.0).epsilon(1e-9));
    CHECK(w == doctest::Approx(10.06).epsilon(2e-3));
    CHECK(wnc_min(f.gf, f.lc, 5.0, 20.0) == doctest::Approx(w / 2.0).epsilon(1e-12));
    CHECK(speed_limit(f.gf, f.lc, 1.5, 3.0) == 0.0);
    CHECK(speed_limit(f.gf, f.lc, 5.0, w) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(speed_limit(f.gf, f.lc, 5.0, 1e12) < 1e-9);
    CHECK_THROWS_AS((void)speed_limit(f.gf, f.lc, 5.0, 0.0), DomainError);

    // Plan bookkeeping: W = mu C1^2 t_f and the quadrature oracle agree.
    const auto plan = plan_nc(f.gf, f.lc, {5.0, 0.0}, 10.0);
    CHECK(plan.w_nc_min == doctest::Approx(w).epsilon(1e-12));
    const auto q = oracle_wnc_quadrature(f.sys, [&](double t) { return plan.path(t); }, plan.t_f);
    CHECK(std::fabs(q.value - plan.w_nc_min) < 1e-9);
}

TEST_CASE("inside starts have two equivalent plans") {
    Fixture f;
    const auto all = plan_nc_all(f.gf, f.lc, {1.5, 0.0}, 10.0);
    REQUIRE(all.size() == 2);
    CHECK(all[0].branch == Branch::upper);
    CHECK(all[1].branch == Branch::lower);
    CHECK(all[0].x2f == doctest::Approx(1.4).epsilon(0.05));
    CHECK(all[1].x2f == doctest::Approx(-1.3).epsilon(0.05));
    for (const auto& p : all) {
        CHECK(p.w_nc_min == 0.0);
        CHECK(p.endpoint_case == EndpointCase::T2_stay);
    }
    // Tie-break: smaller terminal kick.
    CHECK(plan_nc(f.gf, f.lc, {1.5, 0.0}, 10.0).branch == Branch::lower);
    CHECK(plan_nc_branch(f.gf, f.lc, {1.5, 0.0}, 10.0, Branch::upper).branch == Branch::upper);
}

TEST_CASE("force synthesis") {
    Fixture f;
    const auto stay = plan_nc(f.gf, f.lc, {1.5, 0.0}, 10.0);
    const auto F0 = synthesize_force(f.sys, stay);
    CHECK(F0.smooth(0.3) == 1.5);
    CHECK(F0.smooth(0.9) == 1.5);

    const auto plan = plan_nc(f.gf, f.lc, {5.0, 0.0}, 10.0);
    CHECK(plan.C1 < 0.0);
    CHECK(plan.impulse_start < 0.0);
    const auto F = synthesize_force(f.sys, plan);
    REQUIRE(F.impulses().size() == 2);
    CHECK(F.impulses()[0].time == 0.0);
    CHECK(F.impulses()[1].time == plan.t_f);
    // F = x'' + mu h x' + V' along the path, by finite differences.
    for (double t : {0.2, 0.5, 0.8}) {
        const double d = 1e-4;
        const auto pm = plan.path(t - d), p0 = plan.path(t), pp = plan.path(t + d);
        const double acc = (pp.x2 - pm.x2) / (2 * d);
        const double expect = acc + 0.1 * (p0.x1 * p0.x1 - 1.0) * p0.x2 + p0.x1;
        CHECK(F.smooth(t) == doctest::Approx(expect).epsilon(1e-6));
    }
    const auto rep = closed_loop_replay(f.sys, f.lc, plan, F);
    CHECK(rep.passed());

    // A path reaching h = 0 with C1 != 0 has an unbounded force.
    OptimalPlan to_b = plan_to_endpoint(f.gf, f.lc, {1.5, 0.0}, 1.0, Branch::lower, 10.0);
    CHECK_THROWS_AS((void)synthesize_force(f.sys, to_b), SingularForceError);
}

TEST_CASE("point symmetry of plans") {
    Fixture f;
    const auto p = plan_nc(f.gf, f.lc, {5.0, 0.3}, 10.0);
    const auto m = plan_nc(f.gf, f.lc, {-5.0, -0.3}, 10.0);
    CHECK(m.x1f == -p.x1f);
    CHECK(m.x2f == -p.x2f);
    CHECK(m.C1 == -p.C1);
    CHECK(m.impulse_start == -p.impulse_start);
    CHECK(m.impulse_end == -p.impulse_end);
    CHECK(m.w_nc_min == p.w_nc_min);
    const auto a = plan_nc(f.gf, f.lc, {1.5, 0.0}, 10.0);
    const auto am = plan_nc(f.gf, f.lc, {-1.5, 0.0}, 10.0);
    CHECK(am.x2f == -a.x2f);
}

TEST_CASE("forced endpoint and sampling") {
    Fixture f;
    const auto p = plan_to_endpoint(f.gf, f.lc, {5.0, 0.0}, 1.8, Branch::upper, 10.0);
    CHECK(p.endpoint_case == EndpointCase::user_fixed);
    CHECK(p.x2f == doctest::Approx(f.lc.branch_velocity(1.8, Branch::upper)));
    CHECK_THROWS_AS((void)plan_to_endpoint(f.gf, f.lc, {5.0, 0.0}, 3.0, Branch::upper, 10.0), DomainError);
    const auto tr = sample_plan(f.sys, p, 101);
    CHECK(tr.size() == 103);
    CHECK(tr.front().x1 == 5.0);
    CHECK(tr.back().x1 == 1.8);
    CHECK(tr.back().x2 == p.x2f);
}
