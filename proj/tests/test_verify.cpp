#include "liensync/errors.hpp"
#include "liensync/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace liensync;

TEST_CASE("checks and reports") {
    VerificationReport r;
    r.checks.push_back(check_close("a", 1.0, 1.0 + 1e-12, 1e-10));
    r.checks.push_back(check_below("b", 0.5, 1.0));
    CHECK(r.passed());
    r.checks.push_back(check_below("c", NAN, 1.0));
    CHECK_FALSE(r.passed());
    const auto j = r.to_json();
    CHECK(j["schema_version"] == "1");
    CHECK(j["checks"].size() == 3);
    CHECK(j["passed"] == false);
}

TEST_CASE("quadrature oracle") {
    const auto sys = make_van_der_pol(0.1);
    CHECK(oracle_wnc_quadrature(sys, [](double) { return PhasePoint{1.5, 0.0}; }, 3.0).value == 0.0);
    CHECK_THROWS_AS((void)oracle_wnc_quadrature(sys, [](double) { return PhasePoint{}; }, 1.0, 10), ContractViolation);

    // Harmonic circle of radius 2: the integral of (x^2 - 1) x'^2 over a
    // period vanishes, so the work is zero.
    const auto tiny = make_van_der_pol(1e-12);
    const auto q = oracle_wnc_quadrature(
        tiny, [](double t) { return PhasePoint{2.0 * std::cos(t), -2.0 * std::sin(t)}; }, 2.0 * std::numbers::pi);
    CHECK(std::fabs(q.value) < 1e-9);
    CHECK(q.error_estimate < 1e-10);
}

TEST_CASE("shooting oracle") {
    const auto sys = make_van_der_pol(0.1);
    const std::vector<double> ts{0.0, 0.25, 0.5, 1.0};
    const auto c = oracle_el_bvp(sys, 1.5, 1.5, 1.0, ts);
    for (const auto& p : c) CHECK(p.x1 == 1.5);
    const auto a = oracle_el_bvp(sys, 5.0, 2.0, 1.0, ts);
    const auto m = oracle_el_bvp(sys, -5.0, -2.0, 1.0, ts);
    CHECK(a.front().x1 == 5.0);
    CHECK(std::fabs(a.back().x1 - 2.0) < 1e-10);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(m[i].x1 == -a[i].x1);
    // Upward connection away from b.
    const auto up = oracle_el_bvp(sys, 1.2, 3.0, 2.0, {0.0, 1.0, 2.0});
    CHECK(std::fabs(up.back().x1 - 3.0) < 1e-10);
    CHECK_THROWS_AS((void)oracle_el_bvp(sys, 0.5, 2.0, 1.0, ts), NoSolutionError);
}

TEST_CASE("closed-loop replay with a negative control") {
    const auto sys = make_van_der_pol(0.1);
    const auto lc = find_limit_cycle(sys);
    const GFunction gf(sys);
    const auto plan = plan_nc(gf, lc, {5.0, 0.0}, 10.0);
    const auto force = synthesize_force(sys, plan);
    const auto good = closed_loop_replay_run(sys, lc, plan, force);
    CHECK(good.report.passed());
    CHECK(std::fabs(good.driven.back().x1 - 2.0) < 0.05);

    const auto bad = closed_loop_replay(sys, lc, plan, force.scaled_smooth(1.01));
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.checks.front().pass);

    // Fig. 1 style drive from inside the cycle in t_f = 1.
    const auto inside = plan_nc(gf, lc, {1.2, 0.3}, 10.0);
    CHECK(closed_loop_replay(sys, lc, inside, synthesize_force(sys, inside)).passed());
}

TEST_CASE("adjoint residuals and perturbations") {
    const auto sys = make_van_der_pol(0.1);
    const auto lc = find_limit_cycle(sys);
    const GFunction gf(sys);
    for (const PhasePoint start : {PhasePoint{5.0, 0.0}, PhasePoint{1.5, 0.0}, PhasePoint{-3.0, 1.0}}) {
        const auto plan = plan_nc(gf, lc, start, 10.0);
        CHECK(adjoint_residuals(sys, plan).passed());
        CHECK(perturbation_optimality(sys, plan, 50).passed());
    }
    // A non-optimal endpoint violates transversality.
    const auto fixed = plan_to_endpoint(gf, lc, {5.0, 0.0}, 1.8, Branch::upper, 10.0);
    const auto rep = adjoint_residuals(sys, fixed);
    CHECK(rep.checks.front().pass);
    CHECK_FALSE(rep.checks.back().pass);
}

TEST_CASE("full report passes on both test systems") {
    CHECK(full_report(make_van_der_pol(0.1)).passed());
    CHECK(full_report(LienardSystem(0.1, Polynomial{-1.0, 0.0, 0.0, 0.0, 1.0}, Polynomial{0.0, 1.0})).passed());
}
