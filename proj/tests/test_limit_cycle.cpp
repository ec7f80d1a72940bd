#include "liensync/errors.hpp"
#include "liensync/integrate.hpp"
#include "liensync/limit_cycle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace liensync;

TEST_CASE("van der Pol amplitude") {
    const auto lc = find_limit_cycle(make_van_der_pol(0.1));
    CHECK(std::fabs(lc.x_max() - 2.00010) < 1e-4);
    const auto small = find_limit_cycle(make_van_der_pol(0.01));
    CHECK(small.x_max() >= 2.0);
    CHECK(small.x_max() - 2.0 < 0.01);
    CHECK(small.period() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-3));
    double prev = 0.0;
    for (double mu : {0.01, 0.1, 0.5, 1.0}) {
        const double x = find_limit_cycle(make_van_der_pol(mu)).x_max();
        CHECK(x >= 2.0);
        CHECK(x <= 2.0672);
        CHECK(x >= prev);
        prev = x;
    }
}

TEST_CASE("cycle invariants") {
    const auto sys = make_van_der_pol(0.5);
    const auto lc = find_limit_cycle(sys);
    const auto& s = lc.samples();
    CHECK(std::fabs(s.front().x1 - s.back().x1) < 1e-9);
    CHECK(std::fabs(s.front().x2 - s.back().x2) < 1e-9);
    for (std::size_t i = 0; i < s.size(); i += 37) CHECK(lc.distance(reflect(s[i])) < 1e-6);
    CHECK(lc.branch_velocity(lc.x_max(), Branch::upper) == 0.0);
    CHECK(lc.branch_velocity(-lc.x_max(), Branch::lower) == 0.0);
    CHECK(std::fabs(lc.branch_velocity(lc.x_max() * (1 - 1e-12), Branch::upper)) < 1e-4);
    for (double x = -lc.x_max(); x <= lc.x_max(); x += 0.05) {
        CHECK(lc.branch_velocity(x, Branch::upper) >= 0.0);
        CHECK(lc.branch_velocity(x, Branch::lower) <= 0.0);
    }
    CHECK_THROWS_AS((void)lc.branch_velocity(lc.x_max() + 0.01, Branch::upper), DomainError);
}

TEST_CASE("orbit closure under the flow") {
    const auto sys = make_van_der_pol(0.1);
    const auto lc = find_limit_cycle(sys);
    for (std::size_t i : {std::size_t{0}, std::size_t{1000}, std::size_t{3000}}) {
        const auto p = lc.samples()[i];
        const auto tr = integrate_driven(sys, p, ForceProfile::zero(), lc.period(), IntegratorConfig::verification());
        CHECK(std::hypot(tr.back().x1 - p.x1, tr.back().x2 - p.x2) < 1e-6);
    }
}

TEST_CASE("return map contracts towards the fixed point") {
    const auto sys = make_van_der_pol(0.1);
    const auto lc = find_limit_cycle(sys);
    const double x = lc.x_max() + 1e-2;
    const double px = poincare_return(sys, x, cycle_config());
    CHECK(std::fabs(px - lc.x_max()) < std::fabs(x - lc.x_max()));
    CHECK(std::fabs(poincare_return(sys, lc.x_max(), cycle_config()) - lc.x_max()) < 1e-11);
}

TEST_CASE("branch velocities at A_i") {
    const auto lc = find_limit_cycle(make_van_der_pol(0.1));
    CHECK(lc.branch_velocity(1.5, Branch::upper) == doctest::Approx(1.4).epsilon(0.05));
    CHECK(lc.branch_velocity(1.5, Branch::lower) == doctest::Approx(-1.3).epsilon(0.05));
}

TEST_CASE("distance to cycle") {
    const auto lc = find_limit_cycle(make_van_der_pol(0.1));
    CHECK(lc.distance({lc.x_max(), 0.0}) < 1e-9);
    CHECK(lc.distance(lc.samples()[777]) < 1e-9);
    CHECK(lc.distance({0.0, 0.0}) == doctest::Approx(2.0).epsilon(0.05));
    // Oracle: brute force over 1e5 points of the dense orbit.
    double brute = INFINITY;
    for (int i = 0; i < 100000; ++i) {
        const auto p = lc.at_time(lc.period() * i / 100000.0);
        brute = std::min(brute, std::hypot(p.x1 - 5.0, p.x2));
    }
    CHECK(lc.distance({5.0, 0.0}) == doctest::Approx(brute).epsilon(1e-6));
    CHECK(lc.distance({5.0, 0.0}) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("general Lienard cycle") {
    const LienardSystem sys(0.1, Polynomial{-1.0, 0.0, 0.0, 0.0, 1.0}, Polynomial{0.0, 1.0});
    const auto lc = find_limit_cycle(sys);
    // Averaging gives A with A^4 = 8 for small mu.
    CHECK(lc.x_max() == doctest::Approx(std::pow(8.0, 0.25)).epsilon(0.02));
    CHECK(lc.x_max() > sys.a());
}

TEST_CASE("invalid systems are rejected") {
    const LienardSystem bad(0.1, Polynomial{1.0, 0.0, 1.0}, Polynomial{0.0, 1.0});
    CHECK_THROWS_AS((void)find_limit_cycle(bad), DomainError);
}
