#include "liensync/core.hpp"

#include "liensync/errors.hpp"
#include "liensync/numerics.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace liensync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRootTol = 1e-14;

/// First x in (0, x_max] where p changes from negative to non-negative,
/// refined by bracketing. Requires p < 0 just right of the origin.
std::optional<double> first_upward_zero(const Polynomial& p, double x_max, int n) {
    double prev_x = x_max / n;
    double prev = p(prev_x);
    if (!(prev < 0.0)) return std::nullopt;
    for (int i = 2; i <= n; ++i) {
        const double x = x_max * i / n;
        const double v = p(x);
        if (v >= 0.0) {
            return numerics::find_root([&p](double t) { return p(t); }, prev_x, x, prev, v,
                                       kRootTol);
        }
        prev_x = x;
        prev = v;
    }
    return std::nullopt;
}

std::optional<double> scan_zero(const Polynomial& p) {
    // Widen the window geometrically; the validation grid decides whether the
    // zero is admissible, this only locates it.
    for (double x_max : {10.0, 100.0, 1000.0}) {
        if (auto z = first_upward_zero(p, x_max, 20000)) return z;
    }
    return std::nullopt;
}

}  // namespace

bool is_finite(PhasePoint p) noexcept { return std::isfinite(p.x1) && std::isfinite(p.x2); }

LienardSystem::LienardSystem(double mu, Polynomial h, Polynomial dV)
    : LienardSystem(mu, std::move(h), std::move(dV), kNaN, kNaN) {
    b_ = scan_zero(h_).value_or(kNaN);
    a_ = scan_zero(xi_).value_or(kNaN);
}

LienardSystem::LienardSystem(double mu, Polynomial h, Polynomial dV, double b, double a)
    : mu_(mu),
      h_(std::move(h)),
      dV_(std::move(dV)),
      dh_(h_.derivative()),
      V_(dV_.antiderivative()),
      xi_(h_.antiderivative()),
      b_(b),
      a_(a) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw DomainError("damping coefficient mu must be positive and finite");
    }
}

bool LienardSystem::is_van_der_pol() const noexcept {
    return h_ == Polynomial{-1.0, 0.0, 1.0} && dV_ == Polynomial{0.0, 1.0};
}

LienardSystem LienardSystem::with_mu(double mu) const {
    return LienardSystem(mu, h_, dV_, b_, a_);
}

LienardSystem make_van_der_pol(double mu) {
    return LienardSystem(mu, Polynomial{-1.0, 0.0, 1.0}, Polynomial{0.0, 1.0}, 1.0,
                         std::sqrt(3.0));
}

bool ValidationReport::passed() const noexcept {
    for (const auto& c : conditions) {
        if (!c.passed) return false;
    }
    return true;
}

std::string ValidationReport::first_failure() const {
    for (const auto& c : conditions) {
        if (!c.passed) return c.detail;
    }
    return {};
}

ValidationReport validate_system(const LienardSystem& sys, double x_grid_max, int n_grid) {
    if (n_grid < 100) throw ContractViolation("validate_system: n_grid must be >= 100");
    if (!(x_grid_max > 0.0)) throw ContractViolation("validate_system: x_grid_max must be > 0");

    ValidationReport report;
    auto add = [&report](std::string name, bool ok, std::string detail) {
        report.conditions.push_back({std::move(name), ok, ok ? std::string{} : std::move(detail)});
    };
    auto grid = [&](int i) { return x_grid_max * i / n_grid; };

    add("mu positive", sys.mu() > 0.0, "mu must be positive");
    add("h even", sys.h().is_even(), "h is not even");
    add("dV odd", sys.dV().is_odd(), "dV is not odd (potential not even)");

    bool confining = sys.dV().degree() >= 1;
    for (int i = 1; i <= n_grid && confining; ++i) {
        const double x = grid(i);
        confining = sys.dV()(x) * x > 0.0;
    }
    add("potential confining", confining, "potential not confining");

    // h: negative on (0, b), positive on (b, x_grid_max]
    const auto b = first_upward_zero(sys.h(), x_grid_max, n_grid);
    if (!b) {
        add("h single positive zero", false, "h has no positive zero");
    } else {
        bool pattern = true;
        for (int i = 1; i <= n_grid && pattern; ++i) {
            const double x = grid(i);
            if (std::fabs(x - *b) <= 1e-12) continue;
            const double v = sys.h()(x);
            pattern = x < *b ? v < 0.0 : v > 0.0;
        }
        add("h single positive zero", pattern, "h changes sign more than once on the grid");
        report.b = *b;
    }

    const auto a = first_upward_zero(sys.xi(), x_grid_max, n_grid);
    if (!a) {
        add("xi single positive zero", false, "xi has no positive zero");
        add("xi non-decreasing beyond a", false, "xi has no positive zero");
    } else {
        bool pattern = true;
        bool monotone = true;
        double prev = sys.xi()(*a);
        for (int i = 1; i <= n_grid; ++i) {
            const double x = grid(i);
            if (std::fabs(x - *a) <= 1e-12) continue;
            const double v = sys.xi()(x);
            if (x < *a ? !(v < 0.0) : !(v > 0.0)) pattern = false;
            if (x > *a) {
                if (v < prev) monotone = false;
                prev = v;
            }
        }
        add("xi single positive zero", pattern, "xi changes sign more than once on the grid");
        add("xi non-decreasing beyond a", monotone, "xi decreases beyond a");
        report.a = *a;
    }
    return report;
}

void require_valid(const LienardSystem& sys, double x_grid_max, int n_grid) {
    const auto report = validate_system(sys, x_grid_max, n_grid);
    if (!report.passed()) {
        throw DomainError("invalid Lienard system: " + report.first_failure());
    }
}

}  // namespace liensync
