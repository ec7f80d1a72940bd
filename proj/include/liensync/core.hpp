#pragma once

#include "liensync/polynomial.hpp"

#include <string>
#include <vector>

namespace liensync {

// =============================================================================
// Phase plane
// =============================================================================

/// Point (x, dx/dt) of the phase plane.
struct PhasePoint {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Point reflection through the origin, the symmetry of every even Liénard system.
[[nodiscard]] constexpr PhasePoint reflect(PhasePoint p) noexcept { return {-p.x1, -p.x2}; }

[[nodiscard]] bool is_finite(PhasePoint p) noexcept;

/// Time derivative of a phase point.
struct PhaseRate {
    double dx1 = 0.0;
    double dx2 = 0.0;
};

// =============================================================================
// Liénard system  x'' + mu h(x) x' + V'(x) = F(t)
// =============================================================================

class LienardSystem {
public:
    /// Throws DomainError for non-positive or non-finite mu. The constants b
    /// (first positive zero of h) and a (first positive zero of xi = int h)
    /// are located by a grid scan with bracketed refinement; they are NaN when
    /// no such zero exists, which validate_system() then reports.
    LienardSystem(double mu, Polynomial h, Polynomial dV);

    [[nodiscard]] double mu() const noexcept { return mu_; }
    [[nodiscard]] const Polynomial& h() const noexcept { return h_; }
    [[nodiscard]] const Polynomial& dV() const noexcept { return dV_; }
    [[nodiscard]] const Polynomial& dh() const noexcept { return dh_; }
    /// Potential with V(0) = 0.
    [[nodiscard]] const Polynomial& V() const noexcept { return V_; }
    /// xi(x) = int_0^x h.
    [[nodiscard]] const Polynomial& xi() const noexcept { return xi_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double a() const noexcept { return a_; }

    [[nodiscard]] bool is_van_der_pol() const noexcept;

    /// Same h and V with a different damping coefficient.
    [[nodiscard]] LienardSystem with_mu(double mu) const;

private:
    friend LienardSystem make_van_der_pol(double mu);
    LienardSystem(double mu, Polynomial h, Polynomial dV, double b, double a);

    double mu_;
    Polynomial h_, dV_, dh_, V_, xi_;
    double b_, a_;
};

/// h = x^2 - 1, V' = x, b = 1, a = sqrt(3).
[[nodiscard]] LienardSystem make_van_der_pol(double mu);

// =============================================================================
// Validation of the unique-limit-cycle conditions
// =============================================================================

struct ValidationCondition {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCondition> conditions;
    double b = 0.0;
    double a = 0.0;

    [[nodiscard]] bool passed() const noexcept;
    /// Detail of the first failed condition, empty when everything passed.
    [[nodiscard]] std::string first_failure() const;
};

/// Checks evenness of h, oddness of V', confinement, the sign pattern of h
/// around b and of xi around a, and monotonicity of xi beyond a, on the grid
/// x_i = i * x_grid_max / n_grid. Requires n_grid >= 100.
[[nodiscard]] ValidationReport validate_system(const LienardSystem& sys, double x_grid_max = 10.0,
                                               int n_grid = 2000);

/// Throws DomainError naming the first failed condition.
void require_valid(const LienardSystem& sys, double x_grid_max = 10.0, int n_grid = 2000);

// =============================================================================
// Dynamics and energetics
// =============================================================================

/// (x2, -mu h(x1) x2 - V'(x1) + F)
[[nodiscard]] inline PhaseRate vector_field(const LienardSystem& sys, PhasePoint p, double F) {
    return {p.x2, -sys.mu() * sys.h()(p.x1) * p.x2 - sys.dV()(p.x1) + F};
}

/// E = x2^2 / 2 + V(x1).
[[nodiscard]] inline double energy(const LienardSystem& sys, PhasePoint p) {
    return 0.5 * p.x2 * p.x2 + sys.V()(p.x1);
}

}  // namespace liensync
