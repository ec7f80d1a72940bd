#pragma once

#include "liensync/core.hpp"
#include "liensync/limit_cycle.hpp"
#include "liensync/trajectory.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace liensync {

/// g(x) = int_b^x sqrt(h(u)) du for x >= b, extended as an odd function.
///
/// A table of g on [b, x_table_max] is built once at construction; an
/// evaluation integrates from the nearest table node with adaptive Simpson
/// in the variable s = sqrt(u - b), which removes the square-root
/// singularity of g' at b. Copies share the immutable table.
class GFunction {
public:
    /// Throws DomainError when the system has no positive zero of h.
    explicit GFunction(const LienardSystem& sys, double x_table_max = 0.0, int table_nodes = 256);

    /// sign(x) g(|x|); DomainError for |x| < b.
    [[nodiscard]] double operator()(double x) const;
    /// Unique x >= b with g(x) = y; DomainError for y < 0.
    [[nodiscard]] double invert(double y) const;

    [[nodiscard]] const LienardSystem& system() const noexcept;
    [[nodiscard]] double b() const noexcept;

private:
    struct Table;
    std::shared_ptr<const Table> table_;
};

[[nodiscard]] inline double g_eval(const GFunction& gf, double x) { return gf(x); }
[[nodiscard]] inline double g_invert(const GFunction& gf, double y) { return gf.invert(y); }

/// Euler-Lagrange extremal between x10 and x1f in time t_f:
///   g(x1(t)) = C1 t + C0,  x2(t) = C1 / sqrt(h(x1(t))).
/// C0 and C1 are signed through the odd extension of g, so the first
/// integral x2 sqrt(h(x1)) = C1 holds literally in both half-planes.
class ElPath {
public:
    /// NoSolutionError when |x10| < b, |x1f| < b or sgn(x10) != sgn(x1f).
    ElPath(GFunction gf, double x10, double x1f, double t_f);

    /// State on the path for t in [0, t_f] (t is clamped). At an endpoint
    /// lying on h = 0 with C1 != 0 the velocity is infinite.
    [[nodiscard]] PhasePoint operator()(double t) const;

    [[nodiscard]] double C0() const noexcept { return C0_; }
    [[nodiscard]] double C1() const noexcept { return C1_; }
    [[nodiscard]] double t_f() const noexcept { return t_f_; }
    [[nodiscard]] double x10() const noexcept { return x10_; }
    [[nodiscard]] double x1f() const noexcept { return x1f_; }
    [[nodiscard]] const GFunction& g() const noexcept { return gf_; }

private:
    GFunction gf_;
    double x10_, x1f_, t_f_, C0_, C1_;
};

[[nodiscard]] ElPath solve_el_path(const GFunction& gf, double x10, double x1f, double t_f);

enum class EndpointCase { T1_extreme, T2_stay, user_fixed };
[[nodiscard]] const char* to_string(EndpointCase c) noexcept;

/// Chosen final point for the non-conservative objective.
struct EndpointChoice {
    double x1f = 0.0;
    EndpointCase endpoint_case = EndpointCase::T2_stay;
};

/// Closed-form optimal protocol from (x10, x20) to (x1f, x2f) on the cycle.
struct OptimalPlan {
    double mu = 0.0;
    double x10 = 0.0, x20 = 0.0, x1f = 0.0, x2f = 0.0;
    double t_f = 0.0, s_f = 0.0;
    double C0 = 0.0, C1 = 0.0;
    EndpointCase endpoint_case = EndpointCase::T2_stay;
    std::optional<Branch> branch;  // empty at the extreme point
    double impulse_start = 0.0;    // delta x2 at t = 0+
    double impulse_end = 0.0;      // delta x2 at t = t_f-
    double w_nc_min = 0.0;
    ElPath path;

    /// Final state just before the terminal impulse.
    [[nodiscard]] PhasePoint before_end_impulse() const { return path(t_f); }
};

/// Transversality choice: stay at x10 when b <= |x10| <= x_max, otherwise go
/// to sgn(x10) x_max. NoSolutionError for |x10| < b.
[[nodiscard]] EndpointChoice choose_endpoint_nc(const GFunction& gf, const LimitCycle& lc, double x10);
/// Same with an explicit cycle amplitude (e.g. the small-mu value 2).
[[nodiscard]] EndpointChoice choose_endpoint_nc(const GFunction& gf, double x_max, double x10);

/// Optimal plan for the non-conservative work with scaled time s_f = t_f / mu.
/// For an inside start the branch with the smaller |impulse_end| is taken
/// (upper on a tie); plan_nc_branch exposes the other possibility.
[[nodiscard]] OptimalPlan plan_nc(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double s_f);
[[nodiscard]] OptimalPlan plan_nc_branch(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                         double s_f, Branch branch);
/// Both inside-start plans (upper first); a single plan for T1 starts.
[[nodiscard]] std::vector<OptimalPlan> plan_nc_all(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                                   double s_f);

/// EL plan to a prescribed endpoint (x1f, s_branch(x1f)) on the cycle.
/// DomainError when |x1f| > x_max; NoSolutionError when infeasible.
[[nodiscard]] OptimalPlan plan_to_endpoint(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                           double x1f, Branch branch, double s_f,
                                           EndpointCase endpoint_case = EndpointCase::user_fixed);

/// Smooth part F = -C1^2 h'/(2 h^2) + mu C1 sqrt(h) + V'(x1) along the path
/// plus the two velocity impulses. SingularForceError when C1 != 0 and the
/// path touches h = 0.
[[nodiscard]] ForceProfile synthesize_force(const LienardSystem& sys, const OptimalPlan& plan);

/// (g(x1f) - g(x10))^2 / s_f, the minimal work for a fixed endpoint.
[[nodiscard]] double wnc_fixed_endpoint(const GFunction& gf, double x10, double x1f, double s_f);
/// Minimal non-conservative work over endpoints on the cycle.
[[nodiscard]] double wnc_min(const GFunction& gf, const LimitCycle& lc, double x10, double s_f);
[[nodiscard]] double wnc_min(const GFunction& gf, double x_max, double x10, double s_f);
/// Smallest s_f achievable with work budget w_budget; DomainError for w_budget <= 0.
[[nodiscard]] double speed_limit(const GFunction& gf, const LimitCycle& lc, double x10, double w_budget);

/// Samples the plan as a Trajectory (n uniform times plus impulse rows).
[[nodiscard]] Trajectory sample_plan(const LienardSystem& sys, const OptimalPlan& plan, int n = 1001);

}  // namespace liensync
