#pragma once

#include "liensync/integrate.hpp"
#include "liensync/limit_cycle.hpp"
#include "liensync/nc_optimal.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace liensync {

struct Check {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// |measured - expected| <= tolerance.
[[nodiscard]] Check check_close(std::string name, double measured, double expected, double tolerance);
/// measured <= bound (expected is reported as the bound).
[[nodiscard]] Check check_below(std::string name, double measured, double bound);

struct VerificationReport {
    std::vector<Check> checks;

    [[nodiscard]] bool passed() const noexcept;
    void append(const VerificationReport& other);
    [[nodiscard]] nlohmann::json to_json() const;
};

using PathFn = std::function<PhasePoint(double)>;

struct QuadratureResult {
    double value = 0.0;           // Richardson-extrapolated
    double error_estimate = 0.0;  // |S_2n - S_n| / 15
};

/// mu int_0^t_f h(x1) x2^2 dt by composite Simpson with n and 2n panels.
/// ContractViolation for n < 1000.
[[nodiscard]] QuadratureResult oracle_wnc_quadrature(const LienardSystem& sys, const PathFn& path, double t_f,
                                                     int n = 2000);

/// Shooting solution of h(x) x'' + h'(x) x'^2 / 2 = 0 with x(0) = x10 and
/// x(t_f) = x1f, sampled at `times`. Independent of the g-function: the
/// unknown initial velocity is bracketed and refined on the terminal miss,
/// each shot integrated with rk45 at tolerance 1e-13. Runs that reach h = 0
/// count as overshoot. Throws NumericalError if shooting fails.
[[nodiscard]] std::vector<PhasePoint> oracle_el_bvp(const LienardSystem& sys, double x10, double x1f, double t_f,
                                                    const std::vector<double>& times);

struct ReplayResult {
    VerificationReport report;
    Trajectory driven;
    Trajectory free_run;
};

/// Drives the system from (x10, x20) with `force`, then runs 5 free periods.
/// Checks: terminal distance to the cycle < 1e-3, the free orbit within 1e-2
/// of the cycle, and (when track_tolerance > 0) the driven states within
/// track_tolerance of the planned path at every sample.
[[nodiscard]] ReplayResult closed_loop_replay_run(const LienardSystem& sys, const LimitCycle& lc,
                                                  const OptimalPlan& plan, const ForceProfile& force,
                                                  double track_tolerance = 1e-6,
                                                  const IntegratorConfig& cfg = IntegratorConfig::verification());
[[nodiscard]] VerificationReport closed_loop_replay(const LienardSystem& sys, const LimitCycle& lc,
                                                   const OptimalPlan& plan, const ForceProfile& force);

enum class Objective { non_conservative, total };

/// p1 = 2 mu h(x1) x2 along the path, its central-difference derivative
/// (step 1e-5) against mu h'(x1) x2^2 (relative 1e-6), and the endpoint
/// transversality product for the given objective (1e-8).
[[nodiscard]] VerificationReport adjoint_residuals(const LienardSystem& sys, const OptimalPlan& plan,
                                                   Objective objective = Objective::non_conservative);

/// Adds `count` seeded cubic-spline bumps (zero at both ends, amplitude
/// log-uniform in [1e-4, 1e-2]) to x1(t) and checks that no perturbation
/// lowers W_nc by more than 1e-10. Both works use Simpson with 20000 panels.
[[nodiscard]] VerificationReport perturbation_optimality(const LienardSystem& sys, const OptimalPlan& plan,
                                                         int count = 50, std::uint64_t seed = 20240601);

/// Suite run by `liensync verify`: g-function, EL path against the shooting
/// oracle, work quadrature, endpoint selection, closed-loop replays,
/// adjoint residuals and perturbations on representative instances.
[[nodiscard]] VerificationReport full_report(const LienardSystem& sys);

}  // namespace liensync
