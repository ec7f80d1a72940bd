#pragma once

#include "liensync/core.hpp"
#include "liensync/errors.hpp"
#include "liensync/trajectory.hpp"

#include <limits>

namespace liensync {

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk45_adaptive;
    double dt = 1e-3;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    long max_steps = 10'000'000;
    /// Upper bound on the step (and hence on the output spacing).
    double max_step = std::numeric_limits<double>::infinity();

    /// Throws DomainError when the settings violate the method's requirements:
    /// rk4_fixed needs dt > 0, rk45_adaptive needs tolerances in (0, 1e-2].
    void validate() const;

    /// rel = abs = 1e-10.
    [[nodiscard]] static IntegratorConfig verification();
    /// rel = abs = 1e-8.
    [[nodiscard]] static IntegratorConfig sweep();
    [[nodiscard]] static IntegratorConfig fixed(double dt);
};

/// Integration ran out of steps; the samples produced so far are attached.
class IntegrationFailure : public NumericalError {
public:
    IntegrationFailure(const std::string& what, Trajectory partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

enum class CrossingDirection {
    descending,  // x2 goes from positive to non-positive
    ascending,   // x2 goes from negative to non-negative
};

/// Crossing of the section x2 = 0 in a given direction, optionally restricted
/// to the half-plane sign(x1) = x1_sign (0 accepts either side).
struct EventSpec {
    CrossingDirection direction = CrossingDirection::descending;
    int x1_sign = +1;
};

struct EventResult {
    Trajectory trajectory;  // ends with the crossing sample
    PhasePoint crossing;
    double t_cross = 0.0;
};

/// Integrates the driven system over [0, t_f]. Impulses are applied exactly
/// at their timestamps by splitting the interval; the pre- and post-jump
/// states are both recorded. One sample per accepted step. The integrator
/// carries the non-conservative work as a third state component, exposed as
/// Trajectory::cumulative_wnc. Throws IntegrationFailure on step exhaustion.
[[nodiscard]] Trajectory integrate_driven(const LienardSystem& sys, PhasePoint start,
                                          const ForceProfile& force, double t_f,
                                          const IntegratorConfig& cfg);

/// Integrates the undriven system until the first crossing matching `event`
/// (a start lying on the section does not count as a crossing). The crossing
/// is bracketed on the dense output by bisection and polished with Newton
/// steps on an exact one-step integration, so that |x2| < 1e-12.
/// Throws EventNotFound when no crossing occurs before t_max.
[[nodiscard]] EventResult integrate_until_event(const LienardSystem& sys, PhasePoint start,
                                                const EventSpec& event, const IntegratorConfig& cfg,
                                                double t_max);

/// Two-timescale asymptotic solution of the undriven van der Pol oscillator:
///   x1 ~  A(t) cos(t + phi0),  x2 ~ -A(t) sin(t + phi0),
///   A(t) = 2 [1 - (r0^2 - 4)/r0^2 e^{-mu t}]^{-1/2},
/// with phi0 = atan2(-x20, x10) so that the start point is reproduced in
/// every quadrant. Only meaningful for mu << 1 (see small_mu_regime).
/// Throws DomainError for non-van-der-Pol systems or a start at the origin.
[[nodiscard]] PhasePoint small_mu_envelope(const LienardSystem& sys, PhasePoint start, double t);

/// A(t) of small_mu_envelope.
[[nodiscard]] double envelope_amplitude(const LienardSystem& sys, PhasePoint start, double t);

/// False when mu > 0.2, where the asymptotic envelope should not be trusted.
[[nodiscard]] inline bool small_mu_regime(const LienardSystem& sys) noexcept { return sys.mu() <= 0.2; }

}  // namespace liensync
