#pragma once

// =============================================================================
// Explicit one-step ODE engine
// =============================================================================
// Dormand-Prince 5(4) with its 4th-order continuous extension, and classical
// fixed-step RK4 with cubic Hermite dense output. Both expose every accepted
// step to an observer as a DenseStep, which is what event location and
// output sampling are built on.
// =============================================================================

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace liensync::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// One accepted step with its continuous extension, stored in Hairer's
/// form y(theta) = r1 + theta (r2 + (1-theta) (r3 + theta (r4 + (1-theta) r5))).
/// With r5 = 0 this is the cubic Hermite interpolant of (y0, f0, y1, f1).
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State<N> y0{}, y1{}, f0{}, f1{};
    std::array<State<N>, 5> r{};

    [[nodiscard]] double t1() const noexcept { return t0 + h; }

    [[nodiscard]] State<N> at(double t) const noexcept {
        const double th = h == 0.0 ? 0.0 : (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        return out;
    }
};

struct Settings {
    bool adaptive = true;
    double dt = 1e-3;         // fixed step (RK4)
    double rel_tol = 1e-10;   // adaptive
    double abs_tol = 1e-10;   // adaptive
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 10'000'000;
};

enum class Status { completed, stopped, step_limit, step_underflow };

namespace detail {

template <std::size_t N>
void fill_hermite(DenseStep<N>& s) {
    for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = s.y1[i] - s.y0[i];
        const double bspl = s.h * s.f0[i] - ydiff;
        s.r[0][i] = s.y0[i];
        s.r[1][i] = ydiff;
        s.r[2][i] = bspl;
        s.r[3][i] = ydiff - s.h * s.f1[i] - bspl;
        s.r[4][i] = 0.0;
    }
}

// Dormand-Prince tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace detail

/// Single Dormand-Prince step from (t, y) with f = rhs(t, y) known. Fills the
/// dense record (including f1 = rhs(t+h, y1)) and the embedded error vector.
template <std::size_t N, class Rhs>
void dopri_step(Rhs& rhs, double t, const State<N>& y, const State<N>& f, double h,
                DenseStep<N>& out, State<N>& err) {
    using namespace detail;
    State<N> k2, k3, k4, k5, k6, k7, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * f[i];
    k2 = rhs(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * f[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * f[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * f[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * f[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, tmp);
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + h * (a71 * f[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(t + h, y1);
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * f[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    out.t0 = t;
    out.h = h;
    out.y0 = y;
    out.y1 = y1;
    out.f0 = f;
    out.f1 = k7;
    for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * f[i] - ydiff;
        out.r[0][i] = y[i];
        out.r[1][i] = ydiff;
        out.r[2][i] = bspl;
        out.r[3][i] = ydiff - h * k7[i] - bspl;
        out.r[4][i] = h * (d1 * f[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
}

/// Single classical RK4 step with Hermite dense output.
template <std::size_t N, class Rhs>
void rk4_step(Rhs& rhs, double t, const State<N>& y, const State<N>& f, double h, DenseStep<N>& out) {
    State<N> k2, k3, k4, tmp, y1;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * f[i];
    k2 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = rhs(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.t0 = t;
    out.h = h;
    out.y0 = y;
    out.y1 = y1;
    out.f0 = f;
    out.f1 = rhs(t + h, y1);
    detail::fill_hermite(out);
}

/// Integrates y' = rhs(t, y) from t0 to t_end (t_end > t0), calling
/// `observer(const DenseStep<N>&) -> bool` after every accepted step; a false
/// return stops the run with Status::stopped.
template <std::size_t N, class Rhs, class Observer>
Status integrate(Rhs&& rhs, double t0, const State<N>& y0, double t_end, const Settings& s,
                 Observer&& observer, long* steps_taken = nullptr) {
    double t = t0;
    State<N> y = y0;
    State<N> f = rhs(t, y);
    long steps = 0;
    const double span = t_end - t0;
    auto done = [&] {
        if (steps_taken) *steps_taken = steps;
    };
    if (!(span > 0.0)) {
        done();
        return Status::completed;
    }
    DenseStep<N> step;

    if (!s.adaptive) {
        const double dt = std::min(s.dt, s.max_step);
        while (t < t_end) {
            if (steps >= s.max_steps) {
                done();
                return Status::step_limit;
            }
            double h = dt;
            bool last = false;
            if (t + h >= t_end - 1e-12 * std::max(1.0, std::fabs(t_end))) {
                h = t_end - t;
                last = true;
            }
            rk4_step<N>(rhs, t, y, f, h, step);
            ++steps;
            t = last ? t_end : t + h;
            step.h = t - step.t0;
            y = step.y1;
            f = step.f1;
            if (!observer(static_cast<const DenseStep<N>&>(step))) {
                done();
                return Status::stopped;
            }
        }
        done();
        return Status::completed;
    }

    // Initial step guess (Hairer & Wanner, II.4).
    auto norm = [&](const State<N>& v, const State<N>& scale_ref) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = s.abs_tol + s.rel_tol * std::fabs(scale_ref[i]);
            acc += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(acc / N);
    };
    double h;
    {
        const double d0 = norm(y, y);
        const double d1 = norm(f, y);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min({h, s.max_step, span});
    }

    State<N> err;
    while (t < t_end) {
        if (steps >= s.max_steps) {
            done();
            return Status::step_limit;
        }
        bool last = false;
        if (t + h >= t_end - 1e-12 * std::max(1.0, std::fabs(t_end))) {
            h = t_end - t;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, std::fabs(t))) {
            done();
            return Status::step_underflow;
        }
        dopri_step<N>(rhs, t, y, f, h, step, err);
        double en = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = s.abs_tol + s.rel_tol * std::max(std::fabs(y[i]), std::fabs(step.y1[i]));
            en += (err[i] / sc) * (err[i] / sc);
        }
        en = std::sqrt(en / N);
        ++steps;
        if (!std::isfinite(en)) {
            h *= 0.2;
            continue;
        }
        double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        if (en <= 1.0) {
            t = last ? t_end : t + h;
            step.h = t - step.t0;
            y = step.y1;
            f = step.f1;
            if (!observer(static_cast<const DenseStep<N>&>(step))) {
                done();
                return Status::stopped;
            }
            h = std::min(h * fac, s.max_step);
        } else {
            h *= std::min(fac, 1.0);
        }
    }
    done();
    return Status::completed;
}

}  // namespace liensync::ode
