#include "liensync/numerics.hpp"

#include "liensync/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace liensync::numerics {

double find_root(const ScalarFn& f, double lo, double hi, double x_tol, int max_iter) {
    return find_root(f, lo, hi, f(lo), f(hi), x_tol, max_iter);
}

double find_root(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi,
                 double x_tol, int max_iter) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (!(std::isfinite(f_lo) && std::isfinite(f_hi)) || (f_lo > 0.0) == (f_hi > 0.0)) {
        throw NumericalError("find_root: interval does not bracket a root");
    }
    auto tol = [x_tol](double a, double b) { return std::fabs(b - a) <= x_tol; };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
    if (iters >= static_cast<std::uintmax_t>(max_iter) && std::fabs(b - a) > x_tol) {
        throw NumericalError("find_root: iteration budget exhausted");
    }
    return 0.5 * (a + b);
}

std::pair<double, double> minimize(const ScalarFn& f, double lo, double hi, int bits) {
    return boost::math::tools::brent_find_minima(f, lo, hi, bits);
}

namespace {

double simpson_step(const ScalarFn& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    // Seed with four panels so that symmetric integrands cannot fool the
    // first error estimate.
    const int pieces = 4;
    const double width = (b - a) / pieces;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == pieces) ? b : a + (i + 1) * width;
        const double m = 0.5 * (lo + hi);
        const double flo = f(lo), fhi = f(hi), fm = f(m);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += simpson_step(f, lo, flo, hi, fhi, m, fm, whole, abs_tol / pieces, max_depth);
    }
    return total;
}

double composite_simpson(const ScalarFn& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < n; ++i) {
        const double v = f(a + i * h);
        (i % 2 ? odd : even) += v;
    }
    return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

double simpson_uneven(double t0, double t1, double t2, double f0, double f1, double f2) noexcept {
    const double h0 = t1 - t0;
    const double h1 = t2 - t1;
    const double s = h0 + h1;
    return s / 6.0 * ((2.0 - h1 / h0) * f0 + s * s / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
}

double quadratic_tail(double t0, double t1, double t2, double f0, double f1, double f2) noexcept {
    const double h0 = t1 - t0;
    const double h1 = t2 - t1;
    const double s = h0 + h1;
    return h1 * (f2 * (2.0 * h1 + 3.0 * h0) / (6.0 * s) + f1 * (h1 + 3.0 * h0) / (6.0 * h0) -
                 f0 * h1 * h1 / (6.0 * h0 * s));
}

}  // namespace liensync::numerics
