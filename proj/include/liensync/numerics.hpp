#pragma once

#include <functional>
#include <utility>

namespace liensync::numerics {

using ScalarFn = std::function<double(double)>;

/// Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign (or one be zero).
/// Terminates when the bracket width is below x_tol. Throws NumericalError
/// when the bracket is invalid or the iteration budget is exhausted.
double find_root(const ScalarFn& f, double lo, double hi, double x_tol = 1e-14,
                 int max_iter = 200);

/// Same as find_root with f(lo), f(hi) already known (saves two evaluations).
double find_root(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi,
                 double x_tol, int max_iter = 200);

/// Bounded scalar minimisation (Brent). Returns (argmin, min).
std::pair<double, double> minimize(const ScalarFn& f, double lo, double hi, int bits = 40);

/// Adaptive Simpson with Richardson correction; recursion stops when the
/// local error estimate drops under the apportioned absolute tolerance.
double adaptive_simpson(const ScalarFn& f, double a, double b, double abs_tol = 1e-12,
                        int max_depth = 50);

/// Composite Simpson on n (rounded up to even) uniform panels.
double composite_simpson(const ScalarFn& f, double a, double b, int n);

/// Integral over [t0, t2] of the quadratic through three (possibly unevenly
/// spaced) samples.
double simpson_uneven(double t0, double t1, double t2, double f0, double f1, double f2) noexcept;

/// Integral over [t1, t2] of the quadratic through (t0,f0), (t1,f1), (t2,f2).
double quadratic_tail(double t0, double t1, double t2, double f0, double f1, double f2) noexcept;

}  // namespace liensync::numerics
