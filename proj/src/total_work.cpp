#include "liensync/total_work.hpp"

#include "liensync/errors.hpp"
#include "liensync/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liensync {

namespace {

constexpr double kDelta = 1e-6;
constexpr int kRootNodes = 400;

void require_positive_sf(double s_f) {
    if (!(s_f > 0.0) || !std::isfinite(s_f)) throw DomainError("s_f must be positive");
}

/// Right half-plane view of a problem: x10 >= 0 and branches mirrored.
struct Mirror {
    double sign;
    [[nodiscard]] Branch branch(Branch b) const { return sign < 0.0 ? opposite(b) : b; }
};

double velocity_right(const LimitCycle& lc, double x, Branch branch) {
    if (x >= lc.x_max()) return 0.0;
    return lc.branch_velocity(x, branch);
}

/// Stationarity residual in the right half-plane.
double residual(const GFunction& gf, const LimitCycle& lc, double g10, double x, Branch branch, double s_f) {
    const double hv = gf.system().h()(x);
    return lc.mu() * velocity_right(lc, x, branch) - 2.0 * (gf(x) - g10) / (s_f * std::sqrt(hv));
}

}  // namespace

const char* to_string(TotalCase c) noexcept {
    switch (c) {
        case TotalCase::MT1: return "MT1";
        case TotalCase::MT2: return "MT2";
        case TotalCase::MT3: return "MT3";
    }
    return "?";
}

WorkBreakdown total_work_at(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double x1f,
                            Branch branch, double s_f) {
    require_positive_sf(s_f);
    if (std::fabs(x1f) > lc.x_max()) throw DomainError("total_work_at: |x1f| exceeds the cycle amplitude");
    const auto& sys = gf.system();
    const double w_nc = wnc_fixed_endpoint(gf, start.x1, x1f, s_f);
    double x2f = 0.0;
    if (std::fabs(x1f) < lc.x_max()) {
        x2f = x1f < 0.0 ? -lc.branch_velocity(-x1f, opposite(branch)) : lc.branch_velocity(x1f, branch);
    }
    const double dE = energy(sys, {x1f, x2f}) - energy(sys, start);
    return {dE, w_nc, dE + w_nc};
}

std::vector<double> mt2_roots(const GFunction& gf, const LimitCycle& lc, double x10, double s_f, Branch branch) {
    require_positive_sf(s_f);
    const double b = gf.b();
    if (!std::isfinite(x10) || std::fabs(x10) < b) throw NoSolutionError("mt2_roots: |x10| < b");
    const Mirror m{x10 < 0.0 ? -1.0 : 1.0};
    const double xr = std::fabs(x10);
    const Branch br = m.branch(branch);
    const double x_max = lc.x_max();

    // Admissible interval: lower branch needs g(x) < g(x10), upper g(x) > g(x10).
    double lo = b + kDelta, hi = x_max - kDelta;
    if (br == Branch::lower) {
        hi = std::min(hi, xr);
    } else {
        lo = std::max(lo, xr);
    }
    std::vector<double> roots;
    if (!(hi > lo)) return roots;

    const double g10 = gf(xr);
    auto R = [&](double x) { return residual(gf, lc, g10, x, br, s_f); };

    const double s_lo = std::sqrt(lo - b), s_hi = std::sqrt(hi - b);
    std::vector<double> xs(kRootNodes), rs(kRootNodes);
    for (int i = 0; i < kRootNodes; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / (kRootNodes - 1);
        xs[i] = i + 1 == kRootNodes ? hi : b + s * s;
        rs[i] = R(xs[i]);
    }
    auto refine = [&](double a, double c, double fa, double fc) {
        const double tol = std::max(1e-15, std::min(1e-10, 1e-6 * (a - b)));
        roots.push_back(numerics::find_root(R, a, c, fa, fc, tol));
    };

    // Below the margin near b: on the lower branch R -> +inf as x -> b, so a
    // negative residual at the first node means a root closer to b.
    if (br == Branch::lower && lo == b + kDelta && rs[0] < 0.0) {
        double x_in = xs[0], r_in = rs[0];
        double gap = kDelta;
        for (int k = 0; k < 40; ++k) {
            gap *= 0.1;
            const double x = b + gap;
            if (!(x > b)) break;
            const double r = R(x);
            if (r >= 0.0) {
                refine(x, x_in, r, r_in);
                break;
            }
            x_in = x;
            r_in = r;
        }
    }
    for (int i = 0; i + 1 < kRootNodes; ++i) {
        if (rs[i] == 0.0) {
            roots.push_back(xs[i]);
        } else if ((rs[i] > 0.0) != (rs[i + 1] > 0.0) && rs[i + 1] != 0.0) {
            refine(xs[i], xs[i + 1], rs[i], rs[i + 1]);
        }
    }
    if (rs.back() == 0.0) roots.push_back(xs.back());
    std::sort(roots.begin(), roots.end());
    for (auto& r : roots) r *= m.sign;
    if (m.sign < 0.0) std::reverse(roots.begin(), roots.end());
    return roots;
}

std::optional<Candidate> best_interior(const GFunction& gf, const LimitCycle& lc, PhasePoint start, double s_f) {
    std::optional<Candidate> best;
    for (Branch br : {Branch::upper, Branch::lower}) {
        for (double x : mt2_roots(gf, lc, start.x1, s_f, br)) {
            const auto w = total_work_at(gf, lc, start, x, br, s_f);
            if (!best || w.total < best->work.total) best = Candidate{x, br, TotalCase::MT2, w};
        }
    }
    return best;
}

TotalWorkLandscape optimal_endpoint_total(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                          double s_f, int nodes) {
    require_positive_sf(s_f);
    const double b = gf.b();
    if (!is_finite(start) || std::fabs(start.x1) < b) {
        throw NoSolutionError("optimal_endpoint_total: |x10| < b lies in the active region");
    }
    if (nodes < 2) throw ContractViolation("optimal_endpoint_total: need at least two nodes");
    const double sign = start.x1 < 0.0 ? -1.0 : 1.0;
    const double x_max = lc.x_max();

    TotalWorkLandscape land;
    land.s_f = s_f;
    for (Branch br : {Branch::upper, Branch::lower}) {
        for (int i = 0; i < nodes; ++i) {
            const double x = b + kDelta + (x_max - b - 2.0 * kDelta) * i / (nodes - 1);
            const double xf = sign * x;
            land.samples.push_back({xf, br, total_work_at(gf, lc, start, xf, br, s_f)});
        }
    }

    std::vector<Candidate> cands;
    const double x_ext = sign * x_max;
    const auto w_ext = total_work_at(gf, lc, start, x_ext, Branch::upper, s_f);
    land.boundary_value = w_ext.total;
    cands.push_back({x_ext, std::nullopt, TotalCase::MT1, w_ext});

    for (Branch br : {Branch::upper, Branch::lower}) {
        for (double x : mt2_roots(gf, lc, start.x1, s_f, br)) {
            Candidate c{x, br, TotalCase::MT2, total_work_at(gf, lc, start, x, br, s_f)};
            land.interior_roots.push_back(c);
            cands.push_back(c);
        }
    }
    if (std::fabs(start.x1) == b) {
        // Constant path at b: no non-conservative work, endpoint on the
        // cheaper branch.
        for (Branch br : {Branch::upper, Branch::lower}) {
            cands.push_back({start.x1, br, TotalCase::MT3, total_work_at(gf, lc, start, start.x1, br, s_f)});
        }
    }
    land.global_opt = *std::min_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& c) {
        return a.work.total < c.work.total;
    });
    return land;
}

std::optional<double> critical_time(const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                    std::pair<double, double> s_range) {
    const auto [lo, hi] = s_range;
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("critical_time: need 0 < lo < hi");
    if (!(std::fabs(start.x1) > lc.x_max())) {
        throw DomainError("critical_time: start must lie outside the limit cycle");
    }
    auto f = [&](double s) {
        const auto inner = best_interior(gf, lc, start, s);
        if (!inner) return -std::numeric_limits<double>::infinity();
        return total_work_at(gf, lc, start, std::copysign(lc.x_max(), start.x1), Branch::upper, s).total -
               inner->work.total;
    };
    constexpr int kScan = 64;
    const double l0 = std::log(lo), l1 = std::log(hi);
    double s_prev = lo, f_prev = f(lo);
    for (int i = 1; i < kScan; ++i) {
        const double s = i + 1 == kScan ? hi : std::exp(l0 + (l1 - l0) * i / (kScan - 1));
        const double fs = f(s);
        if (f_prev <= 0.0 && fs > 0.0) {
            double a = s_prev, c = s;
            while ((c - a) > 1e-10 * c) {
                const double mid = std::sqrt(a * c);
                (f(mid) > 0.0 ? c : a) = mid;
            }
            return 0.5 * (a + c);
        }
        s_prev = s;
        f_prev = fs;
    }
    return std::nullopt;
}

}  // namespace liensync
