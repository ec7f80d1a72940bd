#include "liensync/cli.hpp"

#include "liensync/errors.hpp"
#include "liensync/io.hpp"
#include "liensync/limit_cycle.hpp"
#include "liensync/nc_optimal.hpp"
#include "liensync/total_work.hpp"
#include "liensync/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace liensync::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad command-line or config content that should exit with the usage code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* method_name(IntegratorMethod m) { return m == IntegratorMethod::rk4_fixed ? "rk4" : "rk45"; }

IntegratorMethod method_from(const std::string& s) {
    if (s == "rk4") return IntegratorMethod::rk4_fixed;
    if (s == "rk45") return IntegratorMethod::rk45_adaptive;
    throw UsageError("unknown integrator method: " + s);
}

template <class T>
void opt_to_json(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
void opt_from_json(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

template <class T>
void from_json_if(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

std::vector<double> parse_coefficients(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw UsageError("malformed coefficient list: " + s);
        }
        if (pos != item.size()) throw UsageError("malformed coefficient list: " + s);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty coefficient list");
    return out;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write " + path.string());
    return f;
}

json plan_json(const OptimalPlan& p) {
    json imp = json::array();
    if (p.impulse_start != 0.0) imp.push_back({{"t", 0.0}, {"delta_v", p.impulse_start}});
    if (p.impulse_end != 0.0) imp.push_back({{"t", p.t_f}, {"delta_v", p.impulse_end}});
    return {{"x10", p.x10},
            {"x20", p.x20},
            {"x1f", p.x1f},
            {"x2f", p.x2f},
            {"t_f", p.t_f},
            {"s_f", p.s_f},
            {"C0", p.C0},
            {"C1", p.C1},
            {"case", to_string(p.endpoint_case)},
            {"branch", p.branch ? to_string(*p.branch) : "extreme"},
            {"impulse_start", p.impulse_start},
            {"impulse_end", p.impulse_end},
            {"impulses", imp},
            {"wnc_min", p.w_nc_min}};
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are written
/// by index so the output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// -----------------------------------------------------------------------------
// Commands

struct Context {
    const RunConfig& cfg;
    std::ostream& out;
    fs::path dir;
};

double require_x10(const RunConfig& cfg) {
    if (!cfg.x10) throw UsageError(cfg.command + " requires --x10");
    return *cfg.x10;
}

double require_sf(const RunConfig& cfg, double mu) {
    const auto sf = cfg.scaled_time(mu);
    if (!sf) throw UsageError(cfg.command + " requires --sf or --tf");
    return *sf;
}

json cmd_validate(const Context& cx, const LienardSystem& sys, int& code) {
    const auto rep = validate_system(sys);
    json conds = json::array();
    for (const auto& c : rep.conditions) {
        conds.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    if (!rep.passed()) code = kExitDomain;
    (void)cx;
    return {{"passed", rep.passed()}, {"b", rep.b}, {"a", rep.a}, {"conditions", conds}};
}

json cmd_limit_cycle(const Context& cx, const LienardSystem& sys) {
    const auto lc = find_limit_cycle(sys);
    auto f = open_out(cx.dir / "cycle.csv");
    io::CsvWriter w(f, {"x1", "x2"});
    for (const auto& p : lc.samples()) w.row({p.x1, p.x2});
    return {{"mu", sys.mu()}, {"x_max", lc.x_max()}, {"period", lc.period()}, {"samples", lc.samples().size()}};
}

json cmd_simulate(const Context& cx, const LienardSystem& sys) {
    const auto& cfg = cx.cfg;
    const PhasePoint start{require_x10(cfg), cfg.x20};
    if (!cfg.tf) throw UsageError("simulate requires --tf (the horizon)");
    const double t_end = *cfg.tf;
    if (!(t_end > 0.0)) throw DomainError("simulate: --tf must be positive");

    IntegratorConfig ic = cfg.integrator;
    ic.max_step = std::min(ic.max_step, t_end / 4000.0);
    const auto force = cfg.force == 0.0 ? ForceProfile::zero() : ForceProfile::constant(cfg.force);
    const auto traj = integrate_driven(sys, start, force, t_end, ic);
    {
        auto f = open_out(cx.dir / "trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    const auto wb = work_breakdown(sys, traj);
    json summary = {{"final", {traj.back().x1, traj.back().x2}},
                    {"t_f", t_end},
                    {"delta_E", wb.delta_E},
                    {"w_nc", wb.w_nc},
                    {"W", wb.total}};
    const auto lc = find_limit_cycle(sys);
    summary["distance_to_cycle"] = lc.distance(traj.back());
    summary["x_max"] = lc.x_max();

    if (cfg.envelope) {
        auto f = open_out(cx.dir / "envelope.csv");
        io::CsvWriter w(f, {"t", "x1", "x2", "A"});
        for (double t : traj.times) {
            const auto p = small_mu_envelope(sys, start, t);
            w.row({t, p.x1, p.x2, envelope_amplitude(sys, start, t)});
        }
        summary["small_mu_regime"] = small_mu_regime(sys);
    }
    if (cfg.driven_tf) {
        const GFunction gf(sys);
        const double s_f = *cfg.driven_tf / sys.mu();
        const auto plan = plan_nc(gf, lc, start, s_f);
        const auto drive = synthesize_force(sys, plan);
        auto driven = integrate_driven(sys, start, drive, plan.t_f, ic);
        if (t_end > plan.t_f) {
            auto tail = integrate_driven(sys, driven.back(), ForceProfile::zero(), t_end - plan.t_f, ic);
            for (auto& t : tail.times) t += plan.t_f;
            driven.force.reset();
            driven = concatenate(driven, tail);
        }
        auto f = open_out(cx.dir / "driven.csv");
        write_trajectory_csv(f, driven);
        summary["driven"] = plan_json(plan);
        summary["driven"]["distance_at_tf"] = lc.distance({plan.x1f, plan.x2f});
    }
    return summary;
}

std::vector<PhasePoint> parse_starts(const std::string& spec) {
    std::vector<PhasePoint> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("--starts expects x10:x20 pairs, got " + item);
        const auto pair = parse_coefficients(item.substr(0, colon) + "," + item.substr(colon + 1));
        if (pair.size() != 2) throw UsageError("--starts expects x10:x20 pairs, got " + item);
        out.push_back({pair[0], pair[1]});
    }
    if (out.empty()) throw UsageError("empty --starts list");
    return out;
}

std::vector<OptimalPlan> plans_for(const RunConfig& cfg, const GFunction& gf, const LimitCycle& lc, PhasePoint start,
                                   double s_f) {
    auto pick = [&](std::vector<OptimalPlan> all) {
        if (cfg.branch == "both") return all;
        if (cfg.branch == "auto") {
            auto best = std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
                return std::fabs(a.impulse_end) < std::fabs(b.impulse_end);
            });
            return std::vector<OptimalPlan>{*best};
        }
        const Branch want = cfg.branch == "upper" ? Branch::upper : Branch::lower;
        std::vector<OptimalPlan> sel;
        for (auto& p : all) {
            if (!p.branch || *p.branch == want) sel.push_back(p);
        }
        return sel.empty() ? all : sel;
    };
    if (cfg.x1f) {
        auto plans = pick({plan_to_endpoint(gf, lc, start, *cfg.x1f, Branch::upper, s_f),
                           plan_to_endpoint(gf, lc, start, *cfg.x1f, Branch::lower, s_f)});
        if (plans.size() == 2 && !plans[0].branch) plans.pop_back();
        return plans;
    }
    return pick(plan_nc_all(gf, lc, start, s_f));
}

json cmd_plan_nc(const Context& cx, const LienardSystem& sys) {
    const auto& cfg = cx.cfg;
    const auto starts = cfg.starts.empty() ? std::vector<PhasePoint>{{require_x10(cfg), cfg.x20}}
                                           : parse_starts(cfg.starts);
    const double s_f = require_sf(cfg, sys.mu());
    const auto lc = find_limit_cycle(sys);
    const GFunction gf(sys);

    json arr = json::array();
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto plans = plans_for(cfg, gf, lc, starts[i], s_f);
        for (const auto& p : plans) {
            std::string name = starts.size() == 1 ? "trajectory" : "trajectory_" + std::to_string(i);
            if (plans.size() > 1) name += std::string("_") + to_string(*p.branch);
            name += ".csv";
            auto f = open_out(cx.dir / name);
            write_trajectory_csv(f, sample_plan(sys, p));
            auto pj = plan_json(p);
            pj["csv"] = name;
            arr.push_back(pj);
        }
    }
    json summary = arr.front();
    summary["x_max"] = lc.x_max();
    if (arr.size() > 1) summary["plans"] = arr;
    return summary;
}

json cmd_plan_total(const Context& cx, const LienardSystem& sys) {
    const auto& cfg = cx.cfg;
    const PhasePoint start{require_x10(cfg), cfg.x20};
    const double s_f = require_sf(cfg, sys.mu());
    const auto lc = find_limit_cycle(sys);
    const GFunction gf(sys);
    const auto land = optimal_endpoint_total(gf, lc, start, s_f);
    {
        auto f = open_out(cx.dir / "landscape.csv");
        io::CsvWriter w(f, {"x1f", "branch", "W", "dE", "Wnc"});
        for (const auto& s : land.samples) {
            w.row({s.x1f, std::string(to_string(s.branch)), s.work.total, s.work.delta_E, s.work.w_nc});
        }
    }
    json roots = json::array();
    for (const auto& c : land.interior_roots) {
        roots.push_back({{"x1f", c.x1f}, {"branch", to_string(*c.branch)}, {"W", c.work.total}});
    }
    const auto& g = land.global_opt;
    return {{"s_f", s_f},
            {"x1f_opt", g.x1f},
            {"branch", g.branch ? to_string(*g.branch) : "extreme"},
            {"case", to_string(g.total_case)},
            {"W_min", g.work.total},
            {"dE", g.work.delta_E},
            {"Wnc", g.work.w_nc},
            {"boundary_value", land.boundary_value},
            {"interior_roots", roots},
            {"x_max", lc.x_max()}};
}

json cmd_sweep(const Context& cx, const LienardSystem& sys) {
    const auto& cfg = cx.cfg;
    if (cfg.sf_grid.empty()) throw UsageError("sweep requires --sf-grid lo:hi:n");
    const auto sfs = parse_grid(cfg.sf_grid, cfg.log_grid);
    const GFunction gf(sys);

    if (cfg.objective == "nc") {
        if (cfg.x10_grid.empty() && !cfg.x10) throw UsageError("sweep --objective nc requires --x10-grid or --x10");
        const auto x10s = cfg.x10_grid.empty() ? std::vector<double>{*cfg.x10} : parse_grid(cfg.x10_grid, false);
        double x_max;
        if (cfg.xmax_override) {
            x_max = *cfg.xmax_override;
        } else {
            x_max = find_limit_cycle(sys).x_max();
        }
        struct Row {
            double x10, sf, w, x1f;
            EndpointCase c;
        };
        std::vector<Row> rows(x10s.size() * sfs.size());
        parallel_for(rows.size(), cfg.jobs, [&](std::size_t k) {
            const double x10 = x10s[k / sfs.size()];
            const double sf = sfs[k % sfs.size()];
            const auto ch = choose_endpoint_nc(gf, x_max, x10);
            rows[k] = {x10, sf, wnc_min(gf, x_max, x10, sf), ch.x1f, ch.endpoint_case};
        });
        auto f = open_out(cx.dir / "sweep.csv");
        io::CsvWriter w(f, {"x10", "sf", "wnc_min", "x1f_opt", "case"});
        for (const auto& r : rows) w.row({r.x10, r.sf, r.w, r.x1f, std::string(to_string(r.c))});
        return {{"objective", "nc"}, {"rows", rows.size()}, {"x_max", x_max}};
    }
    if (cfg.objective != "total") throw UsageError("--objective must be nc or total");

    const PhasePoint start{require_x10(cfg), cfg.x20};
    const auto lc = find_limit_cycle(sys);
    std::vector<Candidate> opt(sfs.size());
    parallel_for(sfs.size(), cfg.jobs, [&](std::size_t k) {
        opt[k] = optimal_endpoint_total(gf, lc, start, sfs[k]).global_opt;
    });
    {
        auto f = open_out(cx.dir / "sweep.csv");
        io::CsvWriter w(f, {"sf", "x1f_opt", "W_min", "case"});
        for (std::size_t k = 0; k < sfs.size(); ++k) {
            w.row({sfs[k], opt[k].x1f, opt[k].work.total, std::string(to_string(opt[k].total_case))});
        }
    }
    json summary = {{"objective", "total"}, {"rows", sfs.size()}, {"x_max", lc.x_max()}};
    if (!cfg.landscape_sf.empty()) {
        const auto cuts = parse_coefficients(cfg.landscape_sf);
        std::vector<TotalWorkLandscape> lands(cuts.size());
        parallel_for(cuts.size(), cfg.jobs, [&](std::size_t k) {
            if (!(cuts[k] > 0.0)) throw DomainError("--landscape-sf values must be positive");
            lands[k] = optimal_endpoint_total(gf, lc, start, cuts[k]);
        });
        auto f = open_out(cx.dir / "landscapes.csv");
        io::CsvWriter w(f, {"sf", "x1f", "branch", "W", "dE", "Wnc"});
        json opts = json::array();
        for (const auto& land : lands) {
            for (const auto& s : land.samples) {
                w.row({land.s_f, s.x1f, std::string(to_string(s.branch)), s.work.total, s.work.delta_E, s.work.w_nc});
            }
            opts.push_back({{"s_f", land.s_f}, {"x1f_opt", land.global_opt.x1f}, {"W_min", land.global_opt.work.total}});
        }
        summary["landscapes"] = opts;
    }
    if (cfg.find_critical) {
        const double lo = *std::min_element(sfs.begin(), sfs.end());
        const double hi = *std::max_element(sfs.begin(), sfs.end());
        const auto s_star = lo < hi ? critical_time(gf, lc, start, {lo, hi}) : std::nullopt;
        summary["sf_critical"] = s_star ? json(*s_star) : json(nullptr);
    }
    return summary;
}

json cmd_verify(const Context& cx, const LienardSystem& sys, int& code) {
    const auto rep = full_report(sys);
    if (!rep.passed()) code = kExitNumerical;
    auto j = rep.to_json();
    write_json_file(cx.dir / "verify.json", j);
    cx.out << j.dump(2) << '\n';
    return {{"passed", rep.passed()}, {"checks", rep.checks.size()}};
}

}  // namespace

// -----------------------------------------------------------------------------

std::optional<double> RunConfig::scaled_time(double mu) const {
    if (sf && tf) throw UsageError("give exactly one of --sf and --tf");
    if (sf) return *sf;
    if (tf) return *tf / mu;
    return std::nullopt;
}

json to_json(const RunConfig& c) {
    json j = {{"command", c.command},
              {"system", c.system},
              {"x20", c.x20},
              {"branch", c.branch},
              {"starts", c.starts},
              {"landscape_sf", c.landscape_sf},
              {"force", c.force},
              {"envelope", c.envelope},
              {"objective", c.objective},
              {"sf_grid", c.sf_grid},
              {"x10_grid", c.x10_grid},
              {"log", c.log_grid},
              {"find_critical", c.find_critical},
              {"out_dir", c.out_dir},
              {"jobs", c.jobs},
              {"integrator",
               {{"method", method_name(c.integrator.method)},
                {"dt", c.integrator.dt},
                {"rel_tol", c.integrator.rel_tol},
                {"abs_tol", c.integrator.abs_tol},
                {"max_steps", c.integrator.max_steps}}}};
    opt_to_json(j, "x10", c.x10);
    opt_to_json(j, "sf", c.sf);
    opt_to_json(j, "tf", c.tf);
    opt_to_json(j, "x1f", c.x1f);
    opt_to_json(j, "driven_tf", c.driven_tf);
    opt_to_json(j, "xmax_override", c.xmax_override);
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    RunConfig c;
    try {
        from_json_if(j, "command", c.command);
        if (j.contains("system")) c.system = j.at("system");
        from_json_if(j, "x20", c.x20);
        from_json_if(j, "branch", c.branch);
        from_json_if(j, "starts", c.starts);
        from_json_if(j, "landscape_sf", c.landscape_sf);
        from_json_if(j, "force", c.force);
        from_json_if(j, "envelope", c.envelope);
        from_json_if(j, "objective", c.objective);
        from_json_if(j, "sf_grid", c.sf_grid);
        from_json_if(j, "x10_grid", c.x10_grid);
        from_json_if(j, "log", c.log_grid);
        from_json_if(j, "find_critical", c.find_critical);
        from_json_if(j, "out_dir", c.out_dir);
        from_json_if(j, "jobs", c.jobs);
        opt_from_json(j, "x10", c.x10);
        opt_from_json(j, "sf", c.sf);
        opt_from_json(j, "tf", c.tf);
        opt_from_json(j, "x1f", c.x1f);
        opt_from_json(j, "driven_tf", c.driven_tf);
        opt_from_json(j, "xmax_override", c.xmax_override);
        if (j.contains("integrator")) {
            const auto& ij = j.at("integrator");
            if (ij.contains("method")) c.integrator.method = method_from(ij.at("method").get<std::string>());
            from_json_if(ij, "dt", c.integrator.dt);
            from_json_if(ij, "rel_tol", c.integrator.rel_tol);
            from_json_if(ij, "abs_tol", c.integrator.abs_tol);
            from_json_if(ij, "max_steps", c.integrator.max_steps);
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
    return c;
}

std::vector<double> parse_grid(const std::string& spec, bool logarithmic) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw DomainError("grid must be lo:hi:n, got " + spec);
    double lo, hi;
    long n;
    try {
        std::size_t p0, p1, p2;
        lo = std::stod(parts[0], &p0);
        hi = std::stod(parts[1], &p1);
        n = std::stol(parts[2], &p2);
        if (p0 != parts[0].size() || p1 != parts[1].size() || p2 != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw DomainError("grid must be lo:hi:n, got " + spec);
    }
    if (n < 1 || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("grid needs n >= 1 and finite ends");
    if (logarithmic && !(lo > 0.0 && hi > 0.0)) throw DomainError("logarithmic grid needs positive ends");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double u = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = logarithmic ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo);
    }
    if (n > 1) g.back() = hi;
    return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy-optimal synchronisation of Lienard oscillators to their limit cycle", "liensync"};
    app.set_help_flag("--help", "print help");  // -h would clash with --h
    app.require_subcommand(1);

    struct Raw {
        std::string config, preset, h, dV, sf_grid, x10_grid, branch, objective, out_dir, method, starts, cuts;
        double mu = 0, x10 = 0, x20 = 0, sf = 0, tf = 0, x1f = 0, force = 0, driven_tf = 0, xmax = 0;
        double dt = 0, rtol = 0, atol = 0;
        int jobs = 1;
    } raw;
    bool log_flag = false, critical_flag = false, envelope_flag = false;

    struct Sub {
        CLI::App* app;
        std::map<std::string, CLI::Option*> opts;
    };
    std::vector<Sub> subs;
    subs.reserve(8);  // add_sub hands out pointers into the vector
    auto add_sub = [&](const std::string& name, const std::string& help, bool state, bool time, bool sweep) {
        Sub s{app.add_subcommand(name, help), {}};
        auto* a = s.app;
        s.opts["config"] = a->add_option("--config", raw.config, "JSON run configuration");
        s.opts["preset"] = a->add_option("--preset", raw.preset, "built-in system (van_der_pol)");
        s.opts["mu"] = a->add_option("--mu", raw.mu, "damping coefficient");
        s.opts["h"] = a->add_option("--h", raw.h, "h(x) coefficients, constant first, comma separated");
        s.opts["dV"] = a->add_option("--dV", raw.dV, "V'(x) coefficients, constant first, comma separated");
        s.opts["out"] = a->add_option("--out-dir", raw.out_dir, "directory for CSV/JSON artifacts");
        s.opts["jobs"] = a->add_option("--jobs", raw.jobs, "worker threads (default $LIENSYNC_JOBS or 1)");
        s.opts["method"] = a->add_option("--method", raw.method, "integrator: rk45 or rk4");
        s.opts["dt"] = a->add_option("--dt", raw.dt, "rk4 step");
        s.opts["rtol"] = a->add_option("--rtol", raw.rtol, "rk45 relative tolerance");
        s.opts["atol"] = a->add_option("--atol", raw.atol, "rk45 absolute tolerance");
        if (state) {
            s.opts["x10"] = a->add_option("--x10", raw.x10, "initial position");
            s.opts["x20"] = a->add_option("--x20", raw.x20, "initial velocity");
        }
        if (time) {
            s.opts["sf"] = a->add_option("--sf", raw.sf, "scaled connection time t_f / mu");
            s.opts["tf"] = a->add_option("--tf", raw.tf, "connection time");
            s.opts["sf"]->excludes(s.opts["tf"]);
        }
        if (sweep) {
            s.opts["sf_grid"] = a->add_option("--sf-grid", raw.sf_grid, "s_f grid lo:hi:n");
            s.opts["x10_grid"] = a->add_option("--x10-grid", raw.x10_grid, "x10 grid lo:hi:n (nc objective)");
            s.opts["log"] = a->add_flag("--log", log_flag, "logarithmic s_f grid");
            s.opts["critical"] = a->add_flag("--find-critical", critical_flag, "locate the critical time s_f*");
            s.opts["objective"] = a->add_option("--objective", raw.objective, "nc or total");
            s.opts["xmax"] = a->add_option("--xmax-override", raw.xmax, "use this cycle amplitude (nc objective)");
        }
        subs.push_back(s);
        return &subs.back();
    };
    add_sub("validate", "check the limit-cycle existence conditions", false, false, false);
    auto* sim = add_sub("simulate", "integrate from a start point", true, true, false);
    sim->opts["force"] = sim->app->add_option("--force", raw.force, "constant driving force");
    sim->opts["driven_tf"] =
        sim->app->add_option("--driven-tf", raw.driven_tf, "also drive optimally over this time (driven.csv)");
    sim->opts["envelope"] = sim->app->add_flag("--envelope", envelope_flag, "write the small-mu envelope");
    add_sub("limit-cycle", "locate and sample the limit cycle", false, false, false);
    auto* pnc = add_sub("plan-nc", "minimal non-conservative work protocol", true, true, false);
    pnc->opts["x1f"] = pnc->app->add_option("--x1f", raw.x1f, "force the final position");
    pnc->opts["branch"] = pnc->app->add_option("--branch", raw.branch, "auto, upper, lower or both");
    pnc->opts["starts"] = pnc->app->add_option("--starts", raw.starts, "several starts x10:x20,x10:x20 (replaces --x10)");
    add_sub("plan-total", "minimal total work landscape", true, true, false);
    auto* swp = add_sub("sweep", "parameter sweeps for the work figures", true, false, true);
    swp->opts["cuts"] = swp->app->add_option("--landscape-sf", raw.cuts, "also write W(x1f) at these s_f (comma separated)");
    add_sub("verify", "run the verification suite", false, false, false);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        for (auto* s : app.get_subcommands()) out << s->help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    const Sub* active = nullptr;
    for (const auto& s : subs) {
        if (s.app->parsed()) active = &s;
    }
    auto given = [&](const char* key) {
        const auto it = active->opts.find(key);
        return it != active->opts.end() && it->second->count() > 0;
    };

    try {
        RunConfig cfg;
        if (given("config")) {
            std::ifstream f(raw.config);
            if (!f) throw UsageError("cannot read config " + raw.config);
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw UsageError(std::string("config is not valid JSON: ") + e.what());
            }
            cfg = config_from_json(j);
        } else if (const char* env = std::getenv("LIENSYNC_JOBS")) {
            try {
                cfg.jobs = std::max(1, std::stoi(env));
            } catch (const std::exception&) {
                throw UsageError("LIENSYNC_JOBS must be an integer");
            }
        }
        cfg.command = active->app->get_name();

        // System overrides.
        if (given("h") || given("dV")) {
            if (!given("h") || !given("dV")) throw UsageError("--h and --dV must be given together");
            cfg.system = {{"h", parse_coefficients(raw.h)}, {"dV", parse_coefficients(raw.dV)},
                          {"mu", cfg.system.value("mu", 0.1)}};
        }
        if (given("preset")) cfg.system = {{"preset", raw.preset}, {"mu", cfg.system.value("mu", 0.1)}};
        if (given("mu")) cfg.system["mu"] = raw.mu;

        if (given("x10")) cfg.x10 = raw.x10;
        if (given("x20")) cfg.x20 = raw.x20;
        if (given("sf")) {
            cfg.sf = raw.sf;
            cfg.tf.reset();
        }
        if (given("tf")) {
            cfg.tf = raw.tf;
            cfg.sf.reset();
        }
        if (given("x1f")) cfg.x1f = raw.x1f;
        if (given("branch")) cfg.branch = raw.branch;
        if (given("starts")) cfg.starts = raw.starts;
        if (given("cuts")) cfg.landscape_sf = raw.cuts;
        if (given("force")) cfg.force = raw.force;
        if (given("driven_tf")) cfg.driven_tf = raw.driven_tf;
        if (given("envelope")) cfg.envelope = envelope_flag;
        if (given("sf_grid")) cfg.sf_grid = raw.sf_grid;
        if (given("x10_grid")) cfg.x10_grid = raw.x10_grid;
        if (given("log")) cfg.log_grid = log_flag;
        if (given("critical")) cfg.find_critical = critical_flag;
        if (given("objective")) cfg.objective = raw.objective;
        if (given("xmax")) cfg.xmax_override = raw.xmax;
        if (given("out")) cfg.out_dir = raw.out_dir;
        if (given("jobs")) cfg.jobs = raw.jobs;
        if (given("method")) cfg.integrator.method = method_from(raw.method);
        if (given("dt")) cfg.integrator.dt = raw.dt;
        if (given("rtol")) cfg.integrator.rel_tol = raw.rtol;
        if (given("atol")) cfg.integrator.abs_tol = raw.atol;

        if (cfg.branch != "auto" && cfg.branch != "upper" && cfg.branch != "lower" && cfg.branch != "both") {
            throw UsageError("--branch must be auto, upper, lower or both");
        }
        if (cfg.jobs < 1) throw UsageError("--jobs must be at least 1");
        if (cfg.sf && cfg.tf) throw UsageError("give exactly one of --sf and --tf");
        cfg.integrator.validate();

        const auto sys = io::system_from_json(cfg.system);
        if (cfg.command != "validate") require_valid(sys);

        const fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        write_json_file(dir / "config.json", to_json(cfg));
        const Context cx{cfg, out, dir};

        int code = kExitOk;
        json summary;
        if (cfg.command == "validate") summary = cmd_validate(cx, sys, code);
        else if (cfg.command == "simulate") summary = cmd_simulate(cx, sys);
        else if (cfg.command == "limit-cycle") summary = cmd_limit_cycle(cx, sys);
        else if (cfg.command == "plan-nc") summary = cmd_plan_nc(cx, sys);
        else if (cfg.command == "plan-total") summary = cmd_plan_total(cx, sys);
        else if (cfg.command == "sweep") summary = cmd_sweep(cx, sys);
        else summary = cmd_verify(cx, sys, code);

        json full = {{"schema_version", "1"}, {"command", cfg.command}};
        full.update(summary);
        write_json_file(dir / "summary.json", full);
        out << full.dump() << '\n';
        return code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ContractViolation& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace liensync::cli
