#pragma once

#include "liensync/integrate.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace liensync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Everything a run needs; serialises to and from JSON (--config).
struct RunConfig {
    std::string command;
    nlohmann::json system = {{"preset", "van_der_pol"}, {"mu", 0.1}};

    std::optional<double> x10;
    double x20 = 0.0;
    std::optional<double> sf;
    std::optional<double> tf;
    std::optional<double> x1f;
    std::string branch = "auto";  // auto | upper | lower | both
    std::string starts;           // plan-nc: several starts "x10:x20,x10:x20"

    // simulate
    double force = 0.0;
    std::optional<double> driven_tf;
    bool envelope = false;

    // sweep
    std::string objective = "total";  // total | nc
    std::string sf_grid;
    std::string x10_grid;
    bool log_grid = false;
    bool find_critical = false;
    std::optional<double> xmax_override;
    std::string landscape_sf;  // total objective: also write W(x1f) at these s_f

    std::string out_dir = ".";
    int jobs = 1;
    IntegratorConfig integrator = IntegratorConfig::verification();

    /// DomainError when both sf and tf are set.
    [[nodiscard]] std::optional<double> scaled_time(double mu) const;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);
[[nodiscard]] RunConfig config_from_json(const nlohmann::json& j);

/// lo:hi:n, uniform or logarithmic. DomainError on malformed input.
[[nodiscard]] std::vector<double> parse_grid(const std::string& spec, bool logarithmic);

/// Runs a subcommand; argv excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace liensync::cli
