#pragma once

#include "liensync/core.hpp"

#include <json.hpp>

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace liensync::io {

/// Shortest round-trip representation of a double ("%.17g").
[[nodiscard]] std::string format_double(double v);

/// Minimal CSV writer; numbers are written with format_double so that equal
/// inputs produce byte-identical files.
class CsvWriter {
public:
    using Cell = std::variant<double, std::string>;

    CsvWriter(std::ostream& os, std::initializer_list<std::string> header);
    void row(std::initializer_list<Cell> cells);

private:
    std::ostream& os_;
    std::size_t columns_;
};

// System definition JSON:
//   {"mu": number, "h": [c0, c1, ...], "dV": [c0, c1, ...]}
//   {"preset": "van_der_pol", "mu": number}
[[nodiscard]] LienardSystem system_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json system_to_json(const LienardSystem& sys);

}  // namespace liensync::io
