#include "liensync/io.hpp"

#include "liensync/errors.hpp"

#include <cstdio>
#include <ostream>

namespace liensync::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string> header)
    : os_(os), columns_(header.size()) {
    bool first = true;
    for (const auto& h : header) {
        if (!first) os_ << ',';
        os_ << h;
        first = false;
    }
    os_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_) throw ContractViolation("CsvWriter: wrong number of cells");
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os_ << ',';
        if (const auto* d = std::get_if<double>(&c)) {
            os_ << format_double(*d);
        } else {
            os_ << std::get<std::string>(c);
        }
        first = false;
    }
    os_ << '\n';
}

LienardSystem system_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("system definition must be a JSON object");
    if (!j.contains("mu") || !j.at("mu").is_number()) {
        throw DomainError("system definition requires numeric \"mu\"");
    }
    const double mu = j.at("mu").get<double>();
    if (j.contains("preset")) {
        const auto preset = j.at("preset").get<std::string>();
        if (preset != "van_der_pol") throw DomainError("unknown system preset: " + preset);
        return make_van_der_pol(mu);
    }
    if (!j.contains("h") || !j.contains("dV")) {
        throw DomainError("system definition requires \"h\" and \"dV\" coefficient arrays");
    }
    auto coeffs = [](const nlohmann::json& arr, const char* name) {
        if (!arr.is_array()) throw DomainError(std::string(name) + " must be an array");
        std::vector<double> out;
        for (const auto& c : arr) {
            if (!c.is_number()) throw DomainError(std::string(name) + " coefficients must be numbers");
            out.push_back(c.get<double>());
        }
        return Polynomial(std::move(out));
    };
    Polynomial h = coeffs(j.at("h"), "h");
    Polynomial dV = coeffs(j.at("dV"), "dV");
    if (h == Polynomial{-1.0, 0.0, 1.0} && dV == Polynomial{0.0, 1.0}) {
        return make_van_der_pol(mu);
    }
    return LienardSystem(mu, std::move(h), std::move(dV));
}

nlohmann::json system_to_json(const LienardSystem& sys) {
    nlohmann::json j;
    j["mu"] = sys.mu();
    j["h"] = sys.h().coefficients();
    j["dV"] = sys.dV().coefficients();
    return j;
}

}  // namespace liensync::io
