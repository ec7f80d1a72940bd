#include "liensync/polynomial.hpp"

#include "liensync/errors.hpp"

#include <cmath>
#include <sstream>

namespace liensync {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw DomainError("polynomial coefficients must be finite");
        }
    }
    while (!coeffs_.empty() && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : Polynomial(std::vector<double>(coefficients)) {}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) {
        return {};
    }
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        d[i - 1] = static_cast<double>(i) * coeffs_[i];
    }
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    if (coeffs_.empty()) {
        return {};
    }
    std::vector<double> a(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    }
    return Polynomial(std::move(a));
}

bool Polynomial::is_even() const noexcept {
    for (std::size_t i = 1; i < coeffs_.size(); i += 2) {
        if (coeffs_[i] != 0.0) return false;
    }
    return true;
}

bool Polynomial::is_odd() const noexcept {
    for (std::size_t i = 0; i < coeffs_.size(); i += 2) {
        if (coeffs_[i] != 0.0) return false;
    }
    return true;
}

std::string Polynomial::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        if (!first) os << " + ";
        os << coeffs_[i];
        if (i == 1) os << "*x";
        if (i > 1) os << "*x^" << i;
        first = false;
    }
    return os.str();
}

}  // namespace liensync
