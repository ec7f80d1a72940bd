#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace liensync {

/// Real polynomial, coefficients stored constant term first. Trailing zero
/// coefficients are dropped on construction, so the zero polynomial has an
/// empty coefficient list and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients);

    /// Horner evaluation.
    [[nodiscard]] double operator()(double x) const noexcept;

    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] double coefficient(std::size_t i) const noexcept {
        return i < coeffs_.size() ? coeffs_[i] : 0.0;
    }

    [[nodiscard]] Polynomial derivative() const;
    /// Term-wise antiderivative with zero constant of integration.
    [[nodiscard]] Polynomial antiderivative() const;

    /// All odd-index coefficients exactly zero.
    [[nodiscard]] bool is_even() const noexcept;
    /// All even-index coefficients exactly zero.
    [[nodiscard]] bool is_odd() const noexcept;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coeffs_;
};

}  // namespace liensync
