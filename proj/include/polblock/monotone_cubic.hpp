#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace polblock::spectral {

// Piecewise cubic Hermite interpolant with Fritsch-Butland slopes (PCHIP) on
// a uniform grid x_i = x0 + i h. Preserves monotonicity of the data.
class MonotoneCubic {
public:
    MonotoneCubic(double x0, double h, std::vector<double> y);

    double x0() const noexcept { return x0_; }
    double h() const noexcept { return h_; }
    double x_end() const noexcept { return x0_ + h_ * static_cast<double>(y_.size() - 1); }
    std::size_t panels() const noexcept { return y_.size() - 1; }
    const std::vector<double>& values() const noexcept { return y_; }

    // Requires x0 <= x <= x_end.
    double operator()(double x) const;

    // p(s) = c[0] + c[1] s + c[2] s^2 + c[3] s^3 for s in [0, h] on panel i.
    std::array<double, 4> panel(std::size_t i) const;

    std::size_t panel_index(double x) const;

    double integral() const;
    // int x p(x) dx over the whole grid
    double first_moment() const;

private:
    double x0_, h_;
    std::vector<double> y_;
    std::vector<double> d_;
};

} // namespace polblock::spectral
